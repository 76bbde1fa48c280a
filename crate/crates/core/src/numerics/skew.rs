//! Real canonical form of a real skew-symmetric matrix.

use super::decomp::lu_determinant;
use super::eigen::hermitian_eig;
use super::matrix::ComplexMatrix;
use super::scalar::{bound, Complex, Real};
use crate::error::{Error, Result};

/// `R A R^T = [[0, Diag(eps)], [-Diag(eps), 0]]` with `R` real orthogonal.
#[derive(Clone, Debug)]
pub struct SkewCanonicalForm<T> {
    /// Real orthogonal, stored with zero imaginary parts.
    pub rotation: ComplexMatrix<T>,
    /// Nonnegative, ascending.
    pub epsilons: Vec<T>,
}

impl<T: Real> SkewCanonicalForm<T> {
    pub fn canonical_matrix(&self) -> ComplexMatrix<T> {
        let n = self.epsilons.len();
        let mut m = ComplexMatrix::zeros(2 * n, 2 * n);
        for (k, &e) in self.epsilons.iter().enumerate() {
            m[(k, n + k)] = Complex::new(e, T::zero());
            m[(n + k, k)] = Complex::new(-e, T::zero());
        }
        m
    }

    /// `det R`, snapped to the nearest of -1 and +1.
    pub fn rotation_sign(&self) -> Result<i8> {
        let d = lu_determinant(&self.rotation)?;
        Ok(if d.re < T::zero() { -1 } else { 1 })
    }
}

pub fn skew_real_canonical<T: Real>(a: &ComplexMatrix<T>) -> Result<SkewCanonicalForm<T>> {
    if !a.is_square() || a.rows() % 2 == 1 {
        return Err(Error::ShapeMismatch(format!(
            "skew canonical form needs even square input, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let dim = a.rows();
    let n = dim / 2;
    let scale = a.max_abs();
    let imag = a.max_imag();
    if imag > bound(1e-12, scale) {
        return Err(Error::NotRealSkew { residual: imag.to_f64_lossy() });
    }
    let skew = a.real_part().skew_residual();
    if skew > bound(1e-10, scale) {
        return Err(Error::NotRealSkew { residual: skew.to_f64_lossy() });
    }
    let half = T::lit(0.5);
    // i A is Hermitian; its +eps eigenvectors x + i y give A x = eps y, A y = -eps x.
    let ia = ComplexMatrix::from_fn(dim, dim, |i, j| Complex::new(T::zero(), (a[(i, j)].re - a[(j, i)].re) * half));
    let eig = hermitian_eig(&ia)?;
    let cut = bound(1e-10, scale);
    let sqrt2 = T::lit(2.0).sqrt();

    let mut positive: Vec<(T, Vec<T>, Vec<T>)> = Vec::new();
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam > cut {
            let col = eig.eigenvectors.column(k);
            let x: Vec<T> = col.iter().map(|z| z.re * sqrt2).collect();
            let y: Vec<T> = col.iter().map(|z| z.im * sqrt2).collect();
            positive.push((lam, y, x));
        }
    }
    // Only the largest n can be genuine; anything beyond is noise at the cutoff.
    if positive.len() > n {
        positive.drain(0..positive.len() - n);
    }
    let zeros = n - positive.len();

    let mut basis: Vec<Vec<T>> = Vec::with_capacity(dim);
    for (_, y, x) in &positive {
        for v in [y, x] {
            let w = orthogonalize(v.clone(), &basis);
            basis.push(normalize(w));
        }
    }
    let mut completion = Vec::with_capacity(2 * zeros);
    for _ in 0..2 * zeros {
        let mut best: Option<(T, Vec<T>)> = None;
        // Interleaved scan so that a zero input yields the identity.
        for j in (0..n).flat_map(|k| [k, n + k]) {
            let mut e = vec![T::zero(); dim];
            e[j] = T::one();
            let w = orthogonalize(orthogonalize(e, &basis), &completion);
            let nrm = norm(&w);
            if best.as_ref().is_none_or(|(b, _)| nrm > *b) {
                best = Some((nrm, w));
            }
        }
        let (_, w) = best.expect("nonempty candidate set");
        completion.push(normalize(w));
    }

    let mut rotation = ComplexMatrix::zeros(dim, dim);
    let mut epsilons = Vec::with_capacity(n);
    let put = |r: &mut ComplexMatrix<T>, row: usize, v: &[T]| {
        for (j, &x) in v.iter().enumerate() {
            r[(row, j)] = Complex::new(x, T::zero());
        }
    };
    for k in 0..zeros {
        put(&mut rotation, k, &completion[2 * k]);
        put(&mut rotation, n + k, &completion[2 * k + 1]);
        epsilons.push(T::zero());
    }
    for (j, (lam, _, _)) in positive.iter().enumerate() {
        let k = zeros + j;
        put(&mut rotation, k, &basis[2 * j]);
        put(&mut rotation, n + k, &basis[2 * j + 1]);
        epsilons.push(*lam);
    }
    Ok(SkewCanonicalForm { rotation, epsilons })
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

fn normalize<T: Real>(mut v: Vec<T>) -> Vec<T> {
    let n = norm(&v);
    if n > T::zero() {
        v.iter_mut().for_each(|x| *x /= n);
    }
    v
}

/// Two passes of modified Gram–Schmidt against `basis`.
fn orthogonalize<T: Real>(mut v: Vec<T>, basis: &[Vec<T>]) -> Vec<T> {
    for _ in 0..2 {
        for b in basis {
            let c = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * *y);
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::random_real_skew;

    fn check(a: &ComplexMatrix<f64>, f: &SkewCanonicalForm<f64>) {
        let r = &f.rotation;
        assert!((r * &r.transpose()).max_diff(&ComplexMatrix::identity(r.rows())) <= 1e-10);
        let c = &(r * a) * &r.transpose();
        assert!(c.max_diff(&f.canonical_matrix()) <= 1e-9 * a.max_abs().max(1.0));
        assert!(f.epsilons.windows(2).all(|w| w[0] <= w[1]));
        assert!(f.epsilons.iter().all(|&e| e >= 0.0));
    }

    #[test]
    fn two_by_two_and_zero() {
        let a = ComplexMatrix::<f64>::from_real_rows(&[vec![0.0, 0.7], vec![-0.7, 0.0]]);
        let f = skew_real_canonical(&a).unwrap();
        assert!((f.epsilons[0] - 0.7).abs() < 1e-14);
        check(&a, &f);
        let z = ComplexMatrix::<f64>::zeros(4, 4);
        let f = skew_real_canonical(&z).unwrap();
        assert_eq!(f.epsilons, vec![0.0, 0.0]);
        assert!(f.rotation.max_diff(&ComplexMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        let a = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(skew_real_canonical(&a).is_err());
        let mut c = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]);
        c[(0, 1)].im = 0.5;
        assert!(skew_real_canonical(&c).is_err());
    }

    #[test]
    fn random_instances() {
        for seed in 0..20 {
            let a = random_real_skew::<f64>(6, seed);
            check(&a, &skew_real_canonical(&a).unwrap());
        }
    }

    #[test]
    fn rank_deficient_instance() {
        // Embed a 4x4 skew block in 8x8: four exact zero modes.
        let small = random_real_skew::<f64>(4, 5);
        let mut a = ComplexMatrix::zeros(8, 8);
        a.set_block(2, 2, &small);
        let f = skew_real_canonical(&a).unwrap();
        check(&a, &f);
        assert_eq!(f.epsilons.iter().filter(|&&e| e == 0.0).count(), 2);
    }
}
