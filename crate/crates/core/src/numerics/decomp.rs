//! LU determinant, Householder QR and one-sided Jacobi SVD.

use super::eigen::{jacobi_block, MAX_SWEEPS};
use super::matrix::ComplexMatrix;
use super::scalar::{Complex, Real};
use crate::error::{Error, Result};

/// Determinant by LU with partial pivoting.
pub fn lu_determinant<T: Real>(a: &ComplexMatrix<T>) -> Result<Complex<T>> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch(format!("determinant of a {}x{} matrix", a.rows(), a.cols())));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut det = Complex::new(T::one(), T::zero());
    for k in 0..n {
        let mut p = k;
        for i in k + 1..n {
            if m[(i, k)].norm() > m[(p, k)].norm() {
                p = i;
            }
        }
        if m[(p, k)].norm() == T::zero() {
            return Ok(Complex::new(T::zero(), T::zero()));
        }
        if p != k {
            m.swap_rows(p, k);
            det = -det;
        }
        let pivot = m[(k, k)];
        det *= pivot;
        for i in k + 1..n {
            let f = m[(i, k)] / pivot;
            if f.norm() == T::zero() {
                continue;
            }
            for j in k + 1..n {
                let upd = f * m[(k, j)];
                m[(i, j)] -= upd;
            }
        }
    }
    Ok(det)
}

/// Full Householder QR: `A = Q R` with `Q` unitary `m × m` and `R` upper trapezoidal.
pub fn householder_qr<T: Real>(a: &ComplexMatrix<T>) -> (ComplexMatrix<T>, ComplexMatrix<T>) {
    let (m, n) = (a.rows(), a.cols());
    let mut r = a.clone();
    let mut q = ComplexMatrix::identity(m);
    for k in 0..n.min(m.saturating_sub(1)) {
        let norm_x = (k..m).map(|i| r[(i, k)].norm_sqr()).sum::<T>().sqrt();
        if norm_x == T::zero() {
            continue;
        }
        let x0 = r[(k, k)];
        let ph = if x0.norm() == T::zero() { Complex::new(T::one(), T::zero()) } else { x0 / x0.norm() };
        let alpha = -ph * norm_x;
        let mut v: Vec<Complex<T>> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if vn == T::zero() {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        let two = T::lit(2.0);
        for j in 0..n {
            let s: Complex<T> = v.iter().enumerate().map(|(t, vi)| vi.conj() * r[(k + t, j)]).sum();
            for (t, vi) in v.iter().enumerate() {
                r[(k + t, j)] -= *vi * s * two;
            }
        }
        for i in 0..m {
            let s: Complex<T> = v.iter().enumerate().map(|(t, vi)| q[(i, k + t)] * *vi).sum();
            for (t, vi) in v.iter().enumerate() {
                q[(i, k + t)] -= s * vi.conj() * two;
            }
        }
    }
    (q, r)
}

/// Thin SVD `A = U Diag(sigma) V*` with `sigma` descending.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    pub u: ComplexMatrix<T>,
    pub sigma: Vec<T>,
    pub v: ComplexMatrix<T>,
}

impl<T: Real> Svd<T> {
    /// Count of singular values above `rel * sigma_max`.
    pub fn numerical_rank(&self, rel: T) -> usize {
        let top = self.sigma.first().copied().unwrap_or(T::zero());
        if top == T::zero() {
            return 0;
        }
        self.sigma.iter().filter(|&&s| s > rel * top).count()
    }
}

/// One-sided Jacobi SVD; accurate for small singular values, which rank decisions rely on.
pub fn svd<T: Real>(a: &ComplexMatrix<T>) -> Result<Svd<T>> {
    if a.rows() < a.cols() {
        let t = svd(&a.adjoint())?;
        return Ok(Svd { u: t.v, sigma: t.sigma, v: t.u });
    }
    let (m, n) = (a.rows(), a.cols());
    let mut u = a.clone();
    let mut v = ComplexMatrix::identity(n);
    let tol = T::tol(1e-15);
    let mut done = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), Complex::new(T::zero(), T::zero()));
                for k in 0..m {
                    alpha += u[(k, p)].norm_sqr();
                    beta += u[(k, q)].norm_sqr();
                    gamma += u[(k, p)].conj() * u[(k, q)];
                }
                if gamma.norm() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                let Some([vpp, vpq, vqp, vqq]) = jacobi_block(alpha, beta, gamma) else { continue };
                rotated = true;
                for mat in [&mut u, &mut v] {
                    for k in 0..mat.rows() {
                        let (x, y) = (mat[(k, p)], mat[(k, q)]);
                        mat[(k, p)] = x * vpp + y * vqp;
                        mat[(k, q)] = x * vpq + y * vqq;
                    }
                }
            }
        }
        if !rotated {
            done = true;
            break;
        }
    }
    if !done {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }
    let norms: Vec<T> = (0..n).map(|j| (0..m).map(|k| u[(k, j)].norm_sqr()).sum::<T>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));
    let sigma: Vec<T> = order.iter().map(|&j| norms[j]).collect();
    let uu = ComplexMatrix::from_fn(m, n, |i, j| {
        let s = sigma[j];
        if s > T::zero() {
            u[(i, order[j])] / s
        } else {
            Complex::new(T::zero(), T::zero())
        }
    });
    let vv = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(Svd { u: uu, sigma, v: vv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::gaussian_complex;
    use crate::numerics::scalar::cplx;

    #[test]
    fn determinant_of_known_matrices() {
        let a = ComplexMatrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        assert!((lu_determinant(&a).unwrap() - cplx(5.0, 0.0)).norm() < 1e-14);
        let p = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!((lu_determinant(&p).unwrap() + cplx(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn householder_factors() {
        let a = gaussian_complex::<f64>(5, 3, 1);
        let (q, r) = householder_qr(&a);
        assert!((&q.adjoint() * &q).max_diff(&ComplexMatrix::identity(5)) < 1e-13);
        assert!((&q * &r).max_diff(&a) < 1e-13);
        for i in 0..5 {
            for j in 0..i.min(3) {
                assert!(r[(i, j)].norm() < 1e-13);
            }
        }
    }

    #[test]
    fn svd_reconstructs_and_ranks() {
        for (m, n) in [(6, 3), (3, 6), (4, 4)] {
            let a = gaussian_complex::<f64>(m, n, (m * 10 + n) as u64);
            let s = svd(&a).unwrap();
            let k = m.min(n);
            let recon = &(&s.u * &ComplexMatrix::from_real_diag(&s.sigma[..k])) * &s.v.block(0, 0, n, k).adjoint();
            assert!(recon.max_diff(&a) < 1e-12, "{m}x{n}");
            assert!(s.sigma.windows(2).all(|w| w[0] >= w[1]));
        }
        // Rank 1 outer product.
        let x = gaussian_complex::<f64>(5, 1, 3);
        let y = gaussian_complex::<f64>(1, 4, 4);
        let s = svd(&(&x * &y)).unwrap();
        assert_eq!(s.numerical_rank(1e-10), 1);
    }
}
