//! Cyclic complex Jacobi for Hermitian matrices.

use super::matrix::ComplexMatrix;
use super::scalar::{bound, Complex, Real};
use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug)]
pub struct HermitianEig<T> {
    /// Ascending.
    pub eigenvalues: Vec<T>,
    /// Column `k` pairs with `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEig<T> {
    /// `U f(Lambda) U*` for a real function.
    pub fn apply(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        self.apply_complex(|x| Complex::new(f(x), T::zero()))
    }

    pub fn apply_complex(&self, f: impl Fn(T) -> Complex<T>) -> ComplexMatrix<T> {
        let u = &self.eigenvectors;
        let n = u.rows();
        let fl: Vec<Complex<T>> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| (0..fl.len()).map(|k| u[(i, k)] * fl[k] * u[(j, k)].conj()).sum())
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.apply(|x| x)
    }
}

pub fn hermitian_eig<T: Real>(h: &ComplexMatrix<T>) -> Result<HermitianEig<T>> {
    if !h.is_square() {
        return Err(Error::ShapeMismatch(format!("eigendecomposition of a {}x{} matrix", h.rows(), h.cols())));
    }
    let n = h.rows();
    let residual = h.hermitian_residual();
    if residual > bound(1e-8, h.max_abs()) {
        return Err(Error::NotHermitian { residual: residual.to_f64_lossy() });
    }
    let half = T::lit(0.5);
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * half);
    let mut u = ComplexMatrix::identity(n);
    let target = T::tol(1e-12) * a.frobenius();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if let Some(v) = jacobi_block(a[(p, p)].re, a[(q, q)].re, a[(p, q)]) {
                    rotate_hermitian(&mut a, &mut u, p, q, v);
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap_or(std::cmp::Ordering::Equal));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| u[(i, order[j])]);
    Ok(HermitianEig { eigenvalues, eigenvectors })
}

fn off_diagonal_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    let mut s = T::zero();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Unitary `V` on the `(p, q)` plane with `V* [[app, apq], [conj(apq), aqq]] V` diagonal,
/// returned as `[vpp, vpq, vqp, vqq]`. `None` when the pair is already decoupled.
pub(crate) fn jacobi_block<T: Real>(app: T, aqq: T, apq: Complex<T>) -> Option<[Complex<T>; 4]> {
    let mag = apq.norm();
    if mag == T::zero() {
        return None;
    }
    // Strip the phase of apq, then run a real symmetric rotation.
    let e = (apq / mag).conj();
    let tau = (aqq - app) / (mag + mag);
    let sign = if tau >= T::zero() { T::one() } else { -T::one() };
    let t = sign / (tau.abs() + (T::one() + tau * tau).sqrt());
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    let z = T::zero();
    Some([Complex::new(c, z), Complex::new(s, z), e * (-s), e * c])
}

fn rotate_hermitian<T: Real>(
    a: &mut ComplexMatrix<T>,
    u: &mut ComplexMatrix<T>,
    p: usize,
    q: usize,
    v: [Complex<T>; 4],
) {
    let n = a.rows();
    let [vpp, vpq, vqp, vqq] = v;
    for k in 0..n {
        let (x, y) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = x * vpp + y * vqp;
        a[(k, q)] = x * vpq + y * vqq;
    }
    for k in 0..n {
        let (x, y) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = vpp.conj() * x + vqp.conj() * y;
        a[(q, k)] = vpq.conj() * x + vqq.conj() * y;
    }
    let z = Complex::new(T::zero(), T::zero());
    a[(p, q)] = z;
    a[(q, p)] = z;
    a[(p, p)].im = T::zero();
    a[(q, q)].im = T::zero();
    for k in 0..u.rows() {
        let (x, y) = (u[(k, p)], u[(k, q)]);
        u[(k, p)] = x * vpp + y * vqp;
        u[(k, q)] = x * vpq + y * vqq;
    }
}

/// `f(H) = U Diag(f(lambda)) U*`.
pub fn matrix_function_hermitian<T: Real>(h: &ComplexMatrix<T>, f: impl Fn(T) -> T) -> Result<ComplexMatrix<T>> {
    Ok(hermitian_eig(h)?.apply(f))
}

/// Complex-valued spectral function, e.g. `exp(i t H)`.
pub fn matrix_function_hermitian_complex<T: Real>(
    h: &ComplexMatrix<T>,
    f: impl Fn(T) -> Complex<T>,
) -> Result<ComplexMatrix<T>> {
    Ok(hermitian_eig(h)?.apply_complex(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::random_hermitian;
    use crate::numerics::scalar::cplx;
    use proptest::prelude::*;

    fn check(h: &ComplexMatrix<f64>, eig: &HermitianEig<f64>) {
        let n = h.rows();
        let u = &eig.eigenvectors;
        assert!((&u.adjoint() * u).max_diff(&ComplexMatrix::identity(n)) <= 1e-10);
        assert!(eig.reconstruct().max_diff(h) <= 1e-9 * h.max_abs().max(1.0));
        assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn identity_and_diagonal() {
        let e = hermitian_eig(&ComplexMatrix::<f64>::identity(5)).unwrap();
        assert!(e.eigenvalues.iter().all(|&x| (x - 1.0).abs() < 1e-15));
        let d = ComplexMatrix::from_real_diag(&[3.0, 1.0, 2.0]);
        let e = hermitian_eig(&d).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 2.0, 3.0]);
        check(&d, &e);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn analytic_two_by_two() {
        // [[a, b], [conj b, d]] has eigenvalues (a+d)/2 -+ sqrt(((a-d)/2)^2 + |b|^2).
        let (a, d, b) = (0.3f64, -1.2f64, cplx(0.4, -0.9));
        let h = ComplexMatrix::from_vec(2, 2, vec![cplx(a, 0.0), b, b.conj(), cplx(d, 0.0)]).unwrap();
        let e = hermitian_eig(&h).unwrap();
        let m = (a + d) / 2.0;
        let r = (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt();
        assert!((e.eigenvalues[0] - (m - r)).abs() < 1e-10);
        assert!((e.eigenvalues[1] - (m + r)).abs() < 1e-10);
    }

    #[test]
    fn analytic_three_by_three() {
        // Tridiagonal Toeplitz: eigenvalues 2 - 2 cos(k pi / 4), k = 1..3.
        let h = ComplexMatrix::from_real_rows(&[vec![2.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 2.0]]);
        let e = hermitian_eig(&h).unwrap();
        for (k, &x) in e.eigenvalues.iter().enumerate() {
            let want = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / 4.0).cos();
            assert!((x - want).abs() < 1e-10, "{x} vs {want}");
        }
    }

    #[test]
    fn random_eight_by_eight() {
        let h = random_hermitian(8, 11);
        let e = hermitian_eig(&h).unwrap();
        check(&h, &e);
    }

    #[test]
    fn single_precision_path() {
        let h: ComplexMatrix<f32> = random_hermitian::<f64>(6, 2).cast();
        let e = hermitian_eig(&h).unwrap();
        assert!(e.reconstruct().max_diff(&h) < 1e-4);
    }

    #[test]
    fn matrix_functions() {
        let h = random_hermitian::<f64>(5, 3);
        assert!(matrix_function_hermitian(&h, |x: f64| x).unwrap().max_diff(&h) < 1e-10);
        let z = ComplexMatrix::<f64>::zeros(3, 3);
        let s = matrix_function_hermitian(&z, |x| 1.0 / (1.0 + (-x).exp())).unwrap();
        assert!(s.max_diff(&ComplexMatrix::identity(3).scale_real(0.5)) < 1e-15);
        let psd = &h * &h.adjoint();
        let root = matrix_function_hermitian(&psd, |x| x.max(0.0).sqrt()).unwrap();
        assert!((&root * &root).max_diff(&psd) < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn random_reconstruction(n in 1usize..9, seed in 0u64..10_000) {
            let h = random_hermitian(n, seed);
            let e = hermitian_eig(&h).unwrap();
            check(&h, &e);
        }
    }
}
