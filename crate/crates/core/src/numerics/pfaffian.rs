//! Pfaffian by Parlett–Reid skew tridiagonalization with partial pivoting.

use super::matrix::ComplexMatrix;
use super::scalar::{Complex, Real};
use crate::error::{Error, Result};

pub fn pfaffian<T: Real>(a: &ComplexMatrix<T>) -> Result<Complex<T>> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch(format!("Pfaffian of a {}x{} matrix", a.rows(), a.cols())));
    }
    let n = a.rows();
    let one = Complex::new(T::one(), T::zero());
    if n % 2 == 1 {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    if n == 0 {
        return Ok(one);
    }
    let half = T::lit(0.5);
    let mut m = ComplexMatrix::from_fn(n, n, |i, j| (a[(i, j)] - a[(j, i)]) * half);
    let mut pf = one;
    for k in (0..n - 1).step_by(2) {
        let mut kp = k + 1;
        let mut best = m[(k + 1, k)].norm();
        for i in k + 2..n {
            let v = m[(i, k)].norm();
            if v > best {
                best = v;
                kp = i;
            }
        }
        if kp != k + 1 {
            m.swap_rows(k + 1, kp);
            m.swap_cols(k + 1, kp);
            pf = -pf;
        }
        if best == T::zero() {
            return Ok(Complex::new(T::zero(), T::zero()));
        }
        let pivot = m[(k, k + 1)];
        pf *= pivot;
        if k + 2 < n {
            let tau: Vec<Complex<T>> = (k + 2..n).map(|j| m[(k, j)] / pivot).collect();
            let col: Vec<Complex<T>> = (k + 2..n).map(|i| m[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    let upd = tau[ii] * col[jj] - col[ii] * tau[jj];
                    m[(i, j)] += upd;
                }
            }
        }
    }
    Ok(pf)
}
