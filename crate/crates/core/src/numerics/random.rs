//! Seeded random matrices for experiments and tests.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::decomp::householder_qr;
use super::matrix::ComplexMatrix;
use super::scalar::{Complex, Real};

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn lift<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("finite sample")
}

/// Real matrix with iid standard normal entries.
pub fn gaussian_real<T: Real>(rows: usize, cols: usize, seed: u64) -> ComplexMatrix<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexMatrix::from_fn(rows, cols, |_, _| Complex::new(lift(gaussian(&mut rng)), T::zero()))
}

/// Complex matrix with iid standard normal real and imaginary parts.
pub fn gaussian_complex<T: Real>(rows: usize, cols: usize, seed: u64) -> ComplexMatrix<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re = gaussian(&mut rng);
        Complex::new(lift(re), lift(gaussian(&mut rng)))
    })
}

pub fn random_hermitian<T: Real>(n: usize, seed: u64) -> ComplexMatrix<T> {
    let g = gaussian_complex::<T>(n, n, seed);
    (&g + &g.adjoint()).scale_real(T::lit(0.5))
}

/// Complex skew-symmetric (`A^T = -A`).
pub fn random_skew<T: Real>(n: usize, seed: u64) -> ComplexMatrix<T> {
    let g = gaussian_complex::<T>(n, n, seed);
    (&g - &g.transpose()).scale_real(T::lit(0.5))
}

pub fn random_real_skew<T: Real>(n: usize, seed: u64) -> ComplexMatrix<T> {
    let g = gaussian_real::<T>(n, n, seed);
    (&g - &g.transpose()).scale_real(T::lit(0.5))
}

pub fn random_unitary<T: Real>(n: usize, seed: u64) -> ComplexMatrix<T> {
    householder_qr(&gaussian_complex::<T>(n, n, seed)).0
}

/// `r × n` with orthonormal rows.
pub fn random_orthonormal_rows<T: Real>(r: usize, n: usize, seed: u64) -> ComplexMatrix<T> {
    random_unitary::<T>(n, seed).block(0, 0, n, r).adjoint()
}

/// Hermitian with spectrum drawn uniformly from `(lo, hi)`.
pub fn random_kernel<T: Real>(n: usize, lo: f64, hi: f64, seed: u64) -> ComplexMatrix<T> {
    let u = random_unitary::<T>(n, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let spec: Vec<T> = (0..n).map(|_| lift(rand::Rng::gen_range(&mut rng, lo..hi))).collect();
    &(&u * &ComplexMatrix::from_real_diag(&spec)) * &u.adjoint()
}
