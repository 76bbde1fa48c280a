//! Two-mode rotations
//!
//! `G(l1, l2, theta, phi)` is the identity except on rows/columns `l1 < l2`, where it is
//!
//! ```text
//! [  cos(theta)              e^{-i phi} sin(theta) ]
//! [ -e^{i phi} sin(theta)    cos(theta)            ]
//! ```
//!
//! Indices are 0-based here; the JSON and CSV formats shift them to 1-based.

use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;
use super::scalar::{phase, wrap_angle, Complex, Real};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GivensRotation<T> {
    pub l1: usize,
    pub l2: usize,
    pub theta: T,
    pub phi: T,
}

impl<T: Real> GivensRotation<T> {
    pub fn new(l1: usize, l2: usize, theta: T, phi: T) -> Result<Self> {
        if l1 >= l2 {
            return Err(Error::InvalidArgument(format!("rotation needs l1 < l2, got ({l1}, {l2})")));
        }
        Ok(Self { l1, l2, theta, phi })
    }

    /// The 2×2 block `[[g11, g12], [g21, g22]]`.
    pub fn block(&self) -> [[Complex<T>; 2]; 2] {
        let (s, c) = self.theta.sin_cos();
        let e = phase(self.phi);
        [[Complex::new(c, T::zero()), e.conj() * s], [-e * s, Complex::new(c, T::zero())]]
    }

    /// Adjoint rotation, kept inside the parameter ranges.
    pub fn inverse(&self) -> Self {
        Self { phi: wrap_angle(self.phi + T::PI()), ..*self }
    }

    /// Full `n × n` matrix.
    pub fn embed(&self, n: usize) -> ComplexMatrix<T> {
        let mut g = ComplexMatrix::identity(n);
        let b = self.block();
        g[(self.l1, self.l1)] = b[0][0];
        g[(self.l1, self.l2)] = b[0][1];
        g[(self.l2, self.l1)] = b[1][0];
        g[(self.l2, self.l2)] = b[1][1];
        g
    }

    pub fn touches(&self, k: usize) -> bool {
        self.l1 == k || self.l2 == k
    }

    pub fn cast<U: Real>(&self) -> GivensRotation<U> {
        let f = |x: T| U::from_f64(x.to_f64_lossy()).unwrap_or_else(U::nan);
        GivensRotation { l1: self.l1, l2: self.l2, theta: f(self.theta), phi: f(self.phi) }
    }
}

/// `(theta, phi)` such that `G (x, y)^T = (r, 0)^T`.
pub fn givens_params_to_zero<T: Real>(x: Complex<T>, y: Complex<T>) -> Result<(T, T)> {
    let (ax, ay) = (x.norm(), y.norm());
    if ax == T::zero() && ay == T::zero() {
        return Err(Error::DegenerateInput("both entries are zero".into()));
    }
    if ay == T::zero() {
        return Ok((T::zero(), T::zero()));
    }
    if ax == T::zero() {
        return Ok((T::FRAC_PI_2(), T::zero()));
    }
    let theta = ay.atan2(ax);
    let phi = wrap_angle((x.conj() * y).arg());
    Ok((theta, phi))
}

/// `(theta, phi)` such that `G (x, y)^T = (0, r)^T`.
pub fn givens_params_to_zero_first<T: Real>(x: Complex<T>, y: Complex<T>) -> Result<(T, T)> {
    let (ax, ay) = (x.norm(), y.norm());
    if ax == T::zero() && ay == T::zero() {
        return Err(Error::DegenerateInput("both entries are zero".into()));
    }
    if ax == T::zero() {
        return Ok((T::zero(), T::zero()));
    }
    if ay == T::zero() {
        return Ok((T::FRAC_PI_2(), T::zero()));
    }
    let theta = ax.atan2(ay);
    let phi = wrap_angle((-(x.conj() * y)).arg());
    Ok((theta, phi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `M <- G M` acts on rows.
    Left,
    /// `M <- M G` acts on columns.
    Right,
}

/// In-place `G M`, `G* M`, `M G` or `M G*`.
pub fn apply_givens_in_place<T: Real>(
    m: &mut ComplexMatrix<T>,
    rot: &GivensRotation<T>,
    side: Side,
    adjoint: bool,
) -> Result<()> {
    let dim = match side {
        Side::Left => m.rows(),
        Side::Right => m.cols(),
    };
    if rot.l2 >= dim {
        return Err(Error::IndexOutOfRange { index: rot.l2, dim });
    }
    if rot.l1 >= rot.l2 {
        return Err(Error::InvalidArgument("rotation needs l1 < l2".into()));
    }
    let mut g = rot.block();
    if adjoint {
        g = [[g[0][0].conj(), g[1][0].conj()], [g[0][1].conj(), g[1][1].conj()]];
    }
    let (a, b) = (rot.l1, rot.l2);
    match side {
        Side::Left => {
            for j in 0..m.cols() {
                let (x, y) = (m[(a, j)], m[(b, j)]);
                m[(a, j)] = g[0][0] * x + g[0][1] * y;
                m[(b, j)] = g[1][0] * x + g[1][1] * y;
            }
        }
        Side::Right => {
            for i in 0..m.rows() {
                let (x, y) = (m[(i, a)], m[(i, b)]);
                m[(i, a)] = x * g[0][0] + y * g[1][0];
                m[(i, b)] = x * g[0][1] + y * g[1][1];
            }
        }
    }
    Ok(())
}

pub fn apply_givens<T: Real>(
    m: &ComplexMatrix<T>,
    rot: &GivensRotation<T>,
    side: Side,
    adjoint: bool,
) -> Result<ComplexMatrix<T>> {
    let mut out = m.clone();
    apply_givens_in_place(&mut out, rot, side, adjoint)?;
    Ok(out)
}

/// Rotation on columns `(l1, l2)` that, applied as `row <- row G*`, zeroes column `kill` of
/// `row` and moves its weight into the other column.
pub fn right_rotation_zeroing<T: Real>(
    row: &[Complex<T>],
    l1: usize,
    l2: usize,
    kill: usize,
) -> Result<GivensRotation<T>> {
    // row G* = conj(G conj(row)), so solve the left problem on the conjugated pair.
    let (x, y) = (row[l1].conj(), row[l2].conj());
    let (theta, phi) = if kill == l2 {
        givens_params_to_zero(x, y)?
    } else {
        debug_assert_eq!(kill, l1);
        givens_params_to_zero_first(x, y)?
    };
    GivensRotation::new(l1, l2, theta, phi)
}

/// Rotation on rows `(l1, l2)` that, applied as `M <- G M`, zeroes row `kill` at the column
/// whose entries are `(x, y) = (M[l1][c], M[l2][c])`.
pub fn left_rotation_zeroing<T: Real>(
    x: Complex<T>,
    y: Complex<T>,
    l1: usize,
    l2: usize,
    kill: usize,
) -> Result<GivensRotation<T>> {
    let (theta, phi) = if kill == l2 { givens_params_to_zero(x, y)? } else { givens_params_to_zero_first(x, y)? };
    GivensRotation::new(l1, l2, theta, phi)
}
