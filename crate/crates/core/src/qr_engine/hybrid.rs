//! Classical TSQR and SVD front end feeding a Givens circuit for the principal subspace.

use super::{finish, schedule_sameh_kuck, tsqr, RotationSchedule, TsqrPlan};
use crate::error::{Error, Result};
use crate::kernels::ProjectionFactor;
use crate::numerics::{apply_givens_in_place, svd, Side};
use crate::Matrix;

#[derive(Clone, Debug)]
pub struct HybridResult {
    pub factor: ProjectionFactor,
    pub schedule: RotationSchedule<f64>,
    pub plan: TsqrPlan<f64>,
    pub singular_values: Vec<f64>,
}

/// Top-`r` right singular subspace of the `d × N` matrix `a`, with a schedule that first undoes
/// the TSQR rotations and then runs the nearest-neighbour sweep on the small SVD factor.
pub fn hybrid_pipeline(a: &Matrix, r: usize, p: usize) -> Result<HybridResult> {
    let (d, n) = (a.rows(), a.cols());
    if r == 0 {
        return Err(Error::InvalidArgument("rank must be positive".into()));
    }
    let (plan, rf) = tsqr(&a.adjoint(), p)?;
    if plan.r_rows() != (0..d.min(n)).collect::<Vec<_>>().as_slice() {
        return Err(Error::InvalidArgument(format!("the first TSQR block must hold at least {d} rows")));
    }
    let dec = svd(&rf)?;
    let rank = dec.numerical_rank(1e-10);
    if r > rank {
        return Err(Error::RankTooLow { requested: r, rank });
    }
    let top = dec.sigma[0];
    if r < dec.sigma.len() && dec.sigma[r - 1] - dec.sigma[r] <= 1e-10 * top {
        return Err(Error::AmbiguousSubspace { index: r, next: r + 1 });
    }
    // F = Ũ_r* E* G_k ... G_1, and F G_1* ... G_k* = (Ũ_r* | 0).
    let head = Matrix::from_fn(r, n, |i, j| if j < d { dec.u[(j, i)].conj() } else { crate::C64::new(0.0, 0.0) });
    let mut f = head.clone();
    let tsqr_rots = plan.rotations();
    for rot in tsqr_rots.iter().rev() {
        apply_givens_in_place(&mut f, rot, Side::Right, false)?;
    }
    let factor = ProjectionFactor::new(f.clone())?;
    let tail = schedule_sameh_kuck(&head, false)?;
    let mut seq = tsqr_rots;
    seq.extend(tail.rotations().copied());
    let schedule = finish(&f, &seq, (0..r).collect(), Vec::new())?;
    Ok(HybridResult { factor, schedule, plan, singular_values: dec.sigma })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::css_kernel;
    use crate::numerics::random::gaussian_complex;
    use crate::qr_engine::verify_schedule;

    #[test]
    fn matches_direct_projector() {
        let a = gaussian_complex::<f64>(3, 16, 21);
        let (direct, _) = css_kernel(&a, 2).unwrap();
        for p in [1, 2, 4] {
            let h = hybrid_pipeline(&a, 2, p).unwrap();
            assert!(h.factor.kernel_matrix().max_diff(direct.matrix()) < 1e-8, "p = {p}");
            assert!(verify_schedule(h.factor.q(), &h.schedule).unwrap().residual < 1e-9);
        }
    }

    #[test]
    fn scaled_orthogonal_rows() {
        let mut a = Matrix::zeros(3, 6);
        for (i, s) in [3.0, 2.0, 1.0].into_iter().enumerate() {
            a[(i, 2 * i)].re = s;
        }
        let h = hybrid_pipeline(&a, 2, 2).unwrap();
        let want = Matrix::from_real_diag(&[1.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert!(h.factor.kernel_matrix().max_diff(&want) < 1e-10);
    }

    #[test]
    fn degenerate_gap_is_rejected() {
        let mut a = Matrix::zeros(2, 4);
        a[(0, 0)].re = 1.0;
        a[(1, 1)].re = 1.0;
        assert!(matches!(hybrid_pipeline(&a, 1, 1), Err(Error::AmbiguousSubspace { .. })));
    }
}
