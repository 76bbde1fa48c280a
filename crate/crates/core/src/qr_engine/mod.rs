//! Givens-rotation schedules reducing an orthonormal-row `Q` to `(Λ | 0)`.
//!
//! Every scheduler first produces a sequential rotation list by simulating the elimination,
//! then packs it into rounds as early as index conflicts allow. Rotations inside a round act
//! on disjoint index pairs and commute, so flattening the rounds reproduces the sequential
//! product exactly.

mod graph;
mod hybrid;
mod log_depth;
mod sameh_kuck;
mod tsqr;

pub use graph::{schedule_graph_constrained, CouplingGraph};
pub use hybrid::{hybrid_pipeline, HybridResult};
pub use log_depth::schedule_log_depth;
pub use sameh_kuck::{preprocess_triangle, schedule_sameh_kuck, Preprocessed};
pub use tsqr::{tsqr, MergeStep, TsqrPlan};

use crate::error::{Error, Result};
use crate::numerics::{
    apply_givens_in_place, right_rotation_zeroing, Complex, ComplexMatrix, GivensRotation, Real, Side,
};

#[derive(Clone, Debug, PartialEq)]
pub struct RotationSchedule<T> {
    pub n_modes: usize,
    pub rank: usize,
    pub rounds: Vec<Vec<GivensRotation<T>>>,
    pub final_phases: Vec<Complex<T>>,
    /// Column where row `i` ends up; `0..rank` except for graph schedules.
    pub pivots: Vec<usize>,
    /// Left rotations applied to the source `Q` before the rounds. They do not change the kernel.
    pub preprocessing: Vec<GivensRotation<T>>,
}

impl<T: Real> RotationSchedule<T> {
    /// Rotations in matrix-factor order `G_1, G_2, ...`.
    pub fn rotations(&self) -> impl Iterator<Item = &GivensRotation<T>> {
        self.rounds.iter().flatten()
    }

    pub fn rotation_count(&self) -> usize {
        self.rounds.iter().map(Vec::len).sum()
    }

    pub fn depth(&self) -> usize {
        self.rounds.len()
    }

    /// The identity schedule for `Q = (I_r | 0)`.
    pub fn empty(n_modes: usize, rank: usize) -> Self {
        Self {
            n_modes,
            rank,
            rounds: Vec::new(),
            final_phases: vec![Complex::new(T::one(), T::zero()); rank],
            pivots: (0..rank).collect(),
            preprocessing: Vec::new(),
        }
    }
}

/// Outcome of replaying a schedule on its source factor.
#[derive(Clone, Debug)]
pub struct ScheduleCheck<T> {
    /// Largest entry off the pivot pattern, or deviation of a pivot from unit modulus.
    pub residual: T,
    pub phases: Vec<Complex<T>>,
    /// Largest magnitude regained by an entry after a rotation had zeroed it.
    pub reopened: T,
}

/// Replay `V Q G_1* ... G_n*` and measure how far it is from `(Λ | 0)`.
pub fn verify_schedule<T: Real>(q: &ComplexMatrix<T>, s: &RotationSchedule<T>) -> Result<ScheduleCheck<T>> {
    if q.cols() != s.n_modes || q.rows() != s.rank || s.pivots.len() != s.rank {
        return Err(Error::ShapeMismatch(format!(
            "schedule for {}x{} applied to {}x{}",
            s.rank,
            s.n_modes,
            q.rows(),
            q.cols()
        )));
    }
    let mut m = q.clone();
    for rot in &s.preprocessing {
        apply_givens_in_place(&mut m, rot, Side::Left, false)?;
    }
    let zero_tol = T::tol(1e-10);
    let mut zeroed = vec![false; m.rows() * m.cols()];
    let mut reopened = T::zero();
    for rot in s.rotations() {
        let before: Vec<(T, T)> = (0..m.rows()).map(|i| (m[(i, rot.l1)].norm(), m[(i, rot.l2)].norm())).collect();
        apply_givens_in_place(&mut m, rot, Side::Right, true)?;
        for (i, (b1, b2)) in before.into_iter().enumerate() {
            for (col, b) in [(rot.l1, b1), (rot.l2, b2)] {
                let a = m[(i, col)].norm();
                let idx = i * m.cols() + col;
                if zeroed[idx] {
                    reopened = reopened.max(a);
                } else if b > zero_tol && a <= zero_tol {
                    zeroed[idx] = true;
                }
            }
        }
    }
    let mut residual = T::zero();
    let mut phases = Vec::with_capacity(s.rank);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if j == s.pivots[i] {
                let z = m[(i, j)];
                residual = residual.max((z.norm() - T::one()).abs());
                phases.push(z);
            } else {
                residual = residual.max(m[(i, j)].norm());
            }
        }
    }
    Ok(ScheduleCheck { residual, phases, reopened })
}

/// Pack a sequential rotation list into rounds: each rotation lands one round after the
/// latest earlier rotation sharing an index. Rounds are sorted by `(l1, l2)`.
pub fn pack_rounds<T: Real>(n: usize, seq: &[GivensRotation<T>]) -> Vec<Vec<GivensRotation<T>>> {
    let mut ready = vec![0usize; n];
    let mut rounds: Vec<Vec<GivensRotation<T>>> = Vec::new();
    for rot in seq {
        let k = ready[rot.l1].max(ready[rot.l2]);
        if rounds.len() <= k {
            rounds.resize_with(k + 1, Vec::new);
        }
        rounds[k].push(*rot);
        ready[rot.l1] = k + 1;
        ready[rot.l2] = k + 1;
    }
    for r in &mut rounds {
        r.sort_by_key(|g| (g.l1, g.l2));
    }
    rounds
}

/// Working copy of `Q` plus the rotations applied to it so far.
pub(crate) struct Eliminator<T> {
    pub m: ComplexMatrix<T>,
    pub seq: Vec<GivensRotation<T>>,
    skip: T,
}

impl<T: Real> Eliminator<T> {
    pub fn new(m: ComplexMatrix<T>) -> Self {
        Self { m, seq: Vec::new(), skip: T::tol(1e-12) }
    }

    /// Zero `m[row][kill]` with a right rotation on columns `(a, b)`; the weight moves to the
    /// other column. Entries that are already negligible emit nothing.
    pub fn kill(&mut self, row: usize, a: usize, b: usize, kill: usize) -> Result<()> {
        if self.m[(row, kill)].norm() < self.skip {
            return Ok(());
        }
        let (l1, l2) = if a < b { (a, b) } else { (b, a) };
        let rot = right_rotation_zeroing(self.m.row(row), l1, l2, kill)?;
        apply_givens_in_place(&mut self.m, &rot, Side::Right, true)?;
        self.seq.push(rot);
        Ok(())
    }
}

/// Pack, replay and attach the final phases.
pub(crate) fn finish<T: Real>(
    q: &ComplexMatrix<T>,
    seq: &[GivensRotation<T>],
    pivots: Vec<usize>,
    preprocessing: Vec<GivensRotation<T>>,
) -> Result<RotationSchedule<T>> {
    let mut s = RotationSchedule {
        n_modes: q.cols(),
        rank: q.rows(),
        rounds: pack_rounds(q.cols(), seq),
        final_phases: Vec::new(),
        pivots,
        preprocessing,
    };
    let check = verify_schedule(q, &s)?;
    if check.residual > replay_tolerance::<T>() {
        return Err(Error::ReplayResidual { residual: check.residual.to_f64_lossy() });
    }
    s.final_phases = check.phases;
    Ok(s)
}

pub(crate) fn replay_tolerance<T: Real>() -> T {
    T::tol(1e-9).max(T::epsilon() * T::lit(4096.0))
}
