//! Tall-skinny QR over contiguous row blocks with a binary merge tree.
//!
//! All factors are Givens rotations on global row indices, so the implicit `Q` can be reused
//! as a gate sequence. Rows of a block that still carry a nonzero `R` are called live.

use super::Eliminator;
use crate::error::{Error, Result};
use crate::numerics::{apply_givens_in_place, wrap_angle, ComplexMatrix, GivensRotation, Real, Side};

#[derive(Clone, Debug)]
pub struct MergeStep<T> {
    pub left: usize,
    pub right: usize,
    pub rotations: Vec<GivensRotation<T>>,
    /// Live rows of the merged block after this step.
    pub live: Vec<usize>,
    pub local_r: ComplexMatrix<T>,
}

#[derive(Clone, Debug)]
pub struct TsqrPlan<T> {
    pub n_rows: usize,
    pub n_cols: usize,
    /// Padded to a power of two; trailing blocks may be empty.
    pub block_count: usize,
    pub blocks: Vec<std::ops::Range<usize>>,
    pub leaves: Vec<MergeStep<T>>,
    /// One entry per tree level, leaves excluded.
    pub levels: Vec<Vec<MergeStep<T>>>,
}

impl<T: Real> TsqrPlan<T> {
    /// All rotations in the order they were applied: `G_k ... G_1 A = [R; 0]`.
    pub fn rotations(&self) -> Vec<GivensRotation<T>> {
        self.leaves.iter().chain(self.levels.iter().flatten()).flat_map(|s| s.rotations.iter().copied()).collect()
    }

    /// Rows of the final `R`.
    pub fn r_rows(&self) -> &[usize] {
        match self.levels.last() {
            Some(level) => &level[0].live,
            None => &self.leaves[0].live,
        }
    }

    /// Explicit `Q` with orthonormal columns, `A = Q R`.
    pub fn q_factor(&self) -> Result<ComplexMatrix<T>> {
        let mut e = ComplexMatrix::zeros(self.n_rows, self.n_cols);
        for (j, &row) in self.r_rows().iter().enumerate() {
            e[(row, j)] = crate::numerics::re(T::one());
        }
        for rot in self.rotations().iter().rev() {
            apply_givens_in_place(&mut e, rot, Side::Left, true)?;
        }
        Ok(e)
    }
}

/// Givens QR of the rows `live` of `m` (ascending); returns the surviving rows.
fn stacked_qr<T: Real>(m: &mut ComplexMatrix<T>, live: &[usize]) -> Result<(Vec<GivensRotation<T>>, Vec<usize>)> {
    // Eliminate on the transpose so the shared right-rotation code applies.
    let mut el = Eliminator::new(m.transpose());
    let d = m.cols();
    for c in 0..d.min(live.len()) {
        for k in (c + 1..live.len()).rev() {
            el.kill(c, live[c], live[k], live[k])?;
        }
    }
    // (M^T G*)^T = conj(G) M, and conj(G) is G with phi negated.
    let rotations: Vec<GivensRotation<T>> =
        el.seq.iter().map(|g| GivensRotation { phi: wrap_angle(-g.phi), ..*g }).collect();
    *m = el.m.transpose();
    let kept = live[..d.min(live.len())].to_vec();
    Ok((rotations, kept))
}

pub fn tsqr<T: Real>(a: &ComplexMatrix<T>, p: usize) -> Result<(TsqrPlan<T>, ComplexMatrix<T>)> {
    if p == 0 {
        return Err(Error::InvalidArgument("TSQR needs at least one block".into()));
    }
    let (n, d) = (a.rows(), a.cols());
    let padded = p.next_power_of_two();
    let blocks: Vec<std::ops::Range<usize>> =
        (0..padded).map(|b| if b < p { (b * n / p)..((b + 1) * n / p) } else { n..n }).collect();
    let mut m = a.clone();
    let mut leaves = Vec::with_capacity(padded);
    for (b, rows) in blocks.iter().enumerate() {
        let live: Vec<usize> = rows.clone().collect();
        let (rotations, live) = stacked_qr(&mut m, &live)?;
        let local_r = m.submatrix(&live, &(0..d).collect::<Vec<_>>());
        leaves.push(MergeStep { left: b, right: b, rotations, live, local_r });
    }
    let mut current: Vec<Vec<usize>> = leaves.iter().map(|s| s.live.clone()).collect();
    let mut levels = Vec::new();
    let mut stride = 1;
    while stride < padded {
        let mut level = Vec::new();
        for left in (0..padded).step_by(2 * stride) {
            let right = left + stride;
            let stacked: Vec<usize> = current[left].iter().chain(&current[right]).copied().collect();
            let (rotations, live) = stacked_qr(&mut m, &stacked)?;
            let local_r = m.submatrix(&live, &(0..d).collect::<Vec<_>>());
            current[left] = live.clone();
            current[right].clear();
            level.push(MergeStep { left, right, rotations, live, local_r });
        }
        levels.push(level);
        stride *= 2;
    }
    let plan = TsqrPlan { n_rows: n, n_cols: d, block_count: padded, blocks, leaves, levels };
    let rows = plan.r_rows();
    let r = ComplexMatrix::from_fn(
        d,
        d,
        |i, j| if i < rows.len() { m[(rows[i], j)] } else { crate::numerics::re(T::zero()) },
    );
    Ok((plan, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::gaussian_complex;

    fn check(a: &ComplexMatrix<f64>, p: usize) -> ComplexMatrix<f64> {
        let (plan, r) = tsqr(a, p).unwrap();
        for i in 0..r.rows() {
            for j in 0..i {
                assert!(r[(i, j)].norm() < 1e-12, "R not upper triangular at ({i},{j})");
            }
        }
        let q = plan.q_factor().unwrap();
        assert!((&q.adjoint() * &q).max_diff(&ComplexMatrix::identity(a.cols())) < 1e-9);
        assert!((&q * &r).max_diff(a) <= 1e-8 * a.max_abs());
        let mut replay = a.clone();
        for g in plan.rotations() {
            apply_givens_in_place(&mut replay, &g, Side::Left, false).unwrap();
        }
        let rows = plan.r_rows();
        for i in 0..a.rows() {
            if !rows.contains(&i) {
                assert!(replay.row(i).iter().all(|z| z.norm() < 1e-10));
            }
        }
        r
    }

    #[test]
    fn single_block_and_partitions_agree() {
        let a = gaussian_complex::<f64>(32, 3, 8);
        let r1 = check(&a, 1);
        for p in [2, 3, 4, 8] {
            let rp = check(&a, p);
            // Same R up to row phases, so the Gram matrices coincide.
            assert!((&rp.adjoint() * &rp).max_diff(&(&r1.adjoint() * &r1)) < 1e-9);
            for i in 0..3 {
                assert!((rp[(i, i)].norm() - r1[(i, i)].norm()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn small_blocks() {
        let a = gaussian_complex::<f64>(5, 3, 2);
        check(&a, 4);
        assert!(tsqr(&a, 0).is_err());
    }
}
