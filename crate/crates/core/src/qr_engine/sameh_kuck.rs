//! Nearest-neighbour schedule: every rotation acts on adjacent columns.

use super::{finish, Eliminator, RotationSchedule};
use crate::error::Result;
use crate::numerics::{apply_givens_in_place, left_rotation_zeroing, ComplexMatrix, GivensRotation, Real, Side};

#[derive(Clone, Debug)]
pub struct Preprocessed<T> {
    /// `V Q`, zero above the staircase `j > N - r + i`.
    pub q: ComplexMatrix<T>,
    /// Left rotations making up `V`, in application order.
    pub rotations: Vec<GivensRotation<T>>,
}

/// Clear the upper-right corner with at most `r(r-1)/2` left rotations between adjacent rows.
pub fn preprocess_triangle<T: Real>(q: &ComplexMatrix<T>) -> Result<Preprocessed<T>> {
    let (r, n) = (q.rows(), q.cols());
    let mut m = q.clone();
    let mut rotations = Vec::new();
    let skip = T::tol(1e-12);
    for c in (n.saturating_sub(r) + 1..n).rev() {
        for i in 0..c + r - n {
            if m[(i, c)].norm() < skip {
                continue;
            }
            let rot = left_rotation_zeroing(m[(i, c)], m[(i + 1, c)], i, i + 1, i)?;
            apply_givens_in_place(&mut m, &rot, Side::Left, false)?;
            rotations.push(rot);
        }
    }
    Ok(Preprocessed { q: m, rotations })
}

/// Row `i` is swept right to left into column `i` with rotations on `(j-1, j)`.
pub fn schedule_sameh_kuck<T: Real>(q: &ComplexMatrix<T>, preprocess: bool) -> Result<RotationSchedule<T>> {
    let (r, n) = (q.rows(), q.cols());
    let (start, pre) = if preprocess {
        let p = preprocess_triangle(q)?;
        (p.q, p.rotations)
    } else {
        (q.clone(), Vec::new())
    };
    let mut el = Eliminator::new(start);
    for i in 0..r {
        let last = if preprocess { n - r + i } else { n - 1 };
        for j in (i + 1..=last).rev() {
            el.kill(i, j - 1, j, j)?;
        }
    }
    finish(q, &el.seq, (0..r).collect(), pre)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::random_orthonormal_rows;
    use crate::qr_engine::verify_schedule;
    use proptest::prelude::*;

    #[test]
    fn rank_one_needs_no_preprocessing() {
        let q = random_orthonormal_rows::<f64>(1, 5, 3);
        let p = preprocess_triangle(&q).unwrap();
        assert!(p.rotations.is_empty());
        assert_eq!(p.q, q);
    }

    #[test]
    fn staircase_pattern() {
        let q = random_orthonormal_rows::<f64>(3, 6, 1);
        let p = preprocess_triangle(&q).unwrap();
        assert!(p.rotations.len() <= 3);
        for i in 0..3 {
            for j in 6 - 3 + i + 1..6 {
                assert!(p.q[(i, j)].norm() < 1e-12, "({i},{j})");
            }
        }
        let k0 = &q.adjoint() * &q;
        let k1 = &p.q.adjoint() * &p.q;
        assert!(k0.max_diff(&k1) < 1e-9);
    }

    #[test]
    fn identity_factor_gives_empty_schedule() {
        let mut q = ComplexMatrix::<f64>::zeros(2, 4);
        q[(0, 0)].re = 1.0;
        q[(1, 1)].re = 1.0;
        let s = schedule_sameh_kuck(&q, true).unwrap();
        assert_eq!(s.rotation_count(), 0);
        assert!(s.final_phases.iter().all(|z| (z.re - 1.0).abs() < 1e-15));
    }

    #[test]
    fn five_modes_rank_three() {
        let q = random_orthonormal_rows::<f64>(3, 5, 7);
        let s = schedule_sameh_kuck(&q, true).unwrap();
        assert_eq!(s.rotation_count(), 6);
        assert!(s.rotations().all(|g| g.l2 == g.l1 + 1));
        assert!(verify_schedule(&q, &s).unwrap().residual < 1e-9);
    }

    #[test]
    fn six_modes_rank_three_rounds() {
        let q = random_orthonormal_rows::<f64>(3, 6, 2);
        let s = schedule_sameh_kuck(&q, true).unwrap();
        let pairs: Vec<Vec<(usize, usize)>> =
            s.rounds.iter().map(|r| r.iter().map(|g| (g.l1, g.l2)).collect()).collect();
        assert_eq!(
            pairs,
            vec![vec![(2, 3)], vec![(1, 2), (3, 4)], vec![(0, 1), (2, 3), (4, 5)], vec![(1, 2), (3, 4)], vec![(2, 3)],]
        );
    }

    #[test]
    fn corrupted_schedule_is_detected() {
        let q = random_orthonormal_rows::<f64>(3, 5, 4);
        let mut s = schedule_sameh_kuck(&q, true).unwrap();
        s.rounds[1][0].theta += 0.1;
        assert!(verify_schedule(&q, &s).unwrap().residual > 1e-3);
    }

    #[test]
    fn single_precision() {
        let q = random_orthonormal_rows::<f64>(3, 7, 5).cast::<f32>();
        let s = schedule_sameh_kuck(&q, true).unwrap();
        assert_eq!(s.rotation_count(), 12);
        assert!(verify_schedule(&q, &s).unwrap().residual < 1e-4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn counts_and_residuals(n in 1usize..13, rfrac in 0.0..1.0f64, seed in 0u64..100_000, pre in any::<bool>()) {
            let r = 1 + ((n - 1) as f64 * rfrac) as usize;
            let q = random_orthonormal_rows::<f64>(r, n, seed);
            let s = schedule_sameh_kuck(&q, pre).unwrap();
            let c = verify_schedule(&q, &s).unwrap();
            prop_assert!(c.residual <= 1e-9);
            prop_assert!(c.reopened <= 1e-10);
            prop_assert!(s.rotation_count() <= n * r);
            prop_assert!(s.depth() <= 2 * n);
            if pre {
                prop_assert_eq!(s.rotation_count(), r * (n - r));
                let k0 = &q.adjoint() * &q;
                let mut v = q.clone();
                for g in &s.preprocessing {
                    apply_givens_in_place(&mut v, g, Side::Left, false).unwrap();
                }
                prop_assert!(k0.max_diff(&(&v.adjoint() * &v)) <= 1e-9);
            }
        }
    }
}
