//! Unconstrained schedule: each row is folded into its pivot by a binary tree.

use super::{finish, Eliminator, RotationSchedule};
use crate::error::Result;
use crate::numerics::{ComplexMatrix, Real};

pub fn schedule_log_depth<T: Real>(q: &ComplexMatrix<T>) -> Result<RotationSchedule<T>> {
    let (r, n) = (q.rows(), q.cols());
    let mut el = Eliminator::new(q.clone());
    for i in 0..r {
        let mut stride = 1;
        while i + stride < n {
            let mut a = i;
            while a + stride < n {
                el.kill(i, a, a + stride, a + stride)?;
                a += 2 * stride;
            }
            stride *= 2;
        }
    }
    finish(q, &el.seq, (0..r).collect(), Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::random_orthonormal_rows;
    use crate::qr_engine::verify_schedule;
    use proptest::prelude::*;

    fn log2_ceil(n: usize) -> usize {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }

    #[test]
    fn eight_modes_rank_three() {
        let q = random_orthonormal_rows::<f64>(3, 8, 0);
        let s = schedule_log_depth(&q).unwrap();
        assert!(s.depth() <= 9, "{} rounds", s.depth());
        assert!(verify_schedule(&q, &s).unwrap().residual < 1e-9);
    }

    #[test]
    fn rank_one_depth() {
        for n in [2usize, 3, 5, 8, 13, 16] {
            let q = random_orthonormal_rows::<f64>(1, n, n as u64);
            assert_eq!(schedule_log_depth(&q).unwrap().depth(), log2_ceil(n));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn depth_bound(n in 2usize..17, rfrac in 0.0..1.0f64, seed in 0u64..100_000) {
            let r = 1 + ((n - 1) as f64 * rfrac) as usize;
            let q = random_orthonormal_rows::<f64>(r, n, seed);
            let s = schedule_log_depth(&q).unwrap();
            let c = verify_schedule(&q, &s).unwrap();
            prop_assert!(c.residual <= 1e-9);
            prop_assert!(c.reopened <= 1e-10);
            prop_assert!(s.depth() <= r * (log2_ceil(n) + 1));
            prop_assert!(s.rotation_count() <= n * r);
        }
    }
}
