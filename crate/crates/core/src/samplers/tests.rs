use super::*;
use crate::bogoliubov::{diagonalize_bdg, parity_prediction, BdGHamiltonian, ParityMode};
use crate::fock_simulator::Histogram;
use crate::kernels::validate_dpp_kernel;
use crate::numerics::random::{random_hermitian, random_kernel, random_orthonormal_rows, random_skew};
use proptest::prelude::*;

fn tv(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

fn empirical<S: SubsetSampler>(s: &S, count: u64, seed: u64) -> Vec<f64> {
    Histogram::from_samples(s.n(), sample_batch(s, count, RngSpec::new(seed, 0))).to_pmf()
}

#[test]
fn brute_force_examples() {
    let p = [0.2, 0.7, 0.5];
    let k = validate_dpp_kernel(&Matrix::from_real_diag(&p)).unwrap();
    let pmf = brute_force_distribution(PointProcess::Dpp(&k)).unwrap();
    for (m, &got) in pmf.iter().enumerate() {
        let want: f64 = (0..3).map(|i| if m >> i & 1 == 1 { p[i] } else { 1.0 - p[i] }).product();
        assert!((got - want).abs() < 1e-12);
    }
    let q = ProjectionFactor::new(random_orthonormal_rows(2, 5, 1)).unwrap();
    let proj = brute_force_distribution(PointProcess::Dpp(&q.kernel().unwrap())).unwrap();
    assert!(proj.iter().enumerate().all(|(m, &x)| m.count_ones() == 2 || x == 0.0));
    assert!((proj.iter().sum::<f64>() - 1.0).abs() < 1e-10);
}

#[test]
fn general_and_projection_formulas_agree() {
    // Inclusion-exclusion on a projection kernel must reproduce the direct determinant formula.
    let q = ProjectionFactor::new(random_orthonormal_rows(3, 6, 4)).unwrap();
    let k = q.kernel().unwrap();
    let direct = dpp_pmf(&k).unwrap();
    let mut f: Vec<f64> = (0..1usize << 6)
        .map(|m| {
            let idx = members(m);
            if idx.is_empty() {
                1.0
            } else {
                crate::numerics::lu_determinant(&k.matrix().submatrix(&idx, &idx)).unwrap().re
            }
        })
        .collect();
    for bit in 0..6 {
        for m in 0..f.len() {
            if m >> bit & 1 == 0 {
                f[m] -= f[m | 1 << bit];
            }
        }
    }
    assert!(direct.iter().zip(&f).all(|(a, b)| (a - b).abs() < 1e-9));
}

#[test]
fn negativity_and_mass_guards() {
    assert!(matches!(finish_pmf(vec![1.1, -0.1]), Err(Error::NegativeProbability { .. })));
    assert!(finish_pmf(vec![0.5, 0.4]).is_err());
    assert_eq!(finish_pmf(vec![1.0, -1e-12]).unwrap(), vec![1.0, 0.0]);
    let big = validate_dpp_kernel(&Matrix::identity(15).scale_real(0.5)).unwrap();
    assert!(matches!(brute_force_distribution(PointProcess::Dpp(&big)), Err(Error::TooManyModes { .. })));
}

#[test]
fn hkpv_basic() {
    let mut q = Matrix::zeros(2, 4);
    q[(0, 0)] = C64::new(1.0, 0.0);
    q[(1, 1)] = C64::new(1.0, 0.0);
    let f = ProjectionFactor::new(q).unwrap();
    for s in 0..20 {
        assert_eq!(hkpv_sample(&f, RngSpec::new(s, 0)), vec![0, 1]);
    }
    let f = ProjectionFactor::new(random_orthonormal_rows(3, 7, 2)).unwrap();
    let draws = sample_batch(&HkpvSampler::new(f), 500, RngSpec::new(1, 1));
    assert!(draws.iter().all(|m| m.count_ones() == 3));
}

#[test]
fn hkpv_law() {
    let f = ProjectionFactor::new(random_orthonormal_rows(2, 6, 9)).unwrap();
    let exact = brute_force_distribution(PointProcess::Dpp(&f.kernel().unwrap())).unwrap();
    let got = empirical(&HkpvSampler::new(f), 200_000, 5);
    assert!(tv(&got, &exact) < 0.01, "{}", tv(&got, &exact));
}

#[test]
fn mixture_extremes_and_marginals() {
    let zero = validate_dpp_kernel(&Matrix::zeros(4, 4)).unwrap();
    let one = validate_dpp_kernel(&Matrix::identity(4)).unwrap();
    for s in 0..10 {
        assert!(sample_general_dpp(&zero, RngSpec::new(s, 0)).is_empty());
        assert_eq!(sample_general_dpp(&one, RngSpec::new(s, 0)), vec![0, 1, 2, 3]);
    }
    let p = [0.1, 0.5, 0.85];
    let k = validate_dpp_kernel(&Matrix::from_real_diag(&p)).unwrap();
    let n = 100_000u64;
    let draws = sample_batch(&MixtureSampler::new(&k), n, RngSpec::new(3, 0));
    for (i, &pi) in p.iter().enumerate() {
        let freq = draws.iter().filter(|&&m| m >> i & 1 == 1).count() as f64 / n as f64;
        let sigma = (pi * (1.0 - pi) / n as f64).sqrt();
        assert!((freq - pi).abs() < 3.0 * sigma + 1e-12, "mode {i}: {freq} vs {pi}");
    }
}

#[test]
fn dilation_law() {
    let half = validate_dpp_kernel(&Matrix::identity(3).scale_real(0.5)).unwrap();
    let exact = brute_force_distribution(PointProcess::Dpp(&half)).unwrap();
    let got = empirical(&DilationSampler::new(&half).unwrap(), 200_000, 8);
    assert!(tv(&got, &exact) < 0.01);
    // A projection kernel dilates to itself plus its complement, so the law is unchanged.
    let f = ProjectionFactor::new(random_orthonormal_rows(2, 4, 6)).unwrap();
    let k = f.kernel().unwrap();
    let a = empirical(&DilationSampler::new(&k).unwrap(), 100_000, 2);
    let b = empirical(&HkpvSampler::new(f), 100_000, 3);
    assert!(tv(&a, &b) < 0.02);
    assert!(a.iter().enumerate().all(|(m, &x)| m.count_ones() == 2 || x == 0.0));
}

#[test]
fn law_triangle_on_random_kernels() {
    for seed in 0..3u64 {
        let n = 2 + seed as usize;
        let k = validate_dpp_kernel(&random_kernel(n, 0.05, 0.95, 40 + seed)).unwrap();
        let exact = brute_force_distribution(PointProcess::Dpp(&k)).unwrap();
        let mix = empirical(&MixtureSampler::new(&k), 100_000, seed);
        let dil = empirical(&DilationSampler::new(&k).unwrap(), 100_000, seed + 100);
        assert!(tv(&mix, &dil) < 0.02 && tv(&mix, &exact) < 0.02 && tv(&dil, &exact) < 0.02, "seed {seed}");
    }
}

#[test]
fn reproducible_across_thread_counts() {
    let k = validate_dpp_kernel(&random_kernel(5, 0.1, 0.9, 1)).unwrap();
    let s = MixtureSampler::new(&k);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| sample_batch(&s, 20_000, RngSpec::new(42, 0)))
    };
    assert_eq!(run(1), run(3));
}

fn bdg(n: usize, seed: u64) -> BogoliubovTransform {
    let h = BdGHamiltonian::new(random_hermitian(n, seed), random_skew(n, seed + 500)).unwrap();
    diagonalize_bdg(&h).unwrap()
}

#[test]
fn pfpp_cold_limit_has_fixed_parity() {
    let t = bdg(3, 11);
    assert!(t.epsilons[0] > 1e-3);
    let s = PfppSampler::new(&t, QuasiParticles::Thermal(1e4)).unwrap();
    let draws = sample_batch(&s, 2000, RngSpec::new(1, 0));
    let want_odd = parity_prediction(&t, &ParityMode::Projective(vec![])).unwrap() < 0.0;
    assert!(draws.iter().all(|m| (m.count_ones() % 2 == 1) == want_odd));
    assert!(sample_pfpp(&t, -1.0, RngSpec::new(0, 0)).is_err());
}

#[test]
fn pfpp_thermal_parity_moment() {
    for seed in 0..3u64 {
        let t = bdg(2 + seed as usize % 3, 20 + seed);
        let beta = 1.3;
        let s = PfppSampler::new(&t, QuasiParticles::Thermal(beta)).unwrap();
        let n = 100_000u64;
        let draws = sample_batch(&s, n, RngSpec::new(seed, 0));
        let mean = draws.iter().map(|m| if m.count_ones() % 2 == 0 { 1.0 } else { -1.0 }).sum::<f64>() / n as f64;
        let want = parity_prediction(&t, &ParityMode::Thermal(beta)).unwrap();
        let sigma = ((1.0 - want * want) / n as f64).sqrt();
        assert!((mean - want).abs() < 3.0 * sigma + 1e-3, "seed {seed}: {mean} vs {want}");
    }
}

#[test]
fn pfpp_thermal_law_matches_pfaffian_pmf() {
    use crate::bogoliubov::s_matrix_thermal;
    use crate::kernels::pfaffian_kernel_from_s;
    let t = bdg(3, 31);
    let beta = 0.9;
    let k = pfaffian_kernel_from_s(&s_matrix_thermal(&t, beta).unwrap()).unwrap();
    let exact = brute_force_distribution(PointProcess::Pfpp(&k)).unwrap();
    let got = empirical(&PfppSampler::new(&t, QuasiParticles::Thermal(beta)).unwrap(), 100_000, 4);
    assert!(tv(&got, &exact) < 0.02, "{}", tv(&got, &exact));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn hkpv_always_returns_rank_many(n in 2usize..8, seed in 0u64..500, r_frac in 0.0..1.0f64) {
        let r = 1 + ((n - 1) as f64 * r_frac) as usize;
        let f = ProjectionFactor::new(random_orthonormal_rows(r, n, seed)).unwrap();
        let s = hkpv_sample(&f, RngSpec::new(seed, 7));
        prop_assert_eq!(s.len(), r);
        prop_assert!(s.windows(2).all(|w| w[0] < w[1]));
    }
}
