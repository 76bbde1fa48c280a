//! The two canned experiments, total variation, and plot-ready CSV output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bogoliubov::{
    diagonalize_bdg, factorize_particle_hole, parity_prediction, reference_hamiltonian, s_matrix_projective,
};
use crate::bogoliubov::{BdGHamiltonian, ParityMode};
use crate::circuit::{cnot_metrics, compile_pfpp_circuit, compile_projection_circuit, Circuit};
use crate::error::{Error, Result};
use crate::fock_simulator::{exact_distribution, run_circuit, sample_occupations, Histogram};
use crate::io::{write_histogram_csv, GraphWire, KernelSpec};
use crate::kernels::{pfaffian_kernel_from_s, ProjectionFactor};
use crate::numerics::householder_qr;
use crate::numerics::random::gaussian_real;
use crate::qr_engine::{
    schedule_graph_constrained, schedule_log_depth, schedule_sameh_kuck, CouplingGraph, RotationSchedule,
};
use crate::rng::RngSpec;
use crate::samplers::{brute_force_distribution, PointProcess};
use crate::subset::{bitstring, label};
use crate::Matrix;

const PMF_MASS_TOL: f64 = 1e-6;
/// Probabilities below this are treated as structurally zero in report tables.
const CHARGE_FLOOR: f64 = 1e-12;

/// Half the L1 distance, i.e. the largest discrepancy over events.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::ShapeMismatch(format!("distributions over {} and {} outcomes", p.len(), q.len())));
    }
    for (name, d) in [("first", p), ("second", q)] {
        let total: f64 = d.iter().sum();
        if (total - 1.0).abs() > PMF_MASS_TOL {
            return Err(Error::InvalidDistribution(format!("{name} distribution has mass {total}")));
        }
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchedulerMode {
    #[default]
    SamehKuck,
    LogDepth,
    Graph,
}

impl std::str::FromStr for SchedulerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sameh-kuck" => Ok(Self::SamehKuck),
            "log-depth" => Ok(Self::LogDepth),
            "graph" => Ok(Self::Graph),
            _ => Err(Error::Config(format!("unknown scheduler mode `{s}`"))),
        }
    }
}

pub fn build_schedule(q: &Matrix, mode: SchedulerMode, graph: Option<&CouplingGraph>) -> Result<RotationSchedule<f64>> {
    match mode {
        SchedulerMode::SamehKuck => schedule_sameh_kuck(q, true),
        SchedulerMode::LogDepth => schedule_log_depth(q),
        SchedulerMode::Graph => {
            let g = graph.ok_or_else(|| Error::Config("graph mode needs a coupling graph".into()))?;
            schedule_graph_constrained(q, g)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Overrides the built-in kernel: a projection factor, or a BdG spec for the PfPP run.
    pub kernel: Option<KernelSpec>,
    pub n_modes: usize,
    /// Rank of the projection kernel, or the number of occupied quasi-particles.
    pub rank: usize,
    /// Seeds the random kernel.
    pub kernel_seed: u64,
    /// Seeds the measurement shots; rerun `k` uses stream `k`.
    pub seed: u64,
    pub shots: u64,
    pub noise: Option<f64>,
    /// Independent reruns for the TV null distribution.
    pub reruns: usize,
    pub mode: SchedulerMode,
    pub graph: Option<GraphWire>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kernel: None,
            n_modes: 5,
            rank: 3,
            kernel_seed: 42,
            seed: 42,
            shots: 20_000,
            noise: None,
            reruns: 100,
            mode: SchedulerMode::SamehKuck,
            graph: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub mask: usize,
    pub probability: f64,
    pub count: u64,
    pub frequency: f64,
    pub abs_diff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParityCheck {
    pub expected_odd: bool,
    /// Samples whose parity differs from the prediction; nonzero only under readout noise.
    pub mismatches: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub n_modes: usize,
    pub shots: u64,
    pub seed: u64,
    pub tv: f64,
    /// TV between the simulator's exact output law and the closed-form PMF.
    pub exact_tv: f64,
    pub rows: Vec<ReportRow>,
    pub tv_null: Vec<f64>,
    pub cnot_count: usize,
    pub depth: usize,
    pub parity: Option<ParityCheck>,
    #[serde(skip)]
    pub histogram: Histogram,
    #[serde(skip)]
    pub circuit: Circuit,
}

impl ComparisonReport {
    /// Share of the reruns with TV below `bound`.
    pub fn null_fraction_below(&self, bound: f64) -> f64 {
        if self.tv_null.is_empty() {
            return 0.0;
        }
        self.tv_null.iter().filter(|&&t| t < bound).count() as f64 / self.tv_null.len() as f64
    }
}

/// Householder QR of a seeded Gaussian `N × N` matrix; the factor is the transpose of the
/// first `r` columns of `Q`.
pub fn default_projection_factor(n: usize, r: usize, seed: u64) -> Result<ProjectionFactor> {
    if r == 0 || r > n {
        return Err(Error::Config(format!("rank {r} must lie in 1..={n}")));
    }
    let (q, _) = householder_qr(&gaussian_real::<f64>(n, n, seed));
    ProjectionFactor::new(Matrix::from_fn(r, n, |i, j| q[(j, i)]))
}

fn compare(
    cfg: &ExperimentConfig,
    circuit: Circuit,
    graph: Option<&CouplingGraph>,
    pmf: &[f64],
    expected_odd: Option<bool>,
) -> Result<ComparisonReport> {
    let n = circuit.n_qubits();
    let state = run_circuit::<f64>(&circuit)?;
    let exact = exact_distribution(&state)?;
    let exact_tv = tv_distance(&exact, pmf)?;
    let histogram = sample_occupations(&state, cfg.shots, RngSpec::new(cfg.seed, 0), cfg.noise)?;
    let tv = tv_distance(&histogram.to_pmf(), pmf)?;
    let tv_null = (1..=cfg.reruns as u64)
        .map(|k| {
            tv_distance(&sample_occupations(&state, cfg.shots, RngSpec::new(cfg.seed, k), cfg.noise)?.to_pmf(), pmf)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = (0..1usize << n)
        .filter(|&m| pmf[m] > CHARGE_FLOOR || histogram.count(m) > 0)
        .map(|m| ReportRow {
            mask: m,
            probability: pmf[m],
            count: histogram.count(m),
            frequency: histogram.frequency(m),
            abs_diff: (pmf[m] - histogram.frequency(m)).abs(),
        })
        .collect();
    let parity = expected_odd.map(|odd| ParityCheck {
        expected_odd: odd,
        mismatches: histogram.counts().iter().filter(|(m, _)| (m.count_ones() % 2 == 1) != odd).map(|(_, &c)| c).sum(),
    });
    let metrics = cnot_metrics(&circuit, graph);
    Ok(ComparisonReport {
        n_modes: n,
        shots: cfg.shots,
        seed: cfg.seed,
        tv,
        exact_tv,
        rows,
        tv_null,
        cnot_count: metrics.cnot_count,
        depth: metrics.depth,
        parity,
        histogram,
        circuit,
    })
}

fn config_graph(cfg: &ExperimentConfig) -> Result<Option<CouplingGraph>> {
    cfg.graph.clone().map(GraphWire::into_graph).transpose()
}

/// Random rank-`r` projection kernel, compiled, simulated and compared with the determinantal PMF.
pub fn run_experiment_projection(cfg: &ExperimentConfig) -> Result<ComparisonReport> {
    let factor = match &cfg.kernel {
        None => default_projection_factor(cfg.n_modes, cfg.rank, cfg.kernel_seed)?,
        Some(KernelSpec::ProjectionFactor { q }) => ProjectionFactor::new(q.clone())?,
        Some(_) => return Err(Error::Config("the projection experiment needs a projection_factor kernel".into())),
    };
    let graph = config_graph(cfg)?;
    let schedule = build_schedule(factor.q(), cfg.mode, graph.as_ref())?;
    let circuit = compile_projection_circuit(&schedule)?;
    let pmf = brute_force_distribution(PointProcess::Dpp(&factor.kernel()?))?;
    compare(cfg, circuit, graph.as_ref(), &pmf, None)
}

/// Quasi-particles to occupy: the `count` lowest positive energies, ascending.
pub fn lowest_positive_modes(epsilons: &[f64], count: usize) -> Result<Vec<usize>> {
    let modes: Vec<usize> = (0..epsilons.len()).filter(|&k| epsilons[k] > 1e-10).take(count).collect();
    if modes.len() < count {
        return Err(Error::Config(format!("only {} positive energies, {count} requested", modes.len())));
    }
    Ok(modes)
}

/// BdG ground-state excitation: `rank` lowest quasi-particles occupied, compared with the
/// Pfaffian PMF of the projective contraction matrix.
pub fn run_experiment_pfpp(cfg: &ExperimentConfig) -> Result<ComparisonReport> {
    let (h, modes) = match &cfg.kernel {
        None => (reference_hamiltonian(), None),
        Some(KernelSpec::Bdg { m, delta, modes, .. }) => {
            let h = BdGHamiltonian::new(m.clone(), delta.clone())?;
            let n = h.n();
            let modes = modes
                .as_ref()
                .map(|v| {
                    v.iter()
                        .map(|&k| {
                            if k >= 1 && k <= n {
                                Ok(k - 1)
                            } else {
                                Err(Error::Config(format!("mode {k} outside 1..={n}")))
                            }
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .transpose()?;
            (h, modes)
        }
        Some(_) => return Err(Error::Config("the PfPP experiment needs a bdg kernel".into())),
    };
    let t = diagonalize_bdg(&h)?;
    let chosen = match modes {
        Some(m) => m,
        None => lowest_positive_modes(&t.epsilons, cfg.rank)?,
    };
    let f = factorize_particle_hole(&t)?;
    let circuit = compile_pfpp_circuit(&f, &chosen)?;
    let k = pfaffian_kernel_from_s(&s_matrix_projective(&t, &chosen)?)?;
    let pmf = brute_force_distribution(PointProcess::Pfpp(&k))?;
    let odd = parity_prediction(&t, &ParityMode::Projective(chosen))? < 0.0;
    compare(cfg, circuit, None, &pmf, Some(odd))
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    let path = dir.join(name);
    Ok((path.clone(), BufWriter::new(File::create(path)?)))
}

/// `histogram.csv`, `comparison.csv` and `tv_null.csv` under `dir`.
pub fn emit_plots_data(report: &ComparisonReport, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let (hist_path, mut w) = create(dir, "histogram.csv")?;
    write_histogram_csv(&report.histogram, &mut w)?;
    w.flush()?;

    let (cmp_path, w) = create(dir, "comparison.csv")?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["bitstring", "subset", "probability", "frequency", "abs_diff"])?;
    for r in &report.rows {
        out.write_record([
            bitstring(r.mask, report.n_modes),
            label(r.mask),
            r.probability.to_string(),
            r.frequency.to_string(),
            r.abs_diff.to_string(),
        ])?;
    }
    out.flush()?;

    let (null_path, w) = create(dir, "tv_null.csv")?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["rerun", "tv"])?;
    for (k, tv) in report.tv_null.iter().enumerate() {
        out.write_record([(k + 1).to_string(), tv.to_string()])?;
    }
    out.flush()?;
    Ok(vec![hist_path, cmp_path, null_path])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tv_examples() {
        assert_eq!(tv_distance(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(tv_distance(&[0.5, 0.5], &[1.0, 0.0]).unwrap(), 0.5);
        assert!(tv_distance(&[1.0], &[0.5, 0.5]).is_err());
        assert!(tv_distance(&[0.5, 0.4], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn projection_experiment_small_run() {
        let cfg = ExperimentConfig { reruns: 3, ..Default::default() };
        let r = run_experiment_projection(&cfg).unwrap();
        assert!(r.exact_tv < 1e-9);
        assert_eq!(r.cnot_count, 12);
        assert_eq!(r.tv_null.len(), 3);
        assert!(r.rows.iter().all(|row| row.mask.count_ones() == 3));
        assert_eq!(r.rows.len(), 10);
    }

    #[test]
    fn noise_adds_weight_two_subsets() {
        let cfg = ExperimentConfig { reruns: 0, noise: Some(0.02), ..Default::default() };
        let r = run_experiment_projection(&cfg).unwrap();
        let clean = run_experiment_projection(&ExperimentConfig { reruns: 0, ..Default::default() }).unwrap();
        assert!(r.rows.iter().any(|row| row.mask.count_ones() == 2 && row.count > 0));
        assert!(r.tv > clean.tv + 0.02);
    }

    #[test]
    fn pfpp_experiment_small_run() {
        let r = run_experiment_pfpp(&ExperimentConfig { reruns: 2, ..Default::default() }).unwrap();
        assert!(r.exact_tv < 1e-8);
        assert_eq!(r.parity.as_ref().unwrap().mismatches, 0);
        assert!(r.tv < 0.02);
    }

    #[test]
    fn plot_files_are_deterministic() {
        let cfg = ExperimentConfig { reruns: 4, ..Default::default() };
        let dir = tempfile::tempdir().unwrap();
        let read_all = |paths: &[PathBuf]| paths.iter().map(|p| std::fs::read(p).unwrap()).collect::<Vec<_>>();
        let a = emit_plots_data(&run_experiment_projection(&cfg).unwrap(), &dir.path().join("a")).unwrap();
        let b = emit_plots_data(&run_experiment_projection(&cfg).unwrap(), &dir.path().join("b")).unwrap();
        assert_eq!(read_all(&a), read_all(&b));
        let cmp = std::fs::read_to_string(&a[1]).unwrap();
        assert_eq!(cmp.lines().count(), 10 + 1);
        let null = std::fs::read_to_string(&a[2]).unwrap();
        assert_eq!(null.lines().count(), 4 + 1);
    }

    #[test]
    fn config_parses_with_defaults() {
        let cfg: ExperimentConfig = serde_json::from_str(r#"{"seed": 7, "mode": "log-depth"}"#).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.mode, SchedulerMode::LogDepth);
        assert_eq!(cfg.shots, 20_000);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"sede": 7}"#).is_err());
        let graph = ExperimentConfig { mode: SchedulerMode::Graph, reruns: 0, ..Default::default() };
        assert!(matches!(run_experiment_projection(&graph), Err(Error::Config(_))));
    }
}
