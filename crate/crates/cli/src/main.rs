use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use fermi_dpp_core::bogoliubov::{factorize_particle_hole, BogoliubovTransform};
use fermi_dpp_core::circuit::{cnot_metrics, compile_pfpp_circuit, compile_projection_circuit, export_qasm, Circuit};
use fermi_dpp_core::experiments::{
    build_schedule, emit_plots_data, run_experiment_pfpp, run_experiment_projection, tv_distance, ComparisonReport,
    ExperimentConfig, SchedulerMode,
};
use fermi_dpp_core::fock_simulator::{exact_distribution, run_circuit, sample_occupations, Histogram};
use fermi_dpp_core::io::{
    read_histogram_csv, read_json, to_json_pretty, write_histogram_csv, CircuitWire, GraphWire, Kernel, KernelSpec,
    ScheduleWire,
};
use fermi_dpp_core::kernels::ProjectionFactor;
use fermi_dpp_core::qr_engine::{verify_schedule, CouplingGraph};
use fermi_dpp_core::rng::RngSpec;
use fermi_dpp_core::samplers::{
    brute_force_distribution, sample_batch, DilationSampler, HkpvSampler, MixtureSampler, PfppSampler, PointProcess,
    QuasiParticles,
};
use fermi_dpp_core::Matrix;

#[derive(Parser)]
#[command(
    name = "fermi-dpp",
    version,
    about = "Compile point-process kernels into fermionic circuits and check their samples"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a kernel spec and print a summary.
    ValidateKernel {
        #[arg(long)]
        kernel: PathBuf,
    },
    /// Build a rotation schedule for a projection factor.
    Schedule {
        /// A bare matrix or a `projection_factor` kernel spec.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "sameh-kuck")]
        mode: SchedulerMode,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compile a schedule, or a BdG spec with occupied modes, into a circuit.
    Compile {
        #[arg(long, conflicts_with = "kernel", required_unless_present = "kernel")]
        schedule: Option<PathBuf>,
        #[arg(long)]
        kernel: Option<PathBuf>,
        /// Counts CNOTs against this coupling graph.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        qasm: Option<PathBuf>,
    },
    /// Run a circuit; prints the exact output PMF, or a histogram when `--shots` is given.
    Simulate {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        noise: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw subsets from a kernel.
    Sample {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long, default_value_t = 20_000)]
        shots: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Readout flip probability; `circuit` method only.
        #[arg(long)]
        noise: Option<f64>,
        #[arg(long, default_value = "sameh-kuck")]
        mode: SchedulerMode,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form PMF of a kernel, indexed by bitmask.
    ExactPmf {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Total variation between two PMFs or histograms (`.csv` or `.json`).
    TvCompare {
        p: PathBuf,
        q: PathBuf,
        /// Mode count for histograms whose size cannot be inferred.
        #[arg(long)]
        n_modes: Option<usize>,
    },
    /// Run one of the canned experiments.
    Experiment {
        #[arg(value_enum)]
        which: Which,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        noise: Option<f64>,
        #[arg(long)]
        reruns: Option<usize>,
        #[arg(long)]
        mode: Option<SchedulerMode>,
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Report the simulator's exact law against the closed form instead of the sampled TV.
        #[arg(long)]
        exact: bool,
        /// Writes histogram, comparison and TV-null CSVs here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Hkpv,
    Mixture,
    Dilation,
    Pfpp,
    Circuit,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Projection,
    Pfpp,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?))
}

fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    read_json(open(path)?).with_context(|| format!("reading {}", path.display()))
}

fn load_kernel(path: &Path) -> Result<Kernel> {
    Ok(load::<KernelSpec>(path)?.validate()?)
}

fn load_graph(path: Option<&PathBuf>) -> Result<Option<CouplingGraph>> {
    path.map(|p| Ok(load::<GraphWire>(p)?.into_graph()?)).transpose()
}

/// Writes to `out`, or stdout when absent.
fn emit(out: Option<&PathBuf>, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match out {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
        }
    }
    Ok(())
}

fn emit_text(out: Option<&PathBuf>, text: &str) -> Result<()> {
    emit(out, |w| Ok(writeln!(w, "{text}")?))
}

fn emit_histogram(out: Option<&PathBuf>, h: &Histogram) -> Result<()> {
    emit(out, |w| Ok(write_histogram_csv(h, w)?))
}

fn projection_factor(kernel: &Kernel) -> Result<ProjectionFactor> {
    match kernel {
        Kernel::Projection { factor, .. } => Ok(factor.clone()),
        Kernel::Dpp(k) if k.is_projection() => {
            let e = k.eigen();
            let cols: Vec<usize> = (0..k.n()).filter(|&j| e.eigenvalues[j] > 0.5).collect();
            let q = Matrix::from_fn(cols.len(), k.n(), |i, j| e.eigenvectors[(j, cols[i])].conj());
            Ok(ProjectionFactor::new(q)?)
        }
        _ => bail!("this method needs a projection kernel"),
    }
}

fn selection(kernel: &Kernel) -> Result<QuasiParticles> {
    match kernel {
        Kernel::Bdg { modes: Some(m), .. } => Ok(QuasiParticles::Fixed(m.clone())),
        Kernel::Bdg { beta: Some(b), .. } => Ok(QuasiParticles::Thermal(*b)),
        Kernel::Bdg { .. } => bail!("a bdg kernel needs `beta` or `modes` to define a state"),
        _ => bail!("this method needs a bdg kernel"),
    }
}

fn circuit_for(kernel: &Kernel, mode: SchedulerMode, graph: Option<&CouplingGraph>) -> Result<Circuit> {
    match kernel {
        Kernel::Bdg { transform, modes: Some(m), .. } => {
            Ok(compile_pfpp_circuit(&factorize_particle_hole(transform)?, m)?)
        }
        Kernel::Bdg { .. } => bail!("compiling a bdg kernel needs fixed `modes`"),
        _ => {
            let f = projection_factor(kernel)?;
            Ok(compile_projection_circuit(&build_schedule(f.q(), mode, graph)?)?)
        }
    }
}

fn exact_pmf(kernel: &Kernel) -> Result<Vec<f64>> {
    Ok(match kernel {
        Kernel::Projection { kernel, .. } | Kernel::Dpp(kernel) => brute_force_distribution(PointProcess::Dpp(kernel))?,
        Kernel::Pfaffian { kernel, .. } => brute_force_distribution(PointProcess::Pfpp(kernel))?,
        Kernel::Bdg { transform, .. } => PfppSampler::new(transform, selection(kernel)?)?.pmf(),
    })
}

fn read_distribution(path: &Path, n_modes: Option<usize>) -> Result<Vec<f64>> {
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        Ok(read_histogram_csv(open(path)?, n_modes)?.to_pmf())
    } else {
        load::<Vec<f64>>(path)
    }
}

fn kernel_summary(kernel: &Kernel) -> serde_json::Value {
    match kernel {
        Kernel::Projection { factor, .. } => {
            json!({"type": "projection_factor", "n": factor.n(), "rank": factor.rank()})
        }
        Kernel::Dpp(k) => json!({
            "type": "hermitian",
            "n": k.n(),
            "projection": k.is_projection(),
            "expected_size": k.trace(),
            "eigenvalues": k.eigen().eigenvalues,
        }),
        Kernel::Pfaffian { s, .. } => json!({"type": "s_matrix", "n": s.n()}),
        Kernel::Bdg { transform, beta, modes, .. } => json!({
            "type": "bdg",
            "n": transform.n(),
            "energies": transform.epsilons,
            "beta": beta,
            "modes": modes.as_ref().map(|m| m.iter().map(|k| k + 1).collect::<Vec<_>>()),
        }),
    }
}

fn report_summary(r: &ComparisonReport, exact: bool) -> Result<String> {
    let mut v = serde_json::to_value(r)?;
    if exact {
        v["tv"] = json!(r.exact_tv);
    }
    v["null_fraction_below_0.01"] = json!(r.null_fraction_below(0.01));
    Ok(serde_json::to_string_pretty(&v)?)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::ValidateKernel { kernel } => {
            let k = load_kernel(&kernel)?;
            println!("{}", serde_json::to_string_pretty(&kernel_summary(&k))?);
        }
        Command::Schedule { input, mode, graph, out } => {
            let raw: serde_json::Value = load(&input)?;
            let q: Matrix = match raw.get("type") {
                Some(_) => projection_factor(&serde_json::from_value::<KernelSpec>(raw)?.validate()?)?.q().clone(),
                None => serde_json::from_value(raw)?,
            };
            let graph = load_graph(graph.as_ref())?;
            let s = build_schedule(&q, mode, graph.as_ref())?;
            let check = verify_schedule(&q, &s)?;
            eprintln!("rotations {} depth {} residual {:e}", s.rotation_count(), s.depth(), check.residual);
            emit_text(out.as_ref(), &to_json_pretty(&ScheduleWire::from(&s))?)?;
        }
        Command::Compile { schedule, kernel, graph, out, qasm } => {
            let circuit = match (schedule, kernel) {
                (Some(s), _) => compile_projection_circuit(&load::<ScheduleWire>(&s)?.into_schedule()?)?,
                (None, Some(k)) => circuit_for(&load_kernel(&k)?, SchedulerMode::SamehKuck, None)?,
                (None, None) => unreachable!("clap requires one of the inputs"),
            };
            let graph = load_graph(graph.as_ref())?;
            let m = cnot_metrics(&circuit, graph.as_ref());
            eprintln!(
                "givens {} cnots {} depth {} off-graph pairs {}",
                circuit.givens_count(),
                m.cnot_count,
                m.depth,
                m.off_graph_pairs.len()
            );
            if let Some(p) = qasm {
                fs::write(&p, export_qasm(&circuit)).with_context(|| format!("writing {}", p.display()))?;
            }
            emit_text(out.as_ref(), &to_json_pretty(&CircuitWire::from(&circuit))?)?;
        }
        Command::Simulate { circuit, shots, seed, noise, out } => {
            let c = load::<CircuitWire>(&circuit)?.into_circuit()?;
            let state = run_circuit::<f64>(&c)?;
            match shots {
                Some(s) => emit_histogram(out.as_ref(), &sample_occupations(&state, s, RngSpec::new(seed, 0), noise)?)?,
                None => emit_text(out.as_ref(), &serde_json::to_string(&exact_distribution(&state)?)?)?,
            }
        }
        Command::Sample { kernel, method, shots, seed, noise, mode, graph, out } => {
            let k = load_kernel(&kernel)?;
            if noise.is_some() && !matches!(method, Method::Circuit) {
                bail!("--noise applies to the circuit method only");
            }
            let rng = RngSpec::new(seed, 0);
            let dpp = || match &k {
                Kernel::Projection { kernel, .. } | Kernel::Dpp(kernel) => Ok(kernel),
                _ => bail!("this method needs a DPP kernel"),
            };
            let samples = match method {
                Method::Hkpv => sample_batch(&HkpvSampler::new(projection_factor(&k)?), shots, rng),
                Method::Mixture => sample_batch(&MixtureSampler::new(dpp()?), shots, rng),
                Method::Dilation => sample_batch(&DilationSampler::new(dpp()?)?, shots, rng),
                Method::Pfpp => sample_batch(&PfppSampler::new(bdg_transform(&k)?, selection(&k)?)?, shots, rng),
                Method::Circuit => {
                    let graph = load_graph(graph.as_ref())?;
                    let state = run_circuit::<f64>(&circuit_for(&k, mode, graph.as_ref())?)?;
                    let h = sample_occupations(&state, shots, rng, noise)?;
                    return emit_histogram(out.as_ref(), &h);
                }
            };
            emit_histogram(out.as_ref(), &Histogram::from_samples(k.n(), samples))?;
        }
        Command::ExactPmf { kernel, out } => {
            let pmf = exact_pmf(&load_kernel(&kernel)?)?;
            emit_text(out.as_ref(), &serde_json::to_string(&pmf)?)?;
        }
        Command::TvCompare { p, q, n_modes } => {
            let (a, b) = (read_distribution(&p, n_modes)?, read_distribution(&q, n_modes)?);
            println!("{}", tv_distance(&a, &b)?);
        }
        Command::Experiment { which, config, seed, shots, noise, reruns, mode, graph, exact, out_dir } => {
            let mut cfg = match &config {
                Some(p) => load::<ExperimentConfig>(p)?,
                None => ExperimentConfig::default(),
            };
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.shots = shots.unwrap_or(cfg.shots);
            cfg.noise = noise.or(cfg.noise);
            cfg.reruns = reruns.unwrap_or(cfg.reruns);
            cfg.mode = mode.unwrap_or(cfg.mode);
            if let Some(g) = graph {
                cfg.graph = Some(load(&g)?);
            }
            let report = match which {
                Which::Projection => run_experiment_projection(&cfg)?,
                Which::Pfpp => run_experiment_pfpp(&cfg)?,
            };
            if let Some(dir) = out_dir {
                for p in emit_plots_data(&report, &dir)? {
                    eprintln!("wrote {}", p.display());
                }
            }
            println!("{}", report_summary(&report, exact)?);
        }
    }
    Ok(())
}

fn bdg_transform(kernel: &Kernel) -> Result<&BogoliubovTransform> {
    match kernel {
        Kernel::Bdg { transform, .. } => Ok(transform),
        _ => bail!("this method needs a bdg kernel"),
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
