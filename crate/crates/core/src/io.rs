//! JSON and CSV wire formats. Mode and qubit indices are 1-based on the wire and 0-based in
//! memory; every conversion goes through this module.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::bogoliubov::{diagonalize_bdg, BdGHamiltonian, BogoliubovTransform};
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::fock_simulator::Histogram;
use crate::kernels::{
    pfaffian_kernel_from_s, validate_dpp_kernel, DppKernel, PfaffianKernel, ProjectionFactor, SMatrix,
};
use crate::numerics::{Complex, GivensRotation};
use crate::qr_engine::{CouplingGraph, RotationSchedule};
use crate::subset::{bitstring, label, parse_bitstring};
use crate::Matrix;

fn to_zero_based(k: usize, n: usize) -> Result<usize> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("index {k} outside 1..={n}")));
    }
    Ok(k - 1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelSpec {
    /// `r × N` factor with orthonormal rows.
    ProjectionFactor {
        q: Matrix,
    },
    /// DPP marginal kernel.
    Hermitian {
        k: Matrix,
    },
    SMatrix {
        s: Matrix,
    },
    Bdg {
        m: Matrix,
        delta: Matrix,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<f64>,
        /// Occupied quasi-particle modes for a projective state.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        modes: Option<Vec<usize>>,
    },
}

/// A kernel spec after validation.
#[derive(Clone, Debug)]
pub enum Kernel {
    Projection { factor: ProjectionFactor, kernel: DppKernel },
    Dpp(DppKernel),
    Pfaffian { s: SMatrix, kernel: PfaffianKernel },
    Bdg { hamiltonian: BdGHamiltonian, transform: BogoliubovTransform, beta: Option<f64>, modes: Option<Vec<usize>> },
}

impl Kernel {
    pub fn n(&self) -> usize {
        match self {
            Kernel::Projection { kernel, .. } | Kernel::Dpp(kernel) => kernel.n(),
            Kernel::Pfaffian { s, .. } => s.n(),
            Kernel::Bdg { hamiltonian, .. } => hamiltonian.n(),
        }
    }
}

impl KernelSpec {
    pub fn validate(self) -> Result<Kernel> {
        Ok(match self {
            KernelSpec::ProjectionFactor { q } => {
                let factor = ProjectionFactor::new(q)?;
                let kernel = factor.kernel()?;
                Kernel::Projection { factor, kernel }
            }
            KernelSpec::Hermitian { k } => Kernel::Dpp(validate_dpp_kernel(&k)?),
            KernelSpec::SMatrix { s } => {
                let s = SMatrix::new(s)?;
                let kernel = pfaffian_kernel_from_s(&s)?;
                Kernel::Pfaffian { s, kernel }
            }
            KernelSpec::Bdg { m, delta, beta, modes } => {
                let hamiltonian = BdGHamiltonian::new(m, delta)?;
                let n = hamiltonian.n();
                let modes =
                    modes.map(|v| v.iter().map(|&k| to_zero_based(k, n)).collect::<Result<Vec<_>>>()).transpose()?;
                if let Some(b) = beta {
                    if !(b > 0.0) {
                        return Err(Error::Domain(format!("beta must be positive, got {b}")));
                    }
                }
                let transform = diagonalize_bdg(&hamiltonian)?;
                Kernel::Bdg { hamiltonian, transform, beta, modes }
            }
        })
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(mut r: impl Read) -> Result<T> {
    let mut s = String::new();
    r.read_to_string(&mut s)?;
    Ok(serde_json::from_str(&s)?)
}

pub fn load_kernel(r: impl Read) -> Result<Kernel> {
    read_json::<KernelSpec>(r)?.validate()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationWire {
    pub l1: usize,
    pub l2: usize,
    pub theta: f64,
    pub phi: f64,
}

impl RotationWire {
    fn from_rotation(r: &GivensRotation<f64>) -> Self {
        Self { l1: r.l1 + 1, l2: r.l2 + 1, theta: r.theta, phi: r.phi }
    }

    fn to_rotation(self, n: usize) -> Result<GivensRotation<f64>> {
        GivensRotation::new(to_zero_based(self.l1, n)?, to_zero_based(self.l2, n)?, self.theta, self.phi)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleWire {
    pub n_modes: usize,
    pub rank: usize,
    pub rounds: Vec<Vec<RotationWire>>,
    pub phases: Vec<[f64; 2]>,
    pub pivots: Vec<usize>,
    #[serde(default)]
    pub preprocessing: Vec<RotationWire>,
}

impl From<&RotationSchedule<f64>> for ScheduleWire {
    fn from(s: &RotationSchedule<f64>) -> Self {
        Self {
            n_modes: s.n_modes,
            rank: s.rank,
            rounds: s.rounds.iter().map(|r| r.iter().map(RotationWire::from_rotation).collect()).collect(),
            phases: s.final_phases.iter().map(|z| [z.re, z.im]).collect(),
            pivots: s.pivots.iter().map(|p| p + 1).collect(),
            preprocessing: s.preprocessing.iter().map(RotationWire::from_rotation).collect(),
        }
    }
}

impl ScheduleWire {
    pub fn into_schedule(self) -> Result<RotationSchedule<f64>> {
        let n = self.n_modes;
        let rounds = self
            .rounds
            .into_iter()
            .map(|r| r.into_iter().map(|g| g.to_rotation(n)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let pivots = self.pivots.iter().map(|&p| to_zero_based(p, n)).collect::<Result<Vec<_>>>()?;
        if pivots.len() != self.rank || self.phases.len() != self.rank {
            return Err(Error::ShapeMismatch("pivots and phases must have one entry per row".into()));
        }
        let preprocessing =
            self.preprocessing.into_iter().map(|g| g.to_rotation(self.rank.max(2))).collect::<Result<Vec<_>>>()?;
        Ok(RotationSchedule {
            n_modes: n,
            rank: self.rank,
            rounds,
            final_phases: self.phases.iter().map(|[a, b]| Complex::new(*a, *b)).collect(),
            pivots,
            preprocessing,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GateWire {
    X { qubit: usize },
    Fgivens { q1: usize, q2: usize, theta: f64, phi: f64 },
    ParticleHoleX,
    MeasureAll,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitWire {
    pub n_qubits: usize,
    pub gates: Vec<GateWire>,
}

impl From<&Circuit> for CircuitWire {
    fn from(c: &Circuit) -> Self {
        let gates = c
            .gates()
            .iter()
            .map(|g| match *g {
                Gate::X(q) => GateWire::X { qubit: q + 1 },
                Gate::FGivens { q1, q2, theta, phi } => GateWire::Fgivens { q1: q1 + 1, q2: q2 + 1, theta, phi },
                Gate::ParticleHoleX => GateWire::ParticleHoleX,
                Gate::MeasureAll => GateWire::MeasureAll,
            })
            .collect();
        Self { n_qubits: c.n_qubits(), gates }
    }
}

impl CircuitWire {
    pub fn into_circuit(self) -> Result<Circuit> {
        let n = self.n_qubits;
        let mut c = Circuit::new(n);
        for g in self.gates {
            c.push(match g {
                GateWire::X { qubit } => Gate::X(to_zero_based(qubit, n)?),
                GateWire::Fgivens { q1, q2, theta, phi } => {
                    Gate::FGivens { q1: to_zero_based(q1, n)?, q2: to_zero_based(q2, n)?, theta, phi }
                }
                GateWire::ParticleHoleX => Gate::ParticleHoleX,
                GateWire::MeasureAll => Gate::MeasureAll,
            })?;
        }
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphWire {
    pub n_nodes: usize,
    pub edges: Vec<[usize; 2]>,
}

impl From<&CouplingGraph> for GraphWire {
    fn from(g: &CouplingGraph) -> Self {
        Self { n_nodes: g.n_nodes(), edges: g.edges().map(|(a, b)| [a + 1, b + 1]).collect() }
    }
}

impl GraphWire {
    pub fn into_graph(self) -> Result<CouplingGraph> {
        let n = self.n_nodes;
        let edges = self
            .edges
            .iter()
            .map(|[a, b]| Ok((to_zero_based(*a, n)?, to_zero_based(*b, n)?)))
            .collect::<Result<Vec<_>>>()?;
        CouplingGraph::new(n, edges)
    }
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize, Deserialize)]
struct HistogramRow {
    bitstring: String,
    subset: String,
    count: u64,
    frequency: f64,
}

/// `bitstring,subset,count,frequency`, one row per observed subset in bitmask order.
pub fn write_histogram_csv(h: &Histogram, w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for (&mask, &count) in h.counts() {
        out.serialize(HistogramRow {
            bitstring: bitstring(mask, h.n_modes()),
            subset: label(mask),
            count,
            frequency: h.frequency(mask),
        })?;
    }
    out.flush()?;
    Ok(())
}

/// Inverse of [`write_histogram_csv`]; `n_modes` is needed when the file has no rows.
pub fn read_histogram_csv(r: impl Read, n_modes: Option<usize>) -> Result<Histogram> {
    let mut rows = Vec::new();
    for row in csv::Reader::from_reader(r).deserialize::<HistogramRow>() {
        let row = row?;
        let mask = parse_bitstring(&row.bitstring)
            .ok_or_else(|| Error::InvalidArgument(format!("bad bitstring `{}`", row.bitstring)))?;
        rows.push((row.bitstring.len(), mask, row.count));
    }
    let n = match (n_modes, rows.first()) {
        (Some(n), _) => n,
        (None, Some(&(len, _, _))) => len,
        (None, None) => return Err(Error::InvalidArgument("empty histogram needs an explicit mode count".into())),
    };
    let mut h = Histogram::new(n);
    for (len, mask, count) in rows {
        if len != n {
            return Err(Error::ShapeMismatch(format!("bitstring of length {len} in a {n}-mode histogram")));
        }
        for _ in 0..count {
            h.record(mask);
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::random_orthonormal_rows;
    use crate::qr_engine::schedule_sameh_kuck;

    #[test]
    fn schedule_round_trip_is_one_based() {
        let q = random_orthonormal_rows(2, 4, 3);
        let s = schedule_sameh_kuck(&q, true).unwrap();
        let wire = ScheduleWire::from(&s);
        assert!(wire.rounds.iter().flatten().all(|g| g.l1 >= 1 && g.l2 <= 4));
        let text = to_json_pretty(&wire).unwrap();
        let back: ScheduleWire = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_schedule().unwrap(), s);
        let bad = r#"{"n_modes":3,"rank":1,"rounds":[[{"l1":0,"l2":1,"theta":0.1,"phi":0.0}]],"phases":[[1,0]],"pivots":[1]}"#;
        assert!(serde_json::from_str::<ScheduleWire>(bad).unwrap().into_schedule().is_err());
    }

    #[test]
    fn circuit_and_graph_round_trip() {
        let c = Circuit::from_gates(
            3,
            [Gate::X(0), Gate::FGivens { q1: 0, q2: 2, theta: 0.3, phi: -1.0 }, Gate::ParticleHoleX, Gate::MeasureAll],
        )
        .unwrap();
        let text = serde_json::to_string(&CircuitWire::from(&c)).unwrap();
        assert!(text.contains(r#""kind":"x","qubit":1"#));
        let back: CircuitWire = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_circuit().unwrap(), c);
        let g = CouplingGraph::t_graph();
        let gw = GraphWire::from(&g);
        assert!(gw.edges.contains(&[2, 4]));
        let g2 = gw.into_graph().unwrap();
        assert!(g2.has_edge(1, 3) && !g2.has_edge(2, 3));
    }

    #[test]
    fn kernel_specs_validate() {
        let id = r#"{"type":"hermitian","k":{"rows":2,"cols":2,"data":[[1,0],[0,0],[0,0],[0,0]]}}"#;
        assert!(matches!(load_kernel(id.as_bytes()).unwrap(), Kernel::Dpp(_)));
        let bad = r#"{"type":"hermitian","k":{"rows":2,"cols":2,"data":[[2,0],[0,0],[0,0],[0,0]]}}"#;
        assert!(load_kernel(bad.as_bytes()).is_err());
        let q = r#"{"type":"projection_factor","q":{"rows":1,"cols":2,"data":[[0.6,0],[0.8,0]]}}"#;
        assert_eq!(load_kernel(q.as_bytes()).unwrap().n(), 2);
        let h = crate::bogoliubov::reference_hamiltonian();
        let spec =
            KernelSpec::Bdg { m: h.m().clone(), delta: h.delta().clone(), beta: None, modes: Some(vec![1, 2, 3]) };
        match spec.validate().unwrap() {
            Kernel::Bdg { modes, .. } => assert_eq!(modes, Some(vec![0, 1, 2])),
            _ => panic!("wrong kind"),
        }
        assert!(load_kernel(r#"{"type":"nope"}"#.as_bytes()).is_err());
    }

    #[test]
    fn histogram_csv_round_trip() {
        let h = Histogram::from_samples(3, [0b011, 0b011, 0b101]);
        let mut buf = Vec::new();
        write_histogram_csv(&h, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next(), Some("bitstring,subset,count,frequency"));
        assert!(text.contains("110,\"{1,2}\",2,0.6666666666666666"));
        assert_eq!(read_histogram_csv(buf.as_slice(), None).unwrap(), h);
    }
}
