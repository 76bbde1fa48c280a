//! Circuit IR over modes `0..N` (mode `k` on qubit `k`), compilation from schedules and
//! Bogoliubov factorizations, elementary decomposition and CNOT accounting.

mod decompose;
mod qasm;

pub use decompose::{decompose_circuit, decompose_givens_gate, simulate_elementary, Elementary, ElementaryGateList};
pub use qasm::{export_qasm, parse_qasm};

use std::collections::BTreeSet;

use crate::bogoliubov::{PhFactorization, PhStep};
use crate::error::{Error, Result};
use crate::numerics::GivensRotation;
use crate::qr_engine::{schedule_sameh_kuck, CouplingGraph, RotationSchedule};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    X(usize),
    FGivens {
        q1: usize,
        q2: usize,
        theta: f64,
        phi: f64,
    },
    /// Pauli X on the last mode, exchanging its creation and annihilation operators.
    ParticleHoleX,
    MeasureAll,
}

impl Gate {
    pub fn givens(rot: &GivensRotation<f64>) -> Self {
        Gate::FGivens { q1: rot.l1, q2: rot.l2, theta: rot.theta, phi: rot.phi }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, gates: Vec::new() }
    }

    pub fn from_gates(n_qubits: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut c = Self::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        if self.is_measured() {
            return Err(Error::InvalidArgument("no gates may follow the final measurement".into()));
        }
        let n = self.n_qubits;
        let bad = |q: usize| Error::IndexOutOfRange { index: q, dim: n };
        match g {
            Gate::X(q) if q >= n => return Err(bad(q)),
            Gate::FGivens { q1, q2, .. } => {
                if q2 >= n {
                    return Err(bad(q2));
                }
                if q1 >= q2 {
                    return Err(Error::InvalidArgument(format!("FGivens needs q1 < q2, got ({q1}, {q2})")));
                }
            }
            Gate::ParticleHoleX if n == 0 => return Err(bad(0)),
            _ => {}
        }
        self.gates.push(g);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn is_measured(&self) -> bool {
        matches!(self.gates.last(), Some(Gate::MeasureAll))
    }

    pub fn givens_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::FGivens { .. })).count()
    }

    /// Number of X and particle-hole X gates; its parity fixes the parity of PfPP samples.
    pub fn flip_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::X(_) | Gate::ParticleHoleX)).count()
    }
}

/// Occupy the pivot modes, then run the rotations in reverse factor order: the circuit
/// realizes `G_n ... G_1` as operators, which maps the pivot occupation to the Slater
/// determinant of `Q`.
fn append_schedule(c: &mut Circuit, s: &RotationSchedule<f64>) -> Result<()> {
    for &p in &s.pivots {
        c.push(Gate::X(p))?;
    }
    let rots: Vec<&GivensRotation<f64>> = s.rotations().collect();
    for rot in rots.into_iter().rev() {
        c.push(Gate::givens(rot))?;
    }
    Ok(())
}

pub fn compile_projection_circuit(s: &RotationSchedule<f64>) -> Result<Circuit> {
    let mut c = Circuit::new(s.n_modes);
    append_schedule(&mut c, s)?;
    c.push(Gate::MeasureAll)?;
    Ok(c)
}

/// Slater part for the quasi-particles in `c`, followed by the factorization steps in reverse.
pub fn compile_pfpp_circuit(f: &PhFactorization, c: &[usize]) -> Result<Circuit> {
    let n = f.n();
    if let Some(&bad) = c.iter().find(|&&k| k >= n) {
        return Err(Error::IndexOutOfRange { index: bad, dim: n });
    }
    let mut circ = Circuit::new(n);
    if !c.is_empty() {
        let q = f.slater_factor(c);
        append_schedule(&mut circ, &schedule_sameh_kuck(&q, true)?)?;
    }
    for step in f.steps.iter().rev() {
        circ.push(match step {
            PhStep::ParticleHole => Gate::ParticleHoleX,
            PhStep::DoubleGivens(g) => Gate::givens(g),
        })?;
    }
    circ.push(Gate::MeasureAll)?;
    Ok(circ)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CnotMetrics {
    pub cnot_count: usize,
    /// Longest per-qubit chain of elementary gates, measurements excluded.
    pub depth: usize,
    /// Distinct FGivens pairs that are not edges of the coupling graph.
    pub off_graph_pairs: Vec<(usize, usize)>,
    /// FGivens gates whose modes are not neighbours in the Jordan–Wigner order and were
    /// expanded with fermionic swaps.
    pub expanded_gates: usize,
}

pub fn cnot_metrics(circ: &Circuit, g: Option<&CouplingGraph>) -> CnotMetrics {
    let ops = decompose_circuit(circ);
    let cnot_count = ops.iter().filter(|o| matches!(o, Elementary::Cx { .. })).count();
    let mut ready = vec![0usize; circ.n_qubits()];
    for op in &ops {
        let qs = op.qubits();
        if qs.is_empty() {
            continue;
        }
        let layer = qs.iter().map(|&q| ready[q]).max().unwrap_or(0) + 1;
        for q in qs {
            ready[q] = layer;
        }
    }
    let mut off = BTreeSet::new();
    let mut expanded_gates = 0;
    for gate in circ.gates() {
        if let Gate::FGivens { q1, q2, .. } = *gate {
            if q2 > q1 + 1 {
                expanded_gates += 1;
            }
            if let Some(graph) = g {
                if !graph.has_edge(q1, q2) {
                    off.insert((q1, q2));
                }
            }
        }
    }
    CnotMetrics {
        cnot_count,
        depth: ready.into_iter().max().unwrap_or(0),
        off_graph_pairs: off.into_iter().collect(),
        expanded_gates,
    }
}
