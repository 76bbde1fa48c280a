//! Elementary gates: `rz`, `ry`, `cx`, `x` and measurement.

use std::f64::consts::FRAC_PI_2;

use super::{Circuit, Gate};
use crate::numerics::{phase, wrap_angle, ComplexMatrix, GivensRotation};
use crate::{Matrix, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Elementary {
    X {
        q: usize,
    },
    /// `diag(e^{-iλ/2}, e^{iλ/2})`.
    Rz {
        q: usize,
        angle: f64,
    },
    /// `[[cos λ/2, -sin λ/2], [sin λ/2, cos λ/2]]`.
    Ry {
        q: usize,
        angle: f64,
    },
    Cx {
        control: usize,
        target: usize,
    },
    Measure {
        q: usize,
    },
}

impl Elementary {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Elementary::X { q } | Elementary::Rz { q, .. } | Elementary::Ry { q, .. } => vec![q],
            Elementary::Cx { control, target } => vec![control, target],
            Elementary::Measure { .. } => Vec::new(),
        }
    }

    fn relabel(&self, map: [usize; 2]) -> Self {
        match *self {
            Elementary::X { q } => Elementary::X { q: map[q] },
            Elementary::Rz { q, angle } => Elementary::Rz { q: map[q], angle },
            Elementary::Ry { q, angle } => Elementary::Ry { q: map[q], angle },
            Elementary::Cx { control, target } => Elementary::Cx { control: map[control], target: map[target] },
            Elementary::Measure { q } => Elementary::Measure { q: map[q] },
        }
    }

    fn single_qubit_matrix(&self) -> Option<[[C64; 2]; 2]> {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        match *self {
            Elementary::X { .. } => Some([[z, one], [one, z]]),
            Elementary::Rz { angle, .. } => Some([[phase(-angle / 2.0), z], [z, phase(angle / 2.0)]]),
            Elementary::Ry { angle, .. } => {
                let (s, c) = (angle / 2.0).sin_cos();
                Some([[C64::new(c, 0.0), C64::new(-s, 0.0)], [C64::new(s, 0.0), C64::new(c, 0.0)]])
            }
            _ => None,
        }
    }
}

/// Two-qubit sequence on local qubits `0 = l1` and `1 = l2`, with the unitary it must equal.
#[derive(Clone, Debug)]
pub struct ElementaryGateList {
    pub gates: Vec<Elementary>,
    /// In the basis `|n_{l1} n_{l2}⟩`, `l1` most significant.
    pub target: Matrix,
}

impl ElementaryGateList {
    pub fn product(&self) -> Matrix {
        let mut u = Matrix::identity(4);
        for g in &self.gates {
            let local = simulate_matrix_columns(g, 2);
            u = &local * &u;
        }
        u
    }
}

/// 4x4 matrix of one gate in the two-qubit basis with qubit 0 most significant.
fn simulate_matrix_columns(g: &Elementary, n: usize) -> Matrix {
    debug_assert_eq!(n, 2);
    Matrix::from_fn(4, 4, |row, col| {
        // Qubit 0 is the MSB here, the opposite of the simulator's layout; flip the bit order.
        let swap = |i: usize| ((i & 1) << 1) | (i >> 1);
        let mut amps = vec![C64::new(0.0, 0.0); 4];
        amps[swap(col)] = C64::new(1.0, 0.0);
        apply_elementary(&mut amps, g);
        amps[swap(row)]
    })
}

/// Givens gate from two CNOTs: a basis change on `l2` turns the rotation into a pair of
/// `ry(θ)` between the CNOTs, and `rz(±φ)` on `l2` dresses the phase.
pub fn decompose_givens_gate(theta: f64, phi: f64) -> ElementaryGateList {
    let (a, b) = (0, 1);
    let gates = vec![
        Elementary::Rz { q: b, angle: phi },
        Elementary::Ry { q: b, angle: FRAC_PI_2 },
        Elementary::Cx { control: b, target: a },
        Elementary::Ry { q: a, angle: theta },
        Elementary::Ry { q: b, angle: theta },
        Elementary::Cx { control: b, target: a },
        Elementary::Ry { q: b, angle: -FRAC_PI_2 },
        Elementary::Rz { q: b, angle: -phi },
    ];
    let (s, c) = theta.sin_cos();
    let mut target = Matrix::identity(4);
    target[(1, 1)] = C64::new(c, 0.0);
    target[(1, 2)] = phase(-phi) * s;
    target[(2, 1)] = -phase(phi) * s;
    target[(2, 2)] = C64::new(c, 0.0);
    ElementaryGateList { gates, target }
}

/// Adjacent rotations equivalent to a fermionic Givens gate on `(l1, l2)`: fermionic swaps walk
/// `l2` down to `l1 + 1`, a rotation acts there, and the swaps are undone.
pub fn expand_nonadjacent(rot: &GivensRotation<f64>) -> Vec<GivensRotation<f64>> {
    let (l1, l2) = (rot.l1, rot.l2);
    if l2 == l1 + 1 {
        return vec![*rot];
    }
    let swap = |k: usize, phi: f64| GivensRotation { l1: k, l2: k + 1, theta: FRAC_PI_2, phi };
    let forward: Vec<GivensRotation<f64>> = (l1 + 1..l2).rev().map(|k| swap(k, FRAC_PI_2)).collect();
    // Rotation matrices compose in the opposite order to the operators they label.
    let dim = l2 + 1;
    let mut p = ComplexMatrix::identity(dim);
    for s in &forward {
        p = &p * &s.embed(dim);
    }
    let r = &(&p.adjoint() * &rot.embed(dim)) * &p;
    let off = r[(l1, l1 + 1)];
    let theta = off.norm().atan2(r[(l1, l1)].re);
    let phi = if off.norm() > 0.0 { wrap_angle(-off.arg()) } else { 0.0 };
    let mut out = forward.clone();
    out.push(GivensRotation { l1, l2: l1 + 1, theta, phi });
    out.extend(forward.iter().rev().map(|s| swap(s.l1, -FRAC_PI_2)));
    out
}

pub fn decompose_circuit(circ: &Circuit) -> Vec<Elementary> {
    let n = circ.n_qubits();
    let mut ops = Vec::new();
    for gate in circ.gates() {
        match *gate {
            Gate::X(q) => ops.push(Elementary::X { q }),
            Gate::ParticleHoleX => ops.push(Elementary::X { q: n - 1 }),
            Gate::MeasureAll => ops.extend((0..n).map(|q| Elementary::Measure { q })),
            Gate::FGivens { q1, q2, theta, phi } => {
                let rot = GivensRotation { l1: q1, l2: q2, theta, phi };
                for step in expand_nonadjacent(&rot) {
                    let local = decompose_givens_gate(step.theta, step.phi);
                    ops.extend(local.gates.iter().map(|g| g.relabel([step.l1, step.l2])));
                }
            }
        }
    }
    ops
}

/// Plain qubit statevector update; bit `q` of the index is qubit `q`.
fn apply_elementary(amps: &mut [C64], op: &Elementary) {
    match *op {
        Elementary::Cx { control, target } => {
            for i in 0..amps.len() {
                if i >> control & 1 == 1 && i >> target & 1 == 0 {
                    amps.swap(i, i | 1 << target);
                }
            }
        }
        Elementary::Measure { .. } => {}
        _ => {
            let u = op.single_qubit_matrix().expect("single-qubit gate");
            let q = op.qubits()[0];
            for i in 0..amps.len() {
                if i >> q & 1 == 0 {
                    let j = i | 1 << q;
                    let (x, y) = (amps[i], amps[j]);
                    amps[i] = u[0][0] * x + u[0][1] * y;
                    amps[j] = u[1][0] * x + u[1][1] * y;
                }
            }
        }
    }
}

/// Run elementary gates from `|0…0⟩` on a qubit statevector with no fermionic signs.
pub fn simulate_elementary(n: usize, ops: &[Elementary]) -> Vec<C64> {
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    amps[0] = C64::new(1.0, 0.0);
    for op in ops {
        apply_elementary(&mut amps, op);
    }
    amps
}
