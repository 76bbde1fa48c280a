//! Dense `2^N × 2^N` operators built from Kronecker products of Pauli matrices.
//!
//! Deliberately independent of the bit-twiddling simulator: every operator here is a product
//! of explicit matrices, so agreement between the two is a meaningful check. Only for `N ≤ 6`.

use crate::bogoliubov::BdGHamiltonian;
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::numerics::{lu_determinant, matrix_function_hermitian_complex, phase, GivensRotation};
use crate::{Matrix, C64};

pub const MAX_ORACLE_MODES: usize = 6;

fn check(n: usize) -> Result<()> {
    if n > MAX_ORACLE_MODES {
        return Err(Error::TooManyModes { n, max: MAX_ORACLE_MODES });
    }
    Ok(())
}

fn pauli(name: char) -> Matrix {
    let r = |rows: [[f64; 2]; 2]| Matrix::from_real_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
    match name {
        'I' => Matrix::identity(2),
        'X' => r([[0.0, 1.0], [1.0, 0.0]]),
        'Z' => r([[1.0, 0.0], [0.0, -1.0]]),
        // |0⟩⟨1|, i.e. (σx + iσy)/2: removes the particle.
        '-' => r([[0.0, 1.0], [0.0, 0.0]]),
        'n' => r([[0.0, 0.0], [0.0, 1.0]]),
        _ => unreachable!("unknown factor {name}"),
    }
}

/// `factors[k]` acts on mode `k`; mode 0 is the least significant bit, hence the reversed product.
fn kron_modes(factors: &[Matrix]) -> Matrix {
    factors.iter().rev().fold(Matrix::identity(1), |acc, f| acc.kron(f))
}

/// `a_j = Z ⊗ … ⊗ Z ⊗ σ⁻ ⊗ I ⊗ … ⊗ I` with the `Z` string on the modes below `j`.
pub fn annihilation(n: usize, j: usize) -> Result<Matrix> {
    check(n)?;
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, dim: n });
    }
    let f: Vec<Matrix> = (0..n)
        .map(|k| {
            pauli(if k < j {
                'Z'
            } else if k == j {
                '-'
            } else {
                'I'
            })
        })
        .collect();
    Ok(kron_modes(&f))
}

pub fn creation(n: usize, j: usize) -> Result<Matrix> {
    Ok(annihilation(n, j)?.adjoint())
}

pub fn number(n: usize, j: usize) -> Result<Matrix> {
    let a = annihilation(n, j)?;
    Ok(&a.adjoint() * &a)
}

/// `I ⊗ … ⊗ (I − Z)/2 ⊗ … ⊗ I`, the qubit form of the number operator.
pub fn number_from_paulis(n: usize, j: usize) -> Result<Matrix> {
    check(n)?;
    let f: Vec<Matrix> = (0..n).map(|k| if k == j { pauli('n') } else { pauli('I') }).collect();
    Ok(kron_modes(&f))
}

/// `(−1)^{total occupation}`.
pub fn parity(n: usize) -> Result<Matrix> {
    check(n)?;
    Ok(kron_modes(&vec![pauli('Z'); n]))
}

pub fn flip(n: usize, k: usize) -> Result<Matrix> {
    check(n)?;
    let f: Vec<Matrix> = (0..n).map(|m| if m == k { pauli('X') } else { pauli('I') }).collect();
    Ok(kron_modes(&f))
}

/// `exp(θ(e^{-iφ} a*_{l2} a_{l1} − e^{iφ} a*_{l1} a_{l2}))` by diagonalizing `i` times the generator.
pub fn givens_operator(n: usize, rot: &GivensRotation<f64>) -> Result<Matrix> {
    let (a1, a2) = (annihilation(n, rot.l1)?, annihilation(n, rot.l2)?);
    let hop = &a2.adjoint() * &a1;
    let gen = (&hop.scale(phase(-rot.phi)) - &hop.adjoint().scale(phase(rot.phi))).scale_real(rot.theta);
    // gen is anti-Hermitian, so i·gen is Hermitian and exp(gen) = exp(-i (i·gen)).
    let herm = gen.scale(C64::new(0.0, 1.0));
    matrix_function_hermitian_complex(&herm, |x| phase(-x))
}

/// `Σ M_ij a*_i a_j + ½ Σ (Δ_ij a*_i a*_j − Δ̄_ij a_i a_j)`, the second quantization of the
/// BdG matrix up to the constant `tr M / 2`.
pub fn bdg_operator(h: &BdGHamiltonian) -> Result<Matrix> {
    let n = h.n();
    let a: Vec<Matrix> = (0..n).map(|j| annihilation(n, j)).collect::<Result<_>>()?;
    let ad: Vec<Matrix> = a.iter().map(Matrix::adjoint).collect();
    let mut out = Matrix::zeros(1 << n, 1 << n);
    for i in 0..n {
        for j in 0..n {
            out = &out + &(&ad[i] * &a[j]).scale(h.m()[(i, j)]);
            // The pair term plus its adjoint, which is the −Δ̄ a a part.
            let pair = (&ad[i] * &ad[j]).scale(h.delta()[(i, j)] * 0.5);
            out = &(&out + &pair) + &pair.adjoint();
        }
    }
    Ok(out)
}

/// Product of the gate matrices up to the measurement.
pub fn circuit_unitary(c: &Circuit) -> Result<Matrix> {
    let n = c.n_qubits();
    check(n)?;
    let mut u = Matrix::identity(1 << n);
    for g in c.gates() {
        let m = match *g {
            Gate::X(q) => flip(n, q)?,
            Gate::ParticleHoleX => flip(n, n - 1)?,
            Gate::FGivens { q1, q2, theta, phi } => givens_operator(n, &GivensRotation { l1: q1, l2: q2, theta, phi })?,
            Gate::MeasureAll => break,
        };
        u = &m * &u;
    }
    Ok(u)
}

#[derive(Clone, Debug)]
pub enum DenseState {
    Pure(Vec<C64>),
    /// `exp(−β H)/Z` for a dense Hermitian operator `H`.
    Thermal {
        hamiltonian: Matrix,
        beta: f64,
    },
}

pub fn density_matrix(spec: &DenseState) -> Result<Matrix> {
    match spec {
        DenseState::Pure(psi) => {
            let dim = psi.len();
            if !dim.is_power_of_two() {
                return Err(Error::ShapeMismatch(format!("{dim} amplitudes")));
            }
            check(dim.trailing_zeros() as usize)?;
            Ok(Matrix::from_fn(dim, dim, |i, j| psi[i] * psi[j].conj()))
        }
        DenseState::Thermal { hamiltonian, beta } => {
            check(hamiltonian.rows().trailing_zeros() as usize)?;
            let eig = crate::numerics::hermitian_eig(hamiltonian)?;
            // Shift by the ground energy so the weights cannot overflow.
            let e0 = eig.eigenvalues.first().copied().unwrap_or(0.0);
            let w = eig.apply(|x| (-beta * (x - e0)).exp());
            let z = w.trace().re;
            Ok(w.scale_real(1.0 / z))
        }
    }
}

pub fn expectation(rho: &Matrix, op: &Matrix) -> C64 {
    (rho * op).trace()
}

/// `tr(ρ N_{i1} … N_{ik})`.
pub fn occupation_correlation(rho: &Matrix, indices: &[usize]) -> Result<f64> {
    let n = rho.rows().trailing_zeros() as usize;
    let mut op = Matrix::identity(rho.rows());
    for &i in indices {
        op = &op * &number(n, i)?;
    }
    Ok(expectation(rho, &op).re)
}

/// `C_ij = ⟨a*_i a_j⟩`.
pub fn one_body_matrix(rho: &Matrix) -> Result<Matrix> {
    let n = rho.rows().trailing_zeros() as usize;
    let a: Vec<Matrix> = (0..n).map(|j| annihilation(n, j)).collect::<Result<_>>()?;
    Ok(Matrix::from_fn(n, n, |i, j| expectation(rho, &(&a[i].adjoint() * &a[j]))))
}

/// `S_ab = ⟨ξ_a ξ*_b⟩` for `ξ = (a_1, …, a_N, a*_1, …, a*_N)`.
pub fn contraction_matrix(rho: &Matrix) -> Result<Matrix> {
    let n = rho.rows().trailing_zeros() as usize;
    let a: Vec<Matrix> = (0..n).map(|j| annihilation(n, j)).collect::<Result<_>>()?;
    let xi: Vec<Matrix> = a.iter().cloned().chain(a.iter().map(Matrix::adjoint)).collect();
    Ok(Matrix::from_fn(2 * n, 2 * n, |p, q| expectation(rho, &(&xi[p] * &xi[q].adjoint()))))
}

/// `det(C_I)` for the one-body matrix restricted to `indices`: the Wick side of the identity.
pub fn wick_determinant(c: &Matrix, indices: &[usize]) -> Result<f64> {
    if indices.is_empty() {
        return Ok(1.0);
    }
    Ok(lu_determinant(&c.submatrix(indices, indices))?.re)
}

/// Dense Gibbs state of a particle-conserving one-body Hamiltonian `Σ H_ij a*_i a_j`.
pub fn thermal_number_conserving(h: &Matrix, beta: f64) -> Result<Matrix> {
    let bdg = BdGHamiltonian::new(h.clone(), Matrix::zeros(h.rows(), h.rows()))?;
    density_matrix(&DenseState::Thermal { hamiltonian: bdg_operator(&bdg)?, beta })
}

/// Largest entry of `{a_i, a*_j} − δ_ij` and `{a_i, a_j}` over all pairs.
pub fn car_residual(n: usize) -> Result<f64> {
    let a: Vec<Matrix> = (0..n).map(|j| annihilation(n, j)).collect::<Result<_>>()?;
    let id = Matrix::identity(1 << n);
    let zero = Matrix::zeros(1 << n, 1 << n);
    let anti = |x: &Matrix, y: &Matrix| &(x * y) + &(y * x);
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { &id } else { &zero };
            worst = worst.max(anti(&a[i], &a[j].adjoint()).max_diff(want));
            worst = worst.max(anti(&a[i], &a[j]).max_abs());
        }
    }
    Ok(worst)
}
