//! Quadratic fermionic Hamiltonians with pairing, their Bogoliubov diagonalization,
//! contraction matrices, and the factorization of Bogoliubov transforms into gates.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::kernels::{sigmoid, SMatrix};
use crate::numerics::{apply_givens_in_place, left_rotation_zeroing, lu_determinant, right_rotation_zeroing};
use crate::numerics::{skew_real_canonical, wrap_angle, GivensRotation, Side};
use crate::{Matrix, C64};

const INPUT_TOL: f64 = 1e-8;
const PH_THRESHOLD: f64 = 1e-10;
const NEGLIGIBLE: f64 = 1e-14;

/// One-body term `m` (Hermitian) and pairing `delta` (skew-symmetric).
#[derive(Clone, Debug, PartialEq)]
pub struct BdGHamiltonian {
    m: Matrix,
    delta: Matrix,
}

impl BdGHamiltonian {
    pub fn new(m: Matrix, delta: Matrix) -> Result<Self> {
        if !m.is_square() || m.rows() != delta.rows() || !delta.is_square() {
            return Err(Error::ShapeMismatch("M and Delta must be square and of equal size".into()));
        }
        let res = m.hermitian_residual();
        if res > INPUT_TOL {
            return Err(Error::NotHermitian { residual: res });
        }
        let skew = delta.skew_residual();
        if skew > INPUT_TOL {
            return Err(Error::InvalidArgument(format!("pairing matrix is not skew-symmetric (residual {skew:e})")));
        }
        Ok(Self { m, delta })
    }

    pub fn m(&self) -> &Matrix {
        &self.m
    }

    pub fn delta(&self) -> &Matrix {
        &self.delta
    }

    pub fn n(&self) -> usize {
        self.m.rows()
    }
}

/// `[[-M̄, -Δ̄], [Δ, M]]`, acting on `(c*, c)`.
pub fn build_bdg_matrix(h: &BdGHamiltonian) -> Matrix {
    let neg = |x: &Matrix| x.conj().scale_real(-1.0);
    Matrix::from_blocks(&neg(&h.m), &neg(&h.delta), &h.delta, &h.m)
}

/// Block swap `C = [[0, I], [I, 0]]`.
pub fn swap_involution(n: usize) -> Matrix {
    let z = Matrix::zeros(n, n);
    let i = Matrix::identity(n);
    Matrix::from_blocks(&z, &i, &i, &z)
}

/// `(1/√2) [[I, I], [iI, -iI]]`.
fn omega(n: usize) -> Matrix {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    let is = C64::new(0.0, FRAC_1_SQRT_2);
    let mut o = Matrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        o[(k, k)] = s;
        o[(k, n + k)] = s;
        o[(n + k, k)] = is;
        o[(n + k, n + k)] = -is;
    }
    o
}

/// `H = W* Diag(-ε, ε) W` with `W = Ω* R Ω`.
#[derive(Clone, Debug)]
pub struct BogoliubovTransform {
    pub w: Matrix,
    pub epsilons: Vec<f64>,
    pub r_orth: Matrix,
    pub a_skew: Matrix,
    pub det_w: i8,
}

#[derive(Clone, Copy, Debug)]
pub struct TransformResiduals {
    pub unitarity: f64,
    pub orthogonal_complex: f64,
    /// `[[U, V], [V̄, Ū]]` layout, `UU* + VV* = I` and `UVᵀ + VUᵀ = 0`.
    pub block_structure: f64,
}

impl BogoliubovTransform {
    /// Build from a real orthogonal `R` and energies, e.g. for hand-made test instances.
    pub fn from_rotation(r_orth: Matrix, epsilons: Vec<f64>) -> Result<Self> {
        let n = epsilons.len();
        if r_orth.rows() != 2 * n || !r_orth.is_square() {
            return Err(Error::ShapeMismatch("R must be 2N x 2N".into()));
        }
        if r_orth.max_imag() > 1e-12 || (&r_orth * &r_orth.transpose()).max_diff(&Matrix::identity(2 * n)) > 1e-10 {
            return Err(Error::InvalidArgument("R is not real orthogonal".into()));
        }
        let mut canon = Matrix::zeros(2 * n, 2 * n);
        for (k, &e) in epsilons.iter().enumerate() {
            canon[(k, n + k)] = C64::new(e, 0.0);
            canon[(n + k, k)] = C64::new(-e, 0.0);
        }
        let a_skew = &(&r_orth.transpose() * &canon) * &r_orth;
        let o = omega(n);
        let w = &(&o.adjoint() * &r_orth) * &o;
        let det_w = if lu_determinant(&r_orth)?.re < 0.0 { -1 } else { 1 };
        Ok(Self { w, epsilons, r_orth, a_skew, det_w })
    }

    pub fn n(&self) -> usize {
        self.epsilons.len()
    }

    /// `H_BdG` rebuilt from the spectrum.
    pub fn hamiltonian(&self) -> Matrix {
        let d: Vec<f64> = self.epsilons.iter().map(|e| -e).chain(self.epsilons.iter().copied()).collect();
        &(&self.w.adjoint() * &Matrix::from_real_diag(&d)) * &self.w
    }

    pub fn residuals(&self) -> TransformResiduals {
        let n = self.n();
        let w = &self.w;
        let id = Matrix::identity(2 * n);
        let c = swap_involution(n);
        let unitarity = (&w.adjoint() * w).max_diff(&id);
        let orthogonal_complex = (&(&w.transpose() * &c) * w).max_diff(&c);
        let u = w.block(0, 0, n, n);
        let v = w.block(0, n, n, n);
        let layout = w.block(n, 0, n, n).max_diff(&v.conj()).max(w.block(n, n, n, n).max_diff(&u.conj()));
        let norm = (&(&u * &u.adjoint()) + &(&v * &v.adjoint())).max_diff(&Matrix::identity(n));
        let cross = (&(&u * &v.transpose()) + &(&v * &u.transpose())).max_abs();
        TransformResiduals { unitarity, orthogonal_complex, block_structure: layout.max(norm).max(cross) }
    }

    fn s_from_diag(&self, first: &[f64], second: &[f64]) -> Result<SMatrix> {
        let d: Vec<f64> = first.iter().chain(second).copied().collect();
        let wb = self.w.conj();
        SMatrix::new(&(&wb.adjoint() * &Matrix::from_real_diag(&d)) * &wb)
    }
}

pub fn diagonalize_bdg(h: &BdGHamiltonian) -> Result<BogoliubovTransform> {
    let n = h.n();
    let hm = build_bdg_matrix(h);
    let o = omega(n);
    let a = (&(&o.conj() * &(&swap_involution(n) * &hm)) * &o.adjoint()).scale(C64::new(0.0, -1.0));
    let scale = a.max_abs().max(1.0);
    if a.max_imag() > INPUT_TOL * scale || a.skew_residual() > INPUT_TOL * scale {
        return Err(Error::NotRealSkew { residual: a.max_imag().max(a.skew_residual()) });
    }
    let canon = skew_real_canonical(&a.real_part())?;
    let t = BogoliubovTransform::from_rotation(canon.rotation, canon.epsilons)?;
    Ok(BogoliubovTransform { a_skew: a.real_part(), ..t })
}

/// `S = W̄* Diag(σ(βε), σ(−βε)) W̄`, the contraction matrix of the Gibbs state.
pub fn s_matrix_thermal(t: &BogoliubovTransform, beta: f64) -> Result<SMatrix> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    let hi: Vec<f64> = t.epsilons.iter().map(|&e| sigmoid(beta * e)).collect();
    let lo: Vec<f64> = t.epsilons.iter().map(|&e| sigmoid(-beta * e)).collect();
    t.s_from_diag(&hi, &lo)
}

/// `S(C) = W̄* Diag(I_{C̄}, I_C) W̄`: the quasi-particle modes in `c` are occupied.
pub fn s_matrix_projective(t: &BogoliubovTransform, c: &[usize]) -> Result<SMatrix> {
    let n = t.n();
    if let Some(&bad) = c.iter().find(|&&k| k >= n) {
        return Err(Error::IndexOutOfRange { index: bad, dim: n });
    }
    let inside: Vec<f64> = (0..n).map(|k| if c.contains(&k) { 1.0 } else { 0.0 }).collect();
    let outside: Vec<f64> = inside.iter().map(|x| 1.0 - x).collect();
    t.s_from_diag(&outside, &inside)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhStep {
    /// `Γ = Diag(G, Ḡ)` applied on the right as `L Γ*`.
    DoubleGivens(GivensRotation<f64>),
    /// Swap of the last column of each block; a Pauli X on the last mode.
    ParticleHole,
}

/// `V (W₂ | W₁) O* = (0 | D)` with `O` the product of `steps`.
#[derive(Clone, Debug)]
pub struct PhFactorization {
    pub v: Matrix,
    /// In the order they are applied to `(W₂ | W₁)`.
    pub steps: Vec<PhStep>,
    pub d_phases: Vec<C64>,
    pub ph_count: usize,
    pub double_count: usize,
    pub replay_residual: f64,
}

impl PhFactorization {
    pub fn n(&self) -> usize {
        self.v.rows()
    }

    /// Rows `c` of `Vᵀ D̄`: the particle-conserving factor feeding the Givens circuit.
    pub fn slater_factor(&self, c: &[usize]) -> Matrix {
        let n = self.n();
        Matrix::from_fn(c.len(), n, |i, j| self.v[(j, c[i])] * self.d_phases[j].conj())
    }
}

fn apply_step(l: &mut Matrix, step: &PhStep) -> Result<()> {
    let n = l.rows();
    match step {
        PhStep::ParticleHole => l.swap_cols(n - 1, 2 * n - 1),
        PhStep::DoubleGivens(g) => {
            let shifted = GivensRotation { l1: g.l1 + n, l2: g.l2 + n, theta: g.theta, phi: wrap_angle(-g.phi) };
            apply_givens_in_place(l, g, Side::Right, true)?;
            apply_givens_in_place(l, &shifted, Side::Right, true)?;
        }
    }
    Ok(())
}

/// Staircase by left rotations, then clear row `k` left to right with double rotations,
/// exchanging the last column of each block whenever the corner entry is still nonzero.
pub fn factorize_particle_hole(t: &BogoliubovTransform) -> Result<PhFactorization> {
    let n = t.n();
    let lower = t.w.block(n, 0, n, 2 * n);
    let mut l = lower.clone();
    let mut v = Matrix::identity(n);
    for col in 0..n.saturating_sub(1) {
        for i in 0..n - 1 - col {
            let (x, y) = (l[(i, col)], l[(i + 1, col)]);
            if x.norm() < NEGLIGIBLE {
                continue;
            }
            let g = left_rotation_zeroing(x, y, i, i + 1, i)?;
            apply_givens_in_place(&mut l, &g, Side::Left, false)?;
            apply_givens_in_place(&mut v, &g, Side::Left, false)?;
        }
    }

    let mut steps = Vec::new();
    let mut push = |l: &mut Matrix, step: PhStep| -> Result<()> {
        apply_step(l, &step)?;
        steps.push(step);
        Ok(())
    };
    if n > 0 && l[(0, n - 1)].norm() > PH_THRESHOLD {
        push(&mut l, PhStep::ParticleHole)?;
    }
    for k in 1..n {
        for i in k..n {
            let c0 = (n - 1 - i) + (k - 1);
            if l[(i, c0)].norm() < NEGLIGIBLE {
                continue;
            }
            let g = right_rotation_zeroing(l.row(i), c0, c0 + 1, c0)?;
            push(&mut l, PhStep::DoubleGivens(g))?;
        }
        if l[(k, n - 1)].norm() > PH_THRESHOLD {
            push(&mut l, PhStep::ParticleHole)?;
        }
    }

    let d_phases: Vec<C64> = (0..n).map(|i| l[(i, n + i)]).collect();
    // Independent replay from the original rows.
    let mut replay = &v * &lower;
    for s in &steps {
        apply_step(&mut replay, s)?;
    }
    let mut target = Matrix::zeros(n, 2 * n);
    for (i, &d) in d_phases.iter().enumerate() {
        target[(i, n + i)] = d;
    }
    let mut residual = replay.max_diff(&target);
    // Full identity: Diag(V̄, V) W O* = Diag(D̄, D).
    let mut full = &Matrix::from_blocks(&v.conj(), &Matrix::zeros(n, n), &Matrix::zeros(n, n), &v) * &t.w;
    for s in &steps {
        let (mut top, mut bottom) = (full.block(0, 0, n, 2 * n), full.block(n, 0, n, 2 * n));
        apply_step(&mut top, s)?;
        apply_step(&mut bottom, s)?;
        full.set_block(0, 0, &top);
        full.set_block(n, 0, &bottom);
    }
    let dd: Vec<C64> = d_phases.iter().map(|z| z.conj()).chain(d_phases.iter().copied()).collect();
    residual = residual.max(full.max_diff(&Matrix::from_diag(&dd)));
    if residual > 1e-8 {
        return Err(Error::ReplayResidual { residual });
    }
    let ph_count = steps.iter().filter(|s| matches!(s, PhStep::ParticleHole)).count();
    let double_count = steps.len() - ph_count;
    Ok(PhFactorization { v, steps, d_phases, ph_count, double_count, replay_residual: residual })
}

#[derive(Clone, Debug, PartialEq)]
pub enum ParityMode {
    Thermal(f64),
    Projective(Vec<usize>),
}

/// Expected value of `(−1)^{|Y|}` predicted from the spectrum and `det W`.
pub fn parity_prediction(t: &BogoliubovTransform, mode: &ParityMode) -> Result<f64> {
    let det = f64::from(t.det_w);
    match mode {
        ParityMode::Thermal(beta) => {
            if let Some(&e) = t.epsilons.iter().find(|&&e| e <= 1e-12) {
                return Err(Error::Domain(format!("thermal parity needs positive energies, found {e:e}")));
            }
            Ok(det * t.epsilons.iter().map(|e| (beta * e / 2.0).tanh()).product::<f64>())
        }
        ParityMode::Projective(c) => Ok(if c.len() % 2 == 0 { det } else { -det }),
    }
}

/// Real skew `A_M` with `H = (i/2) γᵀ A_M γ` in the Majorana basis
/// `γ_{2k} = (c_k* + c_k)/√2`, `γ_{2k+1} = i (c_k* − c_k)/√2`.
pub fn majorana_form(h: &BdGHamiltonian) -> Result<Matrix> {
    let n = h.n();
    let s = FRAC_1_SQRT_2;
    let mut t = Matrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        t[(2 * k, k)] = C64::new(s, 0.0);
        t[(2 * k, n + k)] = C64::new(s, 0.0);
        t[(2 * k + 1, k)] = C64::new(0.0, s);
        t[(2 * k + 1, n + k)] = C64::new(0.0, -s);
    }
    let full = (&(&t * &build_bdg_matrix(h)) * &t.adjoint()).scale(C64::new(0.0, -1.0));
    let a = (&full - &full.transpose()).scale_real(0.5);
    let imag = a.max_imag();
    if imag > INPUT_TOL * a.max_abs().max(1.0) {
        return Err(Error::NonRealResidue { imag });
    }
    Ok(a.real_part())
}

/// Five-mode chain with uniform pairing on nearest neighbours; the PfPP experiment's default.
pub fn reference_hamiltonian() -> BdGHamiltonian {
    let rows = [
        [1.0, 0.5, 0.2, 0.2, 0.2],
        [0.5, 1.0, 0.5, 0.2, 0.2],
        [0.2, 0.5, 1.0, 0.5, 0.2],
        [0.2, 0.2, 0.5, 1.0, 0.5],
        [0.2, 0.2, 0.2, 0.5, 1.0],
    ];
    let m = Matrix::from_real_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
    let mut d = Matrix::zeros(5, 5);
    for i in 0..4 {
        d[(i, i + 1)].re = 1.0;
        d[(i + 1, i)].re = -1.0;
    }
    BdGHamiltonian::new(m, d).unwrap()
}
