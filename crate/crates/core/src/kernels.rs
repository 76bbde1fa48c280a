//! Determinantal and Pfaffian point-process kernels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, lu_determinant, pfaffian, svd, HermitianEig};
use crate::{Matrix, C64};

const SPECTRUM_TOL: f64 = 1e-8;
const RANK_CUTOFF: f64 = 1e-10;
const LOGIT_FLOOR: f64 = 1e-12;

/// Hermitian marginal kernel with spectrum in `[0, 1]`.
#[derive(Clone, Debug)]
pub struct DppKernel {
    matrix: Matrix,
    eigen: HermitianEig<f64>,
    is_projection: bool,
}

impl DppKernel {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn eigen(&self) -> &HermitianEig<f64> {
        &self.eigen
    }

    pub fn is_projection(&self) -> bool {
        self.is_projection
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    /// Expected sample size.
    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }
}

/// `r × N` factor `Q` with orthonormal rows; the kernel it induces is `Q* Q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionFactor {
    q: Matrix,
}

impl ProjectionFactor {
    pub fn new(q: Matrix) -> Result<Self> {
        let res = q.row_orthonormality_residual();
        if res > 1e-9 {
            return Err(Error::InvalidKernel(format!("factor rows are not orthonormal (residual {res:e})")));
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn rank(&self) -> usize {
        self.q.rows()
    }

    pub fn n(&self) -> usize {
        self.q.cols()
    }

    pub fn kernel_matrix(&self) -> Matrix {
        &self.q.adjoint() * &self.q
    }

    pub fn kernel(&self) -> Result<DppKernel> {
        validate_dpp_kernel(&self.kernel_matrix())
    }
}

/// Inverse temperature and chemical potential.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalSpec {
    pub beta: f64,
    pub mu: f64,
}

impl ThermalSpec {
    pub fn new(beta: f64, mu: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) || !mu.is_finite() {
            return Err(Error::Domain(format!("need beta > 0 and finite mu, got beta={beta}, mu={mu}")));
        }
        Ok(Self { beta, mu })
    }
}

/// Numerically stable logistic function.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn validate_dpp_kernel(k: &Matrix) -> Result<DppKernel> {
    if !k.is_square() {
        return Err(Error::ShapeMismatch(format!("kernel must be square, got {}x{}", k.rows(), k.cols())));
    }
    let res = k.hermitian_residual();
    if res > SPECTRUM_TOL {
        return Err(Error::NotHermitian { residual: res });
    }
    let eigen = hermitian_eig(k)?;
    if let Some(&bad) = eigen.eigenvalues.iter().find(|&&x| !(-SPECTRUM_TOL..=1.0 + SPECTRUM_TOL).contains(&x)) {
        return Err(Error::InvalidKernel(format!("eigenvalue {bad} outside [0, 1]")));
    }
    let is_projection = eigen.eigenvalues.iter().all(|&x| x.abs() <= SPECTRUM_TOL || (x - 1.0).abs() <= SPECTRUM_TOL);
    Ok(DppKernel { matrix: k.clone(), eigen, is_projection })
}

/// Orthogonal projector onto the range of `a`, with the matching orthonormal factor.
pub fn projection_kernel_from_factor(a: &Matrix) -> Result<(DppKernel, ProjectionFactor)> {
    if a.max_abs() == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let dec = svd(a)?;
    let r = dec.numerical_rank(RANK_CUTOFF);
    let q = dec.u.block(0, 0, a.rows(), r).adjoint();
    let factor = ProjectionFactor::new(q)?;
    Ok((factor.kernel()?, factor))
}

/// Projector onto the top-`k` right singular vectors of `x`.
pub fn css_kernel(x: &Matrix, k: usize) -> Result<(DppKernel, ProjectionFactor)> {
    let rank = svd(x)?.numerical_rank(RANK_CUTOFF);
    if k > rank {
        return Err(Error::RankTooLow { requested: k, rank });
    }
    let gram = &x.adjoint() * x;
    let eig = hermitian_eig(&gram)?;
    let n = gram.rows();
    // Eigenvalues ascend, so the dominant directions are the last k columns.
    let q = Matrix::from_fn(k, n, |i, j| eig.eigenvectors[(j, n - 1 - i)].conj());
    let factor = ProjectionFactor::new(q)?;
    Ok((factor.kernel()?, factor))
}

fn check_indices(s: &[usize], n: usize) -> Result<()> {
    match s.iter().find(|&&i| i >= n) {
        Some(&index) => Err(Error::IndexOutOfRange { index, dim: n }),
        None => Ok(()),
    }
}

/// `P(S ⊆ Y) = det(K_S)`.
pub fn dpp_inclusion_probability(k: &DppKernel, s: &[usize]) -> Result<f64> {
    check_indices(s, k.n())?;
    if s.is_empty() {
        return Ok(1.0);
    }
    Ok(lu_determinant(&k.matrix.submatrix(s, s))?.re)
}

/// `K = sigma(-beta (H - mu))`.
pub fn sigmoid_kernel(h: &Matrix, spec: ThermalSpec) -> Result<DppKernel> {
    let eig = hermitian_eig(h)?;
    let k = eig.apply(|l| sigmoid(-spec.beta * (l - spec.mu)));
    validate_dpp_kernel(&k)
}

/// One-body energies whose sigmoid kernel is `k`; eigenvectors are the kernel's.
pub fn logit_hamiltonian(k: &DppKernel, spec: ThermalSpec) -> Result<HermitianEig<f64>> {
    let mut energies = Vec::with_capacity(k.n());
    for &d in &k.eigen.eigenvalues {
        if !(LOGIT_FLOOR..=1.0 - LOGIT_FLOOR).contains(&d) {
            return Err(Error::Domain(format!("eigenvalue {d} too close to 0 or 1 for a finite Hamiltonian")));
        }
        energies.push(spec.mu + ((1.0 - d) / d).ln() / spec.beta);
    }
    Ok(HermitianEig { eigenvalues: energies, eigenvectors: k.eigen.eigenvectors.clone() })
}

/// Rank-`N` projection kernel on `2N` points whose restriction to the first `N` is `k`.
pub fn dilate_kernel(k: &DppKernel) -> Result<DppKernel> {
    let n = k.n();
    let off = k.eigen.apply(|x| {
        let x = x.clamp(0.0, 1.0);
        (x * (1.0 - x)).sqrt()
    });
    let comp = &Matrix::identity(n) - &k.matrix;
    let dil = Matrix::from_blocks(&k.matrix, &off, &off, &comp);
    validate_dpp_kernel(&dil)
}

/// `2N × 2N` contraction matrix with the particle-hole symmetry `C S̄ C = I − S`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SMatrix {
    matrix: Matrix,
}

/// `C S̄ C` for the block swap `C = [[0, I], [I, 0]]`.
pub fn particle_hole_conjugate(s: &Matrix) -> Matrix {
    let n = s.rows() / 2;
    Matrix::from_fn(s.rows(), s.cols(), |i, j| s[((i + n) % (2 * n), (j + n) % (2 * n))].conj())
}

impl SMatrix {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() % 2 == 1 {
            return Err(Error::ShapeMismatch(format!("S must be 2N x 2N, got {}x{}", matrix.rows(), matrix.cols())));
        }
        let res = matrix.hermitian_residual();
        if res > SPECTRUM_TOL {
            return Err(Error::NotHermitian { residual: res });
        }
        let ph = particle_hole_conjugate(&matrix).max_diff(&(&Matrix::identity(matrix.rows()) - &matrix));
        if ph > SPECTRUM_TOL {
            return Err(Error::ParticleHole { residual: ph });
        }
        let eig = hermitian_eig(&matrix)?;
        if let Some(&bad) = eig.eigenvalues.iter().find(|&&x| !(-SPECTRUM_TOL..=1.0 + SPECTRUM_TOL).contains(&x)) {
            return Err(Error::InvalidKernel(format!("S eigenvalue {bad} outside [0, 1]")));
        }
        let s = Self { matrix };
        let skew = s.s21().skew_residual();
        if skew > SPECTRUM_TOL {
            return Err(Error::InvalidKernel(format!("S21 is not skew-symmetric (residual {skew:e})")));
        }
        Ok(s)
    }

    /// `S = Diag(I − K̄, K)`: the PfPP that is the DPP with kernel `K`.
    pub fn from_dpp(k: &DppKernel) -> Result<Self> {
        let n = k.n();
        let z = Matrix::zeros(n, n);
        let top = &Matrix::identity(n) - &k.matrix.conj();
        Self::new(Matrix::from_blocks(&top, &z, &z, &k.matrix))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.rows() / 2
    }

    pub fn s11(&self) -> Matrix {
        self.matrix.block(0, 0, self.n(), self.n())
    }

    pub fn s12(&self) -> Matrix {
        self.matrix.block(0, self.n(), self.n(), self.n())
    }

    pub fn s21(&self) -> Matrix {
        self.matrix.block(self.n(), 0, self.n(), self.n())
    }

    pub fn s22(&self) -> Matrix {
        self.matrix.block(self.n(), self.n(), self.n(), self.n())
    }
}

/// Pfaffian kernel in interleaved layout: rows and columns `2i, 2i+1` hold block `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct PfaffianKernel {
    matrix: Matrix,
}

impl PfaffianKernel {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() % 2 == 1 {
            return Err(Error::ShapeMismatch("Pfaffian kernel must be 2N x 2N".into()));
        }
        let res = matrix.skew_residual();
        if res > 1e-10 * matrix.max_abs().max(1.0) {
            return Err(Error::InvalidKernel(format!("kernel blocks violate K(i,j)^T = -K(j,i) (residual {res:e})")));
        }
        Ok(Self { matrix })
    }

    pub fn n(&self) -> usize {
        self.matrix.rows() / 2
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn block(&self, i: usize, j: usize) -> [[C64; 2]; 2] {
        let m = &self.matrix;
        [[m[(2 * i, 2 * j)], m[(2 * i, 2 * j + 1)]], [m[(2 * i + 1, 2 * j)], m[(2 * i + 1, 2 * j + 1)]]]
    }

    fn restricted(&self, s: &[usize]) -> Matrix {
        let idx: Vec<usize> = s.iter().flat_map(|&i| [2 * i, 2 * i + 1]).collect();
        self.matrix.submatrix(&idx, &idx)
    }
}

pub fn pfaffian_kernel_from_s(s: &SMatrix) -> Result<PfaffianKernel> {
    let n = s.n();
    let (s21, s22) = (s.s21(), s.s22());
    let mut k = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            k[(2 * i, 2 * j)] = s21[(i, j)];
            k[(2 * i, 2 * j + 1)] = s22[(i, j)];
            k[(2 * i + 1, 2 * j)] = -s22[(j, i)];
            k[(2 * i + 1, 2 * j + 1)] = s21[(j, i)].conj();
        }
    }
    PfaffianKernel::new(k)
}

fn real_or_err(z: C64) -> Result<f64> {
    if z.im.abs() > 1e-8 {
        return Err(Error::NonRealResidue { imag: z.im });
    }
    Ok(z.re)
}

/// `P(S ⊆ Y) = Pf(K_S)`.
pub fn pfpp_inclusion_probability(k: &PfaffianKernel, s: &[usize]) -> Result<f64> {
    check_indices(s, k.n())?;
    if s.is_empty() {
        return Ok(1.0);
    }
    real_or_err(pfaffian(&k.restricted(s))?)
}

/// `J_T`: the block `[[0, 1], [-1, 0]]` on the diagonal of each mode in `mask`.
fn j_mask(n: usize, mask: usize) -> Matrix {
    let mut j = Matrix::zeros(2 * n, 2 * n);
    for i in (0..n).filter(|i| mask >> i & 1 == 1) {
        j[(2 * i, 2 * i + 1)] = C64::new(1.0, 0.0);
        j[(2 * i + 1, 2 * i)] = C64::new(-1.0, 0.0);
    }
    j
}

/// `P(Y = S) = (−1)^{|S̄|} Pf(K − J_{S̄})`, with `S` a bitmask.
pub fn pfpp_pmf(k: &PfaffianKernel, s: usize) -> Result<f64> {
    let n = k.n();
    if s >> n != 0 {
        return Err(Error::IndexOutOfRange { index: usize::BITS as usize - s.leading_zeros() as usize - 1, dim: n });
    }
    let rest = crate::subset::complement(s, n);
    let sign = if rest.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
    let p = sign * real_or_err(pfaffian(&(&k.matrix - &j_mask(n, rest)))?)?;
    if p < -1e-8 {
        return Err(Error::NegativeProbability { value: p });
    }
    Ok(p)
}

/// `E[(−1)^{|Y|}] = Pf(J − 2K)`.
pub fn expected_parity(k: &PfaffianKernel) -> Result<f64> {
    let n = k.n();
    real_or_err(pfaffian(&(&j_mask(n, (1 << n) - 1) - &k.matrix.scale_real(2.0)))?)
}
