//! Classical reference samplers and brute-force distributions.
//!
//! Every sampler draws a subset as a bitmask. Prepared samplers do their linear algebra once
//! and are then cheap per draw; the `sample_*` functions are one-shot conveniences.

use rand::Rng;

use crate::bogoliubov::{factorize_particle_hole, BogoliubovTransform};
use crate::circuit::compile_pfpp_circuit;
use crate::error::{Error, Result};
use crate::fock_simulator::{cumulative, draw_index, exact_distribution, run_circuit};
use crate::kernels::{dilate_kernel, pfpp_pmf, sigmoid, DppKernel, PfaffianKernel, ProjectionFactor};
use crate::numerics::{apply_givens_in_place, left_rotation_zeroing, Side};
use crate::rng::{par_draws, ChunkRngs, RngSpec};
use crate::subset::{mask_of, members};
use crate::{Matrix, C64};

pub const MAX_DPP_BRUTE_FORCE: usize = 14;
pub const MAX_PFPP_BRUTE_FORCE: usize = 10;
/// Largest mode count for which the two-step PfPP sampler tabulates its circuits.
pub const MAX_PFPP_SAMPLER: usize = 12;
const NEGATIVITY_GUARD: f64 = 1e-9;
const MASS_TOL: f64 = 1e-7;

/// Chain-rule sampler on the rows of an orthonormal factor `V` (`k × N`): draw column `j`
/// with probability `|V_{:j}|² / k`, rotate the rows so only the last touches column `j`, drop
/// that row and re-orthonormalize the rest.
fn hkpv_rows<R: Rng>(v: &Matrix, rng: &mut R) -> usize {
    let mut v = v.clone();
    let mut mask = 0usize;
    while v.rows() > 0 {
        let k = v.rows();
        let weights: Vec<f64> = (0..v.cols())
            .map(|j| if mask >> j & 1 == 1 { 0.0 } else { (0..k).map(|i| v[(i, j)].norm_sqr()).sum() })
            .collect();
        let cdf = cumulative(&weights).expect("projection rows carry mass");
        let j = draw_index(&cdf, rng);
        mask |= 1 << j;
        for i in 0..k - 1 {
            let (x, y) = (v[(i, j)], v[(k - 1, j)]);
            if x.norm() == 0.0 {
                continue;
            }
            let g = left_rotation_zeroing(x, y, i, k - 1, i).expect("nonzero pair");
            apply_givens_in_place(&mut v, &g, Side::Left, false).expect("indices in range");
        }
        v = v.block(0, 0, k - 1, v.cols());
        reorthonormalize(&mut v, j);
    }
    mask
}

/// Modified Gram–Schmidt on the rows, with column `j` forced back to zero.
fn reorthonormalize(v: &mut Matrix, j: usize) {
    for i in 0..v.rows() {
        v[(i, j)] = C64::new(0.0, 0.0);
        for p in 0..i {
            let dot: C64 = (0..v.cols()).map(|c| v[(p, c)].conj() * v[(i, c)]).sum();
            for c in 0..v.cols() {
                let t = v[(p, c)] * dot;
                v[(i, c)] -= t;
            }
        }
        let norm = (0..v.cols()).map(|c| v[(i, c)].norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for c in 0..v.cols() {
                v[(i, c)] /= norm;
            }
        }
    }
}

/// A prepared sampler; `draw` must be deterministic given the generators.
pub trait SubsetSampler: Sync {
    fn n(&self) -> usize;
    fn draw(&self, rngs: &mut ChunkRngs) -> usize;
}

pub struct HkpvSampler {
    factor: ProjectionFactor,
}

impl HkpvSampler {
    pub fn new(factor: ProjectionFactor) -> Self {
        Self { factor }
    }
}

impl SubsetSampler for HkpvSampler {
    fn n(&self) -> usize {
        self.factor.n()
    }

    fn draw(&self, rngs: &mut ChunkRngs) -> usize {
        hkpv_rows(self.factor.q(), &mut rngs.measure)
    }
}

/// Bernoulli selection of eigenvectors, then HKPV on the selected ones.
pub struct MixtureSampler {
    n: usize,
    /// Row `k` is the conjugated eigenvector `k`.
    rows: Matrix,
    nus: Vec<f64>,
}

impl MixtureSampler {
    pub fn new(k: &DppKernel) -> Self {
        let eig = k.eigen();
        let n = k.n();
        Self { n, rows: eig.eigenvectors.adjoint(), nus: eig.eigenvalues.iter().map(|x| x.clamp(0.0, 1.0)).collect() }
    }
}

impl SubsetSampler for MixtureSampler {
    fn n(&self) -> usize {
        self.n
    }

    fn draw(&self, rngs: &mut ChunkRngs) -> usize {
        let chosen: Vec<usize> =
            self.nus.iter().enumerate().filter(|(_, &nu)| rngs.select.gen_bool(nu)).map(|(k, _)| k).collect();
        let all: Vec<usize> = (0..self.n).collect();
        hkpv_rows(&self.rows.submatrix(&chosen, &all), &mut rngs.measure)
    }
}

/// HKPV on the rank-`N` dilation, keeping the points that fall in the original ground set.
pub struct DilationSampler {
    n: usize,
    inner: HkpvSampler,
}

impl DilationSampler {
    pub fn new(k: &DppKernel) -> Result<Self> {
        let n = k.n();
        let dil = dilate_kernel(k)?;
        let eig = dil.eigen();
        let top: Vec<usize> = (0..2 * n).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
        if top.len() != n {
            return Err(Error::InvalidKernel(format!("dilation has rank {} instead of {n}", top.len())));
        }
        let q = Matrix::from_fn(n, 2 * n, |i, j| eig.eigenvectors[(j, top[i])].conj());
        Ok(Self { n, inner: HkpvSampler::new(ProjectionFactor::new(q)?) })
    }
}

impl SubsetSampler for DilationSampler {
    fn n(&self) -> usize {
        self.n
    }

    fn draw(&self, rngs: &mut ChunkRngs) -> usize {
        self.inner.draw(rngs) & ((1 << self.n) - 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum QuasiParticles {
    /// Mode `k` occupied with probability `σ(−β ε_k)`.
    Thermal(f64),
    /// A fixed set of occupied quasi-particle modes.
    Fixed(Vec<usize>),
}

/// Two-step PfPP sampler: choose occupied quasi-particles, then measure the compiled circuit.
/// The output law of each circuit is tabulated once.
pub struct PfppSampler {
    n: usize,
    probs: Vec<f64>,
    fixed: Option<usize>,
    /// Indexed by the quasi-particle bitmask.
    cdfs: Vec<Vec<f64>>,
}

impl PfppSampler {
    pub fn new(t: &BogoliubovTransform, selection: QuasiParticles) -> Result<Self> {
        let n = t.n();
        if n > MAX_PFPP_SAMPLER {
            return Err(Error::TooManyModes { n, max: MAX_PFPP_SAMPLER });
        }
        let f = factorize_particle_hole(t)?;
        let (probs, fixed) = match &selection {
            QuasiParticles::Thermal(beta) => {
                if !(*beta > 0.0) {
                    return Err(Error::Domain(format!("beta must be positive, got {beta}")));
                }
                (t.epsilons.iter().map(|e| sigmoid(-beta * e)).collect(), None)
            }
            QuasiParticles::Fixed(c) => {
                if let Some(&bad) = c.iter().find(|&&k| k >= n) {
                    return Err(Error::IndexOutOfRange { index: bad, dim: n });
                }
                (Vec::new(), Some(mask_of(c)))
            }
        };
        let table = |m: usize| -> Result<Vec<f64>> {
            let circ = compile_pfpp_circuit(&f, &members(m))?;
            cumulative(&exact_distribution(&run_circuit::<f64>(&circ)?)?)
        };
        let cdfs = match fixed {
            Some(m) => {
                (0..1usize << n).map(|k| if k == m { table(k) } else { Ok(Vec::new()) }).collect::<Result<_>>()?
            }
            None => (0..1usize << n).map(table).collect::<Result<_>>()?,
        };
        Ok(Self { n, probs, fixed, cdfs })
    }

    /// The exact output law: the selection weights mixed over the tabulated circuit laws.
    pub fn pmf(&self) -> Vec<f64> {
        let mut out = vec![0.0; 1 << self.n];
        for (c, cdf) in self.cdfs.iter().enumerate() {
            let w = match self.fixed {
                Some(m) if m == c => 1.0,
                Some(_) => continue,
                None => {
                    self.probs.iter().enumerate().map(|(k, &p)| if c >> k & 1 == 1 { p } else { 1.0 - p }).product()
                }
            };
            let total = cdf[cdf.len() - 1];
            let mut prev = 0.0;
            for (s, &v) in cdf.iter().enumerate() {
                out[s] += w * (v - prev) / total;
                prev = v;
            }
        }
        out
    }
}

impl SubsetSampler for PfppSampler {
    fn n(&self) -> usize {
        self.n
    }

    fn draw(&self, rngs: &mut ChunkRngs) -> usize {
        let c = match self.fixed {
            Some(m) => m,
            None => {
                self.probs.iter().enumerate().fold(0, |m, (k, &p)| if rngs.select.gen_bool(p) { m | 1 << k } else { m })
            }
        };
        draw_index(&self.cdfs[c], &mut rngs.measure)
    }
}

/// `count` samples in parallel chunks; the result is the same for any thread count.
pub fn sample_batch<S: SubsetSampler>(s: &S, count: u64, rng: RngSpec) -> Vec<usize> {
    par_draws(count, rng, |r| s.draw(r))
}

fn one<S: SubsetSampler>(s: &S, rng: RngSpec) -> Vec<usize> {
    members(sample_batch(s, 1, rng)[0])
}

pub fn hkpv_sample(q: &ProjectionFactor, rng: RngSpec) -> Vec<usize> {
    one(&HkpvSampler::new(q.clone()), rng)
}

pub fn sample_general_dpp(k: &DppKernel, rng: RngSpec) -> Vec<usize> {
    one(&MixtureSampler::new(k), rng)
}

pub fn sample_dpp_via_dilation(k: &DppKernel, rng: RngSpec) -> Result<Vec<usize>> {
    Ok(one(&DilationSampler::new(k)?, rng))
}

pub fn sample_pfpp(t: &BogoliubovTransform, beta: f64, rng: RngSpec) -> Result<Vec<usize>> {
    Ok(one(&PfppSampler::new(t, QuasiParticles::Thermal(beta))?, rng))
}

#[derive(Clone, Copy, Debug)]
pub enum PointProcess<'a> {
    Dpp(&'a DppKernel),
    Pfpp(&'a PfaffianKernel),
}

/// Full PMF indexed by bitmask.
pub fn brute_force_distribution(spec: PointProcess<'_>) -> Result<Vec<f64>> {
    let raw = match spec {
        PointProcess::Dpp(k) => dpp_pmf(k)?,
        PointProcess::Pfpp(k) => {
            let n = k.n();
            if n > MAX_PFPP_BRUTE_FORCE {
                return Err(Error::TooManyModes { n, max: MAX_PFPP_BRUTE_FORCE });
            }
            (0..1usize << n).map(|s| pfpp_pmf(k, s)).collect::<Result<Vec<_>>>()?
        }
    };
    finish_pmf(raw)
}

/// Inclusion–exclusion over supersets: `P(Y = S) = Σ_{J ⊇ S} (−1)^{|J \ S|} det(K_J)`. For a
/// projection the sum collapses to `det(K_S)` on the size-`r` subsets.
fn dpp_pmf(k: &DppKernel) -> Result<Vec<f64>> {
    let n = k.n();
    if n > MAX_DPP_BRUTE_FORCE {
        return Err(Error::TooManyModes { n, max: MAX_DPP_BRUTE_FORCE });
    }
    let det = |m: usize| -> Result<f64> {
        if m == 0 {
            return Ok(1.0);
        }
        let idx = members(m);
        Ok(crate::numerics::lu_determinant(&k.matrix().submatrix(&idx, &idx))?.re)
    };
    if k.is_projection() {
        let r = k.eigen().eigenvalues.iter().filter(|&&x| x > 0.5).count();
        return (0..1usize << n).map(|m| if m.count_ones() as usize == r { det(m) } else { Ok(0.0) }).collect();
    }
    let mut f: Vec<f64> = (0..1usize << n).map(det).collect::<Result<_>>()?;
    for bit in 0..n {
        for m in 0..f.len() {
            if m >> bit & 1 == 0 {
                f[m] -= f[m | 1 << bit];
            }
        }
    }
    Ok(f)
}

fn finish_pmf(mut p: Vec<f64>) -> Result<Vec<f64>> {
    if let Some(&bad) = p.iter().find(|&&x| x < -NEGATIVITY_GUARD) {
        return Err(Error::NegativeProbability { value: bad });
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > MASS_TOL {
        return Err(Error::InvalidDistribution(format!("brute-force mass is {total}")));
    }
    for x in &mut p {
        *x = x.max(0.0);
    }
    Ok(p)
}

#[cfg(test)]
mod tests;
