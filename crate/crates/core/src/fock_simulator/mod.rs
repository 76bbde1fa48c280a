//! Exact Fock-space statevector with Jordan–Wigner signs.
//!
//! Bit `k` of an amplitude index is the occupation of mode `k`, so mode 0 is the least
//! significant bit. Annihilating mode `k` picks up the parity of the occupied modes below it.

pub mod oracle;

use std::collections::BTreeMap;

use rand::Rng;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::numerics::{phase, Complex, GivensRotation, Real};
use crate::rng::{par_draws, RngSpec};

/// Largest register the simulator allocates.
pub const MAX_MODES: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct FockState<T> {
    n_modes: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> FockState<T> {
    pub fn vacuum(n_modes: usize) -> Result<Self> {
        Self::basis(n_modes, 0)
    }

    pub fn basis(n_modes: usize, mask: usize) -> Result<Self> {
        if n_modes > MAX_MODES {
            return Err(Error::TooManyModes { n: n_modes, max: MAX_MODES });
        }
        if mask >> n_modes != 0 {
            return Err(Error::InvalidArgument(format!("occupation {mask:#b} does not fit in {n_modes} modes")));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n_modes];
        amps[mask] = Complex::new(T::one(), T::zero());
        Ok(Self { n_modes, amps })
    }

    /// Wrap amplitudes, e.g. a superposition built by hand; the length fixes the mode count.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let n_modes = amps.len().trailing_zeros() as usize;
        if !amps.len().is_power_of_two() || n_modes > MAX_MODES {
            return Err(Error::InvalidArgument(format!("{} amplitudes is not a register size", amps.len())));
        }
        Ok(Self { n_modes, amps })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt()
    }

    /// `|⟨self|other⟩|`, insensitive to global phase.
    pub fn overlap(&self, other: &Self) -> T {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum::<Complex<T>>().norm()
    }

    fn check_mode(&self, k: usize) -> Result<()> {
        if k >= self.n_modes {
            return Err(Error::IndexOutOfRange { index: k, dim: self.n_modes });
        }
        Ok(())
    }

    /// Pauli X on qubit `k`: flips the occupation with no string sign.
    pub fn apply_mode_flip(&mut self, k: usize) -> Result<()> {
        self.check_mode(k)?;
        let bit = 1usize << k;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                self.amps.swap(i, i | bit);
            }
        }
        Ok(())
    }

    /// `exp(θ(e^{-iφ} a*_{l2} a_{l1} − e^{iφ} a*_{l1} a_{l2}))`: a single particle in `l1` goes to
    /// `cos θ |l1⟩ + e^{-iφ} sin θ |l2⟩`, with the string sign of the modes strictly between.
    pub fn apply_fermionic_givens(&mut self, rot: &GivensRotation<T>) -> Result<()> {
        let (l1, l2) = (rot.l1, rot.l2);
        self.check_mode(l2)?;
        if l1 >= l2 {
            return Err(Error::InvalidArgument(format!("rotation needs l1 < l2, got ({l1}, {l2})")));
        }
        let (s, c) = rot.theta.sin_cos();
        let e = phase(rot.phi);
        let (b1, b2) = (1usize << l1, 1usize << l2);
        let between = (b2 - 1) & !((b1 << 1) - 1);
        for a in 0..self.amps.len() {
            if a & b1 == 0 || a & b2 != 0 {
                continue;
            }
            let b = a ^ b1 ^ b2;
            let sg = if (a & between).count_ones() % 2 == 0 { T::one() } else { -T::one() };
            let (pa, pb) = (self.amps[a], self.amps[b]);
            self.amps[a] = pa * c - e * pb * (sg * s);
            self.amps[b] = e.conj() * pa * (sg * s) + pb * c;
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        let cast = |x: f64| T::from_f64(x).unwrap_or_else(T::nan);
        match *gate {
            Gate::X(q) => self.apply_mode_flip(q),
            Gate::ParticleHoleX => self.apply_mode_flip(self.n_modes - 1),
            Gate::FGivens { q1, q2, theta, phi } => {
                self.apply_fermionic_givens(&GivensRotation { l1: q1, l2: q2, theta: cast(theta), phi: cast(phi) })
            }
            Gate::MeasureAll => Ok(()),
        }
    }

    /// Born probabilities `|amp|²`, as `f64` whatever the state precision.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr().to_f64_lossy()).collect()
    }
}

/// Run the gates from the vacuum up to the final measurement.
pub fn run_circuit<T: Real>(c: &Circuit) -> Result<FockState<T>> {
    let mut state = FockState::vacuum(c.n_qubits())?;
    for gate in c.gates() {
        if matches!(gate, Gate::MeasureAll) {
            break;
        }
        state.apply_gate(gate)?;
    }
    Ok(state)
}

pub fn exact_distribution<T: Real>(s: &FockState<T>) -> Result<Vec<f64>> {
    let p = s.probabilities();
    let total: f64 = p.iter().sum();
    let tol = 1e-10f64.max(T::tol(1e-10).to_f64_lossy() * 64.0);
    if (total - 1.0).abs() > tol {
        return Err(Error::InvalidDistribution(format!("state norm² is {total}")));
    }
    Ok(p)
}

/// Counts per occupation bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    n_modes: usize,
    shots: u64,
    counts: BTreeMap<usize, u64>,
}

impl Histogram {
    pub fn new(n_modes: usize) -> Self {
        Self { n_modes, shots: 0, counts: BTreeMap::new() }
    }

    pub fn from_samples(n_modes: usize, samples: impl IntoIterator<Item = usize>) -> Self {
        let mut h = Self::new(n_modes);
        for s in samples {
            h.record(s);
        }
        h
    }

    pub fn record(&mut self, mask: usize) {
        *self.counts.entry(mask).or_insert(0) += 1;
        self.shots += 1;
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn counts(&self) -> &BTreeMap<usize, u64> {
        &self.counts
    }

    pub fn count(&self, mask: usize) -> u64 {
        self.counts.get(&mask).copied().unwrap_or(0)
    }

    pub fn frequency(&self, mask: usize) -> f64 {
        if self.shots == 0 {
            return 0.0;
        }
        self.count(mask) as f64 / self.shots as f64
    }

    /// Empirical PMF over all `2^N` subsets.
    pub fn to_pmf(&self) -> Vec<f64> {
        (0..1usize << self.n_modes).map(|m| self.frequency(m)).collect()
    }
}

fn check_noise(noise: Option<f64>) -> Result<f64> {
    match noise {
        None => Ok(0.0),
        Some(p) if (0.0..1.0).contains(&p) => Ok(p),
        Some(p) => Err(Error::Domain(format!("readout flip probability must lie in [0, 1), got {p}"))),
    }
}

/// Inverse-CDF draw; `cdf` is nondecreasing and ends at the total mass.
pub(crate) fn draw_index<R: Rng>(cdf: &[f64], rng: &mut R) -> usize {
    let total = *cdf.last().expect("nonempty distribution");
    let u = rng.gen::<f64>() * total;
    let i = cdf.partition_point(|&c| c <= u);
    // Rounding can put u on the final plateau; step back to the last index with mass.
    let mut i = i.min(cdf.len() - 1);
    while i > 0 && cdf[i] == cdf[i - 1] {
        i -= 1;
    }
    i
}

pub(crate) fn cumulative(pmf: &[f64]) -> Result<Vec<f64>> {
    if pmf.is_empty() || pmf.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::InvalidDistribution("probabilities must be finite and nonnegative".into()));
    }
    let cdf: Vec<f64> = pmf
        .iter()
        .scan(0.0, |acc, &p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    if cdf[cdf.len() - 1] <= 0.0 {
        return Err(Error::InvalidDistribution("total mass is zero".into()));
    }
    Ok(cdf)
}

/// Iid draws from `pmf` with optional readout bit flips, identical across thread counts.
pub fn sample_pmf(pmf: &[f64], n_modes: usize, shots: u64, rng: RngSpec, noise: Option<f64>) -> Result<Vec<usize>> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be positive".into()));
    }
    if pmf.len() != 1usize << n_modes {
        return Err(Error::ShapeMismatch(format!("{} probabilities for {n_modes} modes", pmf.len())));
    }
    let flip = check_noise(noise)?;
    let cdf = cumulative(pmf)?;
    Ok(par_draws(shots, rng, |r| {
        let mut m = draw_index(&cdf, &mut r.measure);
        if flip > 0.0 {
            for k in 0..n_modes {
                if r.select.gen_bool(flip) {
                    m ^= 1 << k;
                }
            }
        }
        m
    }))
}

pub fn sample_occupations<T: Real>(
    s: &FockState<T>,
    shots: u64,
    rng: RngSpec,
    noise: Option<f64>,
) -> Result<Histogram> {
    let pmf = exact_distribution(s)?;
    let samples = sample_pmf(&pmf, s.n_modes(), shots, rng, noise)?;
    Ok(Histogram::from_samples(s.n_modes(), samples))
}
