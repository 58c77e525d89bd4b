//! Brute-force output statistics of an arbitrary linear interferometer fed
//! with partially distinguishable single photons.
//!
//! For occupied input ports `k` with internal states `ρ_k` and a detection
//! pattern `l = (l_1, …, l_N)` (repeated ports allowed),
//!
//! ```text
//! P(l) = 1/M(l) Σ_{τ,σ ∈ S_N} J(τ⁻¹σ) Π_k U*_{k,l_τ(k)} U_{k,l_σ(k)}
//! J(σ) = Π_{(k1 … kr) ∈ cyc(σ)} tr[ρ_kr ⋯ ρ_k2 ρ_k1]
//! ```
//!
//! where `M(l)` is the product of factorials of the port occupations. Only
//! permutations with a non-vanishing amplitude product enter the double sum;
//! `J` is tabulated once over all of `S_N`.
//!
//! This module knows nothing about the cyclic network beyond its rows and is
//! the reference the closed-form [`crate::cyclic`] results are checked against.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cyclic::InterferometerRows;
use crate::error::{Error, Result};
use crate::permutation::{factorial, rank_of, Permutation};
use crate::states::{ordered_trace, MixedState};

/// Default photon-number cap; `(8!)²` terms is the practical ceiling.
pub const DEFAULT_CAPACITY: usize = 8;
/// Largest tolerated imaginary residue of the double sum.
pub const HERMITICITY_TOL: f64 = 1e-10;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Sorted multiset of output ports, one entry per detected photon.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OutputPortPattern {
    ports: Vec<usize>,
}

impl OutputPortPattern {
    pub fn new(mut ports: Vec<usize>, n_ports: usize) -> Result<Self> {
        if let Some(&p) = ports.iter().find(|&&p| p >= n_ports) {
            return Err(Error::InvalidInput(format!(
                "output port {p} out of range for {n_ports} ports"
            )));
        }
        ports.sort_unstable();
        Ok(Self { ports })
    }

    pub fn ports(&self) -> &[usize] {
        &self.ports
    }

    pub fn len(&self) -> usize {
        self.ports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ports.is_empty()
    }

    /// `M(l) = Π_i (occupation of port i)!`.
    pub fn multiplicity_factor(&self) -> f64 {
        self.ports
            .chunk_by(|a, b| a == b)
            .map(|run| factorial(run.len()) as f64)
            .product()
    }

    /// Colexicographic comparison: last entries first.
    fn colex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.ports.iter().rev().cmp(other.ports.iter().rev())
    }
}

impl fmt::Display for OutputPortPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.ports.iter().map(usize::to_string).collect();
        write!(f, "{}", s.join("-"))
    }
}

/// Which detection patterns [`full_distribution`] enumerates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sector {
    /// Every multiset of `N` output ports.
    All,
    /// Ports are grouped into `N` consecutive stations of `K/N` detectors;
    /// exactly one photon per station.
    Coincidence,
}

/// `J(σ)`: product over the cycles of `σ` of `tr[ρ_kr ⋯ ρ_k2 ρ_k1]`.
pub fn distinguishability_j(p: &Permutation, states: &[MixedState]) -> Result<Complex64> {
    if states.len() != p.len() {
        return Err(Error::InvalidInput(format!(
            "permutation of {} elements applied to {} states",
            p.len(),
            states.len()
        )));
    }
    if let Some(first) = states.first() {
        if let Some(bad) = states.iter().find(|s| s.dim() != first.dim()) {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                found: bad.dim(),
            });
        }
    }
    Ok(j_unchecked(p, states))
}

fn j_unchecked(p: &Permutation, states: &[MixedState]) -> Complex64 {
    p.cycles()
        .iter()
        .filter(|c| c.len() > 1)
        .map(|c| ordered_trace(c.iter().rev().map(|&k| states[k].matrix())))
        .fold(ONE, |acc, t| acc * t)
}

/// Permutation-sum engine for one interferometer and one set of inputs.
pub struct PermutationSum<'a> {
    rows: &'a InterferometerRows,
    /// `J` for every permutation, indexed by lexicographic rank.
    j_table: Vec<Complex64>,
}

impl<'a> PermutationSum<'a> {
    pub fn new(rows: &'a InterferometerRows, states: &[MixedState]) -> Result<Self> {
        Self::with_capacity(rows, states, DEFAULT_CAPACITY)
    }

    pub fn with_capacity(
        rows: &'a InterferometerRows,
        states: &[MixedState],
        capacity: usize,
    ) -> Result<Self> {
        let n = rows.n_photons();
        if n > capacity {
            return Err(Error::Capacity { n, cap: capacity });
        }
        if states.len() != n {
            return Err(Error::InvalidInput(format!(
                "{} states supplied for {n} occupied input ports",
                states.len()
            )));
        }
        // validates dimensions
        distinguishability_j(&Permutation::identity(n), states)?;
        let j_table = Permutation::all(n)
            .collect::<Vec<_>>()
            .par_iter()
            .map(|p| j_unchecked(p, states))
            .collect();
        Ok(Self { rows, j_table })
    }

    pub fn n_photons(&self) -> usize {
        self.rows.n_photons()
    }

    /// Permutations `σ` with non-zero `Π_k U_{k,l_σ(k)}`, with that product.
    fn supported(&self, l: &[usize]) -> Vec<(Vec<usize>, Complex64)> {
        let n = l.len();
        let mut out = Vec::new();
        let mut assignment = vec![usize::MAX; n];
        let mut used = vec![false; n];
        self.extend(l, 0, ONE, &mut assignment, &mut used, &mut out);
        out
    }

    fn extend(
        &self,
        l: &[usize],
        photon: usize,
        amp: Complex64,
        assignment: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<(Vec<usize>, Complex64)>,
    ) {
        if photon == l.len() {
            out.push((assignment.clone(), amp));
            return;
        }
        for pos in 0..l.len() {
            if used[pos] {
                continue;
            }
            let u = self.rows.get(photon, l[pos]);
            if u == ZERO {
                continue;
            }
            used[pos] = true;
            assignment[photon] = pos;
            self.extend(l, photon + 1, amp * u, assignment, used, out);
            used[pos] = false;
        }
    }

    /// The complex double sum divided by `M(l)`; its imaginary part is a
    /// rounding residue.
    pub fn raw_sum(&self, l: &OutputPortPattern) -> Result<Complex64> {
        let n = self.n_photons();
        if l.len() != n {
            return Err(Error::InvalidInput(format!(
                "pattern has {} photons, interferometer has {n}",
                l.len()
            )));
        }
        if let Some(&p) = l.ports().last() {
            if p >= self.rows.n_ports() {
                return Err(Error::InvalidInput(format!("output port {p} out of range")));
            }
        }
        let supp = self.supported(l.ports());
        let inverses: Vec<Vec<usize>> = supp
            .iter()
            .map(|(tau, _)| {
                let mut inv = vec![0; n];
                for (k, &m) in tau.iter().enumerate() {
                    inv[m] = k;
                }
                inv
            })
            .collect();
        let mut nu = vec![0usize; n];
        let mut total = ZERO;
        for (tau_inv, (_, a_tau)) in inverses.iter().zip(&supp) {
            let a_tau = a_tau.conj();
            for (sigma, a_sigma) in &supp {
                for k in 0..n {
                    nu[k] = tau_inv[sigma[k]];
                }
                total += self.j_table[rank_of(&nu)] * a_tau * a_sigma;
            }
        }
        Ok(total / l.multiplicity_factor())
    }

    /// `P(l)`.
    pub fn probability(&self, l: &OutputPortPattern) -> Result<f64> {
        let z = self.raw_sum(l)?;
        if z.im.abs() > HERMITICITY_TOL {
            return Err(Error::NumericalResidue {
                residue: z.im.abs(),
                tolerance: HERMITICITY_TOL,
            });
        }
        Ok(z.re.max(0.0))
    }

    /// Probabilities of every pattern in `sector`, colexicographic order.
    pub fn distribution(&self, sector: Sector) -> Result<Vec<(OutputPortPattern, f64)>> {
        let patterns = enumerate_patterns(self.n_photons(), self.rows.n_ports(), sector)?;
        patterns
            .into_par_iter()
            .map(|l| {
                let p = self.probability(&l)?;
                Ok((l, p))
            })
            .collect()
    }
}

/// All detection patterns of `n` photons over `n_ports` ports in `sector`,
/// colexicographically ordered.
pub fn enumerate_patterns(
    n: usize,
    n_ports: usize,
    sector: Sector,
) -> Result<Vec<OutputPortPattern>> {
    let mut out = Vec::new();
    match sector {
        Sector::All => {
            let mut current = Vec::with_capacity(n);
            multisets(n, n_ports, 0, &mut current, &mut out);
        }
        Sector::Coincidence => {
            if n == 0 || !n_ports.is_multiple_of(n) {
                return Err(Error::InvalidInput(format!(
                    "{n_ports} ports cannot be split into {n} equal stations"
                )));
            }
            let per_station = n_ports / n;
            let count = per_station.pow(n as u32);
            for mut idx in 0..count {
                let mut ports = vec![0; n];
                for (station, p) in ports.iter_mut().enumerate().rev() {
                    *p = station * per_station + idx % per_station;
                    idx /= per_station;
                }
                out.push(OutputPortPattern { ports });
            }
        }
    }
    out.sort_by(|a, b| a.colex_cmp(b));
    Ok(out)
}

fn multisets(
    remaining: usize,
    n_ports: usize,
    min: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<OutputPortPattern>,
) {
    if remaining == 0 {
        out.push(OutputPortPattern {
            ports: current.clone(),
        });
        return;
    }
    for p in min..n_ports {
        current.push(p);
        multisets(remaining - 1, n_ports, p, current, out);
        current.pop();
    }
}

/// `P(l)` for one pattern.
pub fn output_probability(
    rows: &InterferometerRows,
    states: &[MixedState],
    l: &OutputPortPattern,
) -> Result<f64> {
    PermutationSum::new(rows, states)?.probability(l)
}

/// Probabilities of all patterns of `sector`.
pub fn full_distribution(
    rows: &InterferometerRows,
    states: &[MixedState],
    sector: Sector,
) -> Result<Vec<(OutputPortPattern, f64)>> {
    PermutationSum::new(rows, states)?.distribution(sector)
}
