//! Closed-form statistics of the N-photon cyclic interferometer.
//!
//! Photon `m` enters a balanced beam splitter feeding station `m` (lower
//! arm) and station `m+1` (upper arm, phase `φ_{m+1}`); each station
//! recombines its two arms on a second balanced beam splitter and detects
//! with two number-resolving detectors. Output port `(station, detector)`
//! has flat index `2·station + detector`.
//!
//! In the coincidence sector (one photon per station) outcome `o` occurs with
//! probability `(1 + (−1)^{N+k} Re[V e^{−iφ}]) / 2^{2N−1}` where `k` counts the
//! lower-detector clicks, `φ = Σ φ_m` and `V` is the cyclic geometric factor
//! of the internal states.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{geometric_factor_mixed, CMatrix, GeometricFactor, MixedState};

/// Tolerance for row normalization and orthogonality.
pub const ROW_TOL: f64 = 1e-12;

/// Largest photon number for which pattern enumeration is allowed.
pub const MAX_ENUMERATED_PHOTONS: usize = 24;

/// Phase shifts of an N-station cyclic interferometer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyclicConfig {
    phases: Vec<f64>,
}

impl CyclicConfig {
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if phases.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a cyclic interferometer needs at least 2 stations, got {}",
                phases.len()
            )));
        }
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidInput("phase shifts must be finite".into()));
        }
        Ok(Self { phases })
    }

    /// All phase shifts zero.
    pub fn calibrated(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    pub fn n_photons(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// `φ = Σ φ_m`.
    pub fn total_phase(&self) -> f64 {
        self.phases.iter().sum()
    }
}

/// Detector outcome per station: 0 for the upper, 1 for the lower detector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OutcomePattern {
    bits: Vec<u8>,
}

impl OutcomePattern {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidInput(
                "outcome bits must be 0 or 1".into(),
            ));
        }
        Ok(Self { bits })
    }

    /// Pattern whose bit string, station 0 first, is the binary expansion of
    /// `index` over `n` digits.
    pub fn from_index(n: usize, index: usize) -> Self {
        Self {
            bits: (0..n).map(|m| ((index >> (n - 1 - m)) & 1) as u8).collect(),
        }
    }

    /// All `2^n` patterns in increasing index order.
    pub fn all(n: usize) -> impl Iterator<Item = OutcomePattern> {
        (0..1usize << n).map(move |i| Self::from_index(n, i))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Number of stations reporting `1`.
    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn flipped(&self, station: usize) -> Self {
        let mut bits = self.bits.clone();
        bits[station] ^= 1;
        Self { bits }
    }
}

impl fmt::Display for OutcomePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Rows of a unitary: `a†_k = Σ_l U_{k,l} d†_l` for occupied input port `k`
/// and output port `l`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<[f64; 2]>>", into = "Vec<Vec<[f64; 2]>>")]
pub struct InterferometerRows {
    matrix: CMatrix,
}

impl InterferometerRows {
    /// Validates that the rows are orthonormal within [`ROW_TOL`].
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let (n, k) = matrix.shape();
        if n == 0 || k < n {
            return Err(Error::InvalidInterferometer(format!(
                "need 1 ≤ rows ≤ columns, got {n}x{k}"
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInterferometer("non-finite entry".into()));
        }
        let gram = &matrix * matrix.adjoint();
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j { 1.0 } else { 0.0 };
                let dev = (gram[(i, j)] - Complex64::new(expected, 0.0)).norm();
                if dev > ROW_TOL {
                    return Err(Error::InvalidInterferometer(format!(
                        "rows {i} and {j} deviate from orthonormality by {dev:e}"
                    )));
                }
            }
        }
        Ok(Self { matrix })
    }

    pub fn n_photons(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_ports(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn get(&self, photon: usize, port: usize) -> Complex64 {
        self.matrix[(photon, port)]
    }
}

impl TryFrom<Vec<Vec<[f64; 2]>>> for InterferometerRows {
    type Error = Error;

    fn try_from(rows: Vec<Vec<[f64; 2]>>) -> Result<Self> {
        let n = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidInterferometer("ragged rows".into()));
        }
        let m = CMatrix::from_fn(n, k, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1]));
        InterferometerRows::new(m)
    }
}

impl From<InterferometerRows> for Vec<Vec<[f64; 2]>> {
    fn from(r: InterferometerRows) -> Self {
        r.matrix
            .row_iter()
            .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
            .collect()
    }
}

/// Flat index of detector `detector` at station `station`.
pub fn port(station: usize, detector: usize) -> usize {
    2 * station + detector
}

/// Mode transformation of the cyclic network: row `m` has `½` at `(m,0)`,
/// `i/2` at `(m,1)`, `−e^{iφ_{m+1}}/2` at `(m+1,0)` and `i e^{iφ_{m+1}}/2` at
/// `(m+1,1)`, station indices modulo N.
pub fn build_cyclic_rows(config: &CyclicConfig) -> InterferometerRows {
    let n = config.n_photons();
    let mut m = CMatrix::zeros(n, 2 * n);
    let half = Complex64::new(0.5, 0.0);
    let i_half = Complex64::new(0.0, 0.5);
    for row in 0..n {
        let next = (row + 1) % n;
        let e = Complex64::from_polar(1.0, config.phases[next]);
        m[(row, port(row, 0))] += half;
        m[(row, port(row, 1))] += i_half;
        m[(row, port(next, 0))] += -e * half;
        m[(row, port(next, 1))] += e * i_half;
    }
    InterferometerRows::new(m).expect("cyclic network rows are orthonormal")
}

/// Total probability of the coincidence sector, `1/2^{N−1}`.
pub fn coincidence_probability_total(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "a cyclic interferometer needs at least 2 photons, got {n}"
        )));
    }
    Ok(0.5f64.powi(n as i32 - 1))
}

fn check_states(config: &CyclicConfig, states: &[MixedState]) -> Result<GeometricFactor> {
    if states.len() != config.n_photons() {
        return Err(Error::InvalidInput(format!(
            "{} states supplied for {} photons",
            states.len(),
            config.n_photons()
        )));
    }
    geometric_factor_mixed(states)
}

/// Re[V e^{−iφ}].
fn interference_term(config: &CyclicConfig, v: Complex64) -> f64 {
    (v * Complex64::from_polar(1.0, -config.total_phase())).re
}

fn pattern_probability(n: usize, k: usize, interference: f64) -> f64 {
    let sign = if (n + k).is_multiple_of(2) { 1.0 } else { -1.0 };
    let p = (1.0 + sign * interference) * 0.5f64.powi(2 * n as i32 - 1);
    p.max(0.0)
}

/// Probability of coincidence outcome `o`.
pub fn outcome_probability(
    config: &CyclicConfig,
    states: &[MixedState],
    o: &OutcomePattern,
) -> Result<f64> {
    let g = check_states(config, states)?;
    let n = config.n_photons();
    if o.len() != n {
        return Err(Error::InvalidInput(format!(
            "outcome pattern has {} stations, interferometer has {n}",
            o.len()
        )));
    }
    Ok(pattern_probability(n, o.weight(), interference_term(config, g.value)))
}

/// Probabilities of all `2^N` coincidence outcomes, in pattern index order.
pub fn coincidence_distribution(
    config: &CyclicConfig,
    states: &[MixedState],
) -> Result<Vec<(OutcomePattern, f64)>> {
    let g = check_states(config, states)?;
    let n = config.n_photons();
    if n > MAX_ENUMERATED_PHOTONS {
        return Err(Error::Capacity {
            n,
            cap: MAX_ENUMERATED_PHOTONS,
        });
    }
    let interference = interference_term(config, g.value);
    Ok(OutcomePattern::all(n)
        .map(|o| {
            let p = pattern_probability(n, o.weight(), interference);
            (o, p)
        })
        .collect())
}

/// Assignment of stations to the two parties.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub alice: Vec<usize>,
    pub bob: Vec<usize>,
}

impl Partition {
    pub fn new(alice: Vec<usize>, bob: Vec<usize>) -> Self {
        Self { alice, bob }
    }

    /// First `split` stations to Alice, the rest to Bob.
    pub fn contiguous(n: usize, split: usize) -> Self {
        Self {
            alice: (0..split).collect(),
            bob: (split..n).collect(),
        }
    }

    /// Checks that both parties are non-empty and together cover `0..n`
    /// exactly once.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.alice.is_empty() || self.bob.is_empty() {
            return Err(Error::InvalidInput(
                "each party needs at least one station".into(),
            ));
        }
        let mut seen = vec![false; n];
        for &s in self.alice.iter().chain(&self.bob) {
            if s >= n || seen[s] {
                return Err(Error::InvalidInput(format!(
                    "station {s} is out of range or assigned twice"
                )));
            }
            seen[s] = true;
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::InvalidInput(
                "partition does not cover every station".into(),
            ));
        }
        Ok(())
    }
}

/// Renormalized joint distribution of the two parties' parity outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergedDistribution {
    /// Indexed `[a_index][b_index]`, index 0 for outcome `+1`, 1 for `−1`.
    pub probabilities: [[f64; 2]; 2],
}

impl MergedDistribution {
    /// `P(a, b)` for `a, b ∈ {+1, −1}`.
    pub fn get(&self, a: i8, b: i8) -> f64 {
        let idx = |s: i8| if s >= 0 { 0 } else { 1 };
        self.probabilities[idx(a)][idx(b)]
    }

    /// `Σ ab P(a,b)`.
    pub fn correlator(&self) -> f64 {
        let p = &self.probabilities;
        p[0][0] + p[1][1] - p[0][1] - p[1][0]
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Joint distribution of Alice's parity `a = (−1)^{k_A}` and Bob's parity
/// `b = (−1)^{k_B}` conditioned on a coincidence event. Requires even N.
pub fn merged_outcome_distribution(
    config: &CyclicConfig,
    states: &[MixedState],
    partition: &Partition,
) -> Result<MergedDistribution> {
    let n = config.n_photons();
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "parity correlations need an even photon number, got {n}"
        )));
    }
    partition.validate(n)?;
    let g = check_states(config, states)?;
    let interference = interference_term(config, g.value);
    let total = coincidence_probability_total(n)?;
    let (na, nb) = (partition.alice.len(), partition.bob.len());

    // Pattern probabilities depend only on k = k_A + k_B; count patterns.
    let mut probabilities = [[0.0; 2]; 2];
    for ka in 0..=na {
        for kb in 0..=nb {
            let count = binomial(na, ka) * binomial(nb, kb);
            let p = pattern_probability(n, ka + kb, interference);
            probabilities[ka % 2][kb % 2] += count * p / total;
        }
    }
    Ok(MergedDistribution { probabilities })
}

/// `⟨AB⟩ = Σ ab P(a,b)` over the renormalized coincidence distribution;
/// equals `Re[V e^{−iφ}]`, i.e. `Re V` for a calibrated interferometer.
pub fn parity_correlator(
    config: &CyclicConfig,
    states: &[MixedState],
    partition: &Partition,
) -> Result<f64> {
    Ok(merged_outcome_distribution(config, states, partition)?.correlator())
}
