//! CHSH correlations from setting-dependent input states in a fixed
//! `(2d+2)`-photon cyclic interferometer.
//!
//! Alice controls `d` photons whose internal states follow one of two Bloch
//! sphere trajectories `x_1(t)`, `x_2(t)` from `w_2` to `w_1`; Bob likewise
//! with `y_1(t)`, `y_2(t)` from `w_1` to `w_2`. Two fixed photons in `w_1`,
//! `w_2` close the loop. The correlator for settings `(i, j)` is `Re V_ij`
//! where `V_ij` is the geometric factor of the cycle
//! `(x_{i,1}, …, x_{i,d}, w_1, y_{j,1}, …, y_{j,d}, w_2)`.
//!
//! `x_2`/`y_2` run along the circle of latitude `cos θ`; `x_1` is the circle
//! through `w_2`, `(0, −sin(θ/3), cos(θ/3))` and `w_1`, traversed at uniform
//! angular speed, and `y_1(t) = R x_1(π − t)` with `R: y ↦ −y`. Sampling at
//! `t = kπ/(d+1)` gives equal overlaps between neighbouring states.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::NelderMead;
use crate::states::{geometric_factor, pure_from_bloch, BlochVector, GeometricFactor, PureState};

/// Slack allowed on the trajectory parameter range.
const T_SLACK: f64 = 1e-12;

/// Latitude and photons-per-party of the trajectory construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryParams {
    theta: f64,
    d: usize,
}

impl TrajectoryParams {
    /// `theta` in `[0, π/2]` (`0` collapses every state onto the pole), `d ≥ 1`.
    pub fn new(theta: f64, d: usize) -> Result<Self> {
        check_theta(theta)?;
        if d == 0 {
            return Err(Error::InvalidInput("need at least one photon per party".into()));
        }
        Ok(Self { theta, d })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Total photon number `2d + 2`.
    pub fn n_photons(&self) -> usize {
        2 * self.d + 2
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=PI / 2.0 + T_SLACK).contains(&theta) {
        return Err(Error::InvalidInput(format!(
            "latitude angle {theta} outside [0, π/2]"
        )));
    }
    Ok(())
}

fn check_t(t: f64) -> Result<f64> {
    if !(-T_SLACK..=PI + T_SLACK).contains(&t) {
        return Err(Error::InvalidInput(format!(
            "trajectory parameter {t} outside [0, π]"
        )));
    }
    Ok(t.clamp(0.0, PI))
}

fn bloch(x: f64, y: f64, z: f64) -> BlochVector {
    BlochVector { x, y, z }
}

/// `w_1 = (−sin θ, 0, cos θ)`.
pub fn anchor_w1(theta: f64) -> BlochVector {
    bloch(-theta.sin(), 0.0, theta.cos())
}

/// `w_2 = (sin θ, 0, cos θ)`.
pub fn anchor_w2(theta: f64) -> BlochVector {
    bloch(theta.sin(), 0.0, theta.cos())
}

/// `x_2(t) = (sin θ cos t, sin θ sin t, cos θ)`.
pub fn trajectory_x2(theta: f64, t: f64) -> Result<BlochVector> {
    check_theta(theta)?;
    let t = check_t(t)?;
    Ok(bloch(theta.sin() * t.cos(), theta.sin() * t.sin(), theta.cos()))
}

/// `y_2(t) = (−sin θ cos t, −sin θ sin t, cos θ)`.
pub fn trajectory_y2(theta: f64, t: f64) -> Result<BlochVector> {
    check_theta(theta)?;
    let t = check_t(t)?;
    Ok(bloch(-theta.sin() * t.cos(), -theta.sin() * t.sin(), theta.cos()))
}

/// Geometry of the tilted circle carrying `x_1`.
///
/// The circle lies in the plane `z = −2 sin(2θ/3) y + cos θ`; with
/// `β = 1 + 4 sin²(2θ/3)` and `α = 4 sin(2θ/3) cos θ` its points satisfy
/// `x² + β (y − α/(2β))² = R²`, `R² = 1 + α²/(4β) − cos² θ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TiltedCircle {
    pub alpha: f64,
    pub beta: f64,
    pub radius: f64,
    /// In-plane angle of `w_2`, see [`TiltedCircle::point`].
    start_angle: f64,
    slope: f64,
    theta: f64,
}

impl TiltedCircle {
    pub fn new(theta: f64) -> Self {
        let slope = 2.0 * (2.0 * theta / 3.0).sin();
        let beta = 1.0 + slope * slope;
        let alpha = 2.0 * slope * theta.cos();
        let radius = (1.0 + alpha * alpha / (4.0 * beta) - theta.cos().powi(2))
            .max(0.0)
            .sqrt();
        let mut circle = Self {
            alpha,
            beta,
            radius,
            start_angle: 0.0,
            slope,
            theta,
        };
        let (u, v) = circle.in_plane(&anchor_w2(theta));
        circle.start_angle = v.atan2(u);
        circle
    }

    /// Centre of the circle, the foot of the perpendicular from the origin.
    pub fn center(&self) -> BlochVector {
        bloch(
            0.0,
            self.alpha / (2.0 * self.beta),
            self.theta.cos() / self.beta,
        )
    }

    /// Orthonormal in-plane coordinates `(u, v)` of `p` relative to the
    /// centre: `v = x`, `u = √β (y − α/(2β))`.
    fn in_plane(&self, p: &BlochVector) -> (f64, f64) {
        let c = self.center();
        let e_in = bloch(0.0, 1.0, -self.slope).scale(1.0 / self.beta.sqrt());
        (p.sub(&c).dot(&e_in), p.x)
    }

    /// Point at in-plane angle `psi`: `u = R cos ψ`, `v = R sin ψ`.
    fn at_angle(&self, psi: f64) -> BlochVector {
        let e_in = bloch(0.0, 1.0, -self.slope).scale(1.0 / self.beta.sqrt());
        let e_x = bloch(1.0, 0.0, 0.0);
        self.center()
            .add(&e_in.scale(self.radius * psi.cos()))
            .add(&e_x.scale(self.radius * psi.sin()))
    }

    /// `x_1(t)`: uniform sweep from `w_2` (`t = 0`) through the midpoint
    /// (`t = π/2`, angle `π`) to `w_1` (`t = π`).
    pub fn point(&self, t: f64) -> BlochVector {
        let sweep = 2.0 * (PI - self.start_angle);
        self.at_angle(self.start_angle + t / PI * sweep)
    }
}

/// `x_1(t)`, see [`TiltedCircle`].
pub fn trajectory_x1(theta: f64, t: f64) -> Result<BlochVector> {
    check_theta(theta)?;
    let t = check_t(t)?;
    Ok(TiltedCircle::new(theta).point(t))
}

/// `y_1(t) = R x_1(π − t)` with the reflection `R: (x, y, z) ↦ (x, −y, z)`.
pub fn trajectory_y1(theta: f64, t: f64) -> Result<BlochVector> {
    let p = trajectory_x1(theta, PI - check_t(t)?)?;
    Ok(bloch(p.x, -p.y, p.z))
}

/// Which of a party's two trajectories a setting selects.
fn trajectory(party: Party, setting: usize, theta: f64, t: f64) -> Result<BlochVector> {
    match (party, setting) {
        (Party::Alice, 1) => trajectory_x1(theta, t),
        (Party::Alice, 2) => trajectory_x2(theta, t),
        (Party::Bob, 1) => trajectory_y1(theta, t),
        (Party::Bob, 2) => trajectory_y2(theta, t),
        _ => Err(Error::InvalidInput(format!(
            "measurement setting must be 1 or 2, got {setting}"
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Party {
    Alice,
    Bob,
}

/// Input states for both parties' settings plus the shared photons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SettingSequences {
    /// `alice[i-1]` holds `(x_{i,1}, …, x_{i,d})`.
    pub alice: [Vec<PureState>; 2],
    /// `bob[j-1]` holds `(y_{j,1}, …, y_{j,d})`.
    pub bob: [Vec<PureState>; 2],
    pub w1: PureState,
    pub w2: PureState,
}

impl SettingSequences {
    /// Ordered cycle `(x_{i,·}, w_1, y_{j,·}, w_2)` for settings `(i, j)`.
    pub fn cycle(&self, i: usize, j: usize) -> Result<Vec<PureState>> {
        check_setting(i)?;
        check_setting(j)?;
        let mut states = self.alice[i - 1].clone();
        states.push(self.w1.clone());
        states.extend(self.bob[j - 1].iter().cloned());
        states.push(self.w2.clone());
        Ok(states)
    }

    pub fn vij(&self, i: usize, j: usize) -> Result<GeometricFactor> {
        geometric_factor(&self.cycle(i, j)?)
    }
}

fn check_setting(s: usize) -> Result<()> {
    if s == 1 || s == 2 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "measurement setting must be 1 or 2, got {s}"
        )))
    }
}

/// Bloch vectors at `t = kπ/(d+1)`, `k = 1..d`.
pub fn sampled_trajectory(
    theta: f64,
    d: usize,
    alice: bool,
    setting: usize,
) -> Result<Vec<BlochVector>> {
    let party = if alice { Party::Alice } else { Party::Bob };
    (1..=d)
        .map(|k| trajectory(party, setting, theta, k as f64 * PI / (d + 1) as f64))
        .collect()
}

pub fn build_setting_sequences(params: &TrajectoryParams) -> Result<SettingSequences> {
    let (theta, d) = (params.theta, params.d);
    let states = |alice: bool, setting: usize| -> Result<Vec<PureState>> {
        sampled_trajectory(theta, d, alice, setting)?
            .iter()
            .map(pure_from_bloch)
            .collect()
    };
    Ok(SettingSequences {
        alice: [states(true, 1)?, states(true, 2)?],
        bob: [states(false, 1)?, states(false, 2)?],
        w1: pure_from_bloch(&anchor_w1(theta))?,
        w2: pure_from_bloch(&anchor_w2(theta))?,
    })
}

/// Geometric factor `V_ij` for settings `i, j ∈ {1, 2}`.
pub fn vij(params: &TrajectoryParams, i: usize, j: usize) -> Result<GeometricFactor> {
    build_setting_sequences(params)?.vij(i, j)
}

/// Geometric factors, correlators and the CHSH combination.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChshReport {
    /// `v[i-1][j-1] = V_ij`.
    pub v: [[Complex64; 2]; 2],
    /// `Re V_ij`.
    pub correlators: [[f64; 2]; 2],
    /// `⟨A1B1⟩ + ⟨A1B2⟩ + ⟨A2B1⟩ − ⟨A2B2⟩`.
    pub i_chsh: f64,
}

impl ChshReport {
    pub fn from_factors(v: [[Complex64; 2]; 2]) -> Self {
        let correlators = v.map(|row| row.map(|z| z.re));
        Self {
            v,
            correlators,
            i_chsh: chsh_combination(&correlators),
        }
    }

    /// `arg V_ij` in `(−π, π]`.
    pub fn phases(&self) -> [[f64; 2]; 2] {
        self.v.map(|row| row.map(|z| GeometricFactor::from_value(z).phase))
    }
}

/// `E11 + E12 + E21 − E22`.
pub fn chsh_combination(e: &[[f64; 2]; 2]) -> f64 {
    e[0][0] + e[0][1] + e[1][0] - e[1][1]
}

pub fn chsh_value(params: &TrajectoryParams) -> Result<ChshReport> {
    let seq = build_setting_sequences(params)?;
    let mut v = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 1..=2 {
        for j in 1..=2 {
            v[i - 1][j - 1] = seq.vij(i, j)?.value;
        }
    }
    Ok(ChshReport::from_factors(v))
}

/// `3 cos φ − cos 3φ` with `φ = π(1 − cos θ)/3`, the `d → ∞` value.
pub fn chsh_zeno_limit(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let phi = PI * (1.0 - theta.cos()) / 3.0;
    Ok(3.0 * phi.cos() - (3.0 * phi).cos())
}

/// Local bound of the CHSH combination.
pub const LOCAL_BOUND: f64 = 2.0;
/// Quantum (Tsirelson) bound `2√2`.
pub const QUANTUM_BOUND: f64 = 2.0 * SQRT_2;

/// `n` uniformly spaced points from `min` to `max` inclusive.
pub fn theta_grid(min: f64, max: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 || min > max {
        return Err(Error::InvalidInput(format!(
            "invalid grid: {n} points on [{min}, {max}]"
        )));
    }
    check_theta(min)?;
    check_theta(max)?;
    if n == 1 {
        return Ok(vec![min]);
    }
    Ok((0..n)
        .map(|k| {
            if k == n - 1 {
                max
            } else {
                min + (max - min) * k as f64 / (n - 1) as f64
            }
        })
        .collect())
}

/// One row of a latitude scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub theta: f64,
    pub d: usize,
    pub report: ChshReport,
    pub zeno_limit: f64,
}

/// CHSH value for each `d` in `ds` and each latitude, `d`-major order.
pub fn scan(ds: &[usize], thetas: &[f64]) -> Result<Vec<ScanRow>> {
    let jobs: Vec<(usize, f64)> = ds
        .iter()
        .flat_map(|&d| thetas.iter().map(move |&t| (d, t)))
        .collect();
    jobs.par_iter()
        .map(|&(d, theta)| {
            let report = chsh_value(&TrajectoryParams::new(theta, d)?)?;
            Ok(ScanRow {
                theta,
                d,
                report,
                zeno_limit: chsh_zeno_limit(theta)?,
            })
        })
        .collect()
}

/// Six Bloch vectors of the four-photon (`d = 1`) configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourPhotonVectors {
    pub x1: BlochVector,
    pub x2: BlochVector,
    pub y1: BlochVector,
    pub y2: BlochVector,
    pub w1: BlochVector,
    pub w2: BlochVector,
}

/// `Re tr[ρ_a ρ_b ρ_c ρ_d]` for qubit projectors with Bloch vectors `a, b, c, d`:
/// `[(1 + a·b)(1 + c·d) + (a + b)·(c + d) − (a × b)·(c × d)] / 8`.
fn re_four_projector_trace(a: &BlochVector, b: &BlochVector, c: &BlochVector, d: &BlochVector) -> f64 {
    ((1.0 + a.dot(b)) * (1.0 + c.dot(d)) + a.add(b).dot(&c.add(d)) - a.cross(b).dot(&c.cross(d)))
        / 8.0
}

/// CHSH combination of the four-photon configuration from Bloch vectors
/// alone, using `(r·σ)(s·σ) = (r·s) I + i (r×s)·σ`.
pub fn chsh_d1_objective(v: &FourPhotonVectors) -> f64 {
    let re = |x: &BlochVector, y: &BlochVector| re_four_projector_trace(x, &v.w1, y, &v.w2);
    re(&v.x1, &v.y1) + re(&v.x1, &v.y2) + re(&v.x2, &v.y1) - re(&v.x2, &v.y2)
}

/// Result of the four-photon optimization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourPhotonOptimum {
    pub best_value: f64,
    pub vectors: FourPhotonVectors,
    pub restarts: usize,
    pub seed: u64,
}

fn vectors_from_angles(a: &[f64]) -> FourPhotonVectors {
    let b = |k: usize| BlochVector::from_angles(a[2 * k], a[2 * k + 1]);
    FourPhotonVectors {
        x1: b(0),
        x2: b(1),
        y1: b(2),
        y2: b(3),
        w1: b(4),
        w2: b(5),
    }
}

/// Maximizes [`chsh_d1_objective`] over the six Bloch vectors by
/// random-restart Nelder–Mead in spherical angles. Restart `r` draws its
/// starting point from stream `r` of a ChaCha generator seeded with `seed`.
pub fn optimize_chsh_d1(restarts: usize, seed: u64) -> Result<FourPhotonOptimum> {
    if restarts == 0 {
        return Err(Error::InvalidInput("need at least one restart".into()));
    }
    let nm = NelderMead::default();
    let results: Vec<(f64, Vec<f64>)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let x0: Vec<f64> = (0..6)
                .flat_map(|_| {
                    let polar = rng.random_range(-1.0f64..1.0).acos();
                    let azimuth = rng.random_range(-PI..PI);
                    [polar, azimuth]
                })
                .collect();
            let m = nm.minimize(|a| -chsh_d1_objective(&vectors_from_angles(a)), &x0);
            (-m.value, m.x)
        })
        .collect();
    // first maximum wins, independent of thread scheduling
    let (best_value, best_x) = results
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("restarts ≥ 1");
    Ok(FourPhotonOptimum {
        best_value,
        vectors: vectors_from_angles(&best_x),
        restarts,
        seed,
    })
}

/// CHSH combination for `d = 1` with arbitrary-dimensional pure states,
/// `V_ij = ⟨x_i|w1⟩⟨w1|y_j⟩⟨y_j|w2⟩⟨w2|x_i⟩`.
pub fn chsh_d1_states(
    x: [&PureState; 2],
    y: [&PureState; 2],
    w1: &PureState,
    w2: &PureState,
) -> f64 {
    let v = |xi: &PureState, yj: &PureState| {
        (xi.inner(w1) * w1.inner(yj) * yj.inner(w2) * w2.inner(xi)).re
    };
    v(x[0], y[0]) + v(x[0], y[1]) + v(x[1], y[0]) - v(x[1], y[1])
}

const SCAN_CHUNK: usize = 4096;

/// Largest CHSH value over `samples` draws of six Haar-random pure states of
/// dimension `dim` in the four-photon configuration. Chunk `c` of
/// [`SCAN_CHUNK`] samples uses stream `c` of a ChaCha generator seeded with
/// `seed`, so the result does not depend on the thread count.
pub fn random_state_scan(dim: usize, samples: usize, seed: u64) -> Result<f64> {
    if dim < 2 {
        return Err(Error::InvalidInput(format!("dimension must be ≥ 2, got {dim}")));
    }
    if samples == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let chunks = samples.div_ceil(SCAN_CHUNK);
    let maxima: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<f64> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = SCAN_CHUNK.min(samples - c * SCAN_CHUNK);
            let mut best = f64::NEG_INFINITY;
            for _ in 0..count {
                let s: Vec<PureState> = (0..6)
                    .map(|_| PureState::random(dim, &mut rng))
                    .collect::<Result<_>>()?;
                let i = chsh_d1_states([&s[0], &s[1]], [&s[2], &s[3]], &s[4], &s[5]);
                best = best.max(i);
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;
    Ok(maxima.into_iter().fold(f64::NEG_INFINITY, f64::max))
}
