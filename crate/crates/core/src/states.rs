//! Internal photon states and the geometric quantities built from them.
//!
//! A photon's internal degree of freedom (polarization, temporal profile, ...)
//! is represented either as a normalized [`PureState`] or as a
//! [`MixedState`] density matrix. Qubit states can be converted to and from
//! [`BlochVector`]s using the convention
//! `|ψ⟩ = (cos(ϑ/2), e^{iϕ} sin(ϑ/2))` for `b = (sinϑ cosϕ, sinϑ sinϕ, cosϑ)`.
//!
//! The central quantity is the [`GeometricFactor`]: the cyclic product of
//! overlaps `⟨ψ1|ψ2⟩⟨ψ2|ψ3⟩⋯⟨ψN|ψ1⟩` (or `tr[ρ1ρ2⋯ρN]` for mixed inputs).
//! Its argument is the collective Pancharatnam phase and its modulus the
//! many-photon interference visibility.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Tolerance for normalization, hermiticity and trace checks.
pub const STATE_TOL: f64 = 1e-12;
/// Smallest admissible density-matrix eigenvalue.
pub const EIGEN_FLOOR: f64 = -1e-10;
/// Visibility below which the geometric phase is reported as undefined.
pub const PHASE_VISIBILITY_FLOOR: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Wraps an angle into `(−π, π]`.
pub fn wrap_phase(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Normalized complex amplitude vector over the internal Hilbert space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PureState {
    amps: Vec<Complex64>,
}

impl PureState {
    /// Accepts an already normalized amplitude vector.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::InvalidState(format!(
                "internal dimension must be at least 2, got {}",
                amps.len()
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let norm = norm(&amps);
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "amplitude vector has norm {norm}, expected 1"
            )));
        }
        Ok(Self { amps })
    }

    /// Normalizes `amps` before construction.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let n = norm(&amps);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidState(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        amps.iter_mut().for_each(|a| *a /= n);
        Self::new(amps)
    }

    /// Computational basis state `|k⟩` of dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidInput(format!(
                "basis index {k} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[k] = ONE;
        Self::new(amps)
    }

    /// Haar-random pure state.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        let amps = (0..dim)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re, im)
            })
            .collect();
        Self::normalized(amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn with_global_phase(&self, chi: f64) -> Self {
        let p = Complex64::from_polar(1.0, chi);
        Self {
            amps: self.amps.iter().map(|a| a * p).collect(),
        }
    }

    /// `W|ψ⟩` for a unitary `W`.
    pub fn transformed(&self, w: &CMatrix) -> Result<Self> {
        if w.nrows() != self.dim() || w.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: w.nrows(),
            });
        }
        let v = w * nalgebra::DVector::from_column_slice(&self.amps);
        Self::normalized(v.iter().copied().collect())
    }

    /// The projector `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> MixedState {
        let d = self.dim();
        let m = CMatrix::from_fn(d, d, |i, j| self.amps[i] * self.amps[j].conj());
        MixedState { matrix: m }
    }
}

impl TryFrom<Vec<f64>> for PureState {
    type Error = Error;

    fn try_from(flat: Vec<f64>) -> Result<Self> {
        if !flat.len().is_multiple_of(2) {
            return Err(Error::InvalidInput(
                "interleaved amplitudes need an even number of reals".into(),
            ));
        }
        let amps = flat
            .chunks_exact(2)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        PureState::new(amps)
    }
}

impl From<PureState> for Vec<f64> {
    fn from(s: PureState) -> Self {
        s.amps.iter().flat_map(|a| [a.re, a.im]).collect()
    }
}

fn norm(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Density matrix over the internal Hilbert space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<[f64; 2]>>", into = "Vec<Vec<[f64; 2]>>")]
pub struct MixedState {
    matrix: CMatrix,
}

impl MixedState {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let d = matrix.nrows();
        if matrix.ncols() != d {
            return Err(Error::InvalidState(format!(
                "density matrix must be square, got {}x{}",
                d,
                matrix.ncols()
            )));
        }
        if d < 2 {
            return Err(Error::InvalidState(format!(
                "internal dimension must be at least 2, got {d}"
            )));
        }
        if matrix.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidState("non-finite matrix entry".into()));
        }
        for i in 0..d {
            for j in i..d {
                let dev = (matrix[(i, j)] - matrix[(j, i)].conj()).norm();
                if dev > STATE_TOL {
                    return Err(Error::InvalidState(format!(
                        "matrix is not Hermitian at ({i},{j}): deviation {dev:e}"
                    )));
                }
            }
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min_eig = matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < EIGEN_FLOOR {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// `I/dim`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(CMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0))
    }

    /// Random full-rank state `GG†/tr(GG†)` from a complex Ginibre matrix.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        let g = random_ginibre(dim, rng);
        let mut m = &g * g.adjoint();
        let tr = m.trace();
        m /= tr;
        // exact hermiticity after rounding
        let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `WρW†`.
    pub fn conjugated(&self, w: &CMatrix) -> Result<Self> {
        if w.nrows() != self.dim() || w.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: w.nrows(),
            });
        }
        let m = w * &self.matrix * w.adjoint();
        let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Self::new(m)
    }

    /// Spectral decomposition `ρ = Σ p_k |c_k⟩⟨c_k|`, weights clamped at zero.
    pub fn eigen_decomposition(&self) -> Vec<(f64, PureState)> {
        let eig = self.matrix.clone().symmetric_eigen();
        (0..self.dim())
            .map(|k| {
                let v: Vec<Complex64> = eig.eigenvectors.column(k).iter().copied().collect();
                let state = PureState::normalized(v).expect("eigenvectors are non-zero");
                (eig.eigenvalues[k].max(0.0), state)
            })
            .collect()
    }
}

impl From<&PureState> for MixedState {
    fn from(s: &PureState) -> Self {
        s.density()
    }
}

impl TryFrom<Vec<Vec<[f64; 2]>>> for MixedState {
    type Error = Error;

    fn try_from(rows: Vec<Vec<[f64; 2]>>) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidInput(
                "density matrix rows must all have the matrix dimension".into(),
            ));
        }
        let m = CMatrix::from_fn(d, d, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1]));
        MixedState::new(m)
    }
}

impl From<MixedState> for Vec<Vec<[f64; 2]>> {
    fn from(s: MixedState) -> Self {
        let d = s.dim();
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let z = s.matrix[(i, j)];
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect()
    }
}

pub(crate) fn random_ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    })
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix, with
/// the phases of `R`'s diagonal absorbed into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let qr = random_ginibre(dim, rng).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..dim {
        let d = r[(k, k)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..dim {
            q[(i, k)] *= ph;
        }
    }
    q
}

/// Real 3-vector on or inside the unit Bloch sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let b = Self { x, y, z };
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::InvalidInput("non-finite Bloch component".into()));
        }
        if b.norm() > 1.0 + STATE_TOL {
            return Err(Error::InvalidInput(format!(
                "Bloch vector norm {} exceeds 1",
                b.norm()
            )));
        }
        Ok(b)
    }

    /// Builds a unit vector from spherical angles (polar, azimuth).
    pub fn from_angles(polar: f64, azimuth: f64) -> Self {
        Self {
            x: polar.sin() * azimuth.cos(),
            y: polar.sin() * azimuth.sin(),
            z: polar.cos(),
        }
    }

    /// Uniformly distributed unit vector.
    pub fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let v: [f64; 3] = [
                StandardNormal.sample(rng),
                StandardNormal.sample(rng),
                StandardNormal.sample(rng),
            ];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n > 1e-8 {
                return Self {
                    x: v[0] / n,
                    y: v[1] / n,
                    z: v[2] / n,
                };
            }
        }
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, o: &Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: &Self) -> Self {
        Self {
            x: self.y * o.z - self.z * o.y,
            y: self.z * o.x - self.x * o.z,
            z: self.x * o.y - self.y * o.x,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            x: self.x + o.x,
            y: self.y + o.y,
            z: self.z + o.z,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self {
            x: self.x - o.x,
            y: self.y - o.y,
            z: self.z - o.z,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            x: self.x * s,
            y: self.y * s,
            z: self.z * s,
        }
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl TryFrom<[f64; 3]> for BlochVector {
    type Error = Error;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        BlochVector::new(v[0], v[1], v[2])
    }
}

impl From<BlochVector> for [f64; 3] {
    fn from(b: BlochVector) -> Self {
        b.to_array()
    }
}

impl fmt::Display for BlochVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Cyclic overlap product together with its phase and modulus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometricFactor {
    pub value: Complex64,
    /// `arg(value)` in `(−π, π]`.
    pub phase: f64,
    /// `|value|`.
    pub visibility: f64,
}

impl GeometricFactor {
    pub fn from_value(value: Complex64) -> Self {
        let mut phase = value.arg();
        if phase <= -PI {
            phase += 2.0 * PI;
        }
        Self {
            value,
            phase,
            visibility: value.norm(),
        }
    }
}

/// Qubit state with Bloch vector `b`; `b` must be a unit vector.
pub fn pure_from_bloch(b: &BlochVector) -> Result<PureState> {
    let n = b.norm();
    if (n - 1.0).abs() > STATE_TOL {
        return Err(Error::InvalidInput(format!(
            "pure states need a unit Bloch vector, got norm {n}"
        )));
    }
    let polar = (b.z / n).clamp(-1.0, 1.0).acos();
    let azimuth = b.y.atan2(b.x);
    let amps = vec![
        Complex64::new((polar / 2.0).cos(), 0.0),
        Complex64::from_polar((polar / 2.0).sin(), azimuth),
    ];
    PureState::normalized(amps)
}

/// Bloch vector `⟨ψ|σ⃗|ψ⟩` of a qubit state.
pub fn state_to_bloch(psi: &PureState) -> Result<BlochVector> {
    if psi.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: psi.dim(),
        });
    }
    let [a0, a1] = [psi.amps[0], psi.amps[1]];
    let c = a0.conj() * a1;
    Ok(BlochVector {
        x: 2.0 * c.re,
        y: 2.0 * c.im,
        z: a0.norm_sqr() - a1.norm_sqr(),
    })
}

fn check_dims<I: Iterator<Item = usize>>(mut dims: I, count: usize) -> Result<()> {
    if count < 2 {
        return Err(Error::InvalidInput(format!(
            "a cyclic product needs at least 2 states, got {count}"
        )));
    }
    let first = dims.next().unwrap_or(0);
    for d in dims {
        if d != first {
            return Err(Error::DimensionMismatch {
                expected: first,
                found: d,
            });
        }
    }
    Ok(())
}

/// `⟨ψ1|ψ2⟩⟨ψ2|ψ3⟩⋯⟨ψN|ψ1⟩`.
pub fn geometric_factor(states: &[PureState]) -> Result<GeometricFactor> {
    check_dims(states.iter().map(PureState::dim), states.len())?;
    let n = states.len();
    let value = (0..n)
        .map(|k| states[k].inner(&states[(k + 1) % n]))
        .fold(ONE, |acc, z| acc * z);
    Ok(GeometricFactor::from_value(value))
}

/// Collective Pancharatnam phase of an ordered state tuple.
///
/// Errors with [`Error::UndefinedPhase`] when the visibility is below
/// [`PHASE_VISIBILITY_FLOOR`].
pub fn pancharatnam_phase(states: &[PureState]) -> Result<f64> {
    let g = geometric_factor(states)?;
    if g.visibility < PHASE_VISIBILITY_FLOOR {
        return Err(Error::UndefinedPhase {
            visibility: g.visibility,
        });
    }
    Ok(g.phase)
}

/// `tr[ρ1ρ2⋯ρN]`.
pub fn geometric_factor_mixed(rhos: &[MixedState]) -> Result<GeometricFactor> {
    check_dims(rhos.iter().map(MixedState::dim), rhos.len())?;
    Ok(GeometricFactor::from_value(ordered_trace(
        rhos.iter().map(MixedState::matrix),
    )))
}

/// Trace of the ordered product of the given matrices.
pub(crate) fn ordered_trace<'a, I>(mats: I) -> Complex64
where
    I: IntoIterator<Item = &'a CMatrix>,
{
    let mut it = mats.into_iter();
    let Some(first) = it.next() else {
        return ONE;
    };
    let mut acc = first.clone();
    for m in it {
        acc = &acc * m;
    }
    acc.trace()
}

/// Oriented solid angle of the spherical polygon whose consecutive vertices
/// are joined by shortest geodesics (the last vertex connects back to the
/// first).
///
/// The orientation is chosen so that the Pancharatnam phase of the
/// corresponding qubit states equals `−Ω/2 (mod 2π)`: the octant traversed
/// `+z → +x → +y` has `Ω = −π/2`. Computed as the sum of signed spherical
/// excesses of a fan triangulation from the first vertex.
pub fn spherical_polygon_solid_angle(blochs: &[BlochVector]) -> Result<f64> {
    let n = blochs.len();
    for (k, b) in blochs.iter().enumerate() {
        if (b.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "vertex {k} is not a unit vector (norm {})",
                b.norm()
            )));
        }
    }
    for k in 0..n {
        let next = (k + 1) % n;
        if blochs[k].dot(&blochs[next]) < -1.0 + 1e-12 {
            return Err(Error::AntipodalEdge(k, next));
        }
    }
    if n < 3 {
        return Ok(0.0);
    }
    let a = &blochs[0];
    let excess: f64 = blochs[1..]
        .windows(2)
        .map(|w| {
            let (b, c) = (&w[0], &w[1]);
            let triple = a.dot(&b.cross(c));
            let denom = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
            2.0 * triple.atan2(denom)
        })
        .sum();
    Ok(-excess)
}
