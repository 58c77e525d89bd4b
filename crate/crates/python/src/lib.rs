//! Python bindings for `geophase`.
//!
//! States are wrapped as `PureState` / `MixedState` classes; interferometer
//! rows are nested lists of Python complex numbers and Bloch vectors are
//! `(x, y, z)` tuples.

use geophase::bell::{self, TrajectoryParams};
use geophase::cyclic::{self, CyclicConfig, InterferometerRows, Partition};
use geophase::oracle::{self, OutputPortPattern, Sector};
use geophase::states::{self, BlochVector, CMatrix};
use num_complex::Complex64;
use pyo3::exceptions::{PyOverflowError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: geophase::Error) -> PyErr {
    match e {
        geophase::Error::Capacity { .. } => PyOverflowError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for geophase::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn bloch(v: (f64, f64, f64)) -> PyResult<BlochVector> {
    BlochVector::new(v.0, v.1, v.2).py()
}

fn tuple(b: &BlochVector) -> (f64, f64, f64) {
    (b.x, b.y, b.z)
}

fn matrix(rows: Vec<Vec<Complex64>>) -> PyResult<CMatrix> {
    let n = rows.len();
    let k = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != k) {
        return Err(PyValueError::new_err("ragged matrix"));
    }
    Ok(CMatrix::from_fn(n, k, |i, j| rows[i][j]))
}

fn nested(m: &CMatrix) -> Vec<Vec<Complex64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Normalized pure internal state.
#[pyclass(name = "PureState", module = "geophase_py", skip_from_py_object)]
#[derive(Clone)]
struct PyPureState {
    inner: states::PureState,
}

#[pymethods]
impl PyPureState {
    /// Amplitudes must have unit norm; pass `normalize=True` to rescale.
    #[new]
    #[pyo3(signature = (amplitudes, normalize = false))]
    fn new(amplitudes: Vec<Complex64>, normalize: bool) -> PyResult<Self> {
        let inner = if normalize {
            states::PureState::normalized(amplitudes)
        } else {
            states::PureState::new(amplitudes)
        }
        .py()?;
        Ok(Self { inner })
    }

    /// Qubit state with unit Bloch vector `(x, y, z)`.
    #[staticmethod]
    fn from_bloch(v: (f64, f64, f64)) -> PyResult<Self> {
        Ok(Self {
            inner: states::pure_from_bloch(&bloch(v)?).py()?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().to_vec()
    }

    /// `⟨self|other⟩`.
    fn inner(&self, other: PyRef<'_, PyPureState>) -> Complex64 {
        self.inner.inner(&other.inner)
    }

    fn bloch(&self) -> PyResult<(f64, f64, f64)> {
        Ok(tuple(&states::state_to_bloch(&self.inner).py()?))
    }

    fn density(&self) -> PyMixedState {
        PyMixedState {
            inner: self.inner.density(),
        }
    }

    fn __repr__(&self) -> String {
        format!("PureState({:?})", self.inner.amplitudes())
    }
}

/// Density matrix of a partially distinguishable photon.
#[pyclass(name = "MixedState", module = "geophase_py", skip_from_py_object)]
#[derive(Clone)]
struct PyMixedState {
    inner: states::MixedState,
}

#[pymethods]
impl PyMixedState {
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        Ok(Self {
            inner: states::MixedState::new(matrix(rows)?).py()?,
        })
    }

    #[staticmethod]
    fn maximally_mixed(dim: usize) -> PyResult<Self> {
        Ok(Self {
            inner: states::MixedState::maximally_mixed(dim).py()?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn matrix(&self) -> Vec<Vec<Complex64>> {
        nested(self.inner.matrix())
    }

    fn __repr__(&self) -> String {
        format!("MixedState(dim={})", self.inner.dim())
    }
}

/// Accepts `PureState` or `MixedState` objects.
fn densities(items: &[Bound<'_, PyAny>]) -> PyResult<Vec<states::MixedState>> {
    items
        .iter()
        .map(|o| {
            if let Ok(p) = o.cast::<PyPureState>() {
                Ok(p.borrow().inner.density())
            } else if let Ok(m) = o.cast::<PyMixedState>() {
                Ok(m.borrow().inner.clone())
            } else {
                Err(PyValueError::new_err("expected PureState or MixedState"))
            }
        })
        .collect()
}

fn pure(items: &[PyRef<'_, PyPureState>]) -> Vec<states::PureState> {
    items.iter().map(|p| p.inner.clone()).collect()
}

/// `(value, phase, visibility)` of `⟨ψ1|ψ2⟩⋯⟨ψN|ψ1⟩`.
#[pyfunction]
fn geometric_factor(states: Vec<PyRef<'_, PyPureState>>) -> PyResult<(Complex64, f64, f64)> {
    let g = states::geometric_factor(&pure(&states)).py()?;
    Ok((g.value, g.phase, g.visibility))
}

/// `(value, phase, visibility)` of `tr[ρ1⋯ρN]`.
#[pyfunction]
fn geometric_factor_mixed(states: Vec<Bound<'_, PyAny>>) -> PyResult<(Complex64, f64, f64)> {
    let g = states::geometric_factor_mixed(&densities(&states)?).py()?;
    Ok((g.value, g.phase, g.visibility))
}

#[pyfunction]
fn pancharatnam_phase(states: Vec<PyRef<'_, PyPureState>>) -> PyResult<f64> {
    states::pancharatnam_phase(&pure(&states)).py()
}

#[pyfunction]
fn spherical_polygon_solid_angle(vertices: Vec<(f64, f64, f64)>) -> PyResult<f64> {
    let v: Vec<BlochVector> = vertices.into_iter().map(bloch).collect::<PyResult<_>>()?;
    states::spherical_polygon_solid_angle(&v).py()
}

/// Mode-transformation rows of the cyclic interferometer.
#[pyfunction]
fn cyclic_rows(phases: Vec<f64>) -> PyResult<Vec<Vec<Complex64>>> {
    let cfg = CyclicConfig::new(phases).py()?;
    Ok(nested(cyclic::build_cyclic_rows(&cfg).matrix()))
}

/// `[(pattern, k, probability)]` over the coincidence sector.
#[pyfunction]
fn coincidence_distribution(
    phases: Vec<f64>,
    states: Vec<Bound<'_, PyAny>>,
) -> PyResult<Vec<(String, usize, f64)>> {
    let cfg = CyclicConfig::new(phases).py()?;
    Ok(cyclic::coincidence_distribution(&cfg, &densities(&states)?)
        .py()?
        .into_iter()
        .map(|(o, p)| (o.to_string(), o.weight(), p))
        .collect())
}

#[pyfunction]
fn parity_correlator(
    phases: Vec<f64>,
    states: Vec<Bound<'_, PyAny>>,
    alice: Vec<usize>,
    bob: Vec<usize>,
) -> PyResult<f64> {
    let cfg = CyclicConfig::new(phases).py()?;
    cyclic::parity_correlator(&cfg, &densities(&states)?, &Partition::new(alice, bob)).py()
}

/// Permutation-sum probability of detecting photons in `ports`.
#[pyfunction]
fn output_probability(
    rows: Vec<Vec<Complex64>>,
    states: Vec<Bound<'_, PyAny>>,
    ports: Vec<usize>,
) -> PyResult<f64> {
    let rows = InterferometerRows::new(matrix(rows)?).py()?;
    let l = OutputPortPattern::new(ports, rows.n_ports()).py()?;
    oracle::output_probability(&rows, &densities(&states)?, &l).py()
}

/// `[(ports, probability)]` for `sector` = `"all"` or `"coincidence"`.
#[pyfunction]
#[pyo3(signature = (rows, states, sector = "all"))]
fn full_distribution(
    rows: Vec<Vec<Complex64>>,
    states: Vec<Bound<'_, PyAny>>,
    sector: &str,
) -> PyResult<Vec<(Vec<usize>, f64)>> {
    let sector = match sector {
        "all" => Sector::All,
        "coincidence" => Sector::Coincidence,
        s => return Err(PyValueError::new_err(format!("unknown sector {s:?}"))),
    };
    let rows = InterferometerRows::new(matrix(rows)?).py()?;
    Ok(oracle::full_distribution(&rows, &densities(&states)?, sector)
        .py()?
        .into_iter()
        .map(|(l, p)| (l.ports().to_vec(), p))
        .collect())
}

/// Bloch vector of trajectory `x1`, `x2`, `y1` or `y2` at parameter `t`.
#[pyfunction]
fn trajectory(name: &str, theta: f64, t: f64) -> PyResult<(f64, f64, f64)> {
    let b = match name {
        "x1" => bell::trajectory_x1(theta, t),
        "x2" => bell::trajectory_x2(theta, t),
        "y1" => bell::trajectory_y1(theta, t),
        "y2" => bell::trajectory_y2(theta, t),
        _ => return Err(PyValueError::new_err(format!("unknown trajectory {name:?}"))),
    }
    .py()?;
    Ok(tuple(&b))
}

#[pyfunction]
fn vij(theta: f64, d: usize, i: usize, j: usize) -> PyResult<Complex64> {
    Ok(bell::vij(&TrajectoryParams::new(theta, d).py()?, i, j).py()?.value)
}

fn report_dict<'py>(py: Python<'py>, r: &bell::ChshReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("v", r.v.map(|row| row.to_vec()).to_vec())?;
    d.set_item("correlators", r.correlators.map(|row| row.to_vec()).to_vec())?;
    d.set_item("phases", r.phases().map(|row| row.to_vec()).to_vec())?;
    d.set_item("i_chsh", r.i_chsh)?;
    Ok(d)
}

/// Geometric factors, correlators, phases and CHSH value.
#[pyfunction]
fn chsh_value(py: Python<'_>, theta: f64, d: usize) -> PyResult<Bound<'_, PyDict>> {
    let r = bell::chsh_value(&TrajectoryParams::new(theta, d).py()?).py()?;
    report_dict(py, &r)
}

#[pyfunction]
fn chsh_zeno_limit(theta: f64) -> PyResult<f64> {
    bell::chsh_zeno_limit(theta).py()
}

/// `[(theta, d, i_chsh, zeno_limit)]` for every pair.
#[pyfunction]
fn scan(ds: Vec<usize>, thetas: Vec<f64>) -> PyResult<Vec<(f64, usize, f64, f64)>> {
    Ok(bell::scan(&ds, &thetas)
        .py()?
        .into_iter()
        .map(|r| (r.theta, r.d, r.report.i_chsh, r.zeno_limit))
        .collect())
}

#[pyfunction]
fn optimize_chsh_d1(py: Python<'_>, restarts: usize, seed: u64) -> PyResult<Bound<'_, PyDict>> {
    let o = py.detach(|| bell::optimize_chsh_d1(restarts, seed)).py()?;
    let d = PyDict::new(py);
    d.set_item("best_value", o.best_value)?;
    d.set_item("restarts", o.restarts)?;
    d.set_item("seed", o.seed)?;
    let v = PyDict::new(py);
    let vs = &o.vectors;
    for (k, b) in [("x1", vs.x1), ("x2", vs.x2), ("y1", vs.y1), ("y2", vs.y2), ("w1", vs.w1), ("w2", vs.w2)] {
        v.set_item(k, tuple(&b))?;
    }
    d.set_item("vectors", v)?;
    Ok(d)
}

#[pyfunction]
fn random_state_scan(py: Python<'_>, dim: usize, samples: usize, seed: u64) -> PyResult<f64> {
    py.detach(|| bell::random_state_scan(dim, samples, seed)).py()
}

#[pymodule]
fn geophase_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPureState>()?;
    m.add_class::<PyMixedState>()?;
    m.add_function(wrap_pyfunction!(geometric_factor, m)?)?;
    m.add_function(wrap_pyfunction!(geometric_factor_mixed, m)?)?;
    m.add_function(wrap_pyfunction!(pancharatnam_phase, m)?)?;
    m.add_function(wrap_pyfunction!(spherical_polygon_solid_angle, m)?)?;
    m.add_function(wrap_pyfunction!(cyclic_rows, m)?)?;
    m.add_function(wrap_pyfunction!(coincidence_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(parity_correlator, m)?)?;
    m.add_function(wrap_pyfunction!(output_probability, m)?)?;
    m.add_function(wrap_pyfunction!(full_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(vij, m)?)?;
    m.add_function(wrap_pyfunction!(chsh_value, m)?)?;
    m.add_function(wrap_pyfunction!(chsh_zeno_limit, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_chsh_d1, m)?)?;
    m.add_function(wrap_pyfunction!(random_state_scan, m)?)?;
    m.add("LOCAL_BOUND", bell::LOCAL_BOUND)?;
    m.add("QUANTUM_BOUND", bell::QUANTUM_BOUND)?;
    Ok(())
}
