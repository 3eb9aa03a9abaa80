//! Python bindings for `pvstab`.

use num_complex::Complex64;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use pvstab::energy::{self, StabilityVerdict};
use pvstab::scan::{self, ExportFormat, Range, ScanSpec};
use pvstab::spectral::{self, ModeProblem, PsiGrid, Tolerances, Variant};
use pvstab::{EquilibriumState, Error};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(m) => PyOSError::new_err(m),
        Error::ConsistencyViolation { .. } | Error::DegenerateDenominator { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn tolerances(tau_tol: Option<f64>, r_tol: Option<f64>, xi_tol: Option<f64>) -> PyResult<Tolerances> {
    let d = Tolerances::default();
    let t = Tolerances {
        tau_tol: tau_tol.unwrap_or(d.tau_tol),
        r_tol: r_tol.unwrap_or(d.r_tol),
        xi_tol: xi_tol.unwrap_or(d.xi_tol),
    };
    t.validate().map_err(to_py)?;
    Ok(t)
}

/// Validated equilibrium state.
#[pyclass(name = "State", module = "pvstab", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyState {
    inner: EquilibriumState,
}

#[pymethods]
impl PyState {
    #[new]
    #[pyo3(signature = (p, v, h, hv, e1, kappa, epsilon, s=0.0, rho=1.0, a=1.0))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        p: f64,
        v: [f64; 3],
        h: [f64; 3],
        hv: [f64; 3],
        e1: f64,
        kappa: f64,
        epsilon: f64,
        s: f64,
        rho: f64,
        a: f64,
    ) -> PyResult<Self> {
        let raw = EquilibriumState {
            p,
            v,
            h,
            s,
            hv,
            e: [e1, epsilon * kappa * hv[2], -epsilon * kappa * hv[1]],
            kappa,
            epsilon,
            rho,
            a,
        };
        Ok(PyState {
            inner: raw.validate().map_err(to_py)?,
        })
    }

    /// Static particular case with `v = (0, 0, v3)`, `H = (0, 0, h3)`, `Hv = (0, hv2, 0)`.
    #[staticmethod]
    #[pyo3(signature = (e1, hv2, h3, v3=0.0, epsilon=1e-6))]
    fn pcase(e1: f64, hv2: f64, h3: f64, v3: f64, epsilon: f64) -> PyResult<Self> {
        let inner = EquilibriumState::pcase(e1, hv2, h3, v3, epsilon)
            .validate()
            .map_err(to_py)?;
        Ok(PyState { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let s = EquilibriumState::from_json(text).map_err(to_py)?;
        Ok(PyState {
            inner: s.validate().map_err(to_py)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn classify(&self) -> String {
        format!("{:?}", self.inner.classify())
    }

    fn mu_hat(&self) -> f64 {
        self.inner.mu_hat()
    }

    #[getter]
    fn p(&self) -> f64 {
        self.inner.p
    }
    #[getter]
    fn v(&self) -> [f64; 3] {
        self.inner.v
    }
    #[getter]
    fn h(&self) -> [f64; 3] {
        self.inner.h
    }
    #[getter]
    fn hv(&self) -> [f64; 3] {
        self.inner.hv
    }
    #[getter]
    fn e(&self) -> [f64; 3] {
        self.inner.e
    }
    #[getter]
    fn kappa(&self) -> f64 {
        self.inner.kappa
    }
    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }

    fn __repr__(&self) -> String {
        let s = &self.inner;
        format!(
            "State(p={}, v={:?}, H={:?}, Hv={:?}, E={:?}, kappa={}, epsilon={})",
            s.p, s.v, s.h, s.hv, s.e, s.kappa, s.epsilon
        )
    }
}

#[pyclass(name = "StabilityReport", module = "pvstab", frozen)]
pub struct PyStabilityReport {
    inner: energy::StabilityReport,
}

#[pymethods]
impl PyStabilityReport {
    #[getter]
    fn verdict(&self) -> String {
        format!("{:?}", self.inner.verdict)
    }
    #[getter]
    fn case(&self) -> String {
        format!("{:?}", self.inner.case)
    }
    #[getter]
    fn witness(&self) -> String {
        self.inner.witness.clone()
    }
    #[getter]
    fn min_eig(&self) -> Option<f64> {
        self.inner.min_eig
    }
    #[getter]
    fn inequalities(&self) -> Option<[f64; 4]> {
        self.inner.inequalities
    }
    #[getter]
    fn closed_form_margin(&self) -> Option<f64> {
        self.inner.closed_form_margin
    }
    fn is_sufficient(&self) -> bool {
        self.inner.verdict == StabilityVerdict::Sufficient
    }
    fn to_json(&self) -> String {
        pvstab::jsonfmt::to_string(&self.inner, true)
    }
    fn __repr__(&self) -> String {
        format!("StabilityReport(verdict={:?}, case={:?})", self.inner.verdict, self.inner.case)
    }
}

#[pyclass(name = "ModeRoot", module = "pvstab", frozen)]
pub struct PyModeRoot {
    #[pyo3(get)]
    tau: Complex64,
    #[pyo3(get)]
    xi_p: Complex64,
    #[pyo3(get)]
    xi_v: Complex64,
    #[pyo3(get)]
    residual: Complex64,
    #[pyo3(get)]
    psi: f64,
}

#[pymethods]
impl PyModeRoot {
    fn __repr__(&self) -> String {
        format!("ModeRoot(tau={}, psi={})", self.tau, self.psi)
    }
}

impl From<spectral::ModeRoot> for PyModeRoot {
    fn from(r: spectral::ModeRoot) -> Self {
        PyModeRoot {
            tau: r.tau,
            xi_p: r.xi_p,
            xi_v: r.xi_v,
            residual: r.residual,
            psi: r.psi,
        }
    }
}

#[pyclass(name = "RegionGrid", module = "pvstab", frozen)]
pub struct PyRegionGrid {
    inner: scan::RegionGrid,
}

#[pymethods]
impl PyRegionGrid {
    #[getter]
    fn e1_values(&self) -> Vec<f64> {
        self.inner.e1_values.clone()
    }
    #[getter]
    fn h2_values(&self) -> Vec<f64> {
        self.inner.h2_values.clone()
    }
    /// Region labels as rows indexed by E1, columns by Hv2.
    fn labels(&self) -> Vec<Vec<u8>> {
        let n = self.inner.h2_values.len();
        (0..self.inner.e1_values.len())
            .map(|i| (0..n).map(|j| self.inner.cell(i, j).label.unwrap_or(0)).collect())
            .collect()
    }
    fn growth_rates(&self) -> Vec<Vec<f64>> {
        let n = self.inner.h2_values.len();
        (0..self.inner.e1_values.len())
            .map(|i| (0..n).map(|j| self.inner.cell(i, j).max_growth_rate).collect())
            .collect()
    }
    fn count_label(&self, label: u8) -> usize {
        self.inner.count_label(label)
    }
    fn to_csv(&self) -> PyResult<String> {
        scan::export_grid(&self.inner, ExportFormat::Csv).map_err(to_py)
    }
    fn to_json(&self) -> PyResult<String> {
        scan::export_grid(&self.inner, ExportFormat::Json).map_err(to_py)
    }
    fn to_plotscript(&self) -> PyResult<String> {
        scan::export_grid(&self.inner, ExportFormat::Plotscript).map_err(to_py)
    }
}

#[pyfunction]
fn check_sufficient_stability(state: &PyState) -> PyStabilityReport {
    PyStabilityReport {
        inner: energy::check_sufficient_stability(&state.inner),
    }
}

/// Smallest eigenvalue of the order-42 energy form.
#[pyfunction]
fn energy_min_eigenvalue(state: &PyState) -> PyResult<f64> {
    Ok(energy::assemble_energy_form(&state.inner).map_err(to_py)?.min_eig)
}

#[pyfunction]
fn posdef_margins(e1: f64, hv2: f64, h3: f64, v3: f64) -> [f64; 4] {
    energy::posdef_margins(e1, hv2, h3, v3)
}

#[pyfunction]
fn static_threshold(hv2: f64, h3: f64) -> f64 {
    energy::static_threshold(hv2, h3)
}

/// Roots in `y` of the particular-case characteristic polynomial.
#[pyfunction]
fn pcase_q_roots(e1: f64, hv2: f64, h3: f64, v3: f64) -> Vec<Complex64> {
    energy::PCasePolynomial::new(e1, hv2, h3, v3).q_roots()
}

fn parse_variant(s: &str) -> PyResult<Variant> {
    match s {
        "h2hat-zero" | "H2hatZero" => Ok(Variant::H2hatZero),
        "pcase-2d" | "PCase2D" => Ok(Variant::PCase2D),
        "static-general-angle" | "StaticGeneralAngle" => Ok(Variant::StaticGeneralAngle),
        _ => Err(PyValueError::new_err(format!("unknown variant {s:?}"))),
    }
}

#[pyfunction]
#[pyo3(signature = (state, psi=0.0, variant=None, tau_tol=None, r_tol=None, xi_tol=None))]
fn find_unstable_roots(
    state: &PyState,
    psi: f64,
    variant: Option<&str>,
    tau_tol: Option<f64>,
    r_tol: Option<f64>,
    xi_tol: Option<f64>,
) -> PyResult<Vec<PyModeRoot>> {
    let tol = tolerances(tau_tol, r_tol, xi_tol)?;
    let problem = match variant {
        Some(v) => ModeProblem::new(state.inner, psi, parse_variant(v)?),
        None => ModeProblem::auto(state.inner, psi),
    }
    .map_err(to_py)?;
    Ok(spectral::find_unstable_roots(&problem, &tol)
        .into_iter()
        .map(PyModeRoot::from)
        .collect())
}

/// `(verdict, growth_rate)` after scanning every wave-vector angle.
#[pyfunction]
#[pyo3(signature = (state, psi_step=spectral::DEFAULT_PSI_STEP))]
fn classify_point(py: Python<'_>, state: &PyState, psi_step: f64) -> PyResult<(String, f64)> {
    let grid = PsiGrid::new(psi_step).map_err(to_py)?;
    let s = state.inner;
    let v = py
        .detach(|| spectral::classify_point(&s, &grid, &Tolerances::default()))
        .map_err(to_py)?;
    Ok((v.name().to_string(), v.growth_rate()))
}

#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (h3, grid=(100, 100), e1_range=(0.0, 2.0), h2_range=(0.0, 2.0), epsilon=1e-6, psi_step=spectral::DEFAULT_PSI_STEP, threads=None))]
fn scan_plane(
    py: Python<'_>,
    h3: f64,
    grid: (usize, usize),
    e1_range: (f64, f64),
    h2_range: (f64, f64),
    epsilon: f64,
    psi_step: f64,
    threads: Option<usize>,
) -> PyResult<PyRegionGrid> {
    let spec = ScanSpec {
        h3,
        epsilon,
        e1_range: Range::new(e1_range.0, e1_range.1, grid.0),
        h2_range: Range::new(h2_range.0, h2_range.1, grid.1),
        psi_step,
        tolerances: Tolerances::default(),
    };
    spec.validate().map_err(to_py)?;
    let inner = py
        .detach(|| scan::scan_plane_with_threads(&spec, threads).and_then(scan::label_regions))
        .map_err(to_py)?;
    Ok(PyRegionGrid { inner })
}

#[pyfunction]
fn dump_matrices(state: &PyState) -> PyResult<String> {
    let d = pvstab::matrices::dump_matrices(&state.inner).map_err(to_py)?;
    Ok(pvstab::jsonfmt::to_string(&d, true))
}

#[pymodule]
#[pyo3(name = "pvstab")]
fn pvstab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyState>()?;
    m.add_class::<PyStabilityReport>()?;
    m.add_class::<PyModeRoot>()?;
    m.add_class::<PyRegionGrid>()?;
    m.add_function(wrap_pyfunction!(check_sufficient_stability, m)?)?;
    m.add_function(wrap_pyfunction!(energy_min_eigenvalue, m)?)?;
    m.add_function(wrap_pyfunction!(posdef_margins, m)?)?;
    m.add_function(wrap_pyfunction!(static_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(pcase_q_roots, m)?)?;
    m.add_function(wrap_pyfunction!(find_unstable_roots, m)?)?;
    m.add_function(wrap_pyfunction!(classify_point, m)?)?;
    m.add_function(wrap_pyfunction!(scan_plane, m)?)?;
    m.add_function(wrap_pyfunction!(dump_matrices, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
