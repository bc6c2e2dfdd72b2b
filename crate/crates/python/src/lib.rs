//! Python module `pyppl`: pattern types, model specs, simulation, PPL and
//! Takacs-Fiksel fitting, and the study drivers.

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use ppl_core::estimation::{
    self, build_quadrature, hardcore_adaptive_grid, LimitMode, LossId, LossSpec, ParamGrid, TestFunctionSpec,
    WeightScheme, DEFAULT_DUMMY, DEFAULT_K_PRIME, HARD_CORE_TRUNCATION,
};
use ppl_core::experiments::{self, Scenario, StudyConfig, ADAPTIVE_GRID_SIZE, GNZ_DUMMY};
use ppl_core::sampling::{self, CvConfig, McmcConfig};
use ppl_core::{Error, Family, ModelSpec, Point, PointPattern, RngStream, Window};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(io) => PyOSError::new_err(io.to_string()),
        Error::StudyAborted { .. } | Error::NoFeasiblePoint | Error::EnvelopeViolation { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Converts any serialisable value to plain Python objects via `json`.
fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn family(name: &str) -> PyResult<Family> {
    name.parse().map_err(py_err)
}

fn truncation(f: Family) -> Option<f64> {
    (f == Family::HardCore).then_some(HARD_CORE_TRUNCATION)
}

#[pyclass(name = "Window", module = "pyppl", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyWindow(Window);

#[pymethods]
impl PyWindow {
    #[new]
    fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> PyResult<Self> {
        Window::new(x_min, x_max, y_min, y_max).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn unit() -> Self {
        Self(Window::unit())
    }

    #[getter]
    fn area(&self) -> f64 {
        self.0.area()
    }

    /// `(x_min, x_max, y_min, y_max)`.
    #[getter]
    fn bounds(&self) -> (f64, f64, f64, f64) {
        (self.0.x_min(), self.0.x_max(), self.0.y_min(), self.0.y_max())
    }

    fn __repr__(&self) -> String {
        let (a, b, c, d) = self.bounds();
        format!("Window([{a}, {b}] x [{c}, {d}])")
    }
}

#[pyclass(name = "PointPattern", module = "pyppl", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPattern(PointPattern);

#[pymethods]
impl PyPattern {
    #[new]
    #[pyo3(signature = (points, window = None))]
    fn new(points: Vec<(f64, f64)>, window: Option<PyWindow>) -> PyResult<Self> {
        let w = window.map_or_else(Window::unit, |w| w.0);
        PointPattern::from_xy(&points, w).map(Self).map_err(py_err)
    }

    /// Reads `path` and its `<path>.window.json` sidecar.
    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        PointPattern::load(&path).map(Self).map_err(py_err)
    }

    fn save(&self, path: std::path::PathBuf) -> PyResult<()> {
        self.0.save(&path).map_err(py_err)
    }

    fn points(&self) -> Vec<(f64, f64)> {
        self.0.points().iter().map(|p| (p.x, p.y)).collect()
    }

    #[getter]
    fn window(&self) -> PyWindow {
        PyWindow(self.0.window())
    }

    fn min_pairwise_distance(&self) -> Option<f64> {
        self.0.min_pairwise_distance()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("PointPattern(n={}, window={})", self.0.len(), PyWindow(self.0.window()).__repr__())
    }
}

#[pyclass(name = "ModelSpec", module = "pyppl", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyModel(ModelSpec);

#[pymethods]
impl PyModel {
    /// Log-linear intensity `exp(alpha + beta * x)`.
    #[staticmethod]
    fn poisson(alpha: f64, beta: f64) -> PyResult<Self> {
        ModelSpec::poisson(alpha, beta).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn hard_core(beta: f64, r: f64) -> PyResult<Self> {
        ModelSpec::hard_core(beta, r).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn strauss(beta: f64, r: f64, gamma: f64) -> PyResult<Self> {
        ModelSpec::strauss(beta, r, gamma).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn geyer(beta: f64, r: f64, gamma: f64, s: f64) -> PyResult<Self> {
        ModelSpec::geyer(beta, r, gamma, s).map(Self).map_err(py_err)
    }

    /// Parses e.g. `{"family":"strauss","beta":100,"R":0.05,"gamma":0.5}`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[allow(clippy::wrong_self_convention)]
    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("model serialises")
    }

    #[getter]
    fn family(&self) -> &'static str {
        self.0.family().name()
    }

    /// Parameter names and values, in the family's order.
    fn params(&self) -> Vec<(&'static str, f64)> {
        self.0.family().param_names().iter().copied().zip(self.0.params().0).collect()
    }

    /// Papangelou conditional intensity at `(x, y)` given `pattern`.
    fn cond_intensity(&self, x: f64, y: f64, pattern: &PyPattern) -> PyResult<f64> {
        let u = Point::new(x, y).map_err(py_err)?;
        Ok(ppl_core::cond_intensity(&self.0, u, &pattern.0))
    }

    fn __repr__(&self) -> String {
        format!("ModelSpec({})", self.to_json())
    }
}

/// A parameter grid given as a list of axes, or the string "adaptive".
#[derive(FromPyObject)]
enum GridArg {
    Axes(Vec<Vec<f64>>),
    Named(String),
}

fn resolve_grid(grid: GridArg, f: Family, x: &PointPattern, dummy: usize) -> PyResult<ParamGrid> {
    match grid {
        GridArg::Axes(axes) => ParamGrid::new(axes).map_err(py_err),
        GridArg::Named(s) if s == "adaptive" && f == Family::HardCore => {
            hardcore_adaptive_grid(x, ADAPTIVE_GRID_SIZE, &build_quadrature(&x.window(), x, dummy)).map_err(py_err)
        }
        GridArg::Named(s) => {
            Err(PyValueError::new_err(format!("grid '{s}': expected axes or 'adaptive' (hardcore only)")))
        }
    }
}

fn fit_result(py: Python<'_>, fit: estimation::FitOutcome) -> PyResult<Py<PyAny>> {
    #[derive(Serialize)]
    struct Report {
        theta_hat: std::collections::BTreeMap<&'static str, f64>,
        model: ModelSpec,
        objective: f64,
    }
    let f = fit.spec.family();
    let theta_hat = f.param_names().iter().copied().zip(fit.spec.params().0).collect();
    to_py(py, &Report { theta_hat, model: fit.spec, objective: fit.objective })
}

/// Draws one pattern. Poisson models are sampled exactly, the others by
/// birth-death Metropolis-Hastings.
#[pyfunction]
#[pyo3(signature = (model, seed, window = None, stream = 0, n_steps = 100_000, burn_in = None))]
fn simulate(
    py: Python<'_>,
    model: &PyModel,
    seed: u64,
    window: Option<PyWindow>,
    stream: u64,
    n_steps: u64,
    burn_in: Option<u64>,
) -> PyResult<PyPattern> {
    let w = window.map_or_else(Window::unit, |w| w.0);
    let cfg = McmcConfig { n_steps, burn_in: burn_in.unwrap_or(n_steps / 2), ..McmcConfig::default() };
    let spec = model.0;
    py.detach(|| sampling::simulate(&spec, &w, &cfg, &RngStream::new(seed, stream))).map(PyPattern).map_err(py_err)
}

/// Independent p-thinning. Returns `(validation, training)`.
#[pyfunction]
fn thin(pattern: &PyPattern, p: f64, seed: u64) -> PyResult<(PyPattern, PyPattern)> {
    let (v, t) = ppl_core::thin_independent(&pattern.0, |_| p, &RngStream::new(seed, 0)).map_err(py_err)?;
    Ok((PyPattern(v), PyPattern(t)))
}

/// Innovation of `pattern` under `model` with test function exponent `alpha`.
#[pyfunction]
#[pyo3(signature = (model, pattern, alpha = 1.0, dummy = DEFAULT_DUMMY))]
fn innovation(model: &PyModel, pattern: &PyPattern, alpha: f64, dummy: usize) -> PyResult<f64> {
    let tf = TestFunctionSpec::new(alpha, truncation(model.0.family())).map_err(py_err)?;
    let quad = build_quadrature(&pattern.0.window(), &pattern.0, dummy);
    estimation::innovation(&model.0, &tf, &pattern.0, &quad).map_err(py_err)
}

/// Point Process Learning with Monte-Carlo CV.
#[pyfunction]
#[pyo3(signature = (pattern, family_name, grid, seed, p = 0.5, k = 25, weight = "p", loss = "l1", alpha = 1.0, dummy = DEFAULT_DUMMY))]
#[allow(clippy::too_many_arguments)]
fn fit_ppl(
    py: Python<'_>,
    pattern: &PyPattern,
    family_name: &str,
    grid: GridArg,
    seed: u64,
    p: f64,
    k: usize,
    weight: &str,
    loss: &str,
    alpha: f64,
    dummy: usize,
) -> PyResult<Py<PyAny>> {
    let f = family(family_name)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(PyValueError::new_err(format!("p = {p} is outside (0, 1)")));
    }
    let ws = WeightScheme::parse(weight, DEFAULT_K_PRIME).map_err(py_err)?;
    let ls = LossSpec::new(loss.parse::<LossId>().map_err(py_err)?);
    let tf = TestFunctionSpec::new(alpha, truncation(f)).map_err(py_err)?;
    let x = &pattern.0;
    let g = resolve_grid(grid, f, x, dummy)?;
    let cv = CvConfig::MonteCarlo { p, k };
    let fit = py
        .detach(|| estimation::fit_ppl(x, f, &g, &cv, &ws, &tf, &ls, dummy, &RngStream::new(seed, 0)))
        .map_err(py_err)?;
    fit_result(py, fit)
}

/// Takacs-Fiksel: the grid point with the smallest absolute innovation.
#[pyfunction]
#[pyo3(signature = (pattern, family_name, grid, alpha = 1.0, dummy = DEFAULT_DUMMY))]
fn fit_tf(
    py: Python<'_>,
    pattern: &PyPattern,
    family_name: &str,
    grid: GridArg,
    alpha: f64,
    dummy: usize,
) -> PyResult<Py<PyAny>> {
    let f = family(family_name)?;
    let tf = TestFunctionSpec::new(alpha, truncation(f)).map_err(py_err)?;
    let x = &pattern.0;
    let g = resolve_grid(grid, f, x, dummy)?;
    let fit = py.detach(|| estimation::fit_tf(x, f, &g, &tf, dummy)).map_err(py_err)?;
    fit_result(py, fit)
}

/// `(mse, bias_sq, variance)` of `estimates` around `theta0`.
#[pyfunction]
fn mse_decompose(estimates: Vec<f64>, theta0: f64) -> PyResult<(f64, f64, f64)> {
    let d = experiments::mse_decompose(&estimates, theta0).map_err(py_err)?;
    Ok((d.mse, d.bias_sq, d.variance))
}

/// Preset study configuration as a JSON string.
#[pyfunction]
fn scenario_config(name: &str, seed: u64) -> PyResult<String> {
    let s: Scenario = name.parse().map_err(py_err)?;
    Ok(serde_json::to_string(&s.config(seed)).expect("config serialises"))
}

/// Runs a study from a JSON configuration. Returns `(rows, failed)`.
#[pyfunction]
fn run_study(py: Python<'_>, config: &str) -> PyResult<(Py<PyAny>, Vec<usize>)> {
    let cfg: StudyConfig = serde_json::from_str(config).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let res = py.detach(|| experiments::run_study(&cfg)).map_err(py_err)?;
    Ok((to_py(py, &res.rows)?, res.failed))
}

/// Median `|D|` per `k` for a preset scenario; `mode` is "mc" or "block".
#[pyfunction]
#[pyo3(signature = (scenario, k_list, seed, mode = "mc", reps = 50, alpha = 0.0, dummy = DEFAULT_DUMMY))]
#[allow(clippy::too_many_arguments)]
fn tf_limit(
    py: Python<'_>,
    scenario: &str,
    k_list: Vec<usize>,
    seed: u64,
    mode: &str,
    reps: usize,
    alpha: f64,
    dummy: usize,
) -> PyResult<Py<PyAny>> {
    let model = scenario.parse::<Scenario>().map_err(py_err)?.model();
    let mode: LimitMode = mode.parse().map_err(py_err)?;
    let tf = TestFunctionSpec::new(alpha, truncation(model.family())).map_err(py_err)?;
    let rows = py
        .detach(|| {
            estimation::tf_limit_experiment(
                &model,
                &tf,
                &k_list,
                reps,
                mode,
                &McmcConfig::default(),
                dummy,
                &RngStream::new(seed, 0),
            )
        })
        .map_err(py_err)?;
    to_py(py, &rows)
}

/// Mean and standard error of the innovation at the true parameter.
#[pyfunction]
#[pyo3(signature = (scenario, seed, reps = 100, alpha = None))]
fn gnz_check(py: Python<'_>, scenario: &str, seed: u64, reps: usize, alpha: Option<f64>) -> PyResult<(f64, f64)> {
    let model = scenario.parse::<Scenario>().map_err(py_err)?.model();
    let f = model.family();
    let alpha = alpha.unwrap_or(if f == Family::Poisson { 1.0 } else { 0.0 });
    let tf = TestFunctionSpec::new(alpha, truncation(f)).map_err(py_err)?;
    let s = py
        .detach(|| {
            experiments::gnz_check(&model, &tf, reps, &McmcConfig::default(), GNZ_DUMMY, &RngStream::new(seed, 0))
        })
        .map_err(py_err)?;
    Ok((s.mean, s.se))
}

#[pymodule]
fn pyppl(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyWindow>()?;
    m.add_class::<PyPattern>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(thin, m)?)?;
    m.add_function(wrap_pyfunction!(innovation, m)?)?;
    m.add_function(wrap_pyfunction!(fit_ppl, m)?)?;
    m.add_function(wrap_pyfunction!(fit_tf, m)?)?;
    m.add_function(wrap_pyfunction!(mse_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(scenario_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_study, m)?)?;
    m.add_function(wrap_pyfunction!(tf_limit, m)?)?;
    m.add_function(wrap_pyfunction!(gnz_check, m)?)?;
    Ok(())
}
