//! Python bindings: the parameter set, the closed forms, the strategy
//! rates/schedules, and a batch simulation entry point returning plain
//! dicts. Build as a cdylib and import as `execsim_py`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use execsim::closed_form::{self, BarrierValueFn};
use execsim::model::{MarketState, ModelParams};
use execsim::presets;
use execsim::sim::{run_batch, SeedSpec, SimSpec, StopCause, StoppingRules};
use execsim::stats::{hitting_probabilities, moment_table};
use execsim::strategies::{self, AcCoefficients, Strategy};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Market-impact and cost coefficients plus initial conditions and barriers.
#[pyclass(name = "ModelParams", module = "execsim_py", from_py_object)]
#[derive(Clone)]
struct PyModelParams {
    inner: ModelParams,
}

#[pymethods]
impl PyModelParams {
    /// Builds a parameter set; keyword arguments override the baseline.
    #[new]
    #[pyo3(signature = (
        b = 0.001, l = 0.001, gamma = 0.1, sigma = 0.1, phi = 0.0,
        q0 = 1.0, s0 = 1.1, x0 = 0.0, k_lower = 0.95, h_upper = 1.05,
        t_max = 1.0
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        b: f64,
        l: f64,
        gamma: f64,
        sigma: f64,
        phi: f64,
        q0: f64,
        s0: f64,
        x0: f64,
        k_lower: f64,
        h_upper: f64,
        t_max: f64,
    ) -> PyResult<Self> {
        let inner = ModelParams {
            b,
            l,
            gamma,
            sigma,
            phi,
            q0,
            s0,
            x0,
            k_lower,
            h_upper,
            t_max,
        };
        inner.validate().map_err(value_err)?;
        Ok(Self { inner })
    }

    /// Baseline parameter set (unit inventory, barriers 1 +/- 0.05).
    #[staticmethod]
    fn baseline() -> Self {
        Self {
            inner: presets::table1_params(),
        }
    }

    /// Running-penalty comparison set (price floor experiments).
    #[staticmethod]
    fn section5() -> Self {
        Self {
            inner: presets::table3_params(),
        }
    }

    /// Initial performance mark `x0 + q0 (s0 - gamma q0)`.
    fn initial_performance(&self) -> f64 {
        self.inner.initial_performance()
    }

    #[getter]
    fn b(&self) -> f64 {
        self.inner.b
    }
    #[getter]
    fn l(&self) -> f64 {
        self.inner.l
    }
    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }
    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma
    }
    #[getter]
    fn phi(&self) -> f64 {
        self.inner.phi
    }
    #[getter]
    fn q0(&self) -> f64 {
        self.inner.q0
    }
    #[getter]
    fn s0(&self) -> f64 {
        self.inner.s0
    }
    #[getter]
    fn t_max(&self) -> f64 {
        self.inner.t_max
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "ModelParams(b={}, l={}, gamma={}, sigma={}, phi={}, q0={}, s0={}, x0={}, k_lower={}, h_upper={}, t_max={})",
            p.b, p.l, p.gamma, p.sigma, p.phi, p.q0, p.s0, p.x0, p.k_lower, p.h_upper, p.t_max
        )
    }
}

/// Success-probability exponent `(2*gamma - b)^2 / (2 l sigma^2)`.
#[pyfunction]
fn lambda_p1(params: &PyModelParams) -> f64 {
    closed_form::lambda_p1(&params.inner)
}

/// Exponent with the running penalty subtracted: reduces to `lambda_p1`
/// at `phi = 0`.
#[pyfunction]
fn lambda_p1prime(params: &PyModelParams) -> f64 {
    closed_form::lambda_p1prime(&params.inner)
}

/// Double-barrier success probability `J(y)` with `J(k) = 0`, `J(h) = 1`.
#[pyfunction]
fn barrier_value(y: f64, lam: f64, k_lower: f64, h_upper: f64) -> PyResult<f64> {
    let f = BarrierValueFn::new(lam, k_lower, h_upper).map_err(value_err)?;
    closed_form::barrier_value(y, &f).map_err(value_err)
}

/// Quadratic coefficient of the classical value function; `h2(T) = -gamma`.
#[pyfunction]
fn h2(t: f64, params: &PyModelParams) -> PyResult<f64> {
    closed_form::h2_closed_form(t, &params.inner).map_err(value_err)
}

/// Classical value function `x + q s + h2(t) q^2`.
#[pyfunction]
fn p0_value(t: f64, x: f64, q: f64, s: f64, params: &PyModelParams) -> PyResult<f64> {
    let state = MarketState { t, x, q, s };
    closed_form::p0_value(t, &state, &params.inner).map_err(value_err)
}

fn state_with(q: f64, params: &ModelParams) -> MarketState {
    MarketState {
        t: 0.0,
        x: params.x0,
        q,
        s: params.s0,
    }
}

/// Barrier-target feedback rate `(2*gamma - b)/(2 l) * q`.
#[pyfunction]
fn p1_rate(q: f64, params: &PyModelParams) -> f64 {
    strategies::p1_rate(0.0, &state_with(q, &params.inner), &params.inner)
}

/// Analytic inventory under the target strategy: exponential decay.
#[pyfunction]
fn p1_inventory(t: f64, params: &PyModelParams) -> f64 {
    strategies::p1_inventory(t, &params.inner)
}

/// Classical finite-horizon feedback rate.
#[pyfunction]
fn p0_rate(t: f64, q: f64, params: &PyModelParams) -> PyResult<f64> {
    strategies::p0_rate(t, &state_with(q, &params.inner), &params.inner).map_err(value_err)
}

/// Analytic inventory under the classical strategy: linear decay.
#[pyfunction]
fn p0_inventory(t: f64, params: &PyModelParams) -> PyResult<f64> {
    strategies::p0_inventory(t, &params.inner).map_err(value_err)
}

/// Running-penalty schedule rate (requires `phi > 0`).
#[pyfunction]
fn ac_rate(t: f64, q: f64, params: &PyModelParams) -> PyResult<f64> {
    let coeffs = AcCoefficients::new(&params.inner).map_err(value_err)?;
    strategies::ac_rate(t, &state_with(q, &params.inner), &params.inner, &coeffs)
        .map_err(value_err)
}

/// Analytic inventory under the running-penalty schedule.
#[pyfunction]
fn ac_inventory(t: f64, params: &PyModelParams) -> PyResult<f64> {
    let coeffs = AcCoefficients::new(&params.inner).map_err(value_err)?;
    strategies::ac_inventory(t, &params.inner, &coeffs).map_err(value_err)
}

fn cause_key(cause: StopCause) -> &'static str {
    match cause {
        StopCause::UpperBarrier => "upper_barrier",
        StopCause::LowerBarrier => "lower_barrier",
        StopCause::PriceFloor => "price_floor",
        StopCause::InventoryDepleted => "inventory_depleted",
        StopCause::Horizon => "horizon",
        StopCause::InvalidRate => "invalid_rate",
    }
}

/// Simulates a batch and returns the aggregated estimators as a dict:
/// hitting probabilities with standard errors, per-time moment rows, stop
/// cause counts, and the objective mean/variance. Deterministic in
/// `(seed, n_paths)` for any worker count.
#[pyfunction]
#[pyo3(signature = (
    params, strategy = "p1", n_paths = 10_000, dt = 1e-4, seed = 42,
    double_barrier = true, price_floor = None, depletion = false,
    sample_times = None
))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    params: &PyModelParams,
    strategy: &str,
    n_paths: usize,
    dt: f64,
    seed: u64,
    double_barrier: bool,
    price_floor: Option<f64>,
    depletion: bool,
    sample_times: Option<Vec<f64>>,
) -> PyResult<Bound<'py, PyDict>> {
    let p = params.inner;
    let strategy = Strategy::from_label(strategy, &p).map_err(value_err)?;
    let mut rules = StoppingRules::horizon(p.t_max);
    if double_barrier {
        rules = rules.with_double_barrier(p.k_lower, p.h_upper);
    }
    if let Some(floor) = price_floor {
        rules = rules.with_price_floor(floor);
    }
    if depletion {
        rules = rules.with_depletion(1e-8 * p.q0);
    }
    let sample_times = sample_times.unwrap_or_else(|| vec![0.0, p.t_max]);
    let spec = SimSpec::new(&strategy, p, rules, dt, sample_times.clone());
    let results = run_batch(&spec, &SeedSpec::new(seed), n_paths).map_err(value_err)?;

    let hits = hitting_probabilities(&results, p.t_max).map_err(value_err)?;
    let rows = moment_table(&results, &sample_times).map_err(value_err)?;

    let out = PyDict::new(py);
    out.set_item("p_upper", hits.p_upper)?;
    out.set_item("p_lower", hits.p_lower)?;
    out.set_item("p_neither", hits.p_neither)?;
    out.set_item("se_upper", hits.se_upper)?;
    out.set_item("se_lower", hits.se_lower)?;
    out.set_item("t", rows.iter().map(|r| r.t).collect::<Vec<_>>())?;
    out.set_item("mean", rows.iter().map(|r| r.mean).collect::<Vec<_>>())?;
    out.set_item("variance", rows.iter().map(|r| r.variance).collect::<Vec<_>>())?;
    out.set_item("q05", rows.iter().map(|r| r.q05).collect::<Vec<_>>())?;
    out.set_item("q95", rows.iter().map(|r| r.q95).collect::<Vec<_>>())?;

    let causes = PyDict::new(py);
    for cause in [
        StopCause::UpperBarrier,
        StopCause::LowerBarrier,
        StopCause::PriceFloor,
        StopCause::InventoryDepleted,
        StopCause::Horizon,
        StopCause::InvalidRate,
    ] {
        let n = results.iter().filter(|r| r.stop_cause == cause).count();
        causes.set_item(cause_key(cause), n)?;
    }
    out.set_item("stop_causes", causes)?;

    let objectives: Vec<f64> = results.iter().map(|r| r.objective_value()).collect();
    let mean = objectives.iter().sum::<f64>() / n_paths as f64;
    let variance = if n_paths > 1 {
        objectives.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n_paths - 1) as f64
    } else {
        0.0
    };
    out.set_item("objective_mean", mean)?;
    out.set_item("objective_variance", variance)?;
    out.set_item("n_paths", n_paths)?;
    out.set_item("dt", dt)?;
    out.set_item("seed", seed)?;
    Ok(out)
}

#[pymodule]
fn execsim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_function(wrap_pyfunction!(lambda_p1, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_p1prime, m)?)?;
    m.add_function(wrap_pyfunction!(barrier_value, m)?)?;
    m.add_function(wrap_pyfunction!(h2, m)?)?;
    m.add_function(wrap_pyfunction!(p0_value, m)?)?;
    m.add_function(wrap_pyfunction!(p1_rate, m)?)?;
    m.add_function(wrap_pyfunction!(p1_inventory, m)?)?;
    m.add_function(wrap_pyfunction!(p0_rate, m)?)?;
    m.add_function(wrap_pyfunction!(p0_inventory, m)?)?;
    m.add_function(wrap_pyfunction!(ac_rate, m)?)?;
    m.add_function(wrap_pyfunction!(ac_inventory, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
