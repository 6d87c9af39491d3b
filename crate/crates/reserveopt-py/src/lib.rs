//! Python bindings for the `reserveopt` valuation engine.
//!
//! The module mirrors the library's main surface: build a [`Model`]
//! and a [`Contract`], then call the free functions to solve
//! (`solve_single`, `solve_lifetime`), certify (`lifetime_verify`),
//! iterate (`value_iterate`), estimate by Monte Carlo
//! (`estimate_single`, `estimate_lifetime`), and calibrate (`fit_ou`,
//! `read_price_csv`). Results come back as small typed objects with
//! read-only attributes.
//!
//! Units follow the library's canonical convention: rates and
//! volatilities are per year unless a constructor is given
//! `time_unit="day"`, in which case they convert the way spec files
//! do (rate x 365, volatility x sqrt(365)); prices never rescale.
//! Errors surface as `ValueError` for bad inputs (models, contracts,
//! data, domain violations) and `RuntimeError` for numeric failures.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use reserveopt::{
    check_sustainability, estimate_lifetime_value, estimate_single_value, fit_ou_mle,
    lifetime_construct, lifetime_verify, make_eigenpair, read_price_csv, solve_single,
    value_iterate, ContractParams, ContractSpec, DiffusionModel, EigenPair, Error, InnerSpec,
    ModelSpec, PriceSeries, SimConfig, TimeUnit, DAYS_PER_YEAR,
};

// ---- error and unit plumbing ----

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidModel(_)
        | Error::InvalidContract(_)
        | Error::Sustainability(_)
        | Error::Data(_)
        | Error::OutOfDomain { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse_unit(s: &str) -> PyResult<TimeUnit> {
    s.parse::<TimeUnit>().map_err(to_py)
}

/// Reprs spell booleans the way Python does.
fn py_bool(b: bool) -> &'static str {
    if b { "True" } else { "False" }
}

// ---- model and contract ----

/// A price model. Build one with the static constructors `ou`,
/// `neg_gbm`, or `stack`.
#[pyclass(frozen)]
struct Model {
    inner: DiffusionModel,
}

#[pymethods]
impl Model {
    /// Ornstein-Uhlenbeck price: dX = theta (mu - X) dt + sigma dW.
    #[staticmethod]
    #[pyo3(signature = (theta, mu, sigma, time_unit = "year"))]
    fn ou(theta: f64, mu: f64, sigma: f64, time_unit: &str) -> PyResult<Self> {
        let spec = ModelSpec::Ou { theta, mu, sigma };
        Ok(Model { inner: spec.to_model(parse_unit(time_unit)?).map_err(to_py)? })
    }

    /// Negative geometric Brownian motion: X = -G with G a GBM of the
    /// given drift and volatility.
    #[staticmethod]
    #[pyo3(signature = (mu, sigma, time_unit = "year"))]
    fn neg_gbm(mu: f64, sigma: f64, time_unit: &str) -> PyResult<Self> {
        let spec = ModelSpec::NegGbm { mu, sigma };
        Ok(Model { inner: spec.to_model(parse_unit(time_unit)?).map_err(to_py)? })
    }

    /// Supply-stack price P = D + d sinh(b Z) driven by a Brownian or
    /// mean-reverting imbalance Z (pass `theta` for the latter).
    #[staticmethod]
    #[pyo3(signature = (floor, d, b, theta = None, time_unit = "year"))]
    fn stack(floor: f64, d: f64, b: f64, theta: Option<f64>, time_unit: &str) -> PyResult<Self> {
        let inner = match theta {
            None => InnerSpec::Bm,
            Some(t) => InnerSpec::Ou { theta: t },
        };
        let spec = ModelSpec::Stack { floor, d, b, inner };
        Ok(Model { inner: spec.to_model(parse_unit(time_unit)?).map_err(to_py)? })
    }

    /// (lower, upper) endpoints of the state space.
    #[getter]
    fn bounds(&self) -> (f64, f64) {
        self.inner.bounds()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

/// A physically covered reserve call: exercise level `x_star`,
/// premium legs `p_c` (up front) and `k_c` (on exercise), discount
/// `rate`, refill degradation factor `a` in (0, 1).
#[pyclass(frozen)]
struct Contract {
    inner: ContractParams,
}

#[pymethods]
impl Contract {
    #[new]
    #[pyo3(signature = (x_star, p_c, k_c, rate, a, time_unit = "year", force = false))]
    fn new(
        x_star: f64,
        p_c: f64,
        k_c: f64,
        rate: f64,
        a: f64,
        time_unit: &str,
        force: bool,
    ) -> PyResult<Self> {
        let spec = ContractSpec { x_star, p_c, k_c, rate, a };
        Ok(Contract { inner: spec.to_contract(parse_unit(time_unit)?, force).map_err(to_py)? })
    }

    #[getter]
    fn x_star(&self) -> f64 {
        self.inner.x_star
    }

    #[getter]
    fn p_c(&self) -> f64 {
        self.inner.p_c
    }

    #[getter]
    fn k_c(&self) -> f64 {
        self.inner.k_c
    }

    /// Discount rate, per year.
    #[getter]
    fn rate(&self) -> f64 {
        self.inner.rate
    }

    #[getter]
    fn a(&self) -> f64 {
        self.inner.a
    }

    #[getter]
    fn total_premium(&self) -> f64 {
        self.inner.total_premium()
    }

    fn __repr__(&self) -> String {
        format!(
            "Contract(x_star={}, p_c={}, k_c={}, rate={}, a={})",
            self.inner.x_star, self.inner.p_c, self.inner.k_c, self.inner.rate, self.inner.a
        )
    }
}

fn pair_for(model: &Model, contract: &Contract) -> PyResult<EigenPair> {
    make_eigenpair(&model.inner, contract.inner.rate).map_err(to_py)
}

// ---- result objects ----

/// Solution of the single-option purchase problem.
#[pyclass(frozen, name = "SingleSolution")]
struct PySingleSolution {
    inner: reserveopt::SingleSolution,
}

#[pymethods]
impl PySingleSolution {
    /// Case tag: "A" (threshold attained), "B" (finite, unattained),
    /// or "C" (infinite value).
    #[getter]
    fn case(&self) -> String {
        self.inner.case().to_string()
    }

    /// Optimal purchase threshold, case A only.
    #[getter]
    fn x_check(&self) -> Option<f64> {
        self.inner.x_check()
    }

    /// Maximized ratio h(x_check)/phi_r(x_check), case A only.
    #[getter]
    fn ratio_max(&self) -> Option<f64> {
        self.inner.ratio_max()
    }

    /// Value function at a state (math.inf in case C).
    fn value_at(&self, x: f64) -> PyResult<f64> {
        self.inner.value_at(x).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        match (self.inner.x_check(), self.inner.ratio_max()) {
            (Some(x), Some(r)) => {
                format!("SingleSolution(case='A', x_check={x}, ratio_max={r})")
            }
            _ => format!("SingleSolution(case='{}')", self.inner.case()),
        }
    }
}

/// Solution of the lifetime (renewal) problem.
#[pyclass(frozen, name = "LifetimeSolution")]
struct PyLifetimeSolution {
    inner: reserveopt::LifetimeSolution,
}

#[pymethods]
impl PyLifetimeSolution {
    /// Lifetime value at the exercise level.
    #[getter]
    fn y_star(&self) -> f64 {
        self.inner.y_star()
    }

    /// Optimal purchase threshold.
    #[getter]
    fn x_check(&self) -> f64 {
        self.inner.x_check()
    }

    /// "alpha" when continuation carries value beyond one option,
    /// "beta" when one option is all the value there is.
    #[getter]
    fn regime(&self) -> String {
        self.inner.regime().to_string()
    }

    /// Contraction factor bound rho < 1 of the renewal operator.
    #[getter]
    fn rho_bound(&self) -> f64 {
        self.inner.rho_bound()
    }

    /// Relative residual of the scalar fixed-point identity.
    #[getter]
    fn residual(&self) -> f64 {
        self.inner.residual()
    }

    /// Lifetime value function at a state.
    fn value_at(&self, x: f64) -> PyResult<f64> {
        self.inner.value_at(x).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "LifetimeSolution(y_star={}, x_check={}, regime='{}')",
            self.inner.y_star(),
            self.inner.x_check(),
            self.inner.regime()
        )
    }
}

/// Outcome of the S1*/S2* sustainability checks.
#[pyclass(frozen, name = "SustainabilityReport")]
struct PySustainability {
    inner: reserveopt::SustainabilityReport,
}

#[pymethods]
impl PySustainability {
    /// The seller can profit somewhere (sup h > 0).
    #[getter]
    fn s1_star(&self) -> bool {
        self.inner.s1_star
    }

    /// Witnessing supremum of the payoff.
    #[getter]
    fn s1_sup(&self) -> f64 {
        self.inner.s1_sup
    }

    /// Total premium stays below the exercise level.
    #[getter]
    fn s2_star(&self) -> bool {
        self.inner.s2_star
    }

    /// Both checks passed.
    #[getter]
    fn ok(&self) -> bool {
        self.inner.pass()
    }

    fn __repr__(&self) -> String {
        format!(
            "SustainabilityReport(s1_star={}, s2_star={})",
            py_bool(self.inner.s1_star),
            py_bool(self.inner.s2_star)
        )
    }
}

/// Certificate from the lifetime fixed-point checks.
#[pyclass(frozen, name = "VerifyReport")]
struct PyVerifyReport {
    inner: reserveopt::VerifyReport,
}

#[pymethods]
impl PyVerifyReport {
    /// Relative amount by which the true operator maximum exceeds the
    /// candidate threshold's value.
    #[getter]
    fn max_ratio_defect(&self) -> f64 {
        self.inner.max_ratio_defect
    }

    /// Relative residual of the scalar identity at the candidate.
    #[getter]
    fn fixed_point_residual(&self) -> f64 {
        self.inner.fixed_point_residual
    }

    /// Tolerance both residuals were held to.
    #[getter]
    fn tol(&self) -> f64 {
        self.inner.tol
    }

    /// Both checks passed.
    #[getter]
    fn ok(&self) -> bool {
        self.inner.pass
    }

    fn __repr__(&self) -> String {
        format!(
            "VerifyReport(ok={}, max_ratio_defect={}, fixed_point_residual={})",
            py_bool(self.inner.pass),
            self.inner.max_ratio_defect,
            self.inner.fixed_point_residual
        )
    }
}

/// Trace of the contraction iteration toward the lifetime value.
#[pyclass(frozen, name = "IterationTrace")]
struct PyIterationTrace {
    inner: reserveopt::IterationTrace,
}

#[pymethods]
impl PyIterationTrace {
    /// Iterates at the exercise level, first entry the single value.
    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values.clone()
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    /// Largest observed ratio of successive increments.
    #[getter]
    fn empirical_rate(&self) -> f64 {
        self.inner.empirical_rate
    }

    /// Maximizer of the final operator application.
    #[getter]
    fn x_check(&self) -> Option<f64> {
        self.inner.x_check
    }

    fn __repr__(&self) -> String {
        format!(
            "IterationTrace(n={}, converged={}, empirical_rate={})",
            self.inner.values.len(),
            py_bool(self.inner.converged),
            self.inner.empirical_rate
        )
    }
}

/// Monte Carlo estimate of a threshold policy's value.
#[pyclass(frozen, name = "PolicyEstimate")]
struct PyPolicyEstimate {
    inner: reserveopt::PolicyEstimate,
}

#[pymethods]
impl PyPolicyEstimate {
    #[getter]
    fn mean(&self) -> f64 {
        self.inner.mean
    }

    #[getter]
    fn stderr(&self) -> f64 {
        self.inner.stderr
    }

    /// Independent units averaged (antithetic pairs count once).
    #[getter]
    fn n_effective(&self) -> usize {
        self.inner.n_effective
    }

    /// The estimate can be low by at most this (horizon truncation).
    #[getter]
    fn truncation_bias_bound(&self) -> f64 {
        self.inner.truncation_bias_bound
    }

    fn __repr__(&self) -> String {
        format!(
            "PolicyEstimate(mean={}, stderr={}, n_effective={})",
            self.inner.mean, self.inner.stderr, self.inner.n_effective
        )
    }
}

/// A fitted Ornstein-Uhlenbeck model, per-year units.
#[pyclass(frozen, name = "OuFit")]
struct PyOuFit {
    inner: reserveopt::OuFit,
}

#[pymethods]
impl PyOuFit {
    #[getter]
    fn theta(&self) -> f64 {
        self.inner.theta
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma
    }

    #[getter]
    fn log_likelihood(&self) -> f64 {
        self.inner.log_likelihood
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    /// Winsorization bounds the input carried, if any.
    #[getter]
    fn truncation(&self) -> Option<(f64, f64)> {
        self.inner.truncation
    }

    /// The fitted model as a `Model`, ready for the solvers.
    fn model(&self) -> PyResult<Model> {
        let spec =
            ModelSpec::Ou { theta: self.inner.theta, mu: self.inner.mu, sigma: self.inner.sigma };
        Ok(Model { inner: spec.to_model(TimeUnit::Year).map_err(to_py)? })
    }

    fn __repr__(&self) -> String {
        format!(
            "OuFit(theta={}, mu={}, sigma={}, n={})",
            self.inner.theta, self.inner.mu, self.inner.sigma, self.inner.n
        )
    }
}

// ---- operations ----

/// Solve the single-option purchase problem.
#[pyfunction(name = "solve_single")]
fn py_solve_single(model: &Model, contract: &Contract) -> PyResult<PySingleSolution> {
    let pair = pair_for(model, contract)?;
    Ok(PySingleSolution { inner: solve_single(&pair, &contract.inner).map_err(to_py)? })
}

/// Solve the lifetime (renewal) problem via its fixed point.
#[pyfunction]
fn solve_lifetime(model: &Model, contract: &Contract) -> PyResult<PyLifetimeSolution> {
    let pair = pair_for(model, contract)?;
    Ok(PyLifetimeSolution { inner: lifetime_construct(&pair, &contract.inner).map_err(to_py)? })
}

/// Certify a candidate (y_star, x_check) against the fixed-point
/// system. Failed checks are reported, not raised.
#[pyfunction(name = "lifetime_verify")]
fn py_lifetime_verify(
    model: &Model,
    contract: &Contract,
    y_star: f64,
    x_check: f64,
) -> PyResult<PyVerifyReport> {
    let pair = pair_for(model, contract)?;
    Ok(PyVerifyReport {
        inner: lifetime_verify(&pair, &contract.inner, y_star, x_check).map_err(to_py)?,
    })
}

/// Run the contraction iteration for up to `n_max` steps; `tol`
/// defaults to a scale set by the contract.
#[pyfunction(name = "value_iterate", signature = (model, contract, n_max = 200, tol = None))]
fn py_value_iterate(
    model: &Model,
    contract: &Contract,
    n_max: usize,
    tol: Option<f64>,
) -> PyResult<PyIterationTrace> {
    let pair = pair_for(model, contract)?;
    let tol = tol.unwrap_or_else(|| reserveopt::default_iteration_tol(&contract.inner));
    Ok(PyIterationTrace {
        inner: value_iterate(&pair, &contract.inner, n_max, tol).map_err(to_py)?,
    })
}

/// Value at `x` of the policy that purchases at the first passage
/// down to `threshold`.
#[pyfunction(name = "threshold_policy_value")]
fn py_threshold_policy_value(
    model: &Model,
    contract: &Contract,
    threshold: f64,
    x: f64,
) -> PyResult<f64> {
    let pair = pair_for(model, contract)?;
    reserveopt::threshold_policy_value(&pair, &contract.inner, threshold, x).map_err(to_py)
}

/// Expected discount E_x[exp(-rate tau_y)] of the first passage from
/// x to y; `rate` is per year.
#[pyfunction(name = "hitting_discount")]
fn py_hitting_discount(model: &Model, rate: f64, x: f64, y: f64) -> PyResult<f64> {
    let pair = make_eigenpair(&model.inner, rate).map_err(to_py)?;
    reserveopt::hitting_discount(&pair, x, y).map_err(to_py)
}

/// Run the S1*/S2* sustainability checks.
#[pyfunction(name = "check_sustainability")]
fn py_check_sustainability(model: &Model, contract: &Contract) -> PyResult<PySustainability> {
    let pair = pair_for(model, contract)?;
    Ok(PySustainability {
        inner: check_sustainability(&pair, &contract.inner).map_err(to_py)?,
    })
}

fn build_sim_config(
    dt: f64,
    horizon: f64,
    paths: usize,
    seed: u64,
    antithetic: bool,
    tail_cut: f64,
) -> PyResult<SimConfig> {
    let mut cfg = SimConfig::new(dt, horizon, paths, seed).map_err(to_py)?;
    cfg.antithetic = antithetic;
    if !(tail_cut.is_finite() && tail_cut >= 0.0) {
        return Err(PyValueError::new_err(format!(
            "tail_cut must be finite and nonnegative, got {tail_cut}"
        )));
    }
    cfg.tail_cut = tail_cut;
    Ok(cfg)
}

/// Monte Carlo estimate of the single-option threshold policy from
/// `x0`. `dt` and `horizon` are in years.
#[pyfunction(signature = (model, contract, threshold, x0, dt, horizon, paths,
                          seed = 2024, antithetic = true, tail_cut = 1e-6))]
#[allow(clippy::too_many_arguments)]
fn estimate_single(
    model: &Model,
    contract: &Contract,
    threshold: f64,
    x0: f64,
    dt: f64,
    horizon: f64,
    paths: usize,
    seed: u64,
    antithetic: bool,
    tail_cut: f64,
) -> PyResult<PyPolicyEstimate> {
    let cfg = build_sim_config(dt, horizon, paths, seed, antithetic, tail_cut)?;
    Ok(PyPolicyEstimate {
        inner: estimate_single_value(&model.inner, &contract.inner, threshold, x0, &cfg)
            .map_err(to_py)?,
    })
}

/// Monte Carlo estimate of the lifetime policy (cycles scaled by the
/// degradation factor) from `x0`. `dt` and `horizon` are in years.
#[pyfunction(signature = (model, contract, threshold, x0, dt, horizon, paths,
                          seed = 2024, antithetic = true, tail_cut = 1e-6))]
#[allow(clippy::too_many_arguments)]
fn estimate_lifetime(
    model: &Model,
    contract: &Contract,
    threshold: f64,
    x0: f64,
    dt: f64,
    horizon: f64,
    paths: usize,
    seed: u64,
    antithetic: bool,
    tail_cut: f64,
) -> PyResult<PyPolicyEstimate> {
    let cfg = build_sim_config(dt, horizon, paths, seed, antithetic, tail_cut)?;
    Ok(PyPolicyEstimate {
        inner: estimate_lifetime_value(&model.inner, &contract.inner, threshold, x0, &cfg)
            .map_err(to_py)?,
    })
}

/// Fit an Ornstein-Uhlenbeck model by exact-transition maximum
/// likelihood. Timestamps are Unix seconds, strictly increasing; the
/// sampling interval is inferred from the first two unless given.
/// `truncate=(lo, hi)` winsorizes first; `daily_average=True`
/// collapses sub-daily data to one mean per UTC day.
#[pyfunction(signature = (timestamps, prices, interval_seconds = None,
                          truncate = None, daily_average = false))]
fn fit_ou(
    timestamps: Vec<i64>,
    prices: Vec<f64>,
    interval_seconds: Option<u32>,
    truncate: Option<(f64, f64)>,
    daily_average: bool,
) -> PyResult<PyOuFit> {
    let interval = match interval_seconds {
        Some(s) => s,
        None => {
            if timestamps.len() < 2 {
                return Err(PyValueError::new_err(
                    "need at least two timestamps to infer the sampling interval",
                ));
            }
            u32::try_from(timestamps[1] - timestamps[0]).map_err(|_| {
                PyValueError::new_err("timestamps must be increasing at a positive interval")
            })?
        }
    };
    let mut series = PriceSeries::new(timestamps, prices, interval).map_err(to_py)?;
    if daily_average {
        series = reserveopt::daily_average(&series).map_err(to_py)?;
    }
    if let Some((lo, hi)) = truncate {
        series = reserveopt::truncate(&series, lo, hi).map_err(to_py)?;
    }
    let dt_years = series.interval_seconds as f64 / 86_400.0 / DAYS_PER_YEAR;
    Ok(PyOuFit { inner: fit_ou_mle(&series, dt_years).map_err(to_py)? })
}

/// Read a two-column price CSV (timestamp, price; optional header).
/// Returns (timestamps, prices, interval_seconds).
#[pyfunction(name = "read_price_csv", signature = (path, delimiter = ","))]
fn py_read_price_csv(path: &str, delimiter: &str) -> PyResult<(Vec<i64>, Vec<f64>, u32)> {
    let delim = match delimiter.as_bytes() {
        [b] => *b,
        _ => {
            return Err(PyValueError::new_err(format!(
                "delimiter must be a single ASCII character, got {delimiter:?}"
            )))
        }
    };
    let series = read_price_csv(std::path::Path::new(path), delim).map_err(to_py)?;
    Ok((series.timestamps, series.values, series.interval_seconds))
}

// ---- module ----

#[pymodule(name = "reserveopt")]
fn reserveopt_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Model>()?;
    m.add_class::<Contract>()?;
    m.add_class::<PySingleSolution>()?;
    m.add_class::<PyLifetimeSolution>()?;
    m.add_class::<PySustainability>()?;
    m.add_class::<PyVerifyReport>()?;
    m.add_class::<PyIterationTrace>()?;
    m.add_class::<PyPolicyEstimate>()?;
    m.add_class::<PyOuFit>()?;
    m.add_function(wrap_pyfunction!(py_solve_single, m)?)?;
    m.add_function(wrap_pyfunction!(solve_lifetime, m)?)?;
    m.add_function(wrap_pyfunction!(py_lifetime_verify, m)?)?;
    m.add_function(wrap_pyfunction!(py_value_iterate, m)?)?;
    m.add_function(wrap_pyfunction!(py_threshold_policy_value, m)?)?;
    m.add_function(wrap_pyfunction!(py_hitting_discount, m)?)?;
    m.add_function(wrap_pyfunction!(py_check_sustainability, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_single, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_lifetime, m)?)?;
    m.add_function(wrap_pyfunction!(fit_ou, m)?)?;
    m.add_function(wrap_pyfunction!(py_read_price_csv, m)?)?;
    Ok(())
}
