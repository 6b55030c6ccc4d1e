//! Python bindings: domains, closed-form norms, series diagnostics and oracles.

use bergman_hs::checks::{run_acceptance, AcceptanceConfig};
use bergman_hs::domain::{enumerate_order as enumerate, DomainSpec, MultiIndex};
use bergman_hs::error::Error;
use bergman_hs::gamma;
use bergman_hs::hankel::{self, GramOracleConfig, SymbolCoefficients};
use bergman_hs::norms;
use bergman_hs::oracles;
use bergman_hs::series::{self, SeriesKind};
use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyNotImplementedError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Capability { .. } => PyNotImplementedError::new_err(e.to_string()),
        Error::Accuracy { .. } | Error::DegenerateSampling { .. } => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// A Reinhardt domain: `Domain("disc")`, `Domain("polydisc:2")`, `Domain("ellipsoid:1,2.5")`.
#[pyclass(name = "Domain", frozen, eq, skip_from_py_object, module = "bergman_hs")]
#[derive(Clone, PartialEq)]
struct PyDomain {
    inner: DomainSpec,
}

#[pymethods]
impl PyDomain {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyDomain {
            inner: text.parse().map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn disc() -> Self {
        PyDomain {
            inner: DomainSpec::Disc,
        }
    }

    #[staticmethod]
    fn polydisc(n: usize) -> PyResult<Self> {
        Ok(PyDomain {
            inner: DomainSpec::polydisc(n).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn ellipsoid(exponents: Vec<f64>) -> PyResult<Self> {
        Ok(PyDomain {
            inner: DomainSpec::ellipsoid(exponents).map_err(to_py)?,
        })
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    #[getter]
    fn key(&self) -> String {
        self.inner.key()
    }

    fn __str__(&self) -> String {
        self.inner.key()
    }

    fn __repr__(&self) -> String {
        format!("Domain('{}')", self.inner)
    }
}

/// Accepts a `Domain` or its text form.
fn domain_arg(obj: &Bound<'_, PyAny>) -> PyResult<DomainSpec> {
    if let Ok(d) = obj.cast::<PyDomain>() {
        return Ok(d.get().inner.clone());
    }
    let text: String = obj.extract()?;
    text.parse().map_err(to_py)
}

fn kind_arg(kind: &str) -> PyResult<SeriesKind> {
    match kind {
        "partial" => Ok(SeriesKind::PartialSum),
        "diagonal" => Ok(SeriesKind::DiagonalSum),
        other => Err(PyValueError::new_err(format!(
            "kind must be 'partial' or 'diagonal', got '{other}'"
        ))),
    }
}

/// Reads `{alpha: coefficient}`; keys are ints (one variable) or tuples.
fn symbol_arg(coefficients: &Bound<'_, PyDict>) -> PyResult<SymbolCoefficients> {
    let mut terms = Vec::with_capacity(coefficients.len());
    for (k, v) in coefficients.iter() {
        let alpha = match k.extract::<u32>() {
            Ok(a) => vec![a],
            Err(_) => k.extract::<Vec<u32>>()?,
        };
        terms.push((MultiIndex::new(alpha), v.extract::<Complex64>()?));
    }
    let dimension = terms
        .first()
        .map(|(a, _)| a.dim())
        .ok_or_else(|| PyValueError::new_err("symbol has no coefficients"))?;
    let mut f = SymbolCoefficients::new(dimension);
    for (alpha, c) in terms {
        f.insert(alpha, c).map_err(to_py)?;
    }
    Ok(f)
}

/// An oracle estimate of `c_γ²` with its absolute error (3σ for Monte Carlo).
#[pyclass(name = "OracleEstimate", frozen, get_all, module = "bergman_hs")]
struct PyOracleEstimate {
    value: f64,
    abs_error: f64,
    method: String,
    sample_count: u64,
    seed: u64,
}

#[pymethods]
impl PyOracleEstimate {
    fn covers(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.abs_error
    }

    fn __repr__(&self) -> String {
        format!(
            "OracleEstimate(value={:e}, abs_error={:e}, method='{}', sample_count={}, seed={})",
            self.value, self.abs_error, self.method, self.sample_count, self.seed
        )
    }
}

impl From<oracles::OracleEstimate> for PyOracleEstimate {
    fn from(e: oracles::OracleEstimate) -> Self {
        PyOracleEstimate {
            value: e.value,
            abs_error: e.abs_error,
            method: format!("{:?}", e.method),
            sample_count: e.sample_count,
            seed: e.seed,
        }
    }
}

/// Linear-growth fit of a truncation trace.
#[pyclass(name = "DivergenceReport", frozen, get_all, module = "bergman_hs")]
struct PyDivergenceReport {
    slope: f64,
    intercept: f64,
    r_squared: f64,
    fit_window: (u64, u64),
    tail_increment: f64,
    verdict: String,
}

#[pymethods]
impl PyDivergenceReport {
    fn __repr__(&self) -> String {
        format!(
            "DivergenceReport(verdict='{}', slope={:e}, r_squared={})",
            self.verdict, self.slope, self.r_squared
        )
    }
}

/// `ln c_γ²`, the log squared Bergman norm of `z^γ`.
#[pyfunction]
fn log_c_squared(domain: &Bound<'_, PyAny>, gamma: Vec<u32>) -> PyResult<f64> {
    let d = domain_arg(domain)?;
    Ok(norms::log_c_squared(&d, &MultiIndex::new(gamma))
        .map_err(to_py)?
        .log_c_squared)
}

/// `c_γ²`; overflows to `inf` where the log form does not.
#[pyfunction]
fn c_squared(domain: &Bound<'_, PyAny>, gamma: Vec<u32>) -> PyResult<f64> {
    let d = domain_arg(domain)?;
    Ok(norms::log_c_squared(&d, &MultiIndex::new(gamma))
        .map_err(to_py)?
        .c_squared())
}

/// `ln(c_{γ+α}²/c_γ²)`, free of cancellation for large `γ`.
#[pyfunction]
fn log_ratio(domain: &Bound<'_, PyAny>, gamma: Vec<u32>, alpha: Vec<u32>) -> PyResult<f64> {
    let d = domain_arg(domain)?;
    norms::log_ratio(&d, &MultiIndex::new(gamma), &MultiIndex::new(alpha)).map_err(to_py)
}

/// `‖H_{z̄^α} e_γ‖²`, the Hankel row norm on the normalized monomial `e_γ`.
#[pyfunction]
fn row_norm_squared(domain: &Bound<'_, PyAny>, gamma: Vec<u32>, alpha: Vec<u32>) -> PyResult<f64> {
    let d = domain_arg(domain)?;
    hankel::hankel_row_norm_squared(&d, &MultiIndex::new(gamma), &MultiIndex::new(alpha)).map_err(to_py)
}

/// The row norm rebuilt from numerically integrated Gram entries: `(value, abs_error)`.
#[pyfunction]
#[pyo3(signature = (domain, gamma, alpha, tol = 1e-11, samples = 2_000_000, seed = 0))]
fn gram_oracle_row_norm_squared(
    py: Python<'_>,
    domain: &Bound<'_, PyAny>,
    gamma: Vec<u32>,
    alpha: Vec<u32>,
    tol: f64,
    samples: u64,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let d = domain_arg(domain)?;
    let cfg = GramOracleConfig { tol, samples, seed };
    let est = py
        .detach(|| hankel::gram_oracle_row_norm_squared(&d, &MultiIndex::new(gamma), &MultiIndex::new(alpha), &cfg))
        .map_err(to_py)?;
    Ok((est.value, est.abs_error))
}

/// `S_α(N)`: the Hilbert–Schmidt series of `H_{z̄^α}` truncated at `|γ| ≤ N`.
#[pyfunction]
fn s_alpha(py: Python<'_>, domain: &Bound<'_, PyAny>, alpha: Vec<u32>, n: u64) -> PyResult<f64> {
    let d = domain_arg(domain)?;
    py.detach(|| hankel::s_alpha_partial(&d, &MultiIndex::new(alpha), n))
        .map_err(to_py)
}

/// The diagonal lower bound of `S_α(N)`.
#[pyfunction]
fn diagonal_sum(py: Python<'_>, domain: &Bound<'_, PyAny>, alpha: Vec<u32>, n: u64) -> PyResult<f64> {
    let d = domain_arg(domain)?;
    py.detach(|| hankel::diagonal_sum(&d, &MultiIndex::new(alpha), n))
        .map_err(to_py)
}

/// `Σ_{|γ|<N} c_{γ+α}²/c_γ² − Σ_{|γ|≤N, γ⪰α} c_γ²/c_{γ−α}²`; nonnegative up to rounding.
#[pyfunction]
fn telescoping_check(py: Python<'_>, domain: &Bound<'_, PyAny>, alpha: Vec<u32>, n: u64) -> PyResult<f64> {
    let d = domain_arg(domain)?;
    py.detach(|| hankel::telescoping_check(&d, &MultiIndex::new(alpha), n))
        .map_err(to_py)
}

/// `[(N, value)]` for every `N` in `grid`; `kind` is `"partial"` or `"diagonal"`.
#[pyfunction]
#[pyo3(signature = (domain, alpha, grid, kind = "partial"))]
fn series_trace(
    py: Python<'_>,
    domain: &Bound<'_, PyAny>,
    alpha: Vec<u32>,
    grid: Vec<u64>,
    kind: &str,
) -> PyResult<Vec<(u64, f64)>> {
    let d = domain_arg(domain)?;
    let kind = kind_arg(kind)?;
    let trace = py
        .detach(|| series::series_trace(&d, &MultiIndex::new(alpha), &grid, kind))
        .map_err(to_py)?;
    Ok(trace.points().to_vec())
}

/// Evaluates a trace over `grid` and classifies its growth.
#[pyfunction]
#[pyo3(signature = (domain, alpha, grid, kind = "diagonal"))]
fn divergence_fit(
    py: Python<'_>,
    domain: &Bound<'_, PyAny>,
    alpha: Vec<u32>,
    grid: Vec<u64>,
    kind: &str,
) -> PyResult<PyDivergenceReport> {
    let d = domain_arg(domain)?;
    let kind = kind_arg(kind)?;
    let report = py
        .detach(|| {
            let trace = series::series_trace(&d, &MultiIndex::new(alpha), &grid, kind)?;
            series::divergence_fit(&trace)
        })
        .map_err(to_py)?;
    Ok(PyDivergenceReport {
        slope: report.slope,
        intercept: report.intercept,
        r_squared: report.r_squared,
        fit_window: report.fit_window,
        tail_increment: report.tail_increment,
        verdict: format!("{:?}", report.verdict),
    })
}

/// Truncated `‖H_f̄‖²_HS` for `f = Σ f_α z^α` given as `{alpha: coefficient}`.
#[pyfunction]
fn hs_norm_squared(
    py: Python<'_>,
    domain: &Bound<'_, PyAny>,
    coefficients: &Bound<'_, PyDict>,
    n: u64,
) -> PyResult<f64> {
    let d = domain_arg(domain)?;
    let f = symbol_arg(coefficients)?;
    py.detach(|| hankel::hs_norm_squared_partial(&d, &f, n)).map_err(to_py)
}

/// `(Σ α|f_α|², (1/π)∫|f′|²)` for a polynomial on the disc.
#[pyfunction]
fn disc_dirichlet_check(coefficients: &Bound<'_, PyDict>) -> PyResult<(f64, f64)> {
    hankel::disc_dirichlet_check(&symbol_arg(coefficients)?).map_err(to_py)
}

/// `[(j, S_{e_j}(N))]` for the canonical ∂̄-solution operator, `j` counted from 1.
#[pyfunction]
fn dbar_diagnostic(py: Python<'_>, domain: &Bound<'_, PyAny>, n: u64) -> PyResult<Vec<(usize, f64)>> {
    let d = domain_arg(domain)?;
    py.detach(|| hankel::dbar_solution_hs_diagnostic(&d, n)).map_err(to_py)
}

/// Central-band asymptotic approximation of `c_{γ+α}²/c_γ²` on a 2-D ellipsoid.
#[pyfunction]
fn stirling_ratio_approx(domain: &Bound<'_, PyAny>, gamma: Vec<u32>, alpha: Vec<u32>) -> PyResult<f64> {
    let d = domain_arg(domain)?;
    hankel::stirling_ratio_approx(&d, &MultiIndex::new(gamma), &MultiIndex::new(alpha)).map_err(to_py)
}

/// `(ln Γ(x), error bound)` for `x > 0`.
#[pyfunction]
fn log_gamma(x: f64) -> PyResult<(f64, f64)> {
    let v = gamma::log_gamma(x).map_err(to_py)?;
    Ok((v.value, v.abs_error_bound))
}

/// Every multi-index of length `n` with `|γ| = order`, in lexicographic order.
#[pyfunction]
fn enumerate_order(n: usize, order: u32) -> Vec<Vec<u32>> {
    enumerate(n, order).into_iter().map(|g| g.entries().to_vec()).collect()
}

/// Adaptive radial-quadrature estimate of `c_γ²` (disc and 2-D ellipsoids).
#[pyfunction]
#[pyo3(signature = (domain, gamma, tol = 1e-10))]
fn quadrature(domain: &Bound<'_, PyAny>, gamma: Vec<u32>, tol: f64) -> PyResult<PyOracleEstimate> {
    let d = domain_arg(domain)?;
    Ok(oracles::radial_quadrature_c_squared(&d, &MultiIndex::new(gamma), tol)
        .map_err(to_py)?
        .into())
}

/// Seeded Monte Carlo estimate of `c_γ²` on any domain.
#[pyfunction]
#[pyo3(signature = (domain, gamma, samples = 1_000_000, seed = 0))]
fn monte_carlo(
    py: Python<'_>,
    domain: &Bound<'_, PyAny>,
    gamma: Vec<u32>,
    samples: u64,
    seed: u64,
) -> PyResult<PyOracleEstimate> {
    let d = domain_arg(domain)?;
    Ok(py
        .detach(|| oracles::monte_carlo_c_squared(&d, &MultiIndex::new(gamma), samples, seed))
        .map_err(to_py)?
        .into())
}

/// Runs the acceptance criteria: `[(id, name, passed, detail)]`.
#[pyfunction]
#[pyo3(signature = (samples = 10_000_000, seed = 0))]
fn acceptance_report(py: Python<'_>, samples: u64, seed: u64) -> Vec<(u32, String, bool, String)> {
    let cfg = AcceptanceConfig {
        mc_samples: samples,
        seed,
        ..AcceptanceConfig::default()
    };
    py.detach(|| run_acceptance(&cfg))
        .into_iter()
        .map(|o| (o.id, o.name.to_string(), o.passed, o.detail))
        .collect()
}

#[pymodule]
#[pyo3(name = "bergman_hs")]
fn bergman_hs_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDomain>()?;
    m.add_class::<PyOracleEstimate>()?;
    m.add_class::<PyDivergenceReport>()?;
    m.add_function(wrap_pyfunction!(log_c_squared, m)?)?;
    m.add_function(wrap_pyfunction!(c_squared, m)?)?;
    m.add_function(wrap_pyfunction!(log_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(row_norm_squared, m)?)?;
    m.add_function(wrap_pyfunction!(gram_oracle_row_norm_squared, m)?)?;
    m.add_function(wrap_pyfunction!(s_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(diagonal_sum, m)?)?;
    m.add_function(wrap_pyfunction!(telescoping_check, m)?)?;
    m.add_function(wrap_pyfunction!(series_trace, m)?)?;
    m.add_function(wrap_pyfunction!(divergence_fit, m)?)?;
    m.add_function(wrap_pyfunction!(hs_norm_squared, m)?)?;
    m.add_function(wrap_pyfunction!(disc_dirichlet_check, m)?)?;
    m.add_function(wrap_pyfunction!(dbar_diagnostic, m)?)?;
    m.add_function(wrap_pyfunction!(stirling_ratio_approx, m)?)?;
    m.add_function(wrap_pyfunction!(log_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_order, m)?)?;
    m.add_function(wrap_pyfunction!(quadrature, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo, m)?)?;
    m.add_function(wrap_pyfunction!(acceptance_report, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
