//! Python bindings. Rationals cross the boundary as `"p/q"` strings so that
//! nothing is rounded.

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use logsing::analysis::{check_assumptions, dichotomy_mismatches, AnalysisReport};
use logsing::catalog::{examples as builtin_examples, find_example, prepare_log};
use logsing::fuchsian::{residual, solve_formal, solve_prescribed as prescribed, ResonancePolicy, SolveResult};
use logsing::leading::build_leading_equation;
use logsing::majorant::{certify as certify_impl, Certificate as CertificateImpl};
use logsing::parser::{parse_equation_with, parse_xpoly, ParseOptions, DEFAULT_MAX_DEG};
use logsing::scalar::{fmt_q, parse_q, q_to_f64};
use logsing::{Error, LogSeries, PDESpec, Q, XPoly};

create_exception!(logsing_py, LogsingError, PyException);
create_exception!(logsing_py, ParseError, LogsingError);
create_exception!(logsing_py, AssumptionError, LogsingError);
create_exception!(logsing_py, ResonanceError, LogsingError);

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Parse { .. } => ParseError::new_err(msg),
        Error::Assumption(_) | Error::Cancellation(_) | Error::Valuation(_) | Error::DominantBalance(_) => {
            AssumptionError::new_err(msg)
        }
        Error::Resonance { .. } | Error::Compatibility { .. } | Error::MissingResonanceData(_) => ResonanceError::new_err(msg),
        _ => LogsingError::new_err(msg),
    }
}

fn rational(s: &str) -> PyResult<Q> {
    parse_q(s).ok_or_else(|| LogsingError::new_err(format!("not a rational: {s}")))
}

fn policy(s: &str) -> PyResult<ResonancePolicy> {
    match s {
        "error" => Ok(ResonancePolicy::Error),
        "frobenius" => Ok(ResonancePolicy::Frobenius),
        _ => Err(LogsingError::new_err(format!("resonance policy must be 'error' or 'frobenius', got {s}"))),
    }
}

/// A parsed equation `D[t,m](u) = f(t, x, U)`.
#[pyclass(frozen, skip_from_py_object, module = "logsing_py")]
#[derive(Clone)]
struct Equation {
    spec: PDESpec,
}

#[pymethods]
impl Equation {
    #[new]
    #[pyo3(signature = (source, max_deg = DEFAULT_MAX_DEG, n = None))]
    fn new(source: &str, max_deg: u32, n: Option<usize>) -> PyResult<Self> {
        let spec = parse_equation_with(source, &ParseOptions { n, max_deg }).map_err(to_py)?;
        Ok(Equation { spec })
    }

    #[getter]
    fn m(&self) -> u32 {
        self.spec.m
    }

    #[getter]
    fn n(&self) -> usize {
        self.spec.n
    }

    #[getter]
    fn max_deg(&self) -> u32 {
        self.spec.max_deg
    }

    fn to_dsl(&self) -> String {
        self.spec.to_dsl()
    }

    fn analyze(&self) -> Analysis {
        let report = check_assumptions(&self.spec);
        let mismatches = if report.all_hold() { dichotomy_mismatches(&self.spec, &report) } else { Vec::new() };
        Analysis { report, mismatches }
    }

    /// The algebraic equation for the leading coefficient, e.g. `"A + 1 = 0"`.
    fn leading_equation(&self) -> PyResult<String> {
        let report = check_assumptions(&self.spec);
        build_leading_equation(&self.spec, &report).map(|e| e.to_string()).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Equation({:?})", self.spec.to_dsl())
    }

    fn __eq__(&self, other: &Equation) -> bool {
        self.spec == other.spec
    }
}

#[pyclass(frozen, module = "logsing_py")]
struct Analysis {
    report: AnalysisReport,
    mismatches: Vec<String>,
}

#[pymethods]
impl Analysis {
    /// `None` stands for minus infinity.
    #[getter]
    fn sigma_c(&self) -> Option<String> {
        self.report.sigma_c.as_ref().map(fmt_q)
    }

    #[getter]
    fn l(&self) -> Option<u32> {
        self.report.l
    }

    #[getter]
    fn m0(&self) -> Vec<String> {
        self.report.m0.iter().map(|mu| mu.to_dsl()).collect()
    }

    #[getter]
    fn assumptions(&self) -> (bool, bool, bool, bool) {
        let r = &self.report;
        (r.a0_holds, r.a1_holds, r.a2_holds, r.a3_holds)
    }

    #[getter]
    fn all_hold(&self) -> bool {
        self.report.all_hold()
    }

    #[getter]
    fn diagnostics(&self) -> Vec<String> {
        self.report.diagnostics.clone()
    }

    #[getter]
    fn dichotomy_mismatches(&self) -> Vec<String> {
        self.mismatches.clone()
    }

    fn to_json(&self) -> String {
        self.report.to_json()
    }

    fn __repr__(&self) -> String {
        format!("Analysis(sigma_c={:?}, l={:?}, all_hold={})", self.sigma_c(), self.report.l, self.report.all_hold())
    }
}

/// A truncated series `Σ c(x) t^ρ log^q t`.
#[pyclass(frozen, skip_from_py_object, module = "logsing_py")]
#[derive(Clone)]
struct Series {
    inner: LogSeries,
}

#[pymethods]
impl Series {
    /// `(rho, q, coefficient)` triples sorted by `(rho, q)`.
    fn terms(&self) -> Vec<(String, u32, String)> {
        self.inner.iter().map(|((rho, q), c)| (fmt_q(rho), *q, c.to_dsl())).collect()
    }

    fn coeff(&self, rho: &str, q: u32) -> PyResult<String> {
        Ok(self.inner.coeff_at(&rational(rho)?, q).to_dsl())
    }

    /// `None` for the zero series.
    #[getter]
    fn valuation(&self) -> Option<String> {
        self.inner.valuation().as_ref().map(fmt_q)
    }

    #[getter]
    fn truncation(&self) -> String {
        self.inner.tprec().to_string()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[staticmethod]
    fn from_json(src: &str) -> PyResult<Series> {
        LogSeries::from_json(src).map(|inner| Series { inner }).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Series({})", self.inner)
    }
}

#[pyclass(frozen, module = "logsing_py")]
struct Solution {
    result: SolveResult,
    spec: PDESpec,
}

#[pymethods]
impl Solution {
    #[getter]
    fn mode(&self) -> &'static str {
        match self.result.mode {
            logsing::fuchsian::SolveMode::Log => "log",
            logsing::fuchsian::SolveMode::Prescribed => "prescribed",
        }
    }

    #[getter]
    fn l(&self) -> Option<u32> {
        self.result.l
    }

    #[getter]
    fn a(&self) -> Option<String> {
        self.result.a.as_ref().map(XPoly::to_dsl)
    }

    #[getter]
    fn u(&self) -> Series {
        Series { inner: self.result.u.clone() }
    }

    #[getter]
    fn v(&self) -> Option<Series> {
        self.result.v.clone().map(|inner| Series { inner })
    }

    /// `(rho, multiplicity, action)` for every resonance met.
    #[getter]
    fn resonances(&self) -> Vec<(String, u32, String)> {
        self.result.resonances.iter().map(|r| (fmt_q(&r.rho), r.multiplicity, r.action.clone())).collect()
    }

    #[getter]
    fn order(&self) -> u32 {
        self.result.order
    }

    #[getter]
    fn residual_valuation(&self) -> Option<String> {
        self.result.residual.valuation.as_ref().map(fmt_q)
    }

    /// Re-substitutes `u` into the equation and checks it vanishes through `t^order`.
    fn verify(&self) -> PyResult<bool> {
        let rep = residual(&self.spec, &self.result.u, self.result.order as i64).map_err(to_py)?;
        Ok(rep.exceeds(self.result.order as i64))
    }

    fn to_json(&self) -> String {
        self.result.to_json()
    }

    fn __repr__(&self) -> String {
        format!("Solution(mode={:?}, order={}, terms={})", self.mode(), self.result.order, self.result.u.len())
    }
}

#[pyclass(frozen, module = "logsing_py")]
struct Certificate {
    cert: CertificateImpl,
}

#[pymethods]
impl Certificate {
    /// Normalized constants `C_k`, independent of the inner radius.
    #[getter]
    fn c(&self) -> Vec<String> {
        self.cert.c.iter().map(fmt_q).collect()
    }

    #[getter]
    fn delta(&self) -> String {
        fmt_q(&self.cert.radius.delta)
    }

    #[getter]
    fn delta_float(&self) -> f64 {
        q_to_f64(&self.cert.radius.delta)
    }

    #[getter]
    fn ok(&self) -> bool {
        self.cert.report.ok()
    }

    #[getter]
    fn checked(&self) -> usize {
        self.cert.report.checked
    }

    #[getter]
    fn violations(&self) -> usize {
        self.cert.report.violations.len()
    }

    fn to_json(&self) -> String {
        self.cert.to_json()
    }

    fn __repr__(&self) -> String {
        format!("Certificate(ok={}, delta~{:.3e})", self.ok(), self.delta_float())
    }
}

/// Leading coefficient and formal series `u = t^l (a log t + b + v)`.
#[pyfunction]
#[pyo3(signature = (eq, order = 12, root_index = 0, b = "0", resonance = "error"))]
fn solve(eq: &Equation, order: u32, root_index: usize, b: &str, resonance: &str) -> PyResult<Solution> {
    let b = parse_xpoly(b, eq.spec.n).map_err(to_py)?;
    let (_, _, _, red) = prepare_log(&eq.spec, root_index, &b, order).map_err(to_py)?;
    let result = solve_formal(&red, order, policy(resonance)?).map_err(to_py)?;
    Ok(Solution { result, spec: eq.spec.clone() })
}

/// Series with a prescribed leading term `lead_coeff · t^lead_rho`; `data` maps
/// resonant exponents to the free coefficient placed there.
#[pyfunction]
#[pyo3(signature = (eq, lead_rho, lead_coeff, data = BTreeMap::new(), order = 12))]
fn solve_prescribed(eq: &Equation, lead_rho: &str, lead_coeff: &str, data: BTreeMap<String, String>, order: u32) -> PyResult<Solution> {
    let n = eq.spec.n;
    let lead = LogSeries::monomial(rational(lead_rho)?, 0, parse_xpoly(lead_coeff, n).map_err(to_py)?);
    let mut map = BTreeMap::new();
    for (rho, poly) in &data {
        map.insert(rational(rho)?, parse_xpoly(poly, n).map_err(to_py)?);
    }
    let result = prescribed(&eq.spec, &lead, &map, order).map_err(to_py)?;
    Ok(Solution { result, spec: eq.spec.clone() })
}

/// Majorant constants, verification and radius estimate on `0 < r < R`.
#[pyfunction]
#[pyo3(signature = (eq, order = 8, big_r = "1", r = "1/2", root_index = 0, b = "0"))]
fn certify(eq: &Equation, order: u32, big_r: &str, r: &str, root_index: usize, b: &str) -> PyResult<Certificate> {
    let b = parse_xpoly(b, eq.spec.n).map_err(to_py)?;
    let (_, _, _, red) = prepare_log(&eq.spec, root_index, &b, order).map_err(to_py)?;
    let cert = certify_impl(&red, &rational(big_r)?, &rational(r)?, order).map_err(to_py)?;
    Ok(Certificate { cert })
}

/// Names of the built-in examples.
#[pyfunction]
fn examples() -> Vec<&'static str> {
    builtin_examples().iter().map(|e| e.name).collect()
}

#[pyfunction]
fn example(name: &str) -> PyResult<Equation> {
    let ex = find_example(name).ok_or_else(|| LogsingError::new_err(format!("unknown example {name}")))?;
    ex.spec().map(|spec| Equation { spec }).map_err(to_py)
}

#[pymodule]
pub fn logsing_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<Equation>()?;
    m.add_class::<Analysis>()?;
    m.add_class::<Series>()?;
    m.add_class::<Solution>()?;
    m.add_class::<Certificate>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(solve_prescribed, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(examples, m)?)?;
    m.add_function(wrap_pyfunction!(example, m)?)?;
    m.add("LogsingError", py.get_type::<LogsingError>())?;
    m.add("ParseError", py.get_type::<ParseError>())?;
    m.add("AssumptionError", py.get_type::<AssumptionError>())?;
    m.add("ResonanceError", py.get_type::<ResonanceError>())?;
    Ok(())
}
