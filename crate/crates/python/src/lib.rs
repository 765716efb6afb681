//! Python bindings for `deriv_audit`.

use std::path::PathBuf;

use deriv_audit as core;
use deriv_audit::report::{self, AnalysisReport, PointReport};
use deriv_audit::{EvalOutcome, Interval};
use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

create_exception!(
    deriv_audit,
    ParseError,
    PyValueError,
    "Malformed expression text."
);
create_exception!(
    deriv_audit,
    AnalysisError,
    PyValueError,
    "Invalid input to an analysis."
);

fn to_py(err: core::Error) -> PyErr {
    match err {
        core::Error::Parse(e) => ParseError::new_err((e.to_string(), e.offset())),
        e @ core::Error::Io { .. } => PyOSError::new_err(e.to_string()),
        e => AnalysisError::new_err(e.to_string()),
    }
}

fn interval(lo: f64, hi: f64) -> PyResult<Interval> {
    Interval::new(lo, hi).map_err(to_py)
}

/// A parsed single-variable expression.
#[pyclass(frozen, eq, skip_from_py_object, module = "deriv_audit")]
#[derive(Clone, PartialEq)]
pub struct Expr {
    inner: core::Expr,
}

impl From<core::Expr> for Expr {
    fn from(inner: core::Expr) -> Self {
        Expr { inner }
    }
}

#[pymethods]
impl Expr {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        parse(text)
    }

    /// Value at `x`, or `None` where the expression is undefined.
    fn evaluate(&self, x: f64) -> Option<f64> {
        core::evaluate(&self.inner, x).value()
    }

    /// Why the expression is undefined at `x`, or `None` if it is defined.
    fn undefined_reason(&self, x: f64) -> Option<String> {
        match core::evaluate(&self.inner, x) {
            EvalOutcome::Defined(_) => None,
            EvalOutcome::Undefined(r) => Some(format!("{r:?}")),
        }
    }

    fn derivative(&self) -> Expr {
        core::differentiate(&self.inner).simplified.into()
    }

    fn simplify(&self) -> Expr {
        core::simplify(&self.inner).into()
    }

    fn __call__(&self, x: f64) -> Option<f64> {
        self.evaluate(x)
    }

    fn __str__(&self) -> String {
        core::format(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Expr('{}')", core::format(&self.inner))
    }
}

/// Differentiability at a point. `kind` is one of `Differentiable`,
/// `VerticalTangent`, `Cusp`, `Corner`, `Inconclusive`; the other fields are
/// set only for the kinds they describe.
#[pyclass(frozen, get_all, skip_from_py_object, module = "deriv_audit")]
#[derive(Clone)]
pub struct Verdict {
    kind: String,
    value: Option<f64>,
    uncertainty: Option<f64>,
    sign: Option<i8>,
    left_slope: Option<f64>,
    right_slope: Option<f64>,
    diagnostic: Option<String>,
    text: String,
}

impl From<&core::Verdict> for Verdict {
    fn from(v: &core::Verdict) -> Self {
        let mut out = Verdict {
            kind: v.name().to_string(),
            value: None,
            uncertainty: None,
            sign: None,
            left_slope: None,
            right_slope: None,
            diagnostic: None,
            text: v.to_string(),
        };
        match v {
            core::Verdict::Differentiable { value, uncertainty } => {
                out.value = Some(*value);
                out.uncertainty = Some(*uncertainty);
            }
            core::Verdict::VerticalTangent { sign } => out.sign = Some(*sign),
            core::Verdict::Cusp => {}
            core::Verdict::Corner {
                left_slope,
                right_slope,
            } => {
                out.left_slope = Some(*left_slope);
                out.right_slope = Some(*right_slope);
            }
            core::Verdict::Inconclusive { diagnostic } => out.diagnostic = Some(diagnostic.clone()),
        }
        out
    }
}

#[pymethods]
impl Verdict {
    fn is_differentiable(&self) -> bool {
        self.kind == "Differentiable"
    }

    fn __str__(&self) -> String {
        self.text.clone()
    }

    fn __repr__(&self) -> String {
        format!("Verdict({})", self.text)
    }
}

/// A point where the function is defined but its derivative expression is not.
#[pyclass(frozen, get_all, skip_from_py_object, module = "deriv_audit")]
#[derive(Clone)]
pub struct CandidatePoint {
    x0: f64,
    culprit: String,
    trigger: String,
    reason: String,
    function_value: f64,
    source_functions: Vec<String>,
}

impl From<&core::CandidatePoint> for CandidatePoint {
    fn from(c: &core::CandidatePoint) -> Self {
        CandidatePoint {
            x0: c.x0,
            culprit: c.culprit.to_string(),
            trigger: c.trigger.to_string(),
            reason: format!("{:?}", c.reason),
            function_value: c.function_value,
            source_functions: c.source_functions.iter().map(|e| e.to_string()).collect(),
        }
    }
}

#[pymethods]
impl CandidatePoint {
    fn __repr__(&self) -> String {
        format!(
            "CandidatePoint(x0={}, culprit='{}', reason={})",
            self.x0, self.culprit, self.reason
        )
    }
}

/// A zero of the derivative. `provenance` is `SymbolicExpressionRoot` or
/// `RepairedByDefinition`.
#[pyclass(frozen, get_all, skip_from_py_object, module = "deriv_audit")]
#[derive(Clone)]
pub struct TangentPoint {
    x: f64,
    provenance: String,
    residual: f64,
}

impl From<&core::TangentPoint> for TangentPoint {
    fn from(t: &core::TangentPoint) -> Self {
        TangentPoint {
            x: t.x,
            provenance: format!("{:?}", t.provenance),
            residual: t.residual,
        }
    }
}

#[pymethods]
impl TangentPoint {
    fn __repr__(&self) -> String {
        format!("TangentPoint(x={}, provenance={})", self.x, self.provenance)
    }
}

/// One-sided difference quotients at `x0`; `None` marks an undefined quotient.
#[pyclass(frozen, get_all, module = "deriv_audit")]
pub struct QuotientProbe {
    x0: f64,
    f0: f64,
    steps: Vec<f64>,
    right: Vec<Option<f64>>,
    left: Vec<Option<f64>>,
    verdict: Verdict,
}

/// `(condition, at, expression, value)` for one piece of the corrected derivative.
type PieceTuple = (String, Option<f64>, Option<String>, Option<f64>);

/// Full analysis of a function on an interval.
#[pyclass(frozen, module = "deriv_audit")]
pub struct Report {
    inner: AnalysisReport,
}

#[pymethods]
impl Report {
    #[getter]
    fn derivative(&self) -> String {
        self.inner.derivative_text.clone()
    }

    #[getter]
    fn tangents(&self) -> Vec<TangentPoint> {
        self.inner.tangents.iter().map(Into::into).collect()
    }

    #[getter]
    fn naive_tangents(&self) -> Vec<f64> {
        self.inner.naive_tangents.clone()
    }

    /// `(candidate, verdict)` pairs.
    #[getter]
    fn candidates(&self) -> Vec<(CandidatePoint, Verdict)> {
        self.inner
            .candidates
            .iter()
            .map(|c| ((&c.point).into(), (&c.verdict).into()))
            .collect()
    }

    /// `(condition, at, expression, value)` tuples; `at` and `value` are set
    /// for single-point pieces, `expression` for the default piece.
    #[getter]
    fn pieces(&self) -> Vec<PieceTuple> {
        self.inner
            .corrected_derivative
            .iter()
            .map(|p| (p.condition.clone(), p.at, p.expression.clone(), p.value))
            .collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __str__(&self) -> String {
        self.inner.to_text()
    }
}

/// Single-point classification with its three-step trace.
#[pyclass(frozen, module = "deriv_audit")]
pub struct PointAnalysis {
    inner: PointReport,
}

#[pymethods]
impl PointAnalysis {
    /// `None` when the derivative expression is defined at the point.
    #[getter]
    fn verdict(&self) -> Option<Verdict> {
        self.inner.verdict.as_ref().map(Into::into)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __str__(&self) -> String {
        self.inner.to_text()
    }
}

#[pyfunction]
fn parse(text: &str) -> PyResult<Expr> {
    core::parse(text)
        .map(Into::into)
        .map_err(|e| to_py(e.into()))
}

#[pyfunction]
fn format(e: &Expr) -> String {
    core::format(&e.inner)
}

#[pyfunction]
fn evaluate(e: &Expr, x: f64) -> Option<f64> {
    e.evaluate(x)
}

#[pyfunction]
fn differentiate(e: &Expr) -> Expr {
    e.derivative()
}

#[pyfunction]
fn simplify(e: &Expr) -> Expr {
    e.simplify()
}

/// Candidate points of `f` on `[lo, hi]`, differentiating `f` when `fp` is not given.
#[pyfunction]
#[pyo3(signature = (f, lo, hi, grid_n = report::DEFAULT_GRID, fp = None))]
fn scan(
    f: &Expr,
    lo: f64,
    hi: f64,
    grid_n: usize,
    fp: Option<&Expr>,
) -> PyResult<Vec<CandidatePoint>> {
    let fp = fp.map_or_else(
        || core::differentiate(&f.inner).simplified,
        |e| e.inner.clone(),
    );
    let found = core::scan(&f.inner, &fp, interval(lo, hi)?, grid_n).map_err(to_py)?;
    Ok(found.iter().map(Into::into).collect())
}

#[pyfunction]
fn probe(f: &Expr, x0: f64) -> PyResult<QuotientProbe> {
    let p = core::probe(&f.inner, x0).map_err(to_py)?;
    let verdict = (&core::classify(&p)).into();
    Ok(QuotientProbe {
        x0: p.x0,
        f0: p.f0,
        steps: p.schedule.clone(),
        right: p.right.iter().map(|q| q.value()).collect(),
        left: p.left.iter().map(|q| q.value()).collect(),
        verdict,
    })
}

#[pyfunction]
fn classify(f: &Expr, x0: f64) -> PyResult<Verdict> {
    let p = core::probe(&f.inner, x0).map_err(to_py)?;
    Ok((&core::classify(&p)).into())
}

#[pyfunction]
#[pyo3(signature = (fp, lo, hi, grid_n = report::DEFAULT_GRID))]
fn find_expression_roots(fp: &Expr, lo: f64, hi: f64, grid_n: usize) -> PyResult<Vec<f64>> {
    core::find_expression_roots(&fp.inner, interval(lo, hi)?, grid_n).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (f, lo, hi, grid_n = report::DEFAULT_GRID))]
fn find_horizontal_tangents(
    f: &Expr,
    lo: f64,
    hi: f64,
    grid_n: usize,
) -> PyResult<Vec<TangentPoint>> {
    let ts = core::find_horizontal_tangents(&f.inner, interval(lo, hi)?, grid_n).map_err(to_py)?;
    Ok(ts.iter().map(Into::into).collect())
}

#[pyfunction]
#[pyo3(signature = (text, lo, hi, grid_n = report::DEFAULT_GRID))]
fn analyze(text: &str, lo: f64, hi: f64, grid_n: usize) -> PyResult<Report> {
    let opts = core::AnalyzeOptions { grid_n };
    let inner = core::analyze(text, interval(lo, hi)?, &opts).map_err(to_py)?;
    Ok(Report { inner })
}

#[pyfunction]
fn classify_point(text: &str, x0: f64) -> PyResult<PointAnalysis> {
    let inner = report::classify_point(text, x0).map_err(to_py)?;
    Ok(PointAnalysis { inner })
}

/// `x,f,fprime` CSV text for `n + 1` evenly spaced samples.
#[pyfunction]
#[pyo3(signature = (f, lo, hi, n = report::DEFAULT_PLOT_POINTS))]
fn plot_csv(f: &Expr, lo: f64, hi: f64, n: usize) -> PyResult<String> {
    report::plot_csv(&f.inner, interval(lo, hi)?, n).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (f, lo, hi, path, n = report::DEFAULT_PLOT_POINTS))]
fn emit_plot_data(f: &Expr, lo: f64, hi: f64, path: PathBuf, n: usize) -> PyResult<()> {
    core::emit_plot_data(&f.inner, interval(lo, hi)?, n, &path).map_err(to_py)
}

#[pymodule]
#[pyo3(name = "deriv_audit")]
pub fn deriv_audit_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("ParseError", py.get_type::<ParseError>())?;
    m.add("AnalysisError", py.get_type::<AnalysisError>())?;
    m.add_class::<Expr>()?;
    m.add_class::<Verdict>()?;
    m.add_class::<CandidatePoint>()?;
    m.add_class::<TangentPoint>()?;
    m.add_class::<QuotientProbe>()?;
    m.add_class::<Report>()?;
    m.add_class::<PointAnalysis>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(format, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(differentiate, m)?)?;
    m.add_function(wrap_pyfunction!(simplify, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(probe, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(find_expression_roots, m)?)?;
    m.add_function(wrap_pyfunction!(find_horizontal_tangents, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(classify_point, m)?)?;
    m.add_function(wrap_pyfunction!(plot_csv, m)?)?;
    m.add_function(wrap_pyfunction!(emit_plot_data, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
