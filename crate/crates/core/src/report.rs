//! The end-to-end audit: differentiate, locate suspect points, settle each
//! one from the limit definition, and collect horizontal tangents. Text and
//! JSON renderings both come from one [`AnalysisReport`].

use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;

use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::diff::differentiate;
use crate::error::{Error, Result};
use crate::eval::{evaluate, locate_violation, EvalOutcome, UndefinedReason};
use crate::expr::{Expr, Interval};
use crate::parse::parse;
use crate::probe::{probe_and_classify, Classification, SideBehavior, Verdict};
use crate::scan::{
    check_function_defined, scan_detailed, source_functions, CandidatePoint, UndefinedBoundary,
};
use crate::tangent::{merge_tangents, scan_expression_roots, Provenance, TangentPoint};

pub const DEFAULT_GRID: usize = 4096;
pub const DEFAULT_PLOT_POINTS: usize = 1000;

pub(crate) fn ser_display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub(crate) fn ser_display_list<T: fmt::Display, S: Serializer>(
    v: &[T],
    s: S,
) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|e| e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalyzeOptions {
    pub grid_n: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            grid_n: DEFAULT_GRID,
        }
    }
}

/// One branch of the corrected derivative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Piece {
    pub condition: String,
    /// Point the piece applies to; `None` for the default branch.
    pub at: Option<f64>,
    pub expression: Option<String>,
    pub value: Option<f64>,
}

/// Step 1 of the methodology at a point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionCheck {
    pub defined: bool,
    pub value: Option<f64>,
    pub reason: Option<UndefinedReason>,
}

impl From<EvalOutcome> for FunctionCheck {
    fn from(o: EvalOutcome) -> Self {
        FunctionCheck {
            defined: o.is_defined(),
            value: o.value(),
            reason: o.reason(),
        }
    }
}

/// Step 2: why the derivative expression fails, and which building blocks
/// of the function are responsible.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CulpritRecord {
    pub derivative_defined: bool,
    pub derivative_value: Option<f64>,
    pub reason: Option<UndefinedReason>,
    pub culprit: Option<String>,
    pub trigger: Option<String>,
    pub source_functions: Vec<String>,
}

/// The three methodology steps at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepTrace {
    pub x0: f64,
    pub step1_function: FunctionCheck,
    pub step2_culprits: CulpritRecord,
    /// Absent when step 1 already ruled the point out.
    pub step3_definition: Option<Classification>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateVerdict {
    pub point: CandidatePoint,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub input_text: String,
    pub function_text: String,
    pub derivative_text: String,
    pub raw_derivative_text: String,
    pub interval: [f64; 2],
    pub grid_n: usize,
    pub corrected_derivative: Vec<Piece>,
    pub candidates: Vec<CandidateVerdict>,
    pub undefined_boundaries: Vec<UndefinedBoundary>,
    pub tangents: Vec<TangentPoint>,
    pub naive_tangents: Vec<f64>,
    /// Near-zeros of the derivative expression without a sign change.
    pub unconfirmed_roots: Vec<f64>,
    pub methodology_trace: Vec<StepTrace>,
}

/// Result of running the methodology at a single, user-chosen point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointReport {
    pub input_text: String,
    pub function_text: String,
    pub derivative_text: String,
    pub trace: StepTrace,
    /// `None` when the function is undefined at the point.
    pub verdict: Option<Verdict>,
}

fn culprit_record(f: &Expr, fp: &Expr, x0: f64) -> CulpritRecord {
    let outcome = evaluate(fp, x0);
    let violation = locate_violation(fp, x0);
    let sources = if outcome.is_defined() || !evaluate(f, x0).is_defined() {
        Vec::new()
    } else {
        source_functions(f, x0)
    };
    CulpritRecord {
        derivative_defined: outcome.is_defined(),
        derivative_value: outcome.value(),
        reason: outcome.reason(),
        culprit: violation.map(|v| v.node.to_string()),
        trigger: violation.map(|v| v.trigger().to_string()),
        source_functions: sources.iter().map(|e| e.to_string()).collect(),
    }
}

fn trace_point(f: &Expr, fp: &Expr, x0: f64) -> StepTrace {
    let step1 = check_function_defined(f, x0);
    let step3 = if step1.is_defined() {
        probe_and_classify(f, x0).ok()
    } else {
        None
    };
    StepTrace {
        x0,
        step1_function: step1.into(),
        step2_culprits: culprit_record(f, fp, x0),
        step3_definition: step3,
    }
}

/// Condition text for the branch that excludes `points`.
fn default_condition(points: &[f64]) -> String {
    match points {
        [] => "all x".into(),
        [p] => format!("x ≠ {p}"),
        ps => {
            let list: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
            format!("x ∉ {{{}}}", list.join(", "))
        }
    }
}

/// Runs the full audit of `input_text` on `iv`.
pub fn analyze(input_text: &str, iv: Interval, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    let f = parse(input_text)?;
    let d = differentiate(&f);
    let fp = d.simplified;
    let scan = scan_detailed(&f, &fp, iv, opts.grid_n)?;
    let roots = scan_expression_roots(&fp, iv, opts.grid_n)?;

    let mut traces = Vec::new();
    let mut candidates = Vec::new();
    for c in scan.candidates {
        let trace = trace_point(&f, &fp, c.x0);
        let verdict = trace
            .step3_definition
            .as_ref()
            .map(|cl| cl.verdict.clone())
            .expect("candidate points are inside the function's domain");
        traces.push(trace);
        candidates.push(CandidateVerdict { point: c, verdict });
    }

    let pairs: Vec<(CandidatePoint, Verdict)> = candidates
        .iter()
        .map(|c| (c.point.clone(), c.verdict.clone()))
        .collect();
    let tangents = merge_tangents(&fp, &roots.roots, &pairs);

    let excluded: Vec<f64> = candidates.iter().map(|c| c.point.x0).collect();
    let mut corrected = vec![Piece {
        condition: default_condition(&excluded),
        at: None,
        expression: Some(fp.to_string()),
        value: None,
    }];
    for c in &candidates {
        if let Some(v) = c.verdict.derivative() {
            corrected.push(Piece {
                condition: format!("x = {}", c.point.x0),
                at: Some(c.point.x0),
                expression: None,
                value: Some(v),
            });
        }
    }

    Ok(AnalysisReport {
        input_text: input_text.to_string(),
        function_text: f.to_string(),
        derivative_text: fp.to_string(),
        raw_derivative_text: d.raw.to_string(),
        interval: [iv.lo(), iv.hi()],
        grid_n: opts.grid_n,
        corrected_derivative: corrected,
        candidates,
        undefined_boundaries: scan.undefined_boundaries,
        tangents,
        naive_tangents: roots.roots,
        unconfirmed_roots: roots.unconfirmed,
        methodology_trace: traces,
    })
}

/// Runs the three methodology steps at `x0` only.
pub fn classify_point(input_text: &str, x0: f64) -> Result<PointReport> {
    let f = parse(input_text)?;
    let fp = differentiate(&f).simplified;
    let trace = trace_point(&f, &fp, x0);
    let verdict = trace.step3_definition.as_ref().map(|c| c.verdict.clone());
    Ok(PointReport {
        input_text: input_text.to_string(),
        function_text: f.to_string(),
        derivative_text: fp.to_string(),
        trace,
        verdict,
    })
}

/// CSV with header `x,f,fprime`; undefined cells are left empty.
pub fn plot_csv(f: &Expr, iv: Interval, n: usize) -> Result<String> {
    if n < 2 {
        return Err(Error::GridTooSmall(n));
    }
    let fp = differentiate(f).simplified;
    let cell = |o: EvalOutcome| o.value().map(|v| v.to_string()).unwrap_or_default();
    let mut out = String::from("x,f,fprime\n");
    for x in iv.grid(n) {
        let _ = writeln!(
            out,
            "{x},{},{}",
            cell(evaluate(f, x)),
            cell(evaluate(&fp, x))
        );
    }
    Ok(out)
}

/// Writes [`plot_csv`] output to `path`.
pub fn emit_plot_data(f: &Expr, iv: Interval, n: usize, path: &Path) -> Result<()> {
    let csv = plot_csv(f, iv, n)?;
    fs::write(path, csv).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

// JSON with every non-integer number written to 17 significant digits.

fn write_number(out: &mut String, n: &serde_json::Number) {
    if n.is_u64() || n.is_i64() {
        let _ = write!(out, "{n}");
    } else {
        let v = n.as_f64().unwrap_or(f64::NAN);
        if v.is_finite() {
            let _ = write!(out, "{v:.16e}");
        } else {
            out.push_str("null");
        }
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, n: usize| out.extend(std::iter::repeat_n(' ', n));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => write_number(out, n),
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(out, indent + 2);
                write_value(out, item, indent + 2);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                pad(out, indent + 2);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, indent + 2);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

/// Pretty JSON for any report value, numbers at 17 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report types serialize to JSON");
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    out
}

fn fmt_num(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 1e-4 && v.abs() < 1e9) {
        format!("{}", (v * 1e12).round() / 1e12)
    } else {
        format!("{v:.6e}")
    }
}

fn side_text(s: &SideBehavior) -> String {
    match s {
        SideBehavior::Converges { limit, uncertainty } => {
            format!("converge to {} (± {uncertainty:.1e})", fmt_num(*limit))
        }
        SideBehavior::Diverges { sign } => {
            format!("diverge to {}inf", if *sign > 0 { "+" } else { "-" })
        }
        SideBehavior::Unsettled { reason } => format!("unsettled ({reason})"),
    }
}

fn write_trace(out: &mut String, t: &StepTrace) {
    let x0 = t.x0;
    let s1 = &t.step1_function;
    match s1.value {
        Some(v) => {
            let _ = writeln!(out, "    step 1  f({x0}) = {} is defined", fmt_num(v));
        }
        None => {
            let reason = s1.reason.map(|r| r.describe()).unwrap_or("undefined");
            let _ = writeln!(
                out,
                "    step 1  f({x0}) is undefined ({reason}): not differentiable"
            );
        }
    }
    let s2 = &t.step2_culprits;
    if s2.derivative_defined {
        let v = s2.derivative_value.map(fmt_num).unwrap_or_default();
        let _ = writeln!(
            out,
            "    step 2  derivative expression is defined here: {v}"
        );
    } else {
        let reason = s2.reason.map(|r| r.describe()).unwrap_or("undefined");
        let _ = writeln!(
            out,
            "    step 2  derivative expression undefined ({reason}) in {}",
            s2.culprit.as_deref().unwrap_or("?")
        );
        if let Some(trig) = &s2.trigger {
            let _ = writeln!(out, "            trigger: {trig}");
        }
        if !s2.source_functions.is_empty() {
            let _ = writeln!(
                out,
                "            defined here but not differentiable by rule: {}",
                s2.source_functions.join(", ")
            );
        }
    }
    if let Some(c) = &t.step3_definition {
        let _ = writeln!(
            out,
            "    step 3  difference quotients: left {}, right {}",
            side_text(&c.left),
            side_text(&c.right)
        );
        let _ = writeln!(out, "            verdict: {}", c.verdict);
    }
}

fn tangent_list(ts: &[(f64, Option<Provenance>)]) -> String {
    if ts.is_empty() {
        return "none".into();
    }
    ts.iter()
        .map(|(x, p)| match p {
            Some(Provenance::RepairedByDefinition) => {
                format!("x = {} (repaired by definition)", fmt_num(*x))
            }
            _ => format!("x = {}", fmt_num(*x)),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "function      f(x) = {}", self.function_text);
        let _ = writeln!(out, "derivative   f'(x) = {}", self.derivative_text);
        let _ = writeln!(
            out,
            "interval      [{}, {}], grid {}",
            self.interval[0], self.interval[1], self.grid_n
        );
        let _ = writeln!(out);
        if self.candidates.is_empty() {
            let _ = writeln!(out, "no points where f is defined but f' is not");
        } else {
            let _ = writeln!(
                out,
                "points where f is defined but the derivative expression is not:"
            );
            for t in &self.methodology_trace {
                let _ = writeln!(out, "  x0 = {}", t.x0);
                write_trace(&mut out, t);
            }
        }
        for b in &self.undefined_boundaries {
            let _ = writeln!(
                out,
                "note: derivative expression undefined on a stretch ending at x = {} ({})",
                b.x,
                b.reason.describe()
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "corrected derivative:");
        for p in &self.corrected_derivative {
            match (&p.expression, p.value) {
                (Some(e), _) => {
                    let _ = writeln!(out, "  f'(x) = {e},  if {}", p.condition);
                }
                (None, Some(v)) => {
                    let _ = writeln!(out, "  f'(x) = {},  if {}", fmt_num(v), p.condition);
                }
                _ => {}
            }
        }
        let _ = writeln!(out);
        let naive: Vec<(f64, Option<Provenance>)> =
            self.naive_tangents.iter().map(|&x| (x, None)).collect();
        let corrected: Vec<(f64, Option<Provenance>)> = self
            .tangents
            .iter()
            .map(|t| (t.x, Some(t.provenance)))
            .collect();
        let _ = writeln!(out, "horizontal tangents:");
        let _ = writeln!(
            out,
            "  zeros of the derivative expression: {}",
            tangent_list(&naive)
        );
        let _ = writeln!(
            out,
            "  corrected:                          {}",
            tangent_list(&corrected)
        );
        if !self.unconfirmed_roots.is_empty() {
            let list: Vec<String> = self.unconfirmed_roots.iter().map(|x| fmt_num(*x)).collect();
            let _ = writeln!(
                out,
                "  unconfirmed (near zero, no sign change): {}",
                list.join(", ")
            );
        }
        out
    }
}

impl PointReport {
    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "function      f(x) = {}", self.function_text);
        let _ = writeln!(out, "derivative   f'(x) = {}", self.derivative_text);
        let _ = writeln!(out, "  x0 = {}", self.trace.x0);
        write_trace(&mut out, &self.trace);
        out
    }
}
