//! Locating points where a function is defined but its derivative
//! expression is not.
//!
//! Detection is numeric: a uniform grid, zeros of every subexpression of
//! the derivative that can make it undefined (denominators, even-root and
//! log arguments, bases of fractional powers), and a check that each
//! suspect is an isolated hole rather than the edge of an undefined
//! stretch. Holes that no float lands on exactly, such as a denominator
//! `x^2 - 2`, are not reported.

use serde::Serialize;

use crate::diff::differentiate;
use crate::error::{Error, Result};
use crate::eval::{evaluate, locate_violation, EvalOutcome, UndefinedReason};
use crate::expr::{Expr, Func, Interval};
use crate::report::ser_display;
use crate::roots::{bisect, decimal_snaps, sign_change_roots, touch_points, DEDUP_TOL};

/// Offsets (relative to `max(1, |x0|)`) at which the derivative must be
/// defined on both sides for a hole at `x0` to count as isolated.
const ISOLATION_STEPS: [f64; 3] = [1e-4, 1e-7, 1e-9];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidatePoint {
    pub x0: f64,
    /// Smallest subexpression of the derivative that is undefined at `x0`.
    #[serde(serialize_with = "ser_display")]
    pub culprit: Expr,
    /// Operand of the culprit that caused it: a denominator, a power base or
    /// a function argument.
    #[serde(serialize_with = "ser_display")]
    pub trigger: Expr,
    pub reason: UndefinedReason,
    pub function_value: f64,
    /// Minimal building blocks of the function that are defined at `x0` but
    /// whose own derivative is not, e.g. `cbrt(x)` at 0.
    #[serde(serialize_with = "crate::report::ser_display_list")]
    pub source_functions: Vec<Expr>,
}

/// Edge of a stretch where the derivative expression is undefined, e.g.
/// `x = 0` for `sqrt(x)`. These are not isolated holes and are not probed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UndefinedBoundary {
    pub x: f64,
    pub reason: UndefinedReason,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ScanOutcome {
    pub candidates: Vec<CandidatePoint>,
    pub undefined_boundaries: Vec<UndefinedBoundary>,
}

/// Methodology step 1: is the function itself defined at `x0`?
pub fn check_function_defined(f: &Expr, x0: f64) -> EvalOutcome {
    evaluate(f, x0)
}

/// Candidate points of `f` on `iv`, ascending.
pub fn scan(f: &Expr, fp: &Expr, iv: Interval, grid_n: usize) -> Result<Vec<CandidatePoint>> {
    scan_detailed(f, fp, iv, grid_n).map(|s| s.candidates)
}

pub fn scan_detailed(f: &Expr, fp: &Expr, iv: Interval, grid_n: usize) -> Result<ScanOutcome> {
    if grid_n < 2 {
        return Err(Error::GridTooSmall(grid_n));
    }
    let mut suspects = Vec::new();
    let mut boundaries = Vec::new();

    if iv.is_degenerate() {
        suspects.push(iv.lo());
    } else {
        let xs = iv.grid(grid_n);
        let fp_defined: Vec<bool> = xs.iter().map(|&x| evaluate(fp, x).is_defined()).collect();
        for (i, &x) in xs.iter().enumerate() {
            if !fp_defined[i] {
                suspects.push(x);
            }
        }
        // definedness flips bound undefined stretches
        for i in 0..xs.len() - 1 {
            if fp_defined[i] != fp_defined[i + 1] {
                if let Some(b) = flip_boundary(fp, xs[i], xs[i + 1], fp_defined[i]) {
                    suspects.push(b);
                }
            }
        }
        for g in critical_subexpressions(fp) {
            let val = |x: f64| evaluate(&g, x).value();
            for r in sign_change_roots(val, iv, grid_n).roots {
                suspects.extend(decimal_snaps(r, DEDUP_TOL));
            }
            for t in touch_points(val, iv, grid_n) {
                suspects.extend(decimal_snaps(t, 1e-6));
            }
        }
    }

    let mut candidates = Vec::new();
    for x0 in representatives(fp, iv, suspects) {
        let EvalOutcome::Defined(fx) = check_function_defined(f, x0) else {
            continue;
        };
        let Some(violation) = locate_violation(fp, x0) else {
            continue;
        };
        if is_isolated(fp, x0) {
            candidates.push(CandidatePoint {
                x0,
                culprit: violation.node.clone(),
                trigger: violation.trigger().clone(),
                reason: violation.reason,
                function_value: fx,
                source_functions: source_functions(f, x0),
            });
        } else {
            boundaries.push(UndefinedBoundary {
                x: x0,
                reason: violation.reason,
            });
        }
    }

    Ok(ScanOutcome {
        candidates,
        undefined_boundaries: boundaries,
    })
}

/// Groups suspects where `fp` is undefined into clusters no wider than
/// `DEDUP_TOL` between neighbours and picks one point per cluster: the one
/// with the shortest decimal form, then the smallest magnitude.
///
/// Underflow makes a run of tiny floats around a zero behave like the
/// zero itself (`x^2` is exactly 0 for `|x| < 1e-162`); the cluster is
/// judged by its plainest member, usually the exact zero.
fn representatives(fp: &Expr, iv: Interval, suspects: Vec<f64>) -> Vec<f64> {
    let mut xs: Vec<f64> = suspects
        .into_iter()
        // adding 0.0 turns -0.0 into 0.0
        .map(|x| x + 0.0)
        .filter(|&x| iv.contains(x) && !evaluate(fp, x).is_defined())
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut out = Vec::new();
    let mut i = 0;
    while i < xs.len() {
        let mut j = i + 1;
        while j < xs.len() && xs[j] - xs[j - 1] <= DEDUP_TOL {
            j += 1;
        }
        let best = xs[i..j]
            .iter()
            .copied()
            .min_by(|a, b| {
                let la = a.to_string().len();
                let lb = b.to_string().len();
                la.cmp(&lb).then(a.abs().total_cmp(&b.abs()))
            })
            .expect("cluster is non-empty");
        out.push(best);
        i = j;
    }
    out
}

/// Bisects between a defined and an undefined node to the last undefined
/// float before the defined side.
fn flip_boundary(fp: &Expr, a: f64, b: f64, a_defined: bool) -> Option<f64> {
    let sign = |x: f64| {
        Some(if evaluate(fp, x).is_defined() {
            1.0
        } else {
            -1.0
        })
    };
    let r = bisect(&sign, a, b)?;
    // bisect returns an endpoint of the final adjacent pair; step to the
    // undefined one
    if evaluate(fp, r).is_defined() {
        let toward_undefined = if a_defined { b } else { a };
        let next = if toward_undefined > r {
            r.next_up()
        } else {
            r.next_down()
        };
        Some(next)
    } else {
        Some(r)
    }
}

fn is_isolated(fp: &Expr, x0: f64) -> bool {
    let scale = x0.abs().max(1.0);
    ISOLATION_STEPS.iter().all(|&s| {
        let d = s * scale;
        evaluate(fp, x0 - d).is_defined() && evaluate(fp, x0 + d).is_defined()
    })
}

/// Subexpressions whose zeros (or sign changes) can make `fp` undefined.
fn critical_subexpressions(fp: &Expr) -> Vec<Expr> {
    let mut out: Vec<Expr> = Vec::new();
    for e in fp.subexpressions() {
        let g = match e {
            Expr::Div(_, d) => Some((**d).clone()),
            Expr::Pow(b, n) => {
                let positive_int = n.as_number().is_some_and(|v| v > 0.0 && v == v.round());
                (!positive_int).then(|| (**b).clone())
            }
            Expr::Func(Func::Sqrt | Func::Ln, a) => Some((**a).clone()),
            Expr::Func(Func::Tan, a) => Some(Expr::func(Func::Cos, (**a).clone())),
            _ => None,
        };
        if let Some(g) = g {
            if !g.is_constant() && !out.contains(&g) {
                out.push(g);
            }
        }
    }
    out
}

/// Methodology step 2: the smallest pieces of `f` that are defined at `x0`
/// while their own derivative expression is not.
pub fn source_functions(f: &Expr, x0: f64) -> Vec<Expr> {
    let mut flagged: Vec<&Expr> = Vec::new();
    for s in f.subexpressions() {
        if s.is_constant() || flagged.contains(&s) {
            continue;
        }
        if evaluate(s, x0).is_defined() && !evaluate(&differentiate(s).simplified, x0).is_defined()
        {
            flagged.push(s);
        }
    }
    flagged
        .iter()
        .filter(|s| {
            !flagged
                .iter()
                .any(|t| t != *s && s.subexpressions().contains(t))
        })
        .map(|s| (*s).clone())
        .collect()
}
