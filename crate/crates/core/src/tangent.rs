//! Horizontal tangents: zeros of the derivative expression, plus the
//! points where that expression is undefined but the difference-quotient
//! limit exists and is zero.

use serde::Serialize;

use crate::diff::differentiate;
use crate::error::{Error, Result};
use crate::eval::evaluate;
use crate::expr::{Expr, Interval};
use crate::probe::{probe_and_classify, Verdict};
use crate::roots::{sign_change_roots, RootScan, DEDUP_TOL};
use crate::scan::{scan, CandidatePoint};

/// Largest `|f'|` (or probe value) accepted as a horizontal tangent.
pub const ZERO_SLOPE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    /// A zero of the derivative expression.
    SymbolicExpressionRoot,
    /// A point where the derivative expression is undefined but the limit
    /// definition gives slope zero.
    RepairedByDefinition,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TangentPoint {
    pub x: f64,
    pub provenance: Provenance,
    pub residual: f64,
}

/// Zeros of `fp` on `iv` where `fp` is defined, ascending.
pub fn find_expression_roots(fp: &Expr, iv: Interval, grid_n: usize) -> Result<Vec<f64>> {
    scan_expression_roots(fp, iv, grid_n).map(|s| s.roots)
}

/// Like [`find_expression_roots`], also returning near-zero grid points
/// without a sign change (possible double roots).
///
/// Sign changes across a pole bisect toward the pole, not a root; they are
/// dropped because `|fp|` there stays far above [`ZERO_SLOPE_TOL`].
pub fn scan_expression_roots(fp: &Expr, iv: Interval, grid_n: usize) -> Result<RootScan> {
    if grid_n < 2 {
        return Err(Error::GridTooSmall(grid_n));
    }
    let g = |x: f64| evaluate(fp, x).value();
    let mut scan = sign_change_roots(g, iv, grid_n);
    scan.roots
        .retain(|&r| g(r).is_some_and(|v| v.abs() <= ZERO_SLOPE_TOL));
    Ok(scan)
}

/// Merges expression roots with repaired candidate points.
pub fn merge_tangents(
    fp: &Expr,
    roots: &[f64],
    verdicts: &[(CandidatePoint, Verdict)],
) -> Vec<TangentPoint> {
    let mut out: Vec<TangentPoint> = roots
        .iter()
        .map(|&x| TangentPoint {
            x,
            provenance: Provenance::SymbolicExpressionRoot,
            residual: evaluate(fp, x).value().map_or(f64::NAN, f64::abs),
        })
        .collect();
    for (c, v) in verdicts {
        if let Some(value) = v.derivative() {
            if value.abs() <= ZERO_SLOPE_TOL {
                out.push(TangentPoint {
                    x: c.x0,
                    provenance: Provenance::RepairedByDefinition,
                    residual: value.abs(),
                });
            }
        }
    }
    out.sort_by(|a, b| a.x.total_cmp(&b.x));
    let mut merged: Vec<TangentPoint> = Vec::with_capacity(out.len());
    for t in out {
        if merged.last().is_none_or(|l| t.x - l.x > DEDUP_TOL) {
            merged.push(t);
        }
    }
    merged
}

/// All horizontal tangents of `f` on `iv`.
pub fn find_horizontal_tangents(
    f: &Expr,
    iv: Interval,
    grid_n: usize,
) -> Result<Vec<TangentPoint>> {
    let fp = differentiate(f).simplified;
    let roots = find_expression_roots(&fp, iv, grid_n)?;
    let mut verdicts = Vec::new();
    for c in scan(f, &fp, iv, grid_n)? {
        let v = probe_and_classify(f, c.x0)?.verdict;
        verdicts.push((c, v));
    }
    Ok(merge_tangents(&fp, &roots, &verdicts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    const EQ1: &str = "(6*x^2*cos(x^2)+sin(x^2))/(3*cbrt(x^2))";
    const G_PRIME: &str = "(cos(x^2)-6*x^2*sin(x^2))/(3*cbrt(x^2))";
    // root of cos(x^2) = 6 x^2 sin(x^2), from a 40-digit solve
    const X_STAR: f64 = 0.630_276_180_907_369_7;

    fn unit() -> Interval {
        Interval::new(-1.0, 1.0).unwrap()
    }

    fn roots(src: &str) -> Vec<f64> {
        find_expression_roots(&parse(src).unwrap(), unit(), 4096).unwrap()
    }

    #[test]
    fn naive_roots_of_problem_derivative_are_empty() {
        assert!(roots(EQ1).is_empty());
    }

    #[test]
    fn linear_root() {
        assert_eq!(roots("2*x"), vec![0.0]);
    }

    #[test]
    fn counterexample_roots() {
        let r = roots(G_PRIME);
        assert_eq!(r.len(), 2);
        assert!((r[0] + X_STAR).abs() < 1e-12, "{r:?}");
        assert!((r[1] - X_STAR).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn pole_sign_change_is_rejected() {
        // odd grid: 0 is not a node, so 1/x changes sign across one cell
        let r = find_expression_roots(&parse("1/x").unwrap(), unit(), 7).unwrap();
        assert!(r.is_empty(), "{r:?}");
    }

    #[test]
    fn double_root_is_flagged() {
        let iv = unit();
        let s = scan_expression_roots(&parse("(x - 0.3)^2*0.00000000001").unwrap(), iv, 7).unwrap();
        assert!(s.roots.is_empty());
        assert!(!s.unconfirmed.is_empty());
    }

    #[test]
    fn horizontal_tangents() {
        let t =
            find_horizontal_tangents(&parse("cbrt(x)*sin(x^2)").unwrap(), unit(), 4096).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].x, 0.0);
        assert_eq!(t[0].provenance, Provenance::RepairedByDefinition);

        let t = find_horizontal_tangents(&parse("x^2").unwrap(), unit(), 4096).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].provenance, Provenance::SymbolicExpressionRoot);

        let t =
            find_horizontal_tangents(&parse("cbrt(x)*cos(x^2)").unwrap(), unit(), 4096).unwrap();
        let xs: Vec<f64> = t.iter().map(|t| t.x).collect();
        assert_eq!(xs.len(), 2, "{xs:?}");
        assert!(t
            .iter()
            .all(|t| t.provenance == Provenance::SymbolicExpressionRoot));
        assert!((xs[1] - X_STAR).abs() < 1e-12);
    }
}
