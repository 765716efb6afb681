//! Differentiation auditing for single-variable real expressions.
//!
//! The pipeline differentiates an expression by the usual rules, finds the
//! points where the function is defined but the derivative expression is
//! not, and settles differentiability at each of them from the limit of
//! one-sided difference quotients. The result is the corrected, piecewise
//! derivative and the full set of horizontal tangents on an interval.
//!
//! ```
//! use deriv_audit::{analyze, AnalyzeOptions, Interval};
//!
//! let iv = Interval::new(-1.0, 1.0).unwrap();
//! let report = analyze("cbrt(x)*sin(x^2)", iv, &AnalyzeOptions::default()).unwrap();
//! assert!(report.naive_tangents.is_empty());
//! assert_eq!(report.tangents.len(), 1);
//! assert!(report.tangents[0].x.abs() < 1e-9);
//! ```

pub mod diff;
pub mod error;
pub mod eval;
pub mod expr;
pub mod format;
pub mod parse;
pub mod probe;
pub mod report;
pub mod roots;
pub mod scan;
pub mod simplify;
pub mod tangent;

pub use diff::{differentiate, DerivativeResult};
pub use error::{Error, ParseError, Result};
pub use eval::{evaluate, EvalOutcome, UndefinedReason};
pub use expr::{Expr, Func, Interval};
pub use format::format;
pub use parse::parse;
pub use probe::{classify, probe, QuotientProbe, Verdict};
pub use report::{analyze, emit_plot_data, AnalysisReport, AnalyzeOptions};
pub use scan::{check_function_defined, scan, CandidatePoint};
pub use simplify::simplify;
pub use tangent::{find_expression_roots, find_horizontal_tangents, Provenance, TangentPoint};
