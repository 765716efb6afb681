//! Real-valued evaluation with explicit domain failures.

use serde::Serialize;

use crate::expr::{Expr, Func};

/// Why an expression has no real value at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum UndefinedReason {
    DivByZero,
    EvenRootOfNegative,
    LogNonPositive,
    PowNegativeBase,
    TanPole,
}

impl UndefinedReason {
    pub fn describe(self) -> &'static str {
        match self {
            UndefinedReason::DivByZero => "division by zero",
            UndefinedReason::EvenRootOfNegative => "square root of a negative number",
            UndefinedReason::LogNonPositive => "logarithm of a non-positive number",
            UndefinedReason::PowNegativeBase => "non-integer power of a negative base",
            UndefinedReason::TanPole => "pole of tan",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalOutcome {
    Defined(f64),
    Undefined(UndefinedReason),
}

impl EvalOutcome {
    pub fn value(self) -> Option<f64> {
        match self {
            EvalOutcome::Defined(v) => Some(v),
            EvalOutcome::Undefined(_) => None,
        }
    }

    pub fn is_defined(self) -> bool {
        matches!(self, EvalOutcome::Defined(_))
    }

    pub fn reason(self) -> Option<UndefinedReason> {
        match self {
            EvalOutcome::Defined(_) => None,
            EvalOutcome::Undefined(r) => Some(r),
        }
    }
}

/// The first subexpression, in left-to-right evaluation order, whose
/// operands are all defined but which itself is not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation<'a> {
    pub node: &'a Expr,
    pub reason: UndefinedReason,
}

impl Violation<'_> {
    /// The operand that triggered the failure: the denominator of a
    /// division, the base of a power, or the argument of a function.
    pub fn trigger(&self) -> &Expr {
        match self.node {
            Expr::Div(_, d) => d,
            Expr::Pow(b, _) => b,
            Expr::Func(_, a) => a,
            other => other,
        }
    }
}

/// Overflow stays in the defined world: infinities clamp to `±f64::MAX`.
fn saturate(v: f64) -> f64 {
    if v.is_nan() {
        // unreachable with finite operands; keep the outcome finite anyway
        0.0
    } else {
        v.clamp(-f64::MAX, f64::MAX)
    }
}

fn pow(base: f64, exp: f64) -> Result<f64, UndefinedReason> {
    if base > 0.0 {
        Ok(base.powf(exp))
    } else if base == 0.0 {
        if exp > 0.0 {
            Ok(0.0)
        } else {
            Err(UndefinedReason::DivByZero)
        }
    } else if exp == exp.round() {
        Ok(base.powf(exp))
    } else {
        Err(UndefinedReason::PowNegativeBase)
    }
}

fn apply(f: Func, a: f64) -> Result<f64, UndefinedReason> {
    match f {
        Func::Sin => Ok(a.sin()),
        Func::Cos => Ok(a.cos()),
        Func::Tan => {
            if a.cos() == 0.0 {
                Err(UndefinedReason::TanPole)
            } else {
                Ok(a.tan())
            }
        }
        Func::Exp => Ok(a.exp()),
        Func::Ln => {
            if a > 0.0 {
                Ok(a.ln())
            } else {
                Err(UndefinedReason::LogNonPositive)
            }
        }
        Func::Sqrt => {
            if a >= 0.0 {
                Ok(a.sqrt())
            } else {
                Err(UndefinedReason::EvenRootOfNegative)
            }
        }
        Func::Cbrt => Ok(a.cbrt()),
        Func::Abs => Ok(a.abs()),
    }
}

fn eval_at(e: &Expr, x: f64) -> Result<f64, Violation<'_>> {
    let fail = |reason| Violation { node: e, reason };
    let v = match e {
        Expr::Const(c) => *c,
        Expr::Var => x,
        Expr::Neg(a) => -eval_at(a, x)?,
        Expr::Add(a, b) => eval_at(a, x)? + eval_at(b, x)?,
        Expr::Sub(a, b) => eval_at(a, x)? - eval_at(b, x)?,
        Expr::Mul(a, b) => eval_at(a, x)? * eval_at(b, x)?,
        Expr::Div(a, b) => {
            let n = eval_at(a, x)?;
            let d = eval_at(b, x)?;
            if d == 0.0 {
                return Err(fail(UndefinedReason::DivByZero));
            }
            n / d
        }
        Expr::Pow(a, b) => {
            let base = eval_at(a, x)?;
            let exp = eval_at(b, x)?;
            pow(base, exp).map_err(fail)?
        }
        Expr::Func(f, a) => apply(*f, eval_at(a, x)?).map_err(fail)?,
    };
    Ok(saturate(v))
}

/// Evaluates `e` at `x` under real-number semantics.
pub fn evaluate(e: &Expr, x: f64) -> EvalOutcome {
    match eval_at(e, x) {
        Ok(v) => EvalOutcome::Defined(v),
        Err(v) => EvalOutcome::Undefined(v.reason),
    }
}

/// Like [`evaluate`], but on failure reports which subexpression failed.
pub fn locate_violation(e: &Expr, x: f64) -> Option<Violation<'_>> {
    eval_at(e, x).err()
}

/// Value of one operation on already-evaluated operands.
fn apply_node(e: &Expr, a: f64, b: f64) -> Option<f64> {
    let v = match e {
        Expr::Neg(_) => -a,
        Expr::Add(..) => a + b,
        Expr::Sub(..) => a - b,
        Expr::Mul(..) => a * b,
        Expr::Div(..) => {
            if b == 0.0 {
                return None;
            }
            a / b
        }
        Expr::Pow(..) => pow(a, b).ok()?,
        Expr::Func(f, _) => apply(*f, a).ok()?,
        Expr::Const(_) | Expr::Var => unreachable!("leaves have no operands"),
    };
    Some(saturate(v))
}

/// First-order bound on the rounding error in `evaluate(e, x)`, or `None`
/// where `e` is undefined.
///
/// Each operation is re-applied to its operands moved by their own error
/// bounds; the largest resulting shift plus one rounding of the result is
/// the node's bound. Large intermediates such as `sin(1000 + x)` or
/// `x - x*c` thus get a bound far above `EPSILON * |value|`.
pub fn rounding_bound(e: &Expr, x: f64) -> Option<f64> {
    fn go(e: &Expr, x: f64) -> Option<(f64, f64)> {
        let (v, err) = match e {
            Expr::Const(c) => (*c, 0.0),
            Expr::Var => (x, 0.0),
            _ => {
                let kids = e.children();
                let (a, ea) = go(kids[0], x)?;
                let (b, eb) = match kids.get(1) {
                    Some(k) => go(k, x)?,
                    None => (0.0, 0.0),
                };
                let v = apply_node(e, a, b)?;
                let mut shift: f64 = 0.0;
                for sa in [-1.0, 1.0] {
                    for sb in [-1.0, 1.0] {
                        if let Some(w) = apply_node(e, a + sa * ea, b + sb * eb) {
                            shift = shift.max((w - v).abs());
                        }
                    }
                }
                (v, shift + f64::EPSILON * v.abs())
            }
        };
        Some((v, saturate(err)))
    }
    go(e, x).map(|(_, err)| err)
}

impl Expr {
    pub fn eval(&self, x: f64) -> EvalOutcome {
        evaluate(self, x)
    }

    pub fn value_at(&self, x: f64) -> Option<f64> {
        evaluate(self, x).value()
    }
}
