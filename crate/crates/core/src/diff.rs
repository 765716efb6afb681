//! Rule-based symbolic differentiation.
//!
//! The output is the formal derivative a textbook procedure produces. Its
//! defined set can be strictly smaller than the set where the function is
//! actually differentiable: `cbrt(x)*sin(x^2)` differentiates to an
//! expression with `cbrt(x^2)` in a denominator, which says nothing about
//! the derivative at 0.

use serde::Serialize;

use crate::expr::{Expr, Func};
use crate::simplify::simplify;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeResult {
    /// Rule output before simplification.
    #[serde(serialize_with = "crate::report::ser_display")]
    pub raw: Expr,
    #[serde(serialize_with = "crate::report::ser_display")]
    pub simplified: Expr,
}

/// Differentiates `e` with respect to its variable.
pub fn differentiate(e: &Expr) -> DerivativeResult {
    let raw = derive(e);
    let simplified = simplify(&raw);
    DerivativeResult { raw, simplified }
}

fn num(v: f64) -> Expr {
    Expr::number(v)
}

fn derive(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) => num(0.0),
        Expr::Var => num(1.0),
        Expr::Neg(a) => Expr::neg(derive(a)),
        Expr::Add(a, b) => Expr::add(derive(a), derive(b)),
        Expr::Sub(a, b) => Expr::sub(derive(a), derive(b)),
        Expr::Mul(a, b) => {
            if a.is_constant() {
                Expr::mul((**a).clone(), derive(b))
            } else if b.is_constant() {
                Expr::mul(derive(a), (**b).clone())
            } else {
                Expr::add(
                    Expr::mul(derive(a), (**b).clone()),
                    Expr::mul((**a).clone(), derive(b)),
                )
            }
        }
        Expr::Div(a, b) => {
            if b.is_constant() {
                Expr::div(derive(a), (**b).clone())
            } else if a.is_constant() {
                Expr::neg(Expr::div(
                    Expr::mul((**a).clone(), derive(b)),
                    Expr::pow((**b).clone(), num(2.0)),
                ))
            } else {
                Expr::div(
                    Expr::sub(
                        Expr::mul(derive(a), (**b).clone()),
                        Expr::mul((**a).clone(), derive(b)),
                    ),
                    Expr::pow((**b).clone(), num(2.0)),
                )
            }
        }
        Expr::Pow(u, v) => derive_pow(u, v),
        Expr::Func(f, u) => chain(*f, u),
    }
}

fn derive_pow(u: &Expr, v: &Expr) -> Expr {
    if v.is_constant() {
        let du = derive(u);
        // power rule; d(u^1) = u' keeps the domain of u
        if v.is_number(1.0) {
            return du;
        }
        let lowered = match v.as_number() {
            Some(n) => num(n - 1.0),
            None => Expr::sub(v.clone(), num(1.0)),
        };
        return Expr::mul(Expr::mul(v.clone(), Expr::pow(u.clone(), lowered)), du);
    }
    let this = Expr::pow(u.clone(), v.clone());
    let ln_u = Expr::func(Func::Ln, u.clone());
    if u.is_constant() {
        return Expr::mul(Expr::mul(this, ln_u), derive(v));
    }
    Expr::mul(
        this,
        Expr::add(
            Expr::mul(derive(v), ln_u),
            Expr::div(Expr::mul(v.clone(), derive(u)), u.clone()),
        ),
    )
}

fn chain(f: Func, u: &Expr) -> Expr {
    let du = derive(u);
    let u = u.clone();
    match f {
        Func::Sin => Expr::mul(Expr::func(Func::Cos, u), du),
        Func::Cos => Expr::mul(Expr::neg(Expr::func(Func::Sin, u)), du),
        Func::Tan => Expr::div(du, Expr::pow(Expr::func(Func::Cos, u), num(2.0))),
        Func::Exp => Expr::mul(Expr::func(Func::Exp, u), du),
        Func::Ln => Expr::div(du, u),
        Func::Sqrt => Expr::div(du, Expr::mul(num(2.0), Expr::func(Func::Sqrt, u))),
        // u'/(3*cbrt(u^2)) so that u = 0 shows up as a zero denominator
        Func::Cbrt => Expr::div(
            du,
            Expr::mul(num(3.0), Expr::func(Func::Cbrt, Expr::pow(u, num(2.0)))),
        ),
        Func::Abs => Expr::div(Expr::mul(du, u.clone()), Expr::func(Func::Abs, u)),
    }
}
