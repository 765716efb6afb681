//! Domain-preserving algebraic cleanup.
//!
//! Every rewrite here keeps the set of points where the expression is
//! defined exactly the same. That rules out the usual cancellations
//! (`x/x -> 1`, `ln(x)*0 -> 0`, `x^0 -> 1`), which would quietly repair
//! holes in a derivative's domain.

use crate::eval::evaluate;
use crate::expr::Expr;

const MAX_PASSES: usize = 64;

/// Rewrites `e` to a fixpoint of the local rules, or stops after
/// `MAX_PASSES` bottom-up passes.
pub fn simplify(e: &Expr) -> Expr {
    let mut cur = pass(e);
    for _ in 1..MAX_PASSES {
        let next = pass(&cur);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

fn pass(e: &Expr) -> Expr {
    let rebuilt = match e {
        Expr::Const(v) => Expr::number(*v),
        Expr::Var => Expr::Var,
        Expr::Neg(a) => Expr::neg(pass(a)),
        Expr::Add(a, b) => Expr::add(pass(a), pass(b)),
        Expr::Sub(a, b) => Expr::sub(pass(a), pass(b)),
        Expr::Mul(a, b) => Expr::mul(pass(a), pass(b)),
        Expr::Div(a, b) => Expr::div(pass(a), pass(b)),
        Expr::Pow(a, b) => Expr::pow(pass(a), pass(b)),
        Expr::Func(f, a) => Expr::func(*f, pass(a)),
    };
    rewrite(rebuilt)
}

fn is_int(v: f64) -> bool {
    v == v.round()
}

/// Folds a node whose operands are all literals, when it has a value.
fn fold(e: &Expr) -> Option<Expr> {
    if !e.children().iter().all(|c| c.as_number().is_some()) {
        return None;
    }
    // 0.0 is arbitrary: the node does not mention x
    evaluate(e, 0.0).value().map(Expr::number)
}

/// Exponent sum for `a^m * a^n`, allowed only when it cannot widen the
/// domain at `a = 0`.
fn merged_exponent(m: f64, n: f64) -> Option<f64> {
    if is_int(m) && is_int(n) && ((m > 0.0 && n > 0.0) || (m < 0.0 && n < 0.0)) {
        Some(m + n)
    } else {
        None
    }
}

fn rewrite(e: Expr) -> Expr {
    if matches!(e, Expr::Neg(ref a) if matches!(**a, Expr::Const(_))) {
        // canonical negative literal; folding it would loop
        return if e.is_number(0.0) {
            Expr::Const(0.0)
        } else {
            e
        };
    }
    if !matches!(e, Expr::Const(_) | Expr::Var) {
        if let Some(folded) = fold(&e) {
            return folded;
        }
    }
    match e {
        Expr::Neg(a) => match *a {
            Expr::Neg(inner) => *inner,
            other => Expr::neg(other),
        },
        Expr::Add(a, b) => {
            if a.is_number(0.0) {
                *b
            } else if b.is_number(0.0) {
                *a
            } else if let Expr::Neg(q) = *b {
                Expr::sub(*a, *q)
            } else if let Expr::Neg(p) = *a {
                Expr::sub(*b, *p)
            } else {
                Expr::Add(a, b)
            }
        }
        Expr::Sub(a, b) => {
            if b.is_number(0.0) {
                *a
            } else if a.is_number(0.0) {
                Expr::neg(*b)
            } else if let Expr::Neg(q) = *b {
                Expr::add(*a, *q)
            } else {
                Expr::Sub(a, b)
            }
        }
        Expr::Mul(a, b) => rewrite_mul(*a, *b),
        Expr::Div(a, b) => {
            if b.is_number(1.0) {
                *a
            } else if let Expr::Neg(p) = *a {
                Expr::neg(Expr::div(*p, *b))
            } else if let Expr::Neg(q) = *b {
                Expr::neg(Expr::div(*a, *q))
            } else {
                Expr::Div(a, b)
            }
        }
        Expr::Pow(a, b) => {
            if b.is_number(1.0) {
                return *a;
            }
            if let (Expr::Pow(base, m), Some(n)) = (a.as_ref(), b.as_number()) {
                if let Some(m) = m.as_number() {
                    if is_int(m) && is_int(n) && m > 0.0 && n > 0.0 {
                        return Expr::pow((**base).clone(), Expr::number(m * n));
                    }
                }
            }
            Expr::Pow(a, b)
        }
        other => other,
    }
}

fn rewrite_mul(a: Expr, b: Expr) -> Expr {
    if a.is_number(1.0) {
        return b;
    }
    if b.is_number(1.0) {
        return a;
    }
    if (a.is_number(0.0) && b.is_total()) || (b.is_number(0.0) && a.is_total()) {
        return Expr::Const(0.0);
    }
    if a.is_number(-1.0) {
        return Expr::neg(b);
    }
    if b.is_number(-1.0) {
        return Expr::neg(a);
    }
    if let Some(c) = a.as_number() {
        if c < 0.0 && b.as_number().is_none() {
            return Expr::neg(Expr::mul(Expr::number(-c), b));
        }
    }
    // pull signs out, leaving negative literals to the constant rules
    if a.as_number().is_none() {
        if let Expr::Neg(p) = a {
            return Expr::neg(Expr::mul(*p, b));
        }
    }
    if b.as_number().is_none() {
        if let Expr::Neg(q) = b {
            return Expr::neg(Expr::mul(a, *q));
        }
    }
    if let Some(m) = merge_powers(&a, &b) {
        return m;
    }
    if b.as_number().is_some() {
        return Expr::mul(b, a);
    }
    if let (Some(c1), Expr::Mul(p, q)) = (a.as_number(), &b) {
        if let Some(c2) = p.as_number() {
            return Expr::mul(Expr::number(c1 * c2), (**q).clone());
        }
    }
    match (a, b) {
        (Expr::Div(p, q), r) => Expr::div(Expr::mul(*p, r), *q),
        (r, Expr::Div(p, q)) => Expr::div(Expr::mul(r, *p), *q),
        (a, Expr::Mul(p, q)) => Expr::mul(Expr::mul(a, *p), *q),
        (a, b) => Expr::mul(a, b),
    }
}

fn power_parts(e: &Expr) -> (&Expr, f64) {
    if let Expr::Pow(base, exp) = e {
        if let Some(n) = exp.as_number() {
            return (base, n);
        }
    }
    (e, 1.0)
}

fn merge_powers(a: &Expr, b: &Expr) -> Option<Expr> {
    let (ba, ea) = power_parts(a);
    let (bb, eb) = power_parts(b);
    if ba != bb || ba.as_number().is_some() {
        return None;
    }
    let n = merged_exponent(ea, eb)?;
    Some(Expr::pow(ba.clone(), Expr::number(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn s(src: &str) -> String {
        simplify(&parse(src).unwrap()).to_string()
    }

    #[test]
    fn identities() {
        assert_eq!(simplify(&parse("1*x + 0").unwrap()), Expr::Var);
        assert_eq!(s("x - 0"), "x");
        assert_eq!(s("0 - x"), "-x");
        assert_eq!(s("--x"), "x");
        assert_eq!(s("x^1"), "x");
        assert_eq!(s("x/1"), "x");
    }

    #[test]
    fn zero_products_respect_domain() {
        assert_eq!(s("cbrt(x)*0"), "0");
        assert_eq!(s("0*sin(x^2)"), "0");
        assert_eq!(s("ln(x)*0"), "0*ln(x)");
        assert_eq!(s("0*(1/x)"), "0/x");
        assert_eq!(s("0*x^-1"), "0*x^-1");
    }

    #[test]
    fn integer_power_laws() {
        assert_eq!(s("x^2*x^3"), "x^5");
        assert_eq!(s("x*x"), "x^2");
        assert_eq!(s("(x^2)^3"), "x^6");
        // mixed signs would repair the hole at 0
        assert_eq!(s("x^-1*x^2"), "x^-1*x^2");
        assert_eq!(s("(x^-1)^-1"), "(x^-1)^-1");
        assert_eq!(s("x^0.5*x^0.5"), "x^0.5*x^0.5");
        assert_eq!(s("x^0"), "x^0");
    }

    #[test]
    fn constant_folding() {
        assert_eq!(s("2*3*x"), "6*x");
        assert_eq!(s("x*2"), "2*x");
        assert_eq!(s("1 - 3"), "-2");
        assert_eq!(s("1/0"), "1/0");
        assert_eq!(s("(-8)^(1/3)"), "(-8)^0.3333333333333333");
        assert_eq!(s("sqrt(4)"), "2");
        assert_eq!(s("-0"), "0");
    }

    #[test]
    fn sign_handling() {
        assert_eq!(s("x + -x"), "x - x");
        assert_eq!(s("-x + 1"), "1 - x");
        assert_eq!(s("x - -1"), "x + 1");
        assert_eq!(s("-x*3"), "-(3*x)");
        assert_eq!(s("x*-1"), "-x");
    }

    #[test]
    fn quotient_absorbs_factors() {
        assert_eq!(s("1/(3*cbrt(x^2))*sin(x^2)"), "sin(x^2)/(3*cbrt(x^2))");
    }

    #[test]
    fn idempotent_on_examples() {
        for src in [
            "1/(3*cbrt(x^2))*sin(x^2) + cbrt(x)*(cos(x^2)*(2*x^1))",
            "x*(y*(2*(x*3)))",
            "-(-(x*-2))",
        ] {
            let src = src.replace('y', "x");
            let once = simplify(&parse(&src).unwrap());
            assert_eq!(simplify(&once), once, "{src}");
        }
    }
}
