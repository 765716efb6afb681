//! Text rendering with the fewest parentheses the grammar needs.

use std::fmt::{self, Write};

use crate::expr::Expr;

// Binding strength of each node as it appears in text.
const ADDITIVE: u8 = 1;
const MULTIPLICATIVE: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => ADDITIVE,
        Expr::Mul(..) | Expr::Div(..) => MULTIPLICATIVE,
        Expr::Neg(_) => UNARY,
        Expr::Pow(..) => POWER,
        Expr::Const(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => UNARY,
        Expr::Const(_) | Expr::Var | Expr::Func(..) => ATOM,
    }
}

fn child(out: &mut impl Write, e: &Expr, min_level: u8) -> fmt::Result {
    if level(e) < min_level {
        out.write_char('(')?;
        write_expr(out, e)?;
        out.write_char(')')
    } else {
        write_expr(out, e)
    }
}

fn write_expr(out: &mut impl Write, e: &Expr) -> fmt::Result {
    match e {
        Expr::Const(v) => write!(out, "{v}"),
        Expr::Var => out.write_char('x'),
        Expr::Neg(a) => {
            out.write_char('-')?;
            child(out, a, UNARY)
        }
        Expr::Add(a, b) => {
            child(out, a, ADDITIVE)?;
            out.write_str(" + ")?;
            child(out, b, MULTIPLICATIVE)
        }
        Expr::Sub(a, b) => {
            child(out, a, ADDITIVE)?;
            out.write_str(" - ")?;
            child(out, b, MULTIPLICATIVE)
        }
        Expr::Mul(a, b) => {
            child(out, a, MULTIPLICATIVE)?;
            out.write_char('*')?;
            child(out, b, UNARY)
        }
        Expr::Div(a, b) => {
            child(out, a, MULTIPLICATIVE)?;
            out.write_char('/')?;
            child(out, b, UNARY)
        }
        Expr::Pow(a, b) => {
            child(out, a, ATOM)?;
            out.write_char('^')?;
            child(out, b, UNARY)
        }
        Expr::Func(f, a) => {
            write!(out, "{f}(")?;
            write_expr(out, a)?;
            out.write_char(')')
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}

/// Renders `e` as parseable text.
pub fn format(e: &Expr) -> String {
    e.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Func;
    use crate::parse::parse;

    #[test]
    fn spec_examples() {
        let e = Expr::mul(
            Expr::func(Func::Cbrt, Expr::Var),
            Expr::func(Func::Sin, Expr::pow(Expr::Var, Expr::Const(2.0))),
        );
        assert_eq!(format(&e), "cbrt(x)*sin(x^2)");
        assert_eq!(format(&Expr::Const(0.0)), "0");
        assert_eq!(format(&Expr::div(Expr::Const(1.0), Expr::Var)), "1/x");
    }

    #[test]
    fn parentheses_only_where_needed() {
        for src in [
            "x - (x - 1)",
            "x/(2*x)",
            "(x^2)^3",
            "x^2^3",
            "-(x + 1)",
            "-x^2",
            "2^-x",
            "x*-x",
            "--x",
            "(x + 1)*(x - 1)",
            "(-1)^x",
            "x^(1/3)",
            "sin(x + 1)/3",
            "1.5 + 0.1",
        ] {
            let e = parse(src).unwrap();
            assert_eq!(format(&e), src);
        }
    }

    #[test]
    fn negative_literals_render_parseably() {
        let e = Expr::pow(Expr::Const(-2.0), Expr::Var);
        assert_eq!(format(&e), "(-2)^x");
        let e = Expr::mul(Expr::Var, Expr::Const(-2.0));
        assert_eq!(format(&e), "x*-2");
    }
}
