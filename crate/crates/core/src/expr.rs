//! Expression tree for single-variable real functions.

use std::fmt;

/// Named elementary functions understood by the parser and evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Cbrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 8] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
        Func::Cbrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Cbrt => "cbrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Whether the function is defined for every finite real argument.
    pub fn is_total(self) -> bool {
        matches!(
            self,
            Func::Sin | Func::Cos | Func::Exp | Func::Cbrt | Func::Abs
        )
    }
}

impl fmt::Display for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An immutable expression in the single variable `x`.
///
/// `Const` payloads are finite. Negative literals in source text parse as
/// `Neg(Const(_))`, and the simplifier keeps that shape, so only
/// non-negative constants survive a trip through text.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Func(Func, Box<Expr>),
}

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn constant(v: f64) -> Expr {
        debug_assert!(v.is_finite());
        Expr::Const(v)
    }

    /// Builds a numeric literal, writing negative values as `Neg(Const)`.
    pub fn number(v: f64) -> Expr {
        if v < 0.0 {
            Expr::Neg(Box::new(Expr::Const(-v)))
        } else {
            // folds -0.0 into 0.0
            Expr::Const(v + 0.0)
        }
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Expr, b: Expr) -> Expr {
        Expr::Pow(Box::new(a), Box::new(b))
    }

    pub fn func(f: Func, a: Expr) -> Expr {
        Expr::Func(f, Box::new(a))
    }

    /// Numeric value of a literal, looking through a single negation.
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Expr::Const(v) => Some(*v),
            Expr::Neg(a) => match a.as_ref() {
                Expr::Const(v) => Some(-*v),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn is_number(&self, v: f64) -> bool {
        self.as_number() == Some(v)
    }

    /// True when the expression does not mention the variable.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var => false,
            Expr::Neg(a) | Expr::Func(_, a) => a.is_constant(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// Conservative check that the expression is defined at every real `x`.
    pub fn is_total(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var => true,
            Expr::Neg(a) => a.is_total(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.is_total() && b.is_total(),
            Expr::Div(a, b) => match b.as_number() {
                Some(d) => d != 0.0 && a.is_total(),
                None => false,
            },
            Expr::Pow(a, b) => match b.as_number() {
                Some(n) => n > 0.0 && n == n.round() && a.is_total(),
                None => false,
            },
            Expr::Func(f, a) => f.is_total() && a.is_total(),
        }
    }

    /// Immediate children, left to right.
    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Const(_) | Expr::Var => Vec::new(),
            Expr::Neg(a) | Expr::Func(_, a) => vec![a],
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => vec![a, b],
        }
    }

    /// Pre-order traversal of every subexpression, including `self`.
    pub fn subexpressions(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            out.push(e);
            stack.extend(e.children().into_iter().rev());
        }
        out
    }

    pub fn node_count(&self) -> usize {
        1 + self
            .children()
            .iter()
            .map(|c| c.node_count())
            .sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Replaces every occurrence of the variable with `with`.
    pub fn substitute(&self, with: &Expr) -> Expr {
        match self {
            Expr::Const(v) => Expr::Const(*v),
            Expr::Var => with.clone(),
            Expr::Neg(a) => Expr::neg(a.substitute(with)),
            Expr::Add(a, b) => Expr::add(a.substitute(with), b.substitute(with)),
            Expr::Sub(a, b) => Expr::sub(a.substitute(with), b.substitute(with)),
            Expr::Mul(a, b) => Expr::mul(a.substitute(with), b.substitute(with)),
            Expr::Div(a, b) => Expr::div(a.substitute(with), b.substitute(with)),
            Expr::Pow(a, b) => Expr::pow(a.substitute(with), b.substitute(with)),
            Expr::Func(f, a) => Expr::func(*f, a.substitute(with)),
        }
    }
}

/// A closed interval `[lo, hi]` with finite endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Interval, crate::Error> {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(crate::Error::InvalidInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// The `i`-th of `n + 1` equally spaced nodes; both endpoints are exact.
    pub fn node(&self, i: usize, n: usize) -> f64 {
        if i == 0 {
            return self.lo;
        }
        if i == n {
            return self.hi;
        }
        let t = i as f64 / n as f64;
        let x = (self.lo * (n - i) as f64 + self.hi * i as f64) / n as f64;
        if x.is_finite() {
            x
        } else {
            self.lo + t * (self.hi - self.lo)
        }
    }

    /// All `n + 1` grid nodes in ascending order.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        (0..=n).map(|i| self.node(i, n)).collect()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
