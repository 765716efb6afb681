#![allow(dead_code)]

use deriv_audit::{differentiate, evaluate, Expr, Func};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Functions with interesting points at 0, plus smooth ones.
pub const CORPUS: &[&str] = &[
    "cbrt(x)*sin(x^2)",
    "cbrt(x)*cos(x^2)",
    "abs(x)",
    "cbrt(x^2)",
    "cbrt(x)",
    "x^2",
    "x^3",
    "abs(x)*x",
    "sqrt(x^2)",
    "x*cbrt(x)",
    "abs(x - 0.5)",
    "cbrt(x + 0.25)*sin(x + 0.25)",
    "sin(x)",
    "sqrt(x + 1)",
    "ln(x + 2)*x",
    "1/(x - 2)",
];

/// Odd functions from the corpus.
pub const ODD: &[&str] = &[
    "cbrt(x)*sin(x^2)",
    "x^3",
    "cbrt(x)",
    "sin(x)",
    "abs(x)*x",
    "x*abs(x)^0.5",
    "sin(x)*cbrt(x^2)",
];

/// Leaf constants written so that `format` prints them back exactly.
const NICE: &[f64] = &[0.0, 0.5, 1.0, 2.0, 3.0, 0.25, 1.5, 10.0, 0.1, 7.0];

fn random_const(r: &mut ChaCha8Rng) -> f64 {
    if r.gen_bool(0.8) {
        NICE[r.gen_range(0..NICE.len())]
    } else {
        r.gen_range(0.0..5.0)
    }
}

/// Random AST of depth at most `depth`, drawing every operator and every
/// function. Constants are non-negative; negation is a separate node.
pub fn random_expr(r: &mut ChaCha8Rng, depth: usize) -> Expr {
    if depth <= 1 || r.gen_bool(0.25) {
        return if r.gen_bool(0.65) {
            Expr::Var
        } else {
            Expr::Const(random_const(r))
        };
    }
    let d = depth - 1;
    match r.gen_range(0..8) {
        0 => Expr::neg(random_expr(r, d)),
        1 => Expr::add(random_expr(r, d), random_expr(r, d)),
        2 => Expr::sub(random_expr(r, d), random_expr(r, d)),
        3 => Expr::mul(random_expr(r, d), random_expr(r, d)),
        4 => Expr::div(random_expr(r, d), random_expr(r, d)),
        5 => {
            let exp = if r.gen_bool(0.7) {
                Expr::Const([2.0, 3.0, 0.5, 1.5, 4.0][r.gen_range(0..5)])
            } else {
                random_expr(r, d)
            };
            Expr::pow(random_expr(r, d), exp)
        }
        _ => {
            let f = Func::ALL[r.gen_range(0..Func::ALL.len())];
            Expr::func(f, random_expr(r, d))
        }
    }
}

/// Proptest strategy for arbitrary ASTs of depth at most `depth`.
pub fn arb_expr(depth: u32) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        3 => Just(Expr::Var),
        1 => prop::sample::select(NICE).prop_map(Expr::Const),
        1 => (0.0f64..1e6).prop_map(Expr::Const),
    ];
    leaf.prop_recursive(depth, 64, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Expr::neg),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::div(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::pow(a, b)),
            (prop::sample::select(Func::ALL.to_vec()), inner).prop_map(|(f, a)| Expr::func(f, a)),
        ]
    })
}

pub fn value(e: &Expr, x: f64) -> Option<f64> {
    evaluate(e, x).value()
}

/// True when every expression, and every subexpression, is defined with
/// magnitude at most `bound` on a sampled neighbourhood of radius `radius`
/// around `x`, including `x ± h`. Bounding intermediates keeps overflow
/// saturation out of the comparison.
pub fn regular_at(exprs: &[&Expr], x: f64, radius: f64, h: f64, bound: f64) -> bool {
    let mut pts = vec![x - h, x + h];
    for k in -8..=8 {
        pts.push(x + radius * k as f64 / 8.0);
    }
    exprs.iter().all(|e| {
        e.subexpressions().iter().all(|s| {
            pts.iter()
                .all(|&p| value(s, p).is_some_and(|v| v.abs() <= bound))
        })
    })
}

pub fn central_difference(f: &Expr, x: f64, h: f64) -> Option<f64> {
    Some((value(f, x + h)? - value(f, x - h)?) / (2.0 * h))
}

pub fn within(got: f64, want: f64, abs: f64, rel: f64) -> bool {
    (got - want).abs() <= abs.max(rel * want.abs())
}

/// Forward difference quotients `(f(x0+h)-f(x0))/h` for `h = ±0.1*2^-k`.
pub fn quotient_table(
    f: impl Fn(f64) -> f64,
    x0: f64,
    sign: f64,
    ks: std::ops::RangeInclusive<i32>,
) -> Vec<f64> {
    let f0 = f(x0);
    ks.map(|k| {
        let h = sign * 0.1 * 2f64.powi(-k);
        (f(x0 + h) - f0) / h
    })
    .collect()
}

/// Draws `(f, f', x)` triples where both expressions are regular within
/// 1e-3 of `x`, until `count` are collected.
pub fn regular_samples(seed: u64, count: usize, depth: usize) -> Vec<(Expr, Expr, f64)> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let f = random_expr(&mut r, depth);
        if f.is_constant() {
            continue;
        }
        let fp = differentiate(&f).simplified;
        let x = r.gen_range(-2.0..2.0);
        if regular_at(&[&f, &fp], x, 1e-3, 1e-6, 1e6) && smooth_at_step(&f, x) {
            out.push((f, fp, x));
        }
    }
    out
}

/// The h = 1e-6 central difference is itself accurate at `x`: halving the
/// step moves it by less than 1e-7 relative. Rules out points where fast
/// oscillation makes the truncation error exceed the tolerance.
fn smooth_at_step(f: &Expr, x: f64) -> bool {
    match (
        central_difference(f, x, 1e-6),
        central_difference(f, x, 5e-7),
    ) {
        (Some(a), Some(b)) => within(b, a, 1e-7, 1e-7),
        _ => false,
    }
}
