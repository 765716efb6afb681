//! Deciding differentiability at a point from one-sided difference
//! quotients.
//!
//! [`probe`] tabulates `q(h) = (f(x0 + h) - f(x0)) / h` and its left-hand
//! mirror over a fixed geometric step schedule; [`classify`] reads each side
//! as converging, diverging to an infinity, or neither, and combines the
//! two sides into a [`Verdict`].

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{evaluate, rounding_bound, EvalOutcome};
use crate::expr::Expr;

/// First step of the schedule.
pub const H0: f64 = 0.1;
/// Ratio between consecutive steps.
pub const STEP_RATIO: f64 = 0.5;
/// Number of steps, `h_k = H0 * STEP_RATIO^k` for `k = 0..STEPS`.
pub const STEPS: usize = 40;
/// Steps below this are dominated by cancellation and are not read.
pub const H_FLOOR: f64 = 1e-8;
/// Fewest usable quotients a side needs.
pub const MIN_WINDOW: usize = 6;
/// Average shrink factor of successive deltas on a converging side.
pub const SHRINK_FACTOR: f64 = 0.75;
/// Absolute and relative bound on the final delta of a converging side.
pub const CONVERGENCE_TOL: f64 = 1e-6;
/// Largest log-log slope of `|q|` against `h` on a diverging side.
pub const DIVERGENCE_SLOPE: f64 = -0.2;
/// Largest RMS residual of that log-log fit.
pub const DIVERGENCE_RESIDUAL: f64 = 0.5;
/// `|q|` at the smallest step must reach this ...
pub const DIVERGENCE_FLOOR: f64 = 1e4;
/// ... or have grown by this factor across the window.
pub const DIVERGENCE_GROWTH: f64 = 100.0;
/// Absolute and relative tolerance for two one-sided limits to agree.
pub const MERGE_TOL: f64 = 1e-4;

/// Trailing deltas examined for a geometric approach to the limit.
const GEOMETRIC_TAIL: usize = 6;
/// Largest delta ratio accepted as geometric convergence.
const GEOMETRIC_MAX_RATIO: f64 = 0.95;
/// Largest spread among the tail's delta ratios.
const GEOMETRIC_RATIO_SPREAD: f64 = 0.05;

/// Multiplier on machine epsilon when estimating rounding noise in a
/// quotient.
const NOISE_ULPS: f64 = 8.0;

/// One-sided difference quotients of a function at `x0`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientProbe {
    pub x0: f64,
    /// `f(x0)`.
    pub f0: f64,
    /// Estimated rounding noise of `f` near `x0`.
    pub f0_noise: f64,
    /// Strictly decreasing positive steps.
    pub schedule: Vec<f64>,
    /// `(f(x0 + h) - f(x0)) / h` for each step.
    pub right: Vec<EvalOutcome>,
    /// `(f(x0 - h) - f(x0)) / (-h)` for each step.
    pub left: Vec<EvalOutcome>,
}

/// The step schedule `H0 * STEP_RATIO^k`.
pub fn schedule() -> Vec<f64> {
    (0..STEPS).map(|k| H0 * STEP_RATIO.powi(k as i32)).collect()
}

/// Tabulates both one-sided difference quotients of `f` at `x0`.
///
/// Fails when `f` is undefined at `x0`: without a base value there is no
/// quotient, and the function is not differentiable there.
pub fn probe(f: &Expr, x0: f64) -> Result<QuotientProbe> {
    let f0 = match evaluate(f, x0) {
        EvalOutcome::Defined(v) => v,
        EvalOutcome::Undefined(_) => return Err(Error::UndefinedAtPoint { x: x0 }),
    };
    let schedule = schedule();
    let quotient = |step: f64| -> EvalOutcome {
        let x = x0 + step;
        // divide by the step actually taken after rounding x0 + step
        let taken = x - x0;
        match evaluate(f, x) {
            EvalOutcome::Defined(fx) if taken != 0.0 => EvalOutcome::Defined((fx - f0) / taken),
            EvalOutcome::Defined(_) => EvalOutcome::Defined(0.0),
            undefined => undefined,
        }
    };
    let right = schedule.iter().map(|&h| quotient(h)).collect();
    let left = schedule.iter().map(|&h| quotient(-h)).collect();
    Ok(QuotientProbe {
        x0,
        f0,
        f0_noise: noise_estimate(f, x0),
        schedule,
        right,
        left,
    })
}

/// Rounding noise of `f` near `x0`: the smaller of the propagated error
/// bound, which overstates noise when correlated errors cancel, and the
/// jitter observed over a few irregularly spaced points within
/// `1e-8 * max(1, |x0|)`, which overstates it next to a singularity.
fn noise_estimate(f: &Expr, x0: f64) -> f64 {
    const GOLDEN: f64 = 0.618_033_988_749_895;
    let bound = rounding_bound(f, x0).unwrap_or(0.0);
    let d = 1e-9 * x0.abs().max(1.0);
    // evenly spaced points would let rounding errors drift linearly and
    // cancel in the residuals
    let offsets: Vec<f64> = (0..=8)
        .map(|j| d * (j as f64 + (j as f64 * GOLDEN).fract()))
        .collect();
    for side in [1.0, -1.0] {
        let pts: Option<Vec<(f64, f64)>> = offsets
            .iter()
            .map(|&t| {
                let x = x0 + side * t;
                evaluate(f, x).value().map(|v| (x, v))
            })
            .collect();
        if let Some(p) = pts {
            // distance of each middle value from the chord through its
            // neighbours
            let jitter = p
                .windows(3)
                .map(|w| {
                    let (a, b, c) = (w[0], w[1], w[2]);
                    let chord = a.1 + (c.1 - a.1) * (b.0 - a.0) / (c.0 - a.0);
                    (b.1 - chord).abs()
                })
                .fold(0.0, f64::max);
            return bound.min(jitter);
        }
    }
    bound
}

/// Differentiability at a point.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    /// Both one-sided limits exist and agree.
    Differentiable { value: f64, uncertainty: f64 },
    /// Both one-sided quotients diverge to the same infinity.
    VerticalTangent { sign: i8 },
    /// The one-sided quotients diverge to opposite infinities.
    Cusp,
    /// Both one-sided limits exist but differ.
    Corner { left_slope: f64, right_slope: f64 },
    /// The quotients settle neither way, e.g. oscillation.
    Inconclusive { diagnostic: String },
}

impl Verdict {
    pub fn is_differentiable(&self) -> bool {
        matches!(self, Verdict::Differentiable { .. })
    }

    pub fn derivative(&self) -> Option<f64> {
        match self {
            Verdict::Differentiable { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Differentiable { .. } => "Differentiable",
            Verdict::VerticalTangent { .. } => "VerticalTangent",
            Verdict::Cusp => "Cusp",
            Verdict::Corner { .. } => "Corner",
            Verdict::Inconclusive { .. } => "Inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Differentiable { value, uncertainty } => {
                write!(
                    f,
                    "differentiable, derivative = {value} (± {uncertainty:.1e})"
                )
            }
            Verdict::VerticalTangent { sign } => {
                let inf = if *sign > 0 { "+inf" } else { "-inf" };
                write!(
                    f,
                    "not differentiable: vertical tangent (both sides -> {inf})"
                )
            }
            Verdict::Cusp => write!(f, "not differentiable: cusp (sides -> opposite infinities)"),
            Verdict::Corner {
                left_slope,
                right_slope,
            } => write!(
                f,
                "not differentiable: corner (left slope {left_slope}, right slope {right_slope})"
            ),
            Verdict::Inconclusive { diagnostic } => write!(f, "inconclusive: {diagnostic}"),
        }
    }
}

/// How one side's quotients behave as the step shrinks.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum SideBehavior {
    Converges { limit: f64, uncertainty: f64 },
    Diverges { sign: i8 },
    Unsettled { reason: String },
}

/// A verdict with the per-side evidence behind it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub left: SideBehavior,
    pub right: SideBehavior,
}

/// Classifies a probe; see [`classify_detailed`].
pub fn classify(p: &QuotientProbe) -> Verdict {
    classify_detailed(p).verdict
}

pub fn classify_detailed(p: &QuotientProbe) -> Classification {
    let right = side_behavior(&p.schedule, &p.right, p);
    let left = side_behavior(&p.schedule, &p.left, p);
    let verdict = combine(&left, &right);
    Classification {
        verdict,
        left,
        right,
    }
}

/// Probes `f` at `x0` and classifies the result.
pub fn probe_and_classify(f: &Expr, x0: f64) -> Result<Classification> {
    probe(f, x0).map(|p| classify_detailed(&p))
}

fn combine(left: &SideBehavior, right: &SideBehavior) -> Verdict {
    use SideBehavior::*;
    match (left, right) {
        (
            Converges {
                limit: l,
                uncertainty: ul,
            },
            Converges {
                limit: r,
                uncertainty: ur,
            },
        ) => {
            let tol = MERGE_TOL.max(MERGE_TOL * l.abs().max(r.abs()));
            if (l - r).abs() <= tol {
                let uncertainty = ul.max(*ur).max(0.5 * (l - r).abs());
                let mut value = 0.5 * (l + r);
                // indistinguishable from zero at the estimated precision
                if value.abs() <= uncertainty {
                    value = 0.0;
                }
                Verdict::Differentiable { value, uncertainty }
            } else {
                Verdict::Corner {
                    left_slope: *l,
                    right_slope: *r,
                }
            }
        }
        (Diverges { sign: a }, Diverges { sign: b }) if a == b => {
            Verdict::VerticalTangent { sign: *a }
        }
        (Diverges { .. }, Diverges { .. }) => Verdict::Cusp,
        _ => {
            let mut parts = Vec::new();
            for (name, side) in [("left", left), ("right", right)] {
                match side {
                    Unsettled { reason } => parts.push(format!("{name} side: {reason}")),
                    Converges { limit, .. } => {
                        parts.push(format!("{name} side converges to {limit:e}"))
                    }
                    Diverges { sign } => parts.push(format!(
                        "{name} side diverges to {}inf",
                        if *sign > 0 { "+" } else { "-" }
                    )),
                }
            }
            Verdict::Inconclusive {
                diagnostic: parts.join("; "),
            }
        }
    }
}

/// The trailing run of defined quotients among steps `>= H_FLOOR`.
fn usable_window(schedule: &[f64], qs: &[EvalOutcome]) -> Vec<(f64, f64)> {
    let mut window: Vec<(f64, f64)> = schedule
        .iter()
        .zip(qs)
        .filter(|(&h, _)| h >= H_FLOOR)
        .map(|(&h, q)| (h, q.value().unwrap_or(f64::NAN)))
        .collect();
    let start = window
        .iter()
        .rposition(|(_, q)| q.is_nan())
        .map_or(0, |i| i + 1);
    window.drain(..start);
    window
}

fn side_behavior(schedule: &[f64], qs: &[EvalOutcome], p: &QuotientProbe) -> SideBehavior {
    let window = usable_window(schedule, qs);
    if window.len() < MIN_WINDOW {
        return SideBehavior::Unsettled {
            reason: "insufficient samples".into(),
        };
    }
    if let Some((limit, uncertainty)) = convergent_limit(&window, p) {
        return SideBehavior::Converges { limit, uncertainty };
    }
    if let Some(sign) = divergence_sign(&window) {
        return SideBehavior::Diverges { sign };
    }
    SideBehavior::Unsettled {
        reason: "quotients neither converge nor diverge".into(),
    }
}

/// Rounding noise expected in the quotient at step `h`.
fn noise(h: f64, q: f64, p: &QuotientProbe) -> f64 {
    let fx = (p.f0 + q * h).abs();
    NOISE_ULPS * f64::EPSILON * ((p.f0.abs() + fx) / h + q.abs()) + 2.0 * p.f0_noise / h
}

fn convergent_limit(window: &[(f64, f64)], p: &QuotientProbe) -> Option<(f64, f64)> {
    let n = window.len();
    let deltas: Vec<f64> = (1..n)
        .map(|j| (window[j].1 - window[j - 1].1).abs())
        .collect();
    let noises: Vec<f64> = (1..n).map(|j| noise(window[j].0, window[j].1, p)).collect();

    let (_, q_last) = window[n - 1];
    let tol = CONVERGENCE_TOL.max(CONVERGENCE_TOL * q_last.abs());
    let d_last = deltas[n - 2];
    // a final delta within rounding noise is as settled as doubles allow
    let raw_settled = d_last <= tol.max(2.0 * noises[n - 2]);
    // with a large second derivative the raw deltas stay above tol down to
    // the step floor, while the first-order extrapolants have settled
    let level1 = |i: usize| 2.0 * window[i].1 - window[i - 1].1;
    let extrapolated_settled =
        (level1(n - 1) - level1(n - 2)).abs() <= tol.max(6.0 * noises[n - 2]);
    let floor = |j: usize| tol.max(2.0 * noises[j]);
    if !(raw_settled || extrapolated_settled) || !shrinks(&deltas, floor) {
        return geometric_limit(window, &noises, tol);
    }

    // extrapolate where the estimated error (truncation + noise) is least
    let k = (2..n)
        .min_by(|&a, &b| {
            let ea = deltas[a - 1] + noises[a - 1];
            let eb = deltas[b - 1] + noises[b - 1];
            ea.total_cmp(&eb).then(b.cmp(&a))
        })
        .unwrap_or(n - 1);
    Some(richardson(window, k, tol))
}

/// Mean log shrink over the trailing half of the window, where the
/// asymptotic regime lives, is at most `ln SHRINK_FACTOR`. Only pairs whose
/// first delta stands above `floor` count; dropping below the floor counts
/// as at least a first-order shrink.
fn shrinks(deltas: &[f64], floor: impl Fn(usize) -> f64) -> bool {
    let mut log_sum = 0.0;
    let mut pairs = 0usize;
    for j in (deltas.len() / 2).max(1)..deltas.len() {
        let (prev, cur) = (deltas[j - 1], deltas[j]);
        if prev > floor(j - 1) {
            let mut ratio = cur / prev;
            if cur <= floor(j) {
                ratio = ratio.min(STEP_RATIO);
            }
            log_sum += ratio.ln();
            pairs += 1;
        }
    }
    pairs == 0 || log_sum / pairs as f64 <= SHRINK_FACTOR.ln()
}

/// Limit of a tail that approaches geometrically, `q_k = L + C*rho^k`,
/// as at `x*cbrt(x)` where `q(h) = h^(1/3)` shrinks too slowly for the
/// delta test. The last `GEOMETRIC_TAIL` deltas must keep one sign, stand
/// above the noise, and shrink by consistent ratios below
/// `GEOMETRIC_MAX_RATIO`; the limit is Aitken's extrapolation, accepted
/// when its last two values agree within tolerance.
fn geometric_limit(window: &[(f64, f64)], noises: &[f64], tol: f64) -> Option<(f64, f64)> {
    let n = window.len();
    if n < GEOMETRIC_TAIL + 1 {
        return None;
    }
    let q = |i: usize| window[i].1;
    let d = |i: usize| q(i) - q(i - 1);
    let first = n - GEOMETRIC_TAIL;
    let mut ratios = Vec::new();
    for i in first..n {
        if d(i).abs() <= 2.0 * noises[i - 1] {
            return None;
        }
        if i > first {
            ratios.push(d(i) / d(i - 1));
        }
    }
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo <= 0.0 || hi >= GEOMETRIC_MAX_RATIO || hi - lo > GEOMETRIC_RATIO_SPREAD {
        return None;
    }
    let aitken = |i: usize| q(i) - d(i) * d(i) / (d(i) - d(i - 1));
    let (a, b) = (aitken(n - 1), aitken(n - 2));
    let spread = (a - b).abs();
    (spread <= tol.max(a.abs() * CONVERGENCE_TOL)).then_some((a, spread.max(4.0 * noises[n - 2])))
}

/// Two levels of Richardson extrapolation ending at index `k`.
fn richardson(window: &[(f64, f64)], k: usize, tol: f64) -> (f64, f64) {
    let r = STEP_RATIO;
    let q = |i: usize| window[i].1;
    let level1 = |i: usize| q(i) + (q(i) - q(i - 1)) * r / (1.0 - r);
    let r2 = r * r;
    let first = level1(k);
    let second = first + (first - level1(k - 1)) * r2 / (1.0 - r2);
    let raw = q(k);
    if (second - raw).abs() > 10.0 * tol {
        (raw, (second - raw).abs())
    } else {
        (second, (second - first).abs())
    }
}

fn divergence_sign(window: &[(f64, f64)]) -> Option<i8> {
    if window.iter().any(|&(_, q)| q == 0.0) {
        return None;
    }
    let n = window.len();
    // the sign must hold steady over the second half of the window
    let sign = window[n - 1].1.signum();
    if window[n / 2..].iter().any(|&(_, q)| q.signum() != sign) {
        return None;
    }
    let pts: Vec<(f64, f64)> = window
        .iter()
        .map(|&(h, q)| (h.ln(), q.abs().ln()))
        .collect();
    let (slope, rms) = fit_line(&pts);
    if slope > DIVERGENCE_SLOPE || rms > DIVERGENCE_RESIDUAL {
        return None;
    }
    let first = window[0].1.abs();
    let last = window[n - 1].1.abs();
    if last >= DIVERGENCE_FLOOR || last >= DIVERGENCE_GROWTH * first {
        Some(if sign > 0.0 { 1 } else { -1 })
    } else {
        None
    }
}

/// Least-squares slope and RMS residual.
fn fit_line(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = pts
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    (slope, (ss / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn verdict(src: &str, x0: f64) -> Verdict {
        classify(&probe(&parse(src).unwrap(), x0).unwrap())
    }

    #[test]
    fn schedule_shape() {
        let s = schedule();
        assert_eq!(s.len(), 40);
        assert_eq!(s[0], 0.1);
        assert!(s.windows(2).all(|w| w[1] < w[0] && w[1] > 0.0));
        assert_eq!(s.iter().filter(|&&h| h >= H_FLOOR).count(), 24);
    }

    #[test]
    fn identity_quotients_are_exactly_one() {
        let p = probe(&parse("x").unwrap(), 0.0).unwrap();
        assert!(p
            .right
            .iter()
            .chain(&p.left)
            .all(|q| *q == EvalOutcome::Defined(1.0)));
        assert_eq!(
            classify(&p),
            Verdict::Differentiable {
                value: 1.0,
                uncertainty: 0.0
            }
        );
    }

    #[test]
    fn problem_function_is_flat_at_origin() {
        match verdict("cbrt(x)*sin(x^2)", 0.0) {
            Verdict::Differentiable { value, .. } => assert!(value.abs() <= 1e-6, "{value}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn counterexample_has_vertical_tangent() {
        assert_eq!(
            verdict("cbrt(x)*cos(x^2)", 0.0),
            Verdict::VerticalTangent { sign: 1 }
        );
    }

    #[test]
    fn taxonomy() {
        assert_eq!(
            verdict("abs(x)", 0.0),
            Verdict::Corner {
                left_slope: -1.0,
                right_slope: 1.0
            }
        );
        assert_eq!(verdict("cbrt(x^2)", 0.0), Verdict::Cusp);
        assert_eq!(
            verdict("cbrt(x)", 0.0),
            Verdict::VerticalTangent { sign: 1 }
        );
        assert_eq!(
            verdict("-cbrt(x)", 0.0),
            Verdict::VerticalTangent { sign: -1 }
        );
    }

    #[test]
    fn smooth_points() {
        for (src, x0, want) in [
            ("sin(x)", 1.0, 1f64.cos()),
            ("exp(x)", 0.5, 0.5f64.exp()),
            ("1000 + 3*x", 0.7, 3.0),
            ("ln(x)", 2.0, 0.5),
        ] {
            let got = verdict(src, x0).derivative().unwrap_or(f64::NAN);
            assert!(
                (got - want).abs() <= 1e-6 * want.abs().max(1.0),
                "{src}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn one_sided_domain_is_inconclusive() {
        let v = verdict("sqrt(x)", 0.0);
        match v {
            Verdict::Inconclusive { diagnostic } => {
                assert!(
                    diagnostic.contains("left side: insufficient samples"),
                    "{diagnostic}"
                )
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn oscillation_is_inconclusive() {
        // quotient at 0 is sin(1/h^2) + ..., which never settles
        let v = verdict("abs(x)*sin(1/(abs(x) + 0.0000000000001))", 0.0);
        assert!(matches!(v, Verdict::Inconclusive { .. }), "{v:?}");
    }

    #[test]
    fn slow_power_law_limits() {
        // q(h) = |h|^p with p in {1/3, 1/2, 2/3}
        for src in ["x*cbrt(x)", "x*abs(x)^0.5", "sin(x)*cbrt(x^2)"] {
            match verdict(src, 0.0) {
                Verdict::Differentiable { value, .. } => {
                    assert!(value.abs() < 1e-9, "{src}: {value}")
                }
                other => panic!("{src}: {other:?}"),
            }
        }
    }

    #[test]
    fn logarithmic_drift_is_not_a_limit() {
        // q(h) = ln|h| drifts by ln 2 per halving
        let v = verdict("x*ln(abs(x) + 0.000000000000000000001)", 0.0);
        assert!(matches!(v, Verdict::Inconclusive { .. }), "{v:?}");
    }

    #[test]
    fn cancellation_noise_does_not_block_convergence() {
        // x - x*c loses digits to the intermediate x*c
        match verdict("x - x*cos(0.1)", 1.2990187187991884) {
            Verdict::Differentiable { value, .. } => {
                assert!((value - (1.0 - 0.1f64.cos())).abs() < 1e-8)
            }
            other => panic!("{other:?}"),
        }
        match verdict("sin(exp(7) + x*7)", 1.4717259000576615) {
            Verdict::Differentiable { value, .. } => {
                let want = 7.0 * (7f64.exp() + 7.0 * 1.4717259000576615).cos();
                assert!(
                    (value - want).abs() < 1e-4 * want.abs(),
                    "{value} vs {want}"
                )
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn undefined_base_point() {
        assert!(matches!(
            probe(&parse("ln(x)").unwrap(), 0.0),
            Err(Error::UndefinedAtPoint { .. })
        ));
    }
}
