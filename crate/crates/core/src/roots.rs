//! Grid scans for zeros of partially defined real functions.

use crate::expr::Interval;

/// Two roots closer than this are the same root.
pub const DEDUP_TOL: f64 = 1e-9;

/// Grid values below this magnitude without a sign change are reported as
/// possible even-multiplicity roots.
pub const TOUCH_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RootScan {
    /// Sign-change and exact grid roots, ascending.
    pub roots: Vec<f64>,
    /// Grid points where the function nearly vanishes without changing sign.
    pub unconfirmed: Vec<f64>,
}

/// Sorts ascending and drops points within [`DEDUP_TOL`] of the previous
/// kept point.
pub fn dedup_sorted(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(xs.len());
    for x in xs {
        if out.last().is_none_or(|&last| x - last > DEDUP_TOL) {
            out.push(x);
        }
    }
    out
}

/// Bisects a sign change of `g` on `[a, b]` down to adjacent floats.
///
/// Returns `None` when `g` is undefined at a probed midpoint; the bracket
/// then straddles a hole rather than a root.
pub fn bisect(g: &impl Fn(f64) -> Option<f64>, mut a: f64, mut b: f64) -> Option<f64> {
    let mut ga = g(a)?;
    let mut gb = g(b)?;
    if ga == 0.0 {
        return Some(a);
    }
    if gb == 0.0 {
        return Some(b);
    }
    debug_assert!(ga.signum() != gb.signum());
    for _ in 0..2200 {
        let m = a + (b - a) / 2.0;
        if m <= a || m >= b {
            break;
        }
        let gm = g(m)?;
        if gm == 0.0 {
            return Some(m);
        }
        if gm.signum() == ga.signum() {
            a = m;
            ga = gm;
        } else {
            b = m;
            gb = gm;
        }
    }
    Some(if ga.abs() <= gb.abs() { a } else { b })
}

/// Finds zeros of `g` on the `n`-cell grid over `iv`: exact grid zeros plus
/// one bisected root per sign change between adjacent defined nodes.
pub fn sign_change_roots(g: impl Fn(f64) -> Option<f64>, iv: Interval, n: usize) -> RootScan {
    let xs = iv.grid(n);
    let vs: Vec<Option<f64>> = xs.iter().map(|&x| g(x)).collect();
    let mut roots = Vec::new();
    let mut near = Vec::new();
    for i in 0..xs.len() {
        let Some(v) = vs[i] else { continue };
        if v == 0.0 {
            roots.push(xs[i]);
            continue;
        }
        if i + 1 < xs.len() {
            if let Some(w) = vs[i + 1] {
                if w != 0.0 && v.signum() != w.signum() {
                    if let Some(r) = bisect(&g, xs[i], xs[i + 1]) {
                        roots.push(r);
                    }
                }
            }
        }
        if v.abs() < TOUCH_TOL {
            let crosses = |j: Option<usize>| {
                j.and_then(|j| vs[j])
                    .is_some_and(|w| w != 0.0 && w.signum() != v.signum())
            };
            if !crosses(i.checked_sub(1)) && !crosses(Some(i + 1).filter(|&j| j < xs.len())) {
                near.push(xs[i]);
            }
        }
    }
    let roots = dedup_sorted(roots);
    let unconfirmed = dedup_sorted(near)
        .into_iter()
        .filter(|u| roots.iter().all(|r| (r - u).abs() > DEDUP_TOL))
        .collect();
    RootScan { roots, unconfirmed }
}

/// Locations of local minima of `|g|` on the grid that do not straddle a
/// sign change, each refined by golden-section search on the two adjacent
/// cells. These are where touching zeros (like `x^2` at 0) hide.
pub fn touch_points(g: impl Fn(f64) -> Option<f64>, iv: Interval, n: usize) -> Vec<f64> {
    let xs = iv.grid(n);
    let vs: Vec<Option<f64>> = xs.iter().map(|&x| g(x).map(f64::abs)).collect();
    let mut out = Vec::new();
    for i in 0..xs.len() {
        let Some(v) = vs[i] else { continue };
        let left = if i > 0 { vs[i - 1] } else { None };
        let right = vs.get(i + 1).copied().flatten();
        let not_above = |o: Option<f64>| o.is_none_or(|w| v <= w);
        let strictly_below = |o: Option<f64>| o.is_some_and(|w| v < w);
        if v == 0.0 {
            out.push(xs[i]);
            continue;
        }
        if !(not_above(left) && not_above(right) && (strictly_below(left) || strictly_below(right)))
        {
            continue;
        }
        let lo = if i > 0 { xs[i - 1] } else { xs[i] };
        let hi = if i + 1 < xs.len() { xs[i + 1] } else { xs[i] };
        out.push(golden_min(&g, lo, hi, xs[i]));
    }
    dedup_sorted(out)
}

fn golden_min(g: &impl Fn(f64) -> Option<f64>, mut a: f64, mut b: f64, fallback: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let cost = |x: f64| g(x).map_or(f64::INFINITY, f64::abs);
    let mut best = (cost(fallback), fallback);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (cost(c), cost(d));
    for _ in 0..200 {
        if !(a < c && c < d && d < b) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = cost(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = cost(d);
        }
        for (f, x) in [(fc, c), (fd, d)] {
            if f < best.0 {
                best = (f, x);
            }
        }
        if best.0 == 0.0 {
            break;
        }
    }
    best.1
}

/// Short decimals within `tol` of `x`: `x` rounded to 0 through 15
/// decimal places.
///
/// A root refined in floating point lands next to, not on, the literal
/// `0.3`; these are the values an exact zero is most likely to sit at.
pub fn decimal_snaps(x: f64, tol: f64) -> Vec<f64> {
    let mut out = vec![x];
    for k in 0..=15 {
        let scale = 10f64.powi(k);
        let s = (x * scale).round() / scale;
        if s.is_finite() && (s - x).abs() <= tol * x.abs().max(1.0) {
            out.push(s + 0.0);
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn finds_simple_roots() {
        let scan = sign_change_roots(|x| Some(x * x - 0.5), iv(-1.0, 1.0), 100);
        assert_eq!(scan.roots.len(), 2);
        assert!((scan.roots[1] - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((scan.roots[0] + 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn exact_grid_zero() {
        let scan = sign_change_roots(|x| Some(2.0 * x), iv(-1.0, 1.0), 10);
        assert_eq!(scan.roots, vec![0.0]);
    }

    #[test]
    fn pole_is_not_a_root_when_hole_is_hit() {
        let g = |x: f64| if x == 0.0 { None } else { Some(1.0 / x) };
        // bisection of [-0.1, 0.1] walks straight into x = 0
        assert_eq!(bisect(&g, -0.1, 0.1), None);
    }

    #[test]
    fn touching_zero_is_flagged_not_rooted() {
        let scan = sign_change_roots(|x| Some((x - 0.3).powi(2) * 1e-8), iv(-1.0, 1.0), 8);
        assert!(scan.roots.is_empty());
        assert_eq!(scan.unconfirmed, vec![0.25]);
        let scan = sign_change_roots(|x| Some((x - 0.3).powi(2)), iv(-1.0, 1.0), 8);
        assert!(scan.roots.is_empty());
        let pts = touch_points(|x| Some((x - 0.3).powi(2)), iv(-1.0, 1.0), 8);
        assert_eq!(pts.len(), 1);
        assert!((pts[0] - 0.3).abs() < 1e-7);
        assert!(decimal_snaps(pts[0], 1e-6).contains(&0.3));
    }

    #[test]
    fn constant_has_no_touch_points() {
        assert!(touch_points(|_| Some(3.0), iv(-1.0, 1.0), 16).is_empty());
    }

    #[test]
    fn dedup() {
        assert_eq!(
            dedup_sorted(vec![0.5, 0.0, 1e-12, 0.5 + 1e-10]),
            vec![0.0, 0.5]
        );
    }
}
