mod common;

use common::{central_difference, quotient_table, regular_samples, value, within};
use deriv_audit::probe::probe_and_classify;
use deriv_audit::{parse, Verdict};

#[test]
fn symbolic_derivative_matches_central_difference() {
    let samples = regular_samples(0xD1FF, 1000, 6);
    let failures: Vec<String> = samples
        .iter()
        .filter_map(|(f, fp, x)| {
            let got = value(fp, *x).unwrap();
            let want = central_difference(f, *x, 1e-6).unwrap();
            (!within(got, want, 1e-5, 1e-5)).then(|| format!("{f} at {x}: {got} vs {want}"))
        })
        .collect();
    assert!(
        failures.is_empty(),
        "{} failures:\n{}",
        failures.len(),
        failures.join("\n")
    );
}

#[test]
fn probe_agrees_with_symbolic_derivative() {
    let samples = regular_samples(0x9809E, 500, 4);
    let mut failures = Vec::new();
    for (f, fp, x0) in &samples {
        let want = value(fp, *x0).unwrap();
        match probe_and_classify(f, *x0).unwrap().verdict {
            Verdict::Differentiable { value, .. } if within(value, want, 1e-4, 1e-4) => {}
            v => failures.push(format!("{f} at {x0}: {v} vs {want}")),
        }
    }
    assert!(
        failures.is_empty(),
        "{} failures:\n{}",
        failures.len(),
        failures.join("\n")
    );
}

#[test]
fn counterexample_quotients_are_positive_and_increasing() {
    let g = |x: f64| x.cbrt() * (x * x).cos();
    for sign in [1.0, -1.0] {
        let q = quotient_table(g, 0.0, sign, 0..=30);
        assert!(q.iter().all(|&v| v > 0.0), "{q:?}");
        assert!(q.windows(2).all(|w| w[1] > w[0]), "{q:?}");
    }
    let f = parse("cbrt(x)*cos(x^2)").unwrap();
    let v = probe_and_classify(&f, 0.0).unwrap().verdict;
    assert_eq!(v, Verdict::VerticalTangent { sign: 1 });
}

#[test]
fn taxonomy_matches_quotient_tables() {
    // one-sided tables straight from f64 arithmetic, independent of the parser
    let ks = 0..=23;
    let abs_r = quotient_table(f64::abs, 0.0, 1.0, ks.clone());
    let abs_l = quotient_table(f64::abs, 0.0, -1.0, ks.clone());
    assert!(abs_r.iter().all(|&q| q == 1.0) && abs_l.iter().all(|&q| q == -1.0));
    let v = probe_and_classify(&parse("abs(x)").unwrap(), 0.0)
        .unwrap()
        .verdict;
    match v {
        Verdict::Corner {
            left_slope,
            right_slope,
        } => {
            assert!((left_slope + 1.0).abs() <= 1e-6 && (right_slope - 1.0).abs() <= 1e-6)
        }
        v => panic!("abs: {v}"),
    }

    let cusp = |x: f64| (x * x).cbrt();
    let r = quotient_table(cusp, 0.0, 1.0, ks.clone());
    let l = quotient_table(cusp, 0.0, -1.0, ks.clone());
    assert!(r.windows(2).all(|w| w[1] > w[0] && w[1] > 0.0));
    assert!(l.windows(2).all(|w| w[1] < w[0] && w[1] < 0.0));
    let v = probe_and_classify(&parse("cbrt(x^2)").unwrap(), 0.0)
        .unwrap()
        .verdict;
    assert_eq!(v, Verdict::Cusp);

    let r = quotient_table(f64::cbrt, 0.0, 1.0, ks.clone());
    let l = quotient_table(f64::cbrt, 0.0, -1.0, ks.clone());
    assert!(r.windows(2).all(|w| w[1] > w[0]) && l.windows(2).all(|w| w[1] > w[0]));
    assert!(r[23] > 1e4 && l[23] > 1e4);
    let v = probe_and_classify(&parse("cbrt(x)").unwrap(), 0.0)
        .unwrap()
        .verdict;
    assert_eq!(v, Verdict::VerticalTangent { sign: 1 });

    let sq = |x: f64| x * x;
    let r = quotient_table(sq, 0.0, 1.0, ks.clone());
    let l = quotient_table(sq, 0.0, -1.0, ks);
    assert!(r[23].abs() < 1e-7 && l[23].abs() < 1e-7);
    match probe_and_classify(&parse("x^2").unwrap(), 0.0)
        .unwrap()
        .verdict
    {
        Verdict::Differentiable { value, .. } => assert!(value.abs() <= 1e-6),
        v => panic!("x^2: {v}"),
    }
}

#[test]
fn worked_example_limit_is_zero() {
    let f = |x: f64| x.cbrt() * (x * x).sin();
    for sign in [1.0, -1.0] {
        let q = quotient_table(f, 0.0, sign, 0..=23);
        assert!(q.windows(2).all(|w| w[1].abs() < w[0].abs()), "{q:?}");
        assert!(q[23].abs() < 1e-10);
    }
    match probe_and_classify(&parse("cbrt(x)*sin(x^2)").unwrap(), 0.0)
        .unwrap()
        .verdict
    {
        Verdict::Differentiable { value, .. } => assert!(value.abs() <= 1e-6),
        v => panic!("{v}"),
    }
}
