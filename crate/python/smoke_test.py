"""Smoke test for the deriv_audit extension module.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`,
then run `python python/smoke_test.py`.
"""

import json
import math
import os
import tempfile

import deriv_audit as da

X_STAR = 0.6302761809073697


def main():
    f = da.parse("cbrt(x)*sin(x^2)")
    assert str(f) == "cbrt(x)*sin(x^2)"
    assert da.parse(da.format(f)) == f
    assert f.evaluate(0.0) == 0.0
    assert f(1.0) == math.sin(1.0)

    fp = da.differentiate(f)
    assert fp.evaluate(0.0) is None
    assert fp.undefined_reason(0.0) == "DivByZero"
    assert abs(fp.evaluate(1.0) - 1.3610949400055783) < 1e-12

    [c] = da.scan(f, -1.0, 1.0)
    assert c.x0 == 0.0 and c.source_functions == ["cbrt(x)"]

    v = da.classify(f, 0.0)
    assert v.kind == "Differentiable" and abs(v.value) <= 1e-6

    p = da.probe(da.parse("cbrt(x)*cos(x^2)"), 0.0)
    assert p.verdict.kind == "VerticalTangent" and p.verdict.sign == 1
    assert all(q > 0 for q in p.right if q is not None)
    assert da.classify(da.parse("abs(x)"), 0.0).kind == "Corner"
    assert da.classify(da.parse("cbrt(x^2)"), 0.0).kind == "Cusp"

    roots = da.find_expression_roots(da.differentiate(da.parse("cbrt(x)*cos(x^2)")), -1.0, 1.0)
    assert len(roots) == 2 and abs(roots[1] - X_STAR) < 1e-12

    report = da.analyze("cbrt(x)*sin(x^2)", -1.0, 1.0)
    assert report.naive_tangents == []
    assert [(t.x, t.provenance) for t in report.tangents] == [(0.0, "RepairedByDefinition")]
    assert len(report.pieces) == 2 and report.pieces[1][1:] == (0.0, None, 0.0)
    assert json.loads(report.to_json())["tangents"][0]["x"] == 0.0
    assert report.to_json() == da.analyze("cbrt(x)*sin(x^2)", -1.0, 1.0).to_json()

    point = da.classify_point("abs(x)", 0.0)
    assert point.verdict.left_slope == -1.0 and point.verdict.right_slope == 1.0

    assert da.plot_csv(da.parse("x"), -1.0, 1.0, 2) == "x,f,fprime\n-1,-1,1\n0,0,1\n1,1,1\n"
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "plot.csv")
        da.emit_plot_data(f, -1.0, 1.0, path, 10)
        with open(path) as fh:
            assert fh.readline().strip() == "x,f,fprime"
        try:
            da.emit_plot_data(f, -1.0, 1.0, os.path.join(d, "no", "plot.csv"))
            raise AssertionError("expected OSError")
        except OSError:
            pass

    try:
        da.parse("sin(x")
        raise AssertionError("expected ParseError")
    except da.ParseError as e:
        assert e.args[1] == 5
    try:
        da.analyze("x", 1.0, -1.0)
        raise AssertionError("expected AnalysisError")
    except da.AnalysisError:
        pass

    print("smoke test passed")


if __name__ == "__main__":
    main()
