"""Cubic calibration: evaluation, inversion, fitting and run aggregation."""
import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from scipy.optimize import brentq

from foottile.calibration import (PUBLISHED_CURVE, CalibrationCurve, IndentationRun,
                                  aggregate_runs, check_monotone, evaluate, fit_cubic,
                                  invert, normalize)
from foottile.errors import AggregationError, FitError, RangeError
from foottile.sensor_model import REFERENCE_DESIGN

P = PUBLISHED_CURVE


def test_normalize_examples():
    assert normalize(100.0, REFERENCE_DESIGN) == 0.0
    assert normalize(115.0, REFERENCE_DESIGN) == 1.0
    assert normalize(107.5, REFERENCE_DESIGN) == pytest.approx(0.5)


def test_evaluate_published_coefficients():
    assert evaluate(P, 0.0) == pytest.approx(0.1309)
    assert evaluate(P, 1.0) == pytest.approx(0.13 + 0.02354 + 0.5702 + 0.1309)
    assert evaluate(P, 1.0) == pytest.approx(0.85464)
    assert evaluate(P, 0.5) == pytest.approx(0.13 / 8 + 0.02354 / 4 + 0.5702 / 2 + 0.1309)
    # hand sum: 0.01625 + 0.005885 + 0.2851 + 0.1309
    assert evaluate(P, 0.5) == pytest.approx(0.438135, abs=1e-12)
    assert P.r_squared == 0.9999


def test_invert_examples():
    assert invert(P, evaluate(P, 0.3)) == pytest.approx(0.3, abs=1e-8)
    assert invert(P, evaluate(P, 1.0)) == pytest.approx(1.0, abs=1e-12)
    assert invert(P, 0.438135) == pytest.approx(0.5, abs=1e-9)


def test_invert_matches_brentq():
    for f in np.linspace(evaluate(P, 0.0), evaluate(P, 1.0), 37):
        root = brentq(lambda p: evaluate(P, p) - f, 0.0, 1.0, xtol=1e-15)
        assert invert(P, f) == pytest.approx(root, abs=1e-12)


def test_invert_is_vectorised():
    p = np.linspace(0.0, 1.0, 11)
    np.testing.assert_allclose(invert(P, evaluate(P, p)), p, atol=1e-12)


@pytest.mark.parametrize("f", [0.0, 0.1, 0.9, float("nan")])
def test_invert_out_of_range(f):
    with pytest.raises(RangeError):
        invert(P, f)


@given(st.floats(0.0, 1.0))
def test_invert_evaluate_identity(p):
    assert invert(P, evaluate(P, p)) == pytest.approx(p, abs=1e-8)


def _run(curve, n=200, run_id="r"):
    p = np.linspace(0.0, 1.0, n)
    return IndentationRun(p, evaluate(curve, p), run_id)


def test_fit_recovers_published_coefficients():
    c = fit_cubic(_run(P))
    for got, want in zip((c.c3, c.c2, c.c1, c.c0), (0.13, 0.02354, 0.5702, 0.1309)):
        assert got == pytest.approx(want, abs=1e-6)
    assert c.r_squared >= 0.999999


def test_flat_fit_reports_unit_r_squared():
    p = np.linspace(0, 1, 20)
    c = fit_cubic(IndentationRun(p, np.zeros_like(p)))
    assert (c.c3, c.c2, c.c1, c.c0) == pytest.approx((0.0, 0.0, 0.0, 0.0), abs=1e-12)
    assert c.r_squared == 1.0


def test_fit_needs_four_distinct_pressures():
    with pytest.raises(FitError, match="rank"):
        fit_cubic(IndentationRun([0.1, 0.2, 0.3, 0.3, 0.1], [1, 2, 3, 3, 1]))


def test_fit_rejects_non_monotone_data():
    p = np.linspace(0, 1, 50)
    with pytest.raises(FitError, match="non-monotone"):
        fit_cubic(IndentationRun(p, 1.0 + np.sin(3 * p)))


def test_curve_validation():
    with pytest.raises(FitError):
        CalibrationCurve(0, 0, 1, 0, r_squared=1.5)
    with pytest.raises(FitError):
        check_monotone(CalibrationCurve(0, -1, 0.5, 0))


def _monotone_cubic():
    # derivative 3 a p^2 + 2 b p + c >= 0 on [0, 1] for a, c >= 0 and |b| small enough
    # and non-negative forces for c0 >= 0
    return st.tuples(st.floats(0.0, 5.0), st.floats(-0.5, 1.0), st.floats(1.0, 5.0),
                     st.floats(0.0, 2.0))


@given(_monotone_cubic())
def test_fit_idempotence(coef):
    curve = CalibrationCurve(*coef)
    fit = fit_cubic(_run(curve))
    for got, want in zip((fit.c3, fit.c2, fit.c1, fit.c0), coef):
        assert got == pytest.approx(want, rel=1e-6, abs=1e-9)


@given(_monotone_cubic(), st.floats(0.1, 100.0))
def test_fit_scale_equivariance(coef, k):
    p = np.linspace(0, 1, 60)
    f = evaluate(CalibrationCurve(*coef), p) + 0.01 * np.sin(40 * p)
    assume(np.all(np.diff(f) > 0))
    assume(np.all(f >= 0))
    a = fit_cubic(IndentationRun(p, f), check=False)
    b = fit_cubic(IndentationRun(p, k * f), check=False)
    for x, y in zip((a.c3, a.c2, a.c1, a.c0), (b.c3, b.c2, b.c1, b.c0)):
        assert y == pytest.approx(k * x, rel=1e-6, abs=1e-9)
    assert b.r_squared == pytest.approx(a.r_squared, abs=1e-9)


def test_identical_runs_have_zero_ci():
    runs = [_run(P, run_id=str(k)) for k in range(4)]
    agg = aggregate_runs(*runs)
    assert np.all(agg.ci95 == 0.0)
    # only the linear interpolation of the mean curve remains
    assert agg.pooled_std < 1e-4


def test_two_run_hand_computed_ci():
    f = np.linspace(0.0, 10.0, 11)
    agg = aggregate_runs(IndentationRun(np.full(11, 0.4), f), IndentationRun(np.full(11, 0.6), f))
    assert agg.mean == pytest.approx(np.full(101, 0.5))
    assert agg.std == pytest.approx(np.full(101, np.sqrt(0.02)))
    assert agg.std[0] == pytest.approx(0.1414, abs=1e-4)
    assert agg.ci95[0] == pytest.approx(0.196, abs=1e-3)


def test_pooled_std_of_noisy_runs():
    rng = np.random.default_rng(3)
    p = np.linspace(0, 1, 2000)
    f = evaluate(P, p) * 30
    runs = [IndentationRun(p + rng.normal(0, 0.03, p.size), f) for _ in range(4)]
    assert abs(aggregate_runs(*runs).pooled_std - 0.03) <= 0.01


def test_aggregation_errors():
    with pytest.raises(AggregationError):
        aggregate_runs(_run(P))
    a = IndentationRun([0.1, 0.2], [1.0, 2.0])
    b = IndentationRun([0.1, 0.2], [3.0, 4.0])
    with pytest.raises(AggregationError, match="disjoint"):
        aggregate_runs(a, b)


@given(st.permutations(range(4)))
def test_aggregation_permutation_invariant(order):
    rng = np.random.default_rng(1)
    p = np.linspace(0, 1, 300)
    runs = [IndentationRun(p + rng.normal(0, 0.02, p.size), evaluate(P, p) * (1 + 0.01 * k))
            for k in range(4)]
    a = aggregate_runs(*runs)
    b = aggregate_runs(*(runs[i] for i in order))
    np.testing.assert_allclose(a.mean, b.mean, rtol=0, atol=1e-12)
    np.testing.assert_allclose(a.ci95, b.ci95, rtol=0, atol=1e-12)
    assert a.pooled_std == pytest.approx(b.pooled_std, rel=1e-12)


def test_mean_within_run_envelope():
    f = np.linspace(0.0, 10.0, 50)
    runs = [IndentationRun(np.linspace(0, 1, 50) + d, f) for d in (-0.02, 0.0, 0.03)]
    agg = aggregate_runs(*runs)
    assert np.all(agg.mean >= agg.per_run.min(axis=0) - 1e-12)
    assert np.all(agg.mean <= agg.per_run.max(axis=0) + 1e-12)
    assert np.all(agg.ci95 >= 0)


def test_indentation_run_validation():
    with pytest.raises(ValueError):
        IndentationRun([0.1, 0.2], [1.0])
    with pytest.raises(ValueError):
        IndentationRun([0.1], [-1.0])
    with pytest.raises(ValueError):
        IndentationRun([2.0], [1.0])


def test_unsaturated_drops_clamped_samples():
    r = IndentationRun([0.1, 0.5, 1.0], [1, 2, 3], saturated=[False, False, True])
    assert len(r.unsaturated()) == 2
