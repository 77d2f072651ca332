import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from orlicz.core import (GridSpec, PowerFunction, check_axioms, check_delta2,
                         check_delta2plus, classify_second_derivative_at_zero,
                         evaluate, orlicz_from_json, power, power_log)
from orlicz.errors import (DomainError, UndefinedDerivativeError,
                           ZeroClassMismatchError)


def test_evaluate_normalization(p2):
    assert evaluate(p2, 1.0, 0) == 1.0
    assert evaluate(p2, 0.0, 0) == 0.0


def test_evaluate_second_derivative_closed_form(p3):
    # p (p-1) u**(p-2) at p=3, u=2
    assert evaluate(p3, 2.0, 2) == pytest.approx(12.0, abs=1e-12)


def test_evaluate_domain_errors(p2):
    with pytest.raises(DomainError):
        evaluate(p2, -0.5, 0)
    with pytest.raises(DomainError):
        evaluate(p2, p2.u_max * 2.0, 0)
    with pytest.raises(ValueError):
        evaluate(p2, 1.0, 3)


def test_axioms_power_pass(p2, p15):
    assert check_axioms(p2).passed
    assert check_axioms(p15).passed


def test_axioms_linear_fails_ratio_limit():
    report = check_axioms(power(1))
    assert not report.passed
    assert not report.details["checks"]["ratio_vanishes_at_zero"]


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 4.0])
def test_delta2_witness_is_exponent(p):
    report = check_delta2(power(p))
    assert report.passed
    assert report.witness_sup == pytest.approx(p, abs=1e-9)
    assert report.details["min_ratio"] > 1.0
    assert report.details["doubling_ok"]


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 4.0])
def test_delta2plus_witness_is_exponent_minus_one(p):
    report = check_delta2plus(power(p))
    assert report.passed
    assert report.witness_sup == pytest.approx(p - 1.0, abs=1e-9)


def test_delta2_fails_for_exponential_growth(expfn):
    # evaluation is clipped to the trusted bound, where the growth ratio
    # is still climbing with the grid top
    report = check_delta2(expfn, grid=GridSpec(u_max=2.0 ** 20))
    assert not report.passed
    assert report.details["clipped_to"] == expfn.u_max
    assert report.witness_sup > 100.0
    assert report.details["min_ratio"] > 1.0


def test_power_log_passes_both_conditions(plog2):
    assert check_axioms(plog2).passed
    d2 = check_delta2(plog2)
    assert d2.passed and 2.0 < d2.witness_sup < 3.0
    assert check_delta2plus(plog2).passed


def test_polynomial_growth_bound():
    # a passing growth check caps M by C u**sup above u0
    for phi in (power(2), power(3), power_log(2)):
        report = check_delta2(phi)
        u0 = report.u0_used
        u = report.grid_spec.points(limit=phi.u_max, lower=u0)
        c = float(phi.m0(np.array([u0]))[0]) / u0 ** report.witness_sup * 1.01
        assert np.all(phi.m0(u) <= c * u ** report.witness_sup)


@pytest.mark.parametrize("p,expected", [
    (4.0, "zero"), (1.5, "infinite"), (2.0, "finite_positive")])
def test_classify_small_argument_curvature(p, expected):
    assert classify_second_derivative_at_zero(power(p)) == expected


def test_classify_catalog_entries(plog2, expfn):
    assert classify_second_derivative_at_zero(plog2) == "finite_positive"
    assert classify_second_derivative_at_zero(expfn) == "finite_positive"


def test_classify_rejects_misdeclared_entry():
    bad = PowerFunction(p=4.0, zero_class="infinite")
    with pytest.raises(ZeroClassMismatchError):
        classify_second_derivative_at_zero(bad)


def test_derivative_consistency_with_finite_differences():
    # M' against a central difference of M, and M'' against one of M',
    # at relative tolerance 1e-6 with step 1e-5 max(1, u).  The grid stays
    # above 0.25: for exponents below 2 the fourth derivative grows like
    # u**(p-4), so the fixed step cannot resolve M'' closer to 0.
    u = np.geomspace(0.25, 1e3, 120)
    h = 1e-5 * np.maximum(1.0, u)
    for phi in (power(1.5), power(2), power(3), power_log(2), power_log(3)):
        fd1 = (phi.m0(u + h) - phi.m0(u - h)) / (2 * h)
        m1 = phi.m1(u)
        assert np.all(np.abs(m1 - fd1) <= 1e-6 * np.maximum(1.0, np.abs(m1)))
        fd2 = (phi.m1(u + h) - phi.m1(u - h)) / (2 * h)
        m2 = phi.m2(u)
        assert np.all(np.abs(m2 - fd2) <= 1e-6 * np.maximum(1.0, np.abs(m2)))


@given(p=st.floats(1.05, 6.0), u=st.floats(1e-6, 1e6))
def test_growth_ratio_exceeds_one(p, u):
    phi = power(p)
    arr = np.array([u])
    ratio = float(u * phi.m1(arr)[0] / phi.m0(arr)[0])
    assert ratio > 1.0


def test_grid_spec_points_and_extras():
    g = GridSpec(u_min=1.0, u_max=16.0, points_per_octave=2, extra=(3.3, 99.0))
    pts = g.points()
    assert pts[0] == 1.0 and pts[-1] == 16.0
    assert 3.3 in pts and 99.0 not in pts
    assert np.all(np.diff(pts) > 0)
    clipped = g.points(limit=8.0)
    assert clipped[-1] == 8.0


def test_json_roundtrip_catalog(p2, plog2, expfn):
    for phi in (p2, plog2, expfn):
        doc = json.loads(json.dumps(phi.to_json()))
        back = orlicz_from_json(doc)
        u = np.geomspace(1e-6, 10.0, 50)
        assert np.array_equal(back.m0(u), phi.m0(u))
        assert back.zero_class == phi.zero_class


def test_condition_report_serializes(p2):
    doc = check_delta2(p2).to_json()
    json.dumps(doc)
    assert doc["condition"] == "delta2"


def test_kink_evaluation_raises(p3):
    from orlicz.constructions import build_delta2plus_equivalent
    built = build_delta2plus_equivalent(p3)
    kinks = built.derivative_kink_points()
    assert 2.0 in kinks
    with pytest.raises(UndefinedDerivativeError):
        evaluate(built, 2.0, 2)
    # order 0/1 stay defined at the kink
    assert evaluate(built, 2.0, 1) == pytest.approx(float(p3.m1(np.array([2.0]))[0]))
