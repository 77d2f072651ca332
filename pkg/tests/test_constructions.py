import json

import numpy as np
import pytest

from orlicz.constructions import (build_delta2plus_equivalent,
                                  build_delta2plus_violator, complementary,
                                  invert_derivative, verify_equivalence)
from orlicz.core import (GridSpec, check_delta2, check_delta2plus,
                         classify_second_derivative_at_zero, orlicz_from_json,
                         power)
from orlicz.errors import DomainError, PreconditionError
from orlicz.piecewise import PiecewiseOrlicz


@pytest.fixture(scope="module")
def eq2():
    return build_delta2plus_equivalent(power(2))


@pytest.fixture(scope="module")
def eq3():
    return build_delta2plus_equivalent(power(3))


@pytest.fixture(scope="module")
def viol2():
    return build_delta2plus_violator(power(2), 0.1)


def test_equivalent_matches_source_below_two(eq2, eq3, p2, p3):
    u = np.linspace(0.0, 2.0, 801)
    assert np.array_equal(eq2.m0(u), p2.m0(u))
    assert np.array_equal(eq3.m0(u), p3.m0(u))
    assert np.array_equal(eq2.m1(u), p2.m1(u))


def test_equivalent_derivative_is_doubled_chord_for_squares(eq2):
    # for the quadratic source every connector collapses to the source line
    u = np.geomspace(1e-3, 2.0 ** 22, 400)
    assert np.allclose(eq2.m1(u), 2.0 * u, rtol=1e-13)


@pytest.mark.parametrize("p", [2.0, 3.0])
def test_equivalent_envelope_and_curvature_bound(p):
    phi = power(p)
    built = build_delta2plus_equivalent(phi)
    u = np.geomspace(1e-6, 2.0 ** 20, 4000)
    m1v = built.m0(u)
    assert np.all(phi.m0(u / 2.0) <= m1v * (1 + 1e-12))
    assert np.all(m1v <= phi.m0(4.0 * p * u) * (1 + 1e-12))
    report = check_delta2plus(built)
    assert report.passed
    assert report.witness_sup <= 2.0 * p * 2.0 ** p


def test_equivalent_monotone_derivative(eq3):
    u = np.geomspace(1e-6, 2.0 ** 22, 20000)
    v = eq3.m1(u)
    assert np.all(np.diff(v) >= -1e-12 * np.maximum(1.0, v[:-1]))


def test_equivalent_requires_doubling_growth(expfn):
    with pytest.raises(PreconditionError):
        build_delta2plus_equivalent(expfn)


def test_verify_equivalence_examples(eq2, p2, p3):
    assert verify_equivalence(eq2, p2, k=0.5, l=8.0).passed
    assert not verify_equivalence(p2, p3, k=1.0, l=2.0 ** 10,
                                  grid=GridSpec(u_max=2.0 ** 25)).passed
    assert verify_equivalence(p2, p2, k=1.0, l=1.0).passed


def test_violator_probe_ratios(viol2):
    probes = np.asarray(viol2.probe_points)
    assert probes[0] == pytest.approx(3.5)  # first admissible interval
    ratios = probes * viol2.m2(probes) / viol2.m1(probes)
    assert np.all(ratios >= 2.0 ** np.floor(probes))


def test_violator_envelope(viol2, p2):
    u = np.linspace(1e-3, 2.0 ** 10, 300001)
    dev = np.max(np.abs(viol2.m0(u) / p2.m0(u) - 1.0))
    assert dev <= 0.1
    # pointwise derivative deviation also stays below eps
    w = np.linspace(3.0, 14.0, 200001)
    assert np.max(np.abs(viol2.m1(w) - p2.m1(w))) < 0.1


def test_violator_untouched_below_first_interval(viol2, p2):
    n1 = int(np.floor(viol2.probe_points[0]))
    u = np.linspace(0.0, n1 * 1.0, 500)
    assert np.array_equal(viol2.m1(u), p2.m1(u))


def test_violator_fails_curvature_check_on_probes(viol2):
    probes = viol2.probe_points
    grid = GridSpec(u_max=probes[-1] + 1.0, extra=probes)
    report = check_delta2plus(viol2, grid=grid)
    assert not report.passed
    assert report.witness_sup >= 2.0 ** np.floor(probes[0])


def test_violator_smooth_everywhere(viol2):
    assert viol2.derivative_kink_points().size == 0


def test_violator_preconditions(p2, expfn):
    with pytest.raises(PreconditionError):
        build_delta2plus_violator(p2, 1.5)
    with pytest.raises(PreconditionError):
        build_delta2plus_violator(expfn, 0.1)


def test_complementary_of_square_is_quarter_square(p2):
    ms = complementary(p2)
    v = np.geomspace(1e-8, 8.0, 300)
    assert np.max(np.abs(ms.m0(v) - v * v / 4.0)) <= 1e-8


@pytest.mark.parametrize("p", [1.5, 2.0, 4.0])
def test_complementary_matches_brute_force_conjugate(p):
    # oracle: sup over a dense u grid of u v - M(u), per target v
    phi = power(p)
    ms = complementary(phi)
    vs = np.linspace(1e-3, 4.0, 60)
    got = ms.m0(vs)
    for v, target in zip(vs, got):
        u_top = float((v / p) ** (1.0 / (p - 1.0))) * 1.5 + 0.1
        u = np.linspace(0.0, u_top, 300001)
        brute = np.max(u * v - phi.m0(u))
        assert abs(target - brute) <= 1e-8


@pytest.mark.parametrize("p", [1.5, 4.0])
def test_young_inequality_and_equality(p):
    phi = power(p)
    ms = complementary(phi)
    u = np.geomspace(1e-3, 4.0, 100)
    v = np.geomspace(1e-3, 4.0, 100)
    mstar_v = ms.m0(v)
    m_u = phi.m0(u)
    lhs = np.outer(u, v)
    rhs = m_u[:, None] + mstar_v[None, :]
    assert np.all(lhs <= rhs + 1e-10)
    # equality at v = M'(u)
    vv = phi.m1(u)
    gap = np.abs(phi.m0(u) + ms.m0(vv) - u * vv)
    assert np.max(gap) <= 1e-8


def test_complementary_zero_class_flips():
    assert classify_second_derivative_at_zero(
        complementary(power(1.5))) == "zero"
    assert classify_second_derivative_at_zero(
        complementary(power(4.0))) == "infinite"
    assert complementary(power(1.5)).zero_class == "zero"
    assert complementary(power(4.0)).zero_class == "infinite"


@pytest.mark.parametrize("p", [1.5, 2.0, 4.0])
def test_biconjugate_returns_to_source(p):
    phi = power(p)
    back = complementary(complementary(phi))
    u = np.geomspace(1e-4, 2.0 ** 18, 120)
    rel = np.abs(back.m0(u) - phi.m0(u)) / np.maximum(1.0, phi.m0(u))
    assert np.max(rel) <= 1e-6


def test_invert_derivative_examples(p2, p3):
    assert invert_derivative(p2, 2.0) == pytest.approx(1.0, abs=1e-12)
    assert invert_derivative(p2, 0.0) == 0.0
    assert invert_derivative(p3, 3.0) == pytest.approx(1.0, abs=1e-12)
    u = invert_derivative(p2, 1.7)
    assert abs(float(p2.m1(np.array([u]))[0]) - 1.7) <= 1e-12
    with pytest.raises(DomainError):
        invert_derivative(power(2, u_max=4.0), 100.0)


def test_invert_derivative_plateau_returns_infimum(viol2):
    # M' is flat on the plateaus; the inverse lands at the left edge
    n = float(np.floor(viol2.probe_points[0]))
    a = n + 0.5 - 4.0 ** (-n)
    level = float(viol2.m1(np.array([a]))[0])
    u = invert_derivative(viol2, level)
    assert u <= a + 1e-9


def test_piecewise_json_roundtrip(eq3, viol2):
    for built in (eq3, viol2):
        doc = json.loads(json.dumps(built.to_json()))
        back = orlicz_from_json(doc)
        assert isinstance(back, PiecewiseOrlicz)
        u = np.geomspace(1e-4, 100.0, 500)
        assert np.array_equal(back.m0(u), built.m0(u))
        assert np.array_equal(back.m1(u), built.m1(u))
        assert back.probe_points == built.probe_points


def test_equivalent_inherits_delta2(eq2):
    assert eq2.satisfies_delta2 is True
    assert check_delta2(eq2).passed
