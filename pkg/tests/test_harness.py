import json

import numpy as np
import pytest

from orlicz.core import power
from orlicz.errors import AmbiguityError, PreconditionError
from orlicz.harness import (HalfMixingOperator, ShiftByMeanOperator,
                            WeightedComposition, apply_operator,
                            check_disjointness_preservation, check_isometry,
                            operator_from_json, random_unimodular_composition,
                            recover_weighted_composition, resample_to_uniform,
                            source_is_power_like, spanning_testset)
from orlicz.stepfun import StepFunction, support_relation
from orlicz.suites import disjoint_pairs, unit_pair


def test_apply_identity_swap_sign():
    f = StepFunction.from_values([1.0, 2.0, 3.0, 4.0])
    ident = WeightedComposition.identity(4)
    assert np.array_equal(apply_operator(ident, f).values, f.values)

    swap = WeightedComposition(np.array([2, 3, 0, 1]),
                               StepFunction.from_values(np.ones(4)))
    chi = StepFunction.from_values([1.0, 1.0, 0.0, 0.0])
    assert np.array_equal(swap(chi).values, [0.0, 0.0, 1.0, 1.0])

    neg = WeightedComposition(np.arange(4),
                              StepFunction.from_values(-np.ones(4)))
    assert np.array_equal(neg(f).values, -f.values)


def test_weight_consistency_with_constant_one():
    wc = random_unimodular_composition(np.random.default_rng(3), 16)
    one = StepFunction.constant(1.0)
    assert np.array_equal(wc(one).values, wc.a.values)


def test_resample_rejects_misaligned():
    f = StepFunction(np.array([0.0, 0.3, 1.0]), np.array([1.0, 2.0]))
    with pytest.raises(PreconditionError):
        resample_to_uniform(f, 4)


def test_permutation_is_isometry(p4, rng):
    ts = spanning_testset(rng, p4, size=12)
    wc = random_unimodular_composition(rng, 64)
    rep = check_isometry(wc, p4, ts, combinations=80, rng=rng)
    assert rep.is_isometry
    assert rep.max_norm_deviation <= 1e-12
    assert rep.testset_size == 13 + 80


def test_scaling_weight_is_not_isometry(p4, rng):
    ts = spanning_testset(rng, p4, size=6)
    doubler = WeightedComposition(np.arange(64),
                                  StepFunction.from_values(2.0 * np.ones(64)))
    rep = check_isometry(doubler, p4, ts, combinations=20, rng=rng)
    assert not rep.is_isometry
    # homogeneity: the deviation equals the norm of the worst test function
    assert rep.max_norm_deviation > 0.5


def test_half_mix_isometric_only_for_quadratic(p2, p4, rng):
    mix = HalfMixingOperator(np.pi / 4.0, 64)
    ts4 = spanning_testset(rng, p4, size=10)
    rep4 = check_isometry(mix, p4, ts4, combinations=40, rng=rng)
    assert not rep4.is_isometry
    assert rep4.max_norm_deviation > 1e-3
    ts2 = spanning_testset(rng, p2, size=10)
    rep2 = check_isometry(mix, p2, ts2, combinations=40, rng=rng)
    assert rep2.is_isometry


def test_disjointness_preservation_zero_regime(p4, rng):
    wc = random_unimodular_composition(rng, 64)
    ts = spanning_testset(rng, p4, size=10)
    iso = check_isometry(wc, p4, ts, combinations=40, rng=rng)
    pairs = disjoint_pairs(rng, p4, 6, signs=True)
    rep = check_disjointness_preservation(wc, p4, pairs, iso)
    assert rep.preservation_failures == []
    assert rep.details["detector_checked"] == 6


def test_disjointness_preservation_infinite_regime(p15, rng):
    wc = random_unimodular_composition(rng, 64)
    ts = spanning_testset(rng, p15, size=8)
    iso = check_isometry(wc, p15, ts, combinations=30, rng=rng)
    pairs = disjoint_pairs(rng, p15, 4)
    rep = check_disjointness_preservation(wc, p15, pairs, iso)
    assert rep.preservation_failures == []


def test_sign_flips_do_not_affect_supports(p4, rng):
    sigma = np.arange(64)
    a = np.ones(64)
    a[10] = -1.0
    wc = WeightedComposition(sigma, StepFunction.from_values(a))
    ts = spanning_testset(rng, p4, size=8)
    iso = check_isometry(wc, p4, ts, combinations=30, rng=rng)
    pairs = disjoint_pairs(rng, p4, 4, signs=True)
    rep = check_disjointness_preservation(wc, p4, pairs, iso)
    assert rep.preservation_failures == []


def test_broken_operator_rejected_at_precondition(p4, rng):
    broken = ShiftByMeanOperator(64)
    ts = spanning_testset(rng, p4, size=6)
    iso = check_isometry(broken, p4, ts, combinations=20, rng=rng)
    assert not iso.is_isometry
    pairs = disjoint_pairs(rng, p4, 2)
    with pytest.raises(PreconditionError):
        check_disjointness_preservation(broken, p4, pairs, iso)


def test_composition_of_isometries(p4, rng):
    t1 = random_unimodular_composition(rng, 64)
    t2 = random_unimodular_composition(rng, 64)
    both = t1.compose(t2)
    ts = spanning_testset(rng, p4, size=8)
    rep = check_isometry(both, p4, ts, combinations=30, rng=rng)
    assert rep.is_isometry
    f = ts[0]
    assert np.allclose(both(f).values, t1(t2(f)).values, atol=1e-14)


def test_support_equality_preserved_under_isometry(p15, rng):
    # images of equal-support pairs keep equal supports (exact cell masks)
    wc = random_unimodular_composition(rng, 64)
    for _ in range(5):
        f, g = unit_pair(rng, p15, "equal")
        rel = support_relation(wc(f), wc(g))
        assert rel.relation == "equal"


def test_recovery_roundtrip(p4, rng):
    wc = random_unimodular_composition(rng, 64)
    rec = recover_weighted_composition(wc, 64, p4, rng=rng)
    assert rec.residual <= 1e-10
    assert np.array_equal(rec.operator.sigma, wc.sigma)
    assert np.allclose(rec.operator.a.values, wc.a.values, atol=1e-14)
    assert rec.unimodular


def test_recovery_flags_power_like(p4, plog2, rng):
    wc = random_unimodular_composition(rng, 32)
    rec4 = recover_weighted_composition(wc, 32, p4, rng=rng)
    assert rec4.power_like_source
    rec_log = recover_weighted_composition(wc, 32, plog2, rng=rng)
    assert not rec_log.power_like_source
    assert rec_log.unimodular


def test_source_power_like_fit(p2, p15, plog2):
    assert source_is_power_like(p2)
    assert source_is_power_like(p15)
    assert not source_is_power_like(plog2)


def test_two_level_weight_is_not_isometric_for_non_power(plog2, rng):
    # |a| in {1, 2} cannot preserve norms when the gauge is not a power
    a = np.ones(64)
    a[::2] = 2.0
    wc = WeightedComposition(np.arange(64), StepFunction.from_values(a))
    ts = spanning_testset(rng, plog2, size=6)
    rep = check_isometry(wc, plog2, ts, combinations=20, rng=rng)
    assert not rep.is_isometry
    assert rep.max_norm_deviation > 1e-3


def test_modulus_lattice_fit():
    from orlicz.harness import _fit_modulus_lattice
    moduli = np.array([1.0, 2.0, 4.0, 2.0, 1.0])
    fit = _fit_modulus_lattice(moduli)
    assert fit is not None
    assert fit["gamma"] == pytest.approx(2.0, rel=1e-9)
    assert _fit_modulus_lattice(np.array([1.0, 1.7, 2.0])) is None


def test_recovery_rejects_non_disjointness_preserving(p2, rng):
    mix = HalfMixingOperator(np.pi / 4.0, 16)
    # isometric for the quadratic gauge yet not a weighted composition:
    # basis images overlap, which recovery must flag
    with pytest.raises(AmbiguityError):
        recover_weighted_composition(mix, 16, p2, rng=rng)


def test_operator_json_roundtrip():
    wc = random_unimodular_composition(np.random.default_rng(5), 8)
    back = operator_from_json(json.loads(json.dumps(wc.to_json())))
    assert np.array_equal(back.sigma, wc.sigma)
    assert np.array_equal(back.a.values, wc.a.values)
    mix = operator_from_json({"kind": "half_mix", "theta": 0.5,
                              "resolution": 8})
    assert isinstance(mix, HalfMixingOperator)


def test_isometry_report_serializes(p4, rng):
    ts = spanning_testset(rng, p4, size=4)
    wc = random_unimodular_composition(rng, 64)
    rep = check_isometry(wc, p4, ts, combinations=10, rng=rng)
    json.dumps(rep.to_json())
