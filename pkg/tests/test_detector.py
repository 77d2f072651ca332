import numpy as np
import pytest

from orlicz.detector import classify_limit
from orlicz.detector import test_disjointness_zero_case as disjointness_zero_case
from orlicz.detector import \
    test_support_deficiency_infinite_case as support_deficiency_infinite_case
from orlicz.detector import test_support_equality as support_equality
from orlicz.errors import PreconditionError
from orlicz.function_space import luxemburg_norm
from orlicz.stepfun import StepFunction, support_relation
from orlicz.suites import unit_pair


def seq(values):
    alphas = 0.25 * 2.0 ** (-np.arange(len(values), dtype=float))
    return list(zip(alphas, values))


def test_classify_limit_examples():
    assert classify_limit(seq([2.0 ** -k for k in range(1, 13)])).tag == "to_zero"
    assert classify_limit(seq([2.0 ** k for k in range(1, 13)])).tag == "to_infinity"
    assert classify_limit(seq([5.0] * 10)).tag == "bounded_nonzero"


def test_classify_limit_noise_floor_counts_as_zero(rng):
    noise = np.abs(rng.normal(scale=1e-13, size=12))
    assert classify_limit(seq(list(noise))).tag == "to_zero"


def test_classify_limit_slow_blowup_detected():
    # square-root growth never clears the absolute ceiling by sample 12,
    # but the growth-factor rule catches it
    vals = [0.5 * (0.25 * 2.0 ** -k) ** -0.5 for k in range(13)]
    assert vals[-1] < 1e3
    assert classify_limit(seq(vals)).tag == "to_infinity"


def test_classify_limit_converging_tail_is_bounded():
    vals = [3.0 - 2.0 ** -k for k in range(12)]
    assert classify_limit(seq(vals)).tag == "bounded_nonzero"


def test_classify_limit_validation():
    with pytest.raises(ValueError):
        classify_limit(seq([1.0] * 5))
    with pytest.raises(ValueError):
        classify_limit([(0.1, 1.0), (0.2, 1.0)] * 5)


def unit_blocks(p):
    c = 0.5 ** (-1.0 / p)
    return (StepFunction.from_values([c, 0.0]),
            StepFunction.from_values([0.0, c]))


def test_zero_regime_closed_form_cases(p4):
    f, g = unit_blocks(4.0)
    assert disjointness_zero_case(f, g, p4).claim == "disjoint"
    v = disjointness_zero_case(f, f, p4)
    assert v.claim == "not_disjoint"
    assert v.nprime0 == pytest.approx(1.0, abs=1e-10)


def test_zero_regime_overlap_with_cancelling_slope(p4):
    # g alternates sign on the support of f so N'(0) = 0; the verdict
    # must come from the bounded curvature on the overlap
    f = StepFunction.from_values([1.0, 1.0, 0.0, 0.0])
    f = f * (1.0 / luxemburg_norm(f, p4))
    g = StepFunction.from_values([1.0, -1.0, 0.0, 0.0])
    g = g * (1.0 / luxemburg_norm(g, p4))
    v = disjointness_zero_case(f, g, p4)
    assert abs(v.nprime0) <= 1e-12
    assert v.claim == "not_disjoint"
    assert v.limit_class.tag == "bounded_nonzero"


def test_infinite_regime_closed_form_cases(p15):
    f, g = unit_blocks(1.5)
    assert support_deficiency_infinite_case(
        f, g, p15).claim == "g_support_exceeds_f"
    assert support_deficiency_infinite_case(
        f, f, p15).claim == "g_support_within_f"
    assert support_equality(f, g, p15).claim == "supports_differ"


def test_infinite_regime_strict_subset_is_asymmetric(p15, rng):
    f, g = unit_pair(rng, p15, "g_subset_f")
    fwd = support_deficiency_infinite_case(f, g, p15)
    bwd = support_deficiency_infinite_case(g, f, p15)
    assert fwd.claim == "g_support_within_f"
    assert bwd.claim == "g_support_exceeds_f"
    assert support_equality(f, g, p15).claim == "supports_differ"


def test_infinite_regime_equal_supports(p15, rng):
    f, g = unit_pair(rng, p15, "equal")
    assert support_equality(f, g, p15).claim == "supports_equal"


@pytest.mark.parametrize("kind", ["disjoint", "overlap"])
def test_zero_regime_ground_truth(kind, p4, rng):
    for _ in range(6):
        f, g = unit_pair(rng, p4, kind, signs=True)
        truth = support_relation(f, g)
        expected = ("disjoint" if truth.mu_intersection == 0.0
                    else "not_disjoint")
        assert disjointness_zero_case(f, g, p4).claim == expected


@pytest.mark.parametrize("kind,expected", [
    ("disjoint", "g_support_exceeds_f"),
    ("g_subset_f", "g_support_within_f"),
    ("equal", "g_support_within_f")])
def test_infinite_regime_ground_truth(kind, expected, p15, rng):
    for _ in range(6):
        f, g = unit_pair(rng, p15, kind)
        assert support_deficiency_infinite_case(
            f, g, p15).claim == expected


def test_scale_invariance_after_renormalization(p4, rng):
    f, g = unit_pair(rng, p4, "disjoint", signs=True)
    before = disjointness_zero_case(f, g, p4).claim
    for c_f, c_g in ((3.7, -0.2), (-11.0, 5.0)):
        sf = f * c_f
        sg = g * c_g
        sf = sf * (1.0 / luxemburg_norm(sf, p4))
        sg = sg * (1.0 / luxemburg_norm(sg, p4))
        assert disjointness_zero_case(sf, sg, p4).claim == before


def test_regime_preconditions(p2, p4, p15):
    f, g = unit_blocks(2.0)
    with pytest.raises(PreconditionError):
        disjointness_zero_case(f, g, p2)
    with pytest.raises(PreconditionError):
        support_deficiency_infinite_case(f, g, p2)
    f4, g4 = unit_blocks(4.0)
    with pytest.raises(PreconditionError):
        support_deficiency_infinite_case(f4, g4, p4)
    f32, g32 = unit_blocks(1.5)
    with pytest.raises(PreconditionError):
        disjointness_zero_case(f32, g32, p15)


def test_unit_norm_precondition(p4):
    f, g = unit_blocks(4.0)
    with pytest.raises(PreconditionError):
        disjointness_zero_case(f * 2.0, g, p4)


def test_verdict_serializes(p4):
    import json
    f, g = unit_blocks(4.0)
    v = disjointness_zero_case(f, g, p4)
    doc = json.loads(json.dumps(v.to_json()))
    assert doc["claim"] == "disjoint"
    assert len(doc["limit_class"]["evidence"]) >= 8
