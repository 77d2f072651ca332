"""Support detectors driven by the decay or blow-up of N''(alpha) as
alpha -> 0 along a dyadic sequence.

Two regimes, selected by the behavior of M'' at 0:

* vanishing curvature (like u**p, p > 2): N'' -> 0 plus N'(0) = 0
  characterizes disjoint supports;
* exploding curvature (like u**p, 1 < p < 2): N'' -> infinity detects mass
  of g outside the support of f, giving a one-sided containment test and,
  run both ways, a support-equality test.

The finite-sample limit classification is a calibrated surrogate: dyadic
samples from ALPHA0 down, a monotone-tail requirement with an additive
noise slack, and a growth-factor rule so genuinely divergent curves are
not capped by the absolute ceiling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .core import (OrliczFunction, check_delta2plus,
                   classify_second_derivative_at_zero)
from .differential import _Pair
from .errors import InfiniteCurvatureError, PreconditionError
from .function_space import luxemburg_norm

EPS_ZERO = 1e-3
CAP_INF = 1e3
ALPHA0 = 0.25
N_SAMPLES = 13
MIN_SAMPLES = 8
# to_infinity: the tail must both increase and either clear CAP_INF or
# grow by this factor across the last four samples (and sit above the
# noise floor); a ceiling alone would miss slow square-root blow-ups
GROWTH_FACTOR = 2.0
INF_FLOOR = 0.1
TAIL_SLACK = 1e-9
NPRIME_ZERO_TOL = 1e-8
NPRIME_NONZERO_TOL = 1e-6
UNIT_TOL = 1e-8


@dataclass(frozen=True)
class LimitClass:
    """Classification of a sampled limit with its evidence sequence."""

    tag: str
    evidence: tuple

    def to_json(self) -> dict:
        return {"tag": self.tag,
                "evidence": [[a, v] for a, v in self.evidence]}


@dataclass(frozen=True)
class Verdict:
    """Outcome of one support test."""

    claim: str
    limit_class: LimitClass
    nprime0: Optional[float]
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"claim": self.claim, "limit_class": self.limit_class.to_json(),
                "nprime0": self.nprime0, "details": dict(self.details)}


def classify_limit(seq: Sequence[tuple]) -> LimitClass:
    """Classify a sampled curve (alpha decreasing to 0) as to_zero,
    to_infinity, bounded_nonzero or inconclusive."""
    seq = tuple((float(a), float(v)) for a, v in seq)
    if len(seq) < MIN_SAMPLES:
        raise ValueError(
            f"need at least {MIN_SAMPLES} samples, got {len(seq)}")
    alphas = np.array([a for a, _ in seq])
    vals = np.array([v for _, v in seq])
    if np.any(alphas <= 0.0) or np.any(np.diff(alphas) >= 0.0):
        raise ValueError("samples must be sorted by decreasing alpha > 0")

    tail = vals[-4:]
    slack = TAIL_SLACK * np.maximum(1.0, np.abs(tail[:-1]))
    diffs = np.diff(tail)
    decreasing = bool(np.all(diffs < slack))
    increasing = bool(np.all(diffs > -slack))
    final = float(tail[-1])

    if final < EPS_ZERO and decreasing:
        return LimitClass("to_zero", seq)
    if (increasing and final > INF_FLOOR
            and (final > CAP_INF or final >= GROWTH_FACTOR * tail[0])):
        return LimitClass("to_infinity", seq)
    mean = float(np.mean(np.abs(tail)))
    tv = float(np.sum(np.abs(diffs)))
    if (np.all(vals >= EPS_ZERO) and np.all(vals <= CAP_INF)
            and tv <= 0.10 * mean):
        return LimitClass("bounded_nonzero", seq)
    return LimitClass("inconclusive", seq)


@lru_cache(maxsize=64)
def _regime(phi: OrliczFunction) -> str:
    if not check_delta2plus(phi).passed:
        raise PreconditionError(
            "detectors need a bounded curvature ratio (delta2plus check)")
    return classify_second_derivative_at_zero(phi)


def _require_regime(phi: OrliczFunction, expected: str) -> None:
    got = _regime(phi)
    if got != expected:
        raise PreconditionError(
            f"this test needs small-argument curvature class {expected!r}, "
            f"but M'' near 0 classifies as {got!r}")
    if expected == "zero":
        probe = 2.0 ** np.linspace(-20, 3, 24)
        if np.any(phi.m2(probe) <= 0.0):
            raise PreconditionError("M'' must be positive away from 0")


def _require_unit(f, phi, name: str) -> None:
    n = luxemburg_norm(f, phi)
    if abs(n - 1.0) > UNIT_TOL:
        raise PreconditionError(f"||{name}|| = {n!r}; normalize inputs first")


def _sample_curve(pair: _Pair) -> tuple[list, list]:
    """N''(alpha_k) on the dyadic ladder, skipping exact crossings."""
    crossings = set(pair.crossing_alphas().tolist())
    evidence, skipped = [], []
    for k in range(N_SAMPLES):
        a = ALPHA0 * 2.0 ** (-k)
        if a in crossings:
            skipped.append(a)
            continue
        p = pair.f_partials(a, pair.norm(a))
        nprime = -p.alpha / p.eta
        nsecond = (-p.alphaalpha - 2.0 * p.alphaeta * nprime
                   - p.etaeta * nprime * nprime) / p.eta
        evidence.append((a, nsecond))
    if len(evidence) < MIN_SAMPLES:
        raise PreconditionError(
            f"only {len(evidence)} usable samples; too many crossing points")
    return evidence, skipped


def _nprime_at_zero(pair: _Pair) -> Optional[float]:
    try:
        p = pair.f_partials(0.0, pair.norm(0.0))
    except InfiniteCurvatureError:
        # cells where f vanishes under g make the curvature integrand
        # singular at alpha = 0; the infinite-regime tests don't need N'(0)
        return None
    return -p.alpha / p.eta


def test_disjointness_zero_case(f, g, phi: OrliczFunction) -> Verdict:
    """Disjointness test for the vanishing-curvature regime.

    disjoint: N'(0) ~ 0 and N'' -> 0.  not_disjoint: N'' bounded away from
    0, or N'(0) clearly nonzero.  Anything else is inconclusive.
    """
    _require_regime(phi, "zero")
    _require_unit(f, phi, "f")
    _require_unit(g, phi, "g")
    pair = _Pair(f, g, phi, checked=True)
    nprime0 = _nprime_at_zero(pair)
    evidence, skipped = _sample_curve(pair)
    lc = classify_limit(evidence)
    if abs(nprime0) <= NPRIME_ZERO_TOL and lc.tag == "to_zero":
        claim = "disjoint"
    elif lc.tag == "bounded_nonzero" or abs(nprime0) > NPRIME_NONZERO_TOL:
        claim = "not_disjoint"
    else:
        claim = "inconclusive"
    return Verdict(claim, lc, nprime0,
                   details={"skipped_alphas": skipped, "test": "disjointness"})


def test_support_deficiency_infinite_case(f, g, phi: OrliczFunction) -> Verdict:
    """Containment test for the exploding-curvature regime.

    g_support_exceeds_f: N'' blows up, so g carries mass outside supp f.
    g_support_within_f: N'' stays bounded (or vanishes).
    """
    _require_regime(phi, "infinite")
    _require_unit(f, phi, "f")
    _require_unit(g, phi, "g")
    pair = _Pair(f, g, phi, checked=True)
    nprime0 = _nprime_at_zero(pair)
    evidence, skipped = _sample_curve(pair)
    lc = classify_limit(evidence)
    if lc.tag == "to_infinity":
        claim = "g_support_exceeds_f"
    elif lc.tag in ("to_zero", "bounded_nonzero"):
        claim = "g_support_within_f"
    else:
        claim = "inconclusive"
    return Verdict(claim, lc, nprime0,
                   details={"skipped_alphas": skipped, "test": "deficiency"})


def test_support_equality(f, g, phi: OrliczFunction) -> Verdict:
    """Two-sided containment: run the deficiency test in both orders."""
    fwd = test_support_deficiency_infinite_case(f, g, phi)
    bwd = test_support_deficiency_infinite_case(g, f, phi)
    if (fwd.claim == "g_support_within_f"
            and bwd.claim == "g_support_within_f"):
        claim = "supports_equal"
    elif "g_support_exceeds_f" in (fwd.claim, bwd.claim):
        claim = "supports_differ"
    else:
        claim = "inconclusive"
    return Verdict(claim, fwd.limit_class, fwd.nprime0,
                   details={"forward": fwd.to_json(), "backward": bwd.to_json(),
                            "test": "support_equality"})
