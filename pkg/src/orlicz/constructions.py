"""Constructive transforms of Orlicz functions.

Three builders live here:

* ``build_delta2plus_equivalent`` replaces M' on doubling intervals by
  Hermite connectors and chords so the curvature ratio u M''/M' becomes
  bounded while M stays squeezed between M(u/2) and M(4*sup*u).
* ``build_delta2plus_violator`` inserts plateau/ramp pairs of prescribed
  slope around half-integer points, leaving M within a (1 +/- eps) envelope
  of the source while the curvature ratio at the probes blows past 2**n.
* ``complementary`` integrates the right inverse of M', yielding the convex
  conjugate used by the dual (Amemiya) norm.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .core import (ConditionReport, GridSpec, OrliczFunction, check_axioms,
                   check_delta2, check_delta2plus)
from .errors import ConstructionError, DomainError, PreconditionError
from .numerics import bisect_inverse, panel_quadrature
from .piecewise import PiecewiseOrlicz, SegmentBuilder


def _m1s(phi: OrliczFunction, u: float) -> float:
    return float(phi.m1(np.array([u]))[0])


def _m2s(phi: OrliczFunction, u: float) -> float:
    return float(phi.m2(np.array([u]))[0])


@lru_cache(maxsize=64)
def _passes_axioms_and_delta2(phi: OrliczFunction) -> bool:
    return check_axioms(phi).passed and check_delta2(phi).passed


@lru_cache(maxsize=64)
def _passes_delta2plus(phi: OrliczFunction) -> bool:
    return check_delta2plus(phi).passed


def build_delta2plus_equivalent(phi: OrliczFunction,
                                k_max: int = 24) -> PiecewiseOrlicz:
    """Equivalent function with bounded curvature ratio.

    Keeps M' untouched on [0, 2].  On each [2**k, 2**k + 1] a monotone cubic
    connector carries M' from its source value to the chord level; the chord
    (slope = doubling increment / 2**k) then runs to 2**(k+1).  Junction
    values and slopes match segment to segment, so only u = 2 can retain a
    one-sided M''.  Beyond the last knot the final chord rule continues.
    """
    if not _passes_axioms_and_delta2(phi):
        raise PreconditionError(
            "source must satisfy the axioms and the doubling-growth check")
    b = SegmentBuilder(phi)
    b.source_until(2.0)
    for k in range(1, k_max + 1):
        a = 2.0 ** k
        d_prev = _m1s(phi, a) - _m1s(phi, a / 2.0)
        d_cur = _m1s(phi, 2.0 * a) - _m1s(phi, a)
        v_l = _m1s(phi, a)
        v_r = v_l + d_cur / a
        s_l = d_prev / (a / 2.0)
        s_r = d_cur / a
        if min(d_prev, d_cur) < 0.0:
            raise ConstructionError(f"M' decreases across [{a/2:g}, {2*a:g}]")
        b.cubic_until(a + 1.0, v_l, s_l, v_r, s_r)
        b.line_until(2.0 * a, v_r, s_r)
    return b.build(tag="delta2plus_equivalent")


def verify_equivalence(phi1: OrliczFunction, phi2: OrliczFunction,
                       k: float, l: float,
                       grid: Optional[GridSpec] = None,
                       u0: float = 0.0) -> ConditionReport:
    """Check the squeeze phi2(k u) <= phi1(u) <= phi2(l u) on a grid."""
    if k <= 0 or l <= 0:
        raise ValueError("scale factors must be positive")
    grid = grid or GridSpec()
    limit = min(phi1.u_max, phi2.u_max / max(k, l))
    u = grid.points(limit=limit)
    u = u[u >= u0] if u0 > 0 else u
    v1 = phi1.m0(u)
    lo = phi2.m0(k * u)
    hi = phi2.m0(l * u)
    with np.errstate(divide="ignore", invalid="ignore"):
        r_lo = np.where(v1 > 0, lo / v1, np.where(lo > 0, np.inf, 1.0))
        r_hi = np.where(hi > 0, v1 / hi, np.where(v1 > 0, np.inf, 1.0))
    worst = np.maximum(r_lo, r_hi)
    i = int(np.argmax(worst))
    passed = bool(worst[i] <= 1.0 + 1e-12)
    return ConditionReport(
        condition="equivalence", passed=passed,
        witness_sup=float(worst[i]), witness_arg=float(u[i]),
        u0_used=float(u[0]), grid_spec=grid,
        details={"k": k, "l": l,
                 "max_lower_ratio": float(np.max(r_lo)),
                 "max_upper_ratio": float(np.max(r_hi))})


def _violator_quantities(phi: OrliczFunction, n: int) -> tuple[float, float]:
    half_gap = 4.0 ** (-n)
    a = n + 0.5 - half_gap
    b = n + 0.5 + half_gap
    alpha = _m1s(phi, b) - _m1s(phi, a)
    beta = (alpha / 2.0 ** n) * a / _m1s(phi, b)
    return alpha, beta


def _violator_breakpoints(n: int, beta: float) -> Optional[np.ndarray]:
    """The eight breakpoints of one modified interval, or None when the
    layout is not representable with comfortable float gaps."""
    half_gap = 4.0 ** (-n)
    mid = n + 0.5
    w = min(beta / 10.0, half_gap / 16.0)
    pts = np.array([mid - half_gap - w, mid - half_gap + w,
                    mid - beta / 2.0 - w, mid - beta / 2.0 + w,
                    mid + beta / 2.0 - w, mid + beta / 2.0 + w,
                    mid + half_gap - w, mid + half_gap + w])
    if np.any(np.diff(pts) <= 64.0 * np.spacing(mid)):
        return None
    if pts[0] <= n or pts[-1] >= n + 1:
        return None
    return pts


def build_delta2plus_violator(phi: OrliczFunction, eps: float,
                              n_count: int = 10,
                              n_max: int = 64) -> PiecewiseOrlicz:
    """Perturb M' inside (1 +/- eps) so the curvature ratio blows up.

    Around each half-integer n + 1/2 in the modified range, M' is flattened
    to plateaus at its values just left/right of the point and reconnected
    by a short ramp of slope alpha(n)/beta(n); cubic blends of width w round
    every corner so M'' stays defined everywhere.  At the probe points
    n + 1/2 the ratio u M''/M' is at least 2**n.
    """
    if not 0.0 < eps < 1.0:
        raise PreconditionError(f"eps must be in (0, 1), got {eps}")
    if not _passes_delta2plus(phi):
        raise PreconditionError(
            "source must satisfy the curvature-ratio check")

    def admissible(n: int) -> bool:
        alpha, beta = _violator_quantities(phi, n)
        if not (np.isfinite(alpha) and alpha > 0.0 and beta > 0.0):
            return False
        if alpha >= eps or beta >= 0.5 * 2.0 ** (-n):
            return False
        # reject cancellation-dominated increments
        if alpha <= 1e3 * np.spacing(_m1s(phi, n + 0.5 + 4.0 ** (-n))):
            return False
        return _violator_breakpoints(n, beta) is not None

    n1 = next((n for n in range(1, n_max + 1) if admissible(n)), None)
    if n1 is None or n1 + 1.5 > phi.u_max:
        raise ConstructionError(
            f"no admissible starting interval found up to n = {n_max}; "
            "the source function is too flat for this perturbation")
    n_top = n1
    while (n_top - n1 + 1 < n_count and admissible(n_top + 1)
           and n_top + 2.5 <= phi.u_max):
        n_top += 1

    b = SegmentBuilder(phi)
    for n in range(n1, n_top + 1):
        alpha, beta = _violator_quantities(phi, n)
        pts = _violator_breakpoints(n, beta)
        w = 0.5 * (pts[1] - pts[0])
        ramp = alpha / beta
        p_lo = _m1s(phi, n + 0.5 - 4.0 ** (-n))
        p_hi = _m1s(phi, n + 0.5 + 4.0 ** (-n))
        b.source_until(pts[0])
        b.cubic_until(pts[1], _m1s(phi, pts[0]), _m2s(phi, pts[0]), p_lo, 0.0)
        b.line_until(pts[2], p_lo, 0.0)
        b.cubic_until(pts[3], p_lo, 0.0, p_lo + w * ramp, ramp)
        b.line_until(pts[4], p_lo + w * ramp, ramp)
        b.cubic_until(pts[5], p_hi - w * ramp, ramp, p_hi, 0.0)
        b.line_until(pts[6], p_hi, 0.0)
        b.cubic_until(pts[7], p_hi, 0.0, _m1s(phi, pts[7]), _m2s(phi, pts[7]))
    b.source_until(float(n_top) + 2.0)
    probes = tuple(float(n) + 0.5 for n in range(n1, n_top + 1))
    return b.build(tag="delta2plus_violator", probe_points=probes)


# --- complementary function ----------------------------------------------

_FLIP = {"zero": "infinite", "infinite": "zero",
         "finite_positive": "finite_positive",
         "indeterminate": "indeterminate"}

_CACHE_PER_OCTAVE = 64
_CACHE_U_LO = 1e-12
_GL_NODES = 16


@dataclass(frozen=True, eq=False)
class ComplementaryFunction(OrliczFunction):
    """Convex conjugate M*(v) = integral of the right inverse of M'.

    The inverse is taken as the infimum preimage, so plateaus of M' are
    handled.  A per-octave table of exact cumulative integrals makes single
    evaluations one short Gauss-Legendre panel; the table also brackets the
    inverse so its bisection starts tight.  Note M* is not renormalized:
    M*(1) = 1 generally fails even though the source is normalized.
    """

    source: OrliczFunction
    u_max: float = 0.0
    zero_class: str = ""

    kind = "complementary"

    def __post_init__(self):
        if not self.zero_class:
            object.__setattr__(self, "zero_class",
                               _FLIP[self.source.zero_class])
        u_hi = self.source.u_max
        octaves = np.log2(u_hi / _CACHE_U_LO)
        n = int(round(octaves * _CACHE_PER_OCTAVE)) + 1
        u_knots = 2.0 ** np.linspace(np.log2(_CACHE_U_LO), np.log2(u_hi), n)
        v_knots = self.source.m1(u_knots)
        keep = np.concatenate([[True], np.diff(v_knots) > 0.0])
        u_knots, v_knots = u_knots[keep], v_knots[keep]
        object.__setattr__(self, "_u_knots", u_knots)
        object.__setattr__(self, "_v_knots", v_knots)
        if not self.u_max:
            object.__setattr__(self, "u_max", float(v_knots[-1]))
        stub = self._integrate_q(np.array([0.0]), v_knots[:1],
                                 np.zeros(1), u_knots[:1])
        panels = self._integrate_q(v_knots[:-1], v_knots[1:],
                                   u_knots[:-1], u_knots[1:])
        cum = np.concatenate([stub, panels]).cumsum()
        object.__setattr__(self, "_cum", cum)

    def _integrate_q(self, v_lo, v_hi, u_lo, u_hi):
        def q(v):
            # panels are generated together with their u brackets
            lo = np.repeat(u_lo, _GL_NODES)
            hi = np.repeat(u_hi, _GL_NODES)
            return _bisect_q(self.source, v, lo, hi)
        return panel_quadrature(q, v_lo, v_hi, nodes=_GL_NODES)

    def _bracket(self, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        idx = np.searchsorted(self._v_knots, v, side="right")
        lo = np.where(idx > 0, self._u_knots[np.maximum(idx - 1, 0)], 0.0)
        hi = self._u_knots[np.minimum(idx, len(self._u_knots) - 1)]
        hi = np.where(idx >= len(self._u_knots), self._u_knots[-1], hi)
        lo = np.where(v <= self._v_knots[0], 0.0, lo)
        return lo, hi

    def m1(self, v):
        v = np.asarray(v, dtype=np.float64)
        lo, hi = self._bracket(v)
        return _bisect_q(self.source, v, lo, hi)

    def m0(self, v):
        v = np.asarray(v, dtype=np.float64)
        out = np.zeros_like(v)
        pos = v > 0.0
        if not np.any(pos):
            return out
        vv = v[pos]
        idx = np.searchsorted(self._v_knots, vv, side="right") - 1
        below = idx < 0
        idx = np.maximum(idx, 0)
        base = np.where(below, 0.0, self._cum[idx])
        v_from = np.where(below, 0.0, self._v_knots[idx])
        u_lo = np.where(below, 0.0, self._u_knots[idx])
        u_hi_idx = np.minimum(idx + 1, len(self._u_knots) - 1)
        u_hi = np.where(below, self._u_knots[0], self._u_knots[u_hi_idx])
        u_hi = np.where(vv > self._v_knots[-1], self.source.u_max, u_hi)

        def q(x):
            lo = np.repeat(u_lo, _GL_NODES)
            hi = np.repeat(u_hi, _GL_NODES)
            return _bisect_q(self.source, x, lo, hi)

        out[pos] = base + panel_quadrature(q, v_from, vv, nodes=_GL_NODES)
        return out

    def m2(self, v):
        v = np.asarray(v, dtype=np.float64)
        with np.errstate(divide="ignore"):
            return 1.0 / self.source.m2(self.m1(v))

    @property
    def params(self) -> dict:
        return {"source_kind": self.source.kind, **self.source.params}

    def to_json(self) -> dict:
        return {"kind": self.kind, "source": self.source.to_json(),
                "u_max": float(self.u_max), "zero_class": self.zero_class}


def _bisect_q(src: OrliczFunction, targets: np.ndarray,
              lo: np.ndarray, hi: np.ndarray,
              max_iter: int = 120) -> np.ndarray:
    """Infimum preimage of targets under the nondecreasing M' of ``src``,
    with elementwise starting brackets."""
    t = np.asarray(targets, dtype=np.float64)
    lo = np.broadcast_to(np.asarray(lo, dtype=np.float64), t.shape).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=np.float64), t.shape).copy()
    at_lo = src.m1(lo) >= t
    hi = np.where(at_lo, lo, hi)
    for _ in range(max_iter):
        gap = hi - lo
        if np.all(gap <= 4.0 * np.finfo(float).eps * np.maximum(hi, 1e-300)):
            break
        mid = 0.5 * (lo + hi)
        ge = src.m1(mid) >= t
        hi = np.where(ge, mid, hi)
        lo = np.where(ge, lo, mid)
    out = 0.5 * (lo + hi)
    return np.where(at_lo, hi, out)


@lru_cache(maxsize=32)
def complementary(phi: OrliczFunction) -> ComplementaryFunction:
    """Complementary Orlicz function of ``phi`` (memoized per source).

    Conjugation ignores normalization, so structurally valid but
    unnormalized sources (for instance conjugates themselves) are accepted;
    the structural grid follows the source's trusted domain so slowly
    superlinear conjugates still show their growth.
    """
    grid = GridSpec(u_max=min(phi.u_max, 2.0 ** 40))
    if not check_axioms(phi, grid=grid, require_normalization=False).passed:
        raise PreconditionError("source must satisfy the axioms")
    return ComplementaryFunction(source=phi)


def invert_derivative(phi: OrliczFunction, v: float) -> float:
    """Infimum preimage u with M'(u) = v, by bracketed bisection."""
    v = float(v)
    if v < 0.0:
        raise DomainError(f"target must be nonnegative, got {v}")
    if v == 0.0:
        return 0.0
    top = _m1s(phi, phi.u_max)
    if v > top * (1.0 + 1e-9):
        raise DomainError(
            f"target {v:g} exceeds M'(u_max) = {top:g}")
    u = float(bisect_inverse(phi.m1, np.array([min(v, top)]),
                             0.0, phi.u_max)[0])
    resid = abs(_m1s(phi, u) - v)
    if resid > 1e-9 * max(1.0, v):
        raise DomainError(
            f"inversion residual {resid:g} too large at v = {v:g}")
    return u
