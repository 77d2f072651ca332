"""Orlicz functions and grid-based checks of their structural conditions.

An Orlicz function here is a convex M: [0, inf) -> [0, inf) with M(0) = 0,
M(1) = 1, M(u)/u -> 0 at 0 and -> infinity at infinity.  The catalog ships
three closed-form families (pure powers, a power-log hybrid, and an
exponential-type function that grows faster than any polynomial) plus the
piecewise kind produced by the construction module.

Conditions are only ever certified on sampled grids; reports carry the grid
and the witness so a verdict can be audited.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (DomainError, OrliczError, UndefinedDerivativeError,
                     ZeroClassMismatchError)
from .numerics import geometric_grid

ZERO_CLASSES = ("zero", "infinite", "finite_positive", "indeterminate")

# default testing window for the growth/curvature ratio checks
DEFAULT_U0 = 1e-8
EPS_POS = 1e-8

# axioms: normalization tolerance and the M(u)/u limit surrogates
AXIOM_TOL = 1e-12
RATIO_SMALL = 1e-2
RATIO_LARGE = 1e2

# "ratio stays bounded" policy: the running sup over the top four octaves
# of the grid may drift by at most 1 percent
SUP_DRIFT = 1.01
POLICY_OCTAVES = 4.0

# small-argument curvature classification thresholds
CLASSIFY_DELTA = 1e-2
CLASSIFY_STEPS = 41
CLASSIFY_SMALL = 1e-6
CLASSIFY_BIG = 1e6
CLASSIFY_STABLE = 0.01


class OrliczFunction:
    """Base type: evaluation rules for M, M' and M'' on [0, u_max].

    Values are immutable after construction; all evaluation methods are pure
    and safe to call concurrently.  ``m0``/``m1``/``m2`` are raw vectorized
    evaluators without domain checks; ``evaluate`` is the checked scalar
    entry point.
    """

    kind: str = "abstract"
    u_max: float
    zero_class: str

    # subclasses fill these in
    def m0(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def m1(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def m2(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def params(self) -> dict:
        return {}

    @property
    def satisfies_delta2(self) -> Optional[bool]:
        """Known doubling-growth status, None when undetermined."""
        return None

    def m2_at_zero(self) -> float:
        """Limit of M'' at 0 per the declared class; raises when infinite."""
        if self.zero_class == "zero":
            return 0.0
        if self.zero_class == "finite_positive":
            return float(self.m2(np.array([1e-240]))[0])
        raise UndefinedDerivativeError(
            f"M'' has no finite limit at 0 (class {self.zero_class!r})")

    def derivative_kink_points(self) -> np.ndarray:
        """Arguments where M'' is only one-sided."""
        return np.empty(0)

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": self.params,
                "u_max": self.u_max, "zero_class": self.zero_class}

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        ps = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{type(self).__name__}({ps})"


def _as_array(u) -> np.ndarray:
    return np.asarray(u, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class PowerFunction(OrliczFunction):
    """M(u) = u**p for an exponent p >= 1."""

    p: float
    u_max: float = 2.0 ** 40
    zero_class: str = ""

    kind = "power"

    def __post_init__(self):
        if not self.p >= 1.0:
            raise ValueError(f"power exponent must be >= 1, got {self.p}")
        if not self.zero_class:
            if self.p == 2.0:
                cls = "finite_positive"
            elif self.p > 2.0 or self.p == 1.0:
                cls = "zero"
            else:
                cls = "infinite"
            object.__setattr__(self, "zero_class", cls)

    def m0(self, u):
        return _as_array(u) ** self.p

    def m1(self, u):
        u = _as_array(u)
        return self.p * u ** (self.p - 1.0)

    def m2(self, u):
        u = _as_array(u)
        with np.errstate(divide="ignore"):
            return self.p * (self.p - 1.0) * u ** (self.p - 2.0)

    @property
    def params(self):
        return {"p": self.p}

    @property
    def satisfies_delta2(self):
        return True


_POWER_LOG_NORM = 1.0 + math.log(2.0)


@dataclass(frozen=True, eq=False)
class PowerLogFunction(OrliczFunction):
    """M(u) = u**p (1 + log(1+u)) / (1 + log 2): a non-power p-type function."""

    p: float
    u_max: float = 2.0 ** 40
    zero_class: str = ""

    kind = "power_log"

    def __post_init__(self):
        if not self.p >= 1.0:
            raise ValueError(f"exponent must be >= 1, got {self.p}")
        if not self.zero_class:
            if self.p in (1.0, 2.0):
                cls = "finite_positive"
            elif self.p > 2.0:
                cls = "zero"
            else:
                cls = "infinite"
            object.__setattr__(self, "zero_class", cls)

    def m0(self, u):
        u = _as_array(u)
        return u ** self.p * (1.0 + np.log1p(u)) / _POWER_LOG_NORM

    def m1(self, u):
        u = _as_array(u)
        p = self.p
        return (p * u ** (p - 1.0) * (1.0 + np.log1p(u))
                + u ** p / (1.0 + u)) / _POWER_LOG_NORM

    def m2(self, u):
        u = _as_array(u)
        p = self.p
        with np.errstate(divide="ignore"):
            lead = p * (p - 1.0) * u ** (p - 2.0) * (1.0 + np.log1p(u))
        return (lead + 2.0 * p * u ** (p - 1.0) / (1.0 + u)
                - u ** p / (1.0 + u) ** 2) / _POWER_LOG_NORM

    @property
    def params(self):
        return {"p": self.p}

    @property
    def satisfies_delta2(self):
        return True


_EXP_NORM = math.e - 2.0


@dataclass(frozen=True, eq=False)
class ExpTypeFunction(OrliczFunction):
    """M(u) = (e**u - u - 1) / (e - 2): grows faster than every polynomial."""

    u_max: float = 700.0
    zero_class: str = "finite_positive"

    kind = "exp_type"

    def m0(self, u):
        u = _as_array(u)
        return (np.expm1(u) - u) / _EXP_NORM

    def m1(self, u):
        return np.expm1(_as_array(u)) / _EXP_NORM

    def m2(self, u):
        return np.exp(_as_array(u)) / _EXP_NORM

    @property
    def satisfies_delta2(self):
        return False


def power(p: float, **kwargs) -> PowerFunction:
    return PowerFunction(p=float(p), **kwargs)


def power_log(p: float, **kwargs) -> PowerLogFunction:
    return PowerLogFunction(p=float(p), **kwargs)


def exp_type() -> ExpTypeFunction:
    return ExpTypeFunction()


def evaluate(phi: OrliczFunction, u: float, order: int = 0) -> float:
    """Checked scalar evaluation of M, M' or M''."""
    if order not in (0, 1, 2):
        raise ValueError(f"order must be 0, 1 or 2, got {order}")
    u = float(u)
    if u < 0.0:
        raise DomainError(f"argument must be nonnegative, got {u}")
    if u > phi.u_max:
        raise DomainError(f"argument {u:g} exceeds trusted bound {phi.u_max:g}")
    if order == 2:
        kinks = phi.derivative_kink_points()
        if kinks.size and np.any(u == kinks):
            raise UndefinedDerivativeError(
                f"M'' is one-sided at the junction u = {u:g}")
    fn = (phi.m0, phi.m1, phi.m2)[order]
    val = float(fn(np.array([u]))[0])
    if np.isnan(val):
        raise UndefinedDerivativeError(f"derivative undefined at u = {u:g}")
    return val


@dataclass(frozen=True)
class GridSpec:
    """Geometric evaluation grid on (0, u_max], optionally with extra points."""

    u_min: float = DEFAULT_U0
    u_max: float = 2.0 ** 20
    points_per_octave: int = 64
    extra: tuple = ()

    def __post_init__(self):
        if not (0.0 < self.u_min < self.u_max):
            raise ValueError("need 0 < u_min < u_max")
        if self.points_per_octave < 1:
            raise ValueError("points_per_octave must be positive")

    def points(self, limit: Optional[float] = None,
               lower: Optional[float] = None) -> np.ndarray:
        hi = self.u_max if limit is None else min(self.u_max, limit)
        lo = self.u_min if lower is None else max(self.u_min, lower)
        if not lo < hi:
            raise ValueError(f"grid collapsed: [{lo:g}, {hi:g}]")
        return geometric_grid(lo, hi, self.points_per_octave, self.extra)

    def to_json(self) -> dict:
        return {"u_min": self.u_min, "u_max": self.u_max,
                "points_per_octave": self.points_per_octave,
                "extra": list(self.extra)}


@dataclass
class ConditionReport:
    """Outcome of one grid-based condition check."""

    condition: str
    passed: bool
    witness_sup: float
    witness_arg: float
    u0_used: float
    grid_spec: GridSpec
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"condition": self.condition, "passed": bool(self.passed),
                "witness_sup": self.witness_sup,
                "witness_arg": self.witness_arg,
                "u0_used": self.u0_used,
                "grid_spec": self.grid_spec.to_json(),
                "details": _jsonable(self.details)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    return obj


def _nondecreasing(vals: np.ndarray, slack: float = 1e-12) -> bool:
    tol = slack * np.maximum(1.0, np.abs(vals[:-1]))
    return bool(np.all(np.diff(vals) >= -tol))


def _running_sup_stable(u: np.ndarray, ratio: np.ndarray) -> tuple[bool, dict]:
    """True when the running sup of the ratio has flattened out.

    Compares the running supremum at the start of the top ``POLICY_OCTAVES``
    octaves of the grid against the final one; bounded ratios flatten while
    slowly diverging ones keep pushing the sup up.
    """
    run = np.maximum.accumulate(ratio)
    cut = u[-1] / 2.0 ** POLICY_OCTAVES
    idx = int(np.searchsorted(u, cut))
    idx = min(idx, len(u) - 1)
    stable = bool(run[-1] <= run[idx] * SUP_DRIFT)
    return stable, {"running_sup_at_cut": float(run[idx]),
                    "running_sup_final": float(run[-1]),
                    "policy_cut_u": float(u[idx])}


def check_axioms(phi: OrliczFunction, grid: Optional[GridSpec] = None,
                 require_normalization: bool = True) -> ConditionReport:
    """Verify normalization, monotonicity, convexity and the M(u)/u limits.

    ``require_normalization=False`` drops the M(1) = 1 check (conjugates are
    structurally valid but not renormalized).
    """
    grid = grid or GridSpec()
    u = grid.points(limit=phi.u_max)
    m0v = phi.m0(u)
    m1v = phi.m1(u)
    at0 = float(phi.m0(np.array([0.0]))[0])
    at1 = float(phi.m0(np.array([1.0]))[0]) if phi.u_max >= 1.0 else np.nan
    ratio = m0v / u

    checks = {
        "zero_at_zero": abs(at0) <= AXIOM_TOL,
        "one_at_one": (not require_normalization
                       or abs(at1 - 1.0) <= AXIOM_TOL),
        "m_nondecreasing": _nondecreasing(m0v),
        "m1_nondecreasing": _nondecreasing(m1v),
        "ratio_nondecreasing": _nondecreasing(ratio),
        "ratio_vanishes_at_zero": bool(ratio[0] <= RATIO_SMALL),
        "ratio_unbounded_at_top": bool(ratio[-1] >= RATIO_LARGE
                                       and ratio[-1] > 2.0 * ratio[len(u) // 2]),
    }
    passed = all(checks.values())
    return ConditionReport(
        condition="axioms", passed=passed,
        witness_sup=float(ratio[-1]), witness_arg=float(u[-1]),
        u0_used=float(u[0]), grid_spec=grid,
        details={"checks": checks, "m_at_zero": at0, "m_at_one": at1,
                 "ratio_bottom": float(ratio[0]), "ratio_top": float(ratio[-1]),
                 "clipped_to": float(u[-1])})


def check_delta2(phi: OrliczFunction, u0: float = DEFAULT_U0,
                 grid: Optional[GridSpec] = None) -> ConditionReport:
    """Growth check: is u M'(u) / M(u) bounded on [u0, top of grid]?

    The report also records the minimum of the same ratio (always > 1 for a
    genuine Orlicz function) and spot-checks the doubling consequence
    M(2u) <= 2**sup M(u) on the lower half of the grid.
    """
    grid = grid or GridSpec()
    u = grid.points(limit=phi.u_max, lower=max(u0, EPS_POS))
    m0v = phi.m0(u)
    m1v = phi.m1(u)
    if np.any(m0v == 0.0):
        raise DomainError("M vanishes at a grid point; shrink the grid bottom")
    with np.errstate(over="ignore", invalid="ignore"):
        ratio = u * m1v / m0v
    finite = bool(np.all(np.isfinite(ratio)))
    if not finite:
        # salvage a witness from the finite part
        ratio = np.where(np.isfinite(ratio), ratio, -np.inf)
    i_max = int(np.argmax(ratio))
    i_min = int(np.argmin(np.where(np.isfinite(ratio), ratio, np.inf)))
    witness = float(ratio[i_max])
    min_ratio = float(ratio[i_min])
    stable, policy = _running_sup_stable(u, ratio)

    lower = u[: len(u) // 2]
    lower = lower[2.0 * lower <= phi.u_max]
    with np.errstate(over="ignore"):
        bound = 2.0 ** witness * phi.m0(lower)
        quot = phi.m0(2.0 * lower) / bound
    doubling_ok = bool(np.all(quot <= 1.0 + 1e-9))

    passed = finite and stable and min_ratio > 1.0 and doubling_ok
    return ConditionReport(
        condition="delta2", passed=passed,
        witness_sup=witness, witness_arg=float(u[i_max]),
        u0_used=float(u[0]), grid_spec=grid,
        details={"min_ratio": min_ratio, "min_ratio_arg": float(u[i_min]),
                 "all_inequality_ok": min_ratio > 1.0,
                 "doubling_max_quotient": float(np.max(quot)) if len(lower) else np.nan,
                 "doubling_ok": doubling_ok,
                 "policy_stable": stable, **policy,
                 "clipped_to": float(u[-1])})


def check_delta2plus(phi: OrliczFunction, u0: float = DEFAULT_U0,
                     grid: Optional[GridSpec] = None) -> ConditionReport:
    """Curvature check: is u M''(u) / M'(u) bounded on [u0, top of grid]?

    Grid points where M'' is one-sided (piecewise junctions) are skipped and
    counted; more than 1 percent skipped is an error.
    """
    grid = grid or GridSpec()
    u = grid.points(limit=phi.u_max, lower=max(u0, EPS_POS))
    m1v = phi.m1(u)
    with np.errstate(over="ignore", invalid="ignore"):
        m2v = phi.m2(u)
    skipped = ~np.isfinite(m2v) & ~np.isposinf(m2v)
    n_skipped = int(np.count_nonzero(skipped))
    if n_skipped > 0.01 * len(u):
        raise UndefinedDerivativeError(
            f"{n_skipped} of {len(u)} grid points have undefined M''")
    keep = ~skipped
    u_k, m1_k, m2_k = u[keep], m1v[keep], m2v[keep]
    if np.any(m1_k == 0.0):
        raise DomainError("M' vanishes at a grid point; shrink the grid bottom")
    with np.errstate(over="ignore", invalid="ignore"):
        ratio = u_k * m2_k / m1_k
    finite = bool(np.all(np.isfinite(ratio)))
    i_max = int(np.argmax(np.where(np.isfinite(ratio), ratio, -np.inf)))
    stable, policy = _running_sup_stable(u_k, ratio)
    passed = finite and stable
    return ConditionReport(
        condition="delta2plus", passed=passed,
        witness_sup=float(ratio[i_max]), witness_arg=float(u_k[i_max]),
        u0_used=float(u_k[0]), grid_spec=grid,
        details={"skipped_points": n_skipped,
                 "min_ratio": float(np.min(ratio)),
                 "policy_stable": stable, **policy,
                 "clipped_to": float(u_k[-1])})


def classify_second_derivative_at_zero(phi: OrliczFunction,
                                       delta: float = CLASSIFY_DELTA) -> str:
    """Classify the limit of M'' along the dyadic sequence delta * 2**-k.

    Returns one of ``zero`` / ``infinite`` / ``finite_positive`` /
    ``indeterminate``.  A concrete result contradicting a concrete declared
    ``phi.zero_class`` raises; an indeterminate result never does.
    """
    u = delta * 2.0 ** (-np.arange(CLASSIFY_STEPS, dtype=np.float64))
    with np.errstate(over="ignore", divide="ignore"):
        v = phi.m2(u)
    if np.any(np.isnan(v)):
        raise UndefinedDerivativeError("M'' undefined near 0")
    tail = v[-8:]
    slack = 1e-12 * np.maximum(1.0, np.abs(tail[:-1]))
    nonincreasing = bool(np.all(np.diff(tail) <= slack))
    nondecreasing = bool(np.all(np.diff(tail) >= -slack))
    last = float(tail[-1])

    if last < CLASSIFY_SMALL and nonincreasing:
        result = "zero"
    elif last > CLASSIFY_BIG and nondecreasing:
        result = "infinite"
    elif (np.isfinite(last) and last > 0.0
          and np.all(np.abs(tail - last) <= CLASSIFY_STABLE * last)):
        result = "finite_positive"
    else:
        result = "indeterminate"

    declared = phi.zero_class
    if (result != "indeterminate" and declared != "indeterminate"
            and result != declared):
        raise ZeroClassMismatchError(
            f"declared zero-class {declared!r} but samples say {result!r}")
    return result


# --- serialization -------------------------------------------------------

def orlicz_from_json(doc: dict) -> OrliczFunction:
    """Rebuild any catalog or piecewise function from its JSON document."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise OrliczError("not an Orlicz function document")
    kind = doc["kind"]
    params = doc.get("params", {})
    if kind == "power":
        return PowerFunction(p=float(params["p"]),
                             u_max=float(doc.get("u_max", 2.0 ** 40)),
                             zero_class=doc.get("zero_class", ""))
    if kind == "power_log":
        return PowerLogFunction(p=float(params["p"]),
                                u_max=float(doc.get("u_max", 2.0 ** 40)),
                                zero_class=doc.get("zero_class", ""))
    if kind == "exp_type":
        return ExpTypeFunction(u_max=float(doc.get("u_max", 700.0)))
    if kind == "piecewise_hermite":
        from .piecewise import PiecewiseOrlicz
        return PiecewiseOrlicz.from_json(doc)
    if kind == "complementary":
        from .constructions import complementary
        return complementary(orlicz_from_json(doc["source"]))
    raise OrliczError(f"unknown Orlicz function kind {kind!r}")


def load_orlicz(path: str) -> OrliczFunction:
    with open(path, "r", encoding="utf-8") as fh:
        return orlicz_from_json(json.load(fh))


def save_orlicz(phi: OrliczFunction, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(phi.to_json(), fh, indent=2)
