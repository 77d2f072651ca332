"""Weighted composition operators, isometry verification, disjointness
preservation, and recovery of the weighted-composition form from a black
box.

Operators act on step functions representable on a fixed uniform partition.
A weighted composition maps f to a(t) * f(sigma(t)) where sigma assigns a
source cell to every target cell.  The harness verifies isometry on a
testset closed under random pairwise combinations, checks that disjoint
supports stay disjoint (exactly, on the cell structure), cross-validates
with the curve detectors, and reconstructs (a, sigma) by probing a black
box with the indicator basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import OrliczFunction
from .detector import (test_disjointness_zero_case, test_support_equality)
from .errors import AmbiguityError, OrliczError, PreconditionError
from .function_space import luxemburg_norm
from .stepfun import StepFunction, SUPPORT_FLOOR, support_relation
from .suites import testset as random_testset

ISOMETRY_TOL = 1e-9
UNIMODULAR_TOL = 1e-6
LATTICE_TOL = 1e-6
POWER_FIT_R2 = 1.0 - 1e-6

Operator = Callable[[StepFunction], StepFunction]


def resample_to_uniform(f: StepFunction, resolution: int) -> np.ndarray:
    """Cell values of f on the uniform partition; f must be constant on
    every uniform cell."""
    grid = np.linspace(0.0, 1.0, resolution + 1)
    b = np.union1d(grid, f.breakpoints)
    vals = f.on_grid(b)
    mids = 0.5 * (b[:-1] + b[1:])
    owner = np.minimum((mids * resolution).astype(int), resolution - 1)
    out = np.empty(resolution)
    for j in range(resolution):
        cell_vals = vals[owner == j]
        if np.any(cell_vals != cell_vals[0]):
            raise PreconditionError(
                f"function is not constant on uniform cell {j} "
                f"at resolution {resolution}")
        out[j] = cell_vals[0]
    return out


@dataclass(frozen=True, eq=False)
class WeightedComposition:
    """Tf(t) = a(t) * f(sigma(t)) on a uniform partition."""

    sigma: np.ndarray
    a: StepFunction

    def __post_init__(self):
        sig = np.asarray(self.sigma, dtype=np.int64).copy()
        r = self.resolution
        if len(sig) != r:
            raise ValueError("sigma length must match the weight resolution")
        if np.any((sig < 0) | (sig >= r)):
            raise ValueError("sigma entries must be cell indices")
        expected = np.linspace(0.0, 1.0, r + 1)
        if not np.array_equal(self.a.breakpoints, expected):
            raise ValueError("weight must live on the uniform partition")
        sig.setflags(write=False)
        object.__setattr__(self, "sigma", sig)

    @property
    def resolution(self) -> int:
        return self.a.n_cells

    def __call__(self, f: StepFunction) -> StepFunction:
        fv = resample_to_uniform(f, self.resolution)
        return StepFunction(self.a.breakpoints,
                            self.a.values * fv[self.sigma])

    def compose(self, other: "WeightedComposition") -> "WeightedComposition":
        """self after other: t -> a_self(t) * a_other(sigma_self(t)) * ..."""
        if other.resolution != self.resolution:
            raise ValueError("compositions need matching resolutions")
        sigma = other.sigma[self.sigma]
        a_vals = self.a.values * other.a.values[self.sigma]
        return WeightedComposition(sigma,
                                   StepFunction(self.a.breakpoints, a_vals))

    @classmethod
    def identity(cls, resolution: int) -> "WeightedComposition":
        return cls(np.arange(resolution),
                   StepFunction.from_values(np.ones(resolution)))

    def to_json(self) -> dict:
        return {"kind": "weighted_composition",
                "resolution": self.resolution,
                "sigma": [int(i) for i in self.sigma],
                "a_values": [float(v) for v in self.a.values]}

    @classmethod
    def from_json(cls, doc: dict) -> "WeightedComposition":
        r = int(doc["resolution"])
        return cls(np.asarray(doc["sigma"], dtype=np.int64),
                   StepFunction.from_values(
                       np.asarray(doc["a_values"], dtype=np.float64)))


class HalfMixingOperator:
    """Rotation-style mixing of the two halves of [0, 1].

    (Tf)(t) = cos(theta) f(t) - sin(theta) f(t + 1/2) on the left half and
    sin(theta) f(t - 1/2) + cos(theta) f(t) on the right half.  A linear
    bijection that is isometric for the quadratic catalog entry but not for
    other exponents; it is not a weighted composition.
    """

    def __init__(self, theta: float, resolution: int = 64):
        if resolution % 2:
            raise ValueError("resolution must be even")
        self.theta = float(theta)
        self.resolution = resolution

    def __call__(self, f: StepFunction) -> StepFunction:
        fv = resample_to_uniform(f, self.resolution)
        half = self.resolution // 2
        c, s = np.cos(self.theta), np.sin(self.theta)
        out = np.empty_like(fv)
        out[:half] = c * fv[:half] - s * fv[half:]
        out[half:] = s * fv[:half] + c * fv[half:]
        return StepFunction.from_values(out)

    def to_json(self) -> dict:
        return {"kind": "half_mix", "theta": self.theta,
                "resolution": self.resolution}


class ShiftByMeanOperator:
    """Tf = f + (integral of f) * 1: deliberately not an isometry."""

    def __init__(self, resolution: int = 64):
        self.resolution = resolution

    def __call__(self, f: StepFunction) -> StepFunction:
        fv = resample_to_uniform(f, self.resolution)
        mean = float(np.dot(np.full(self.resolution, 1.0 / self.resolution), fv))
        return StepFunction.from_values(fv + mean)

    def to_json(self) -> dict:
        return {"kind": "shift_by_mean", "resolution": self.resolution}


def operator_from_json(doc: dict):
    kind = doc.get("kind")
    if kind == "weighted_composition":
        return WeightedComposition.from_json(doc)
    if kind == "half_mix":
        return HalfMixingOperator(float(doc["theta"]),
                                  int(doc.get("resolution", 64)))
    if kind == "shift_by_mean":
        return ShiftByMeanOperator(int(doc.get("resolution", 64)))
    raise OrliczError(f"unknown operator kind {kind!r}")


def apply_operator(T: Operator, f: StepFunction) -> StepFunction:
    """Apply any operator (weighted composition or black box) to f."""
    return T(f)


def random_unimodular_composition(rng: np.random.Generator,
                                  resolution: int = 64,
                                  signs: bool = True) -> WeightedComposition:
    """Measure-preserving cell permutation with weight values +-1."""
    sigma = rng.permutation(resolution)
    a = rng.choice([-1.0, 1.0], size=resolution) if signs else np.ones(resolution)
    return WeightedComposition(sigma, StepFunction.from_values(a))


@dataclass
class IsometryReport:
    """Result of the norm-preservation / disjointness-preservation checks."""

    max_norm_deviation: float
    testset_size: int
    is_isometry: bool
    preservation_failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"max_norm_deviation": self.max_norm_deviation,
                "testset_size": self.testset_size,
                "is_isometry": bool(self.is_isometry),
                "preservation_failures": list(self.preservation_failures),
                "details": self.details}


def check_isometry(T: Operator, phi: OrliczFunction,
                   testset: Sequence[StepFunction],
                   combinations: int = 200,
                   rng: Optional[np.random.Generator] = None) -> IsometryReport:
    """Max norm deviation over the testset closed under random pairwise
    combinations f + alpha g."""
    if not testset:
        raise PreconditionError("testset must be nonempty")
    rng = rng or np.random.default_rng(0)
    closed = list(testset)
    n = len(testset)
    for _ in range(combinations):
        i, j = rng.integers(0, n, size=2)
        alpha = float(rng.uniform(-2.0, 2.0)) or 0.5
        closed.append(testset[i].axpy(alpha, testset[j]))
    worst = 0.0
    worst_idx = -1
    for idx, f in enumerate(closed):
        dev = abs(luxemburg_norm(T(f), phi) - luxemburg_norm(f, phi))
        if dev > worst:
            worst, worst_idx = dev, idx
    return IsometryReport(max_norm_deviation=worst,
                          testset_size=len(closed),
                          is_isometry=worst <= ISOMETRY_TOL,
                          details={"worst_index": worst_idx,
                                   "tolerance": ISOMETRY_TOL})


def check_disjointness_preservation(
        T: Operator, phi: OrliczFunction,
        pairs: Sequence[tuple],
        isometry_report: IsometryReport,
        cross_validate: bool = True) -> IsometryReport:
    """Verify that images of disjoint pairs stay disjoint (exactly on the
    cell structure) and cross-check with the curve detector of the regime.

    A failure entry is recorded when supports of the images overlap, or
    when a detector returns an affirmative verdict contradicting
    disjointness; detector inconclusives are only counted.
    """
    if not isometry_report.is_isometry:
        raise PreconditionError(
            "operator failed the isometry check; refusing to test "
            "disjointness preservation")
    failures = []
    inconclusive = 0
    checked = 0
    for idx, (f, g) in enumerate(pairs):
        rel_in = support_relation(f, g)
        if rel_in.mu_intersection > 0.0:
            raise PreconditionError(f"input pair {idx} is not disjoint")
        tf, tg = T(f), T(g)
        rel_out = support_relation(tf, tg)
        if rel_out.mu_intersection > 0.0:
            failures.append({"pair": idx, "kind": "support_overlap",
                             "measure": rel_out.mu_intersection})
            continue
        if not cross_validate or tf.is_zero or tg.is_zero:
            continue
        checked += 1
        nf = tf * (1.0 / luxemburg_norm(tf, phi))
        ng = tg * (1.0 / luxemburg_norm(tg, phi))
        if phi.zero_class == "zero":
            verdict = test_disjointness_zero_case(nf, ng, phi)
            if verdict.claim == "not_disjoint":
                failures.append({"pair": idx, "kind": "detector_contradiction",
                                 "claim": verdict.claim})
            elif verdict.claim != "disjoint":
                inconclusive += 1
        elif phi.zero_class == "infinite":
            verdict = test_support_equality(nf, ng, phi)
            if verdict.claim == "supports_equal":
                failures.append({"pair": idx, "kind": "detector_contradiction",
                                 "claim": verdict.claim})
            elif verdict.claim != "supports_differ":
                inconclusive += 1
        # finite-positive curvature at 0 has no detector; exact check only
    return IsometryReport(
        max_norm_deviation=isometry_report.max_norm_deviation,
        testset_size=len(pairs),
        is_isometry=isometry_report.is_isometry,
        preservation_failures=failures,
        details={"detector_checked": checked,
                 "detector_inconclusive": inconclusive})


@dataclass
class RecoveryResult:
    """Weighted-composition form recovered from a black-box operator."""

    operator: WeightedComposition
    residual: float
    covered: np.ndarray
    unimodular: bool
    modulus_lattice: Optional[dict]
    power_like_source: bool
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"operator": self.operator.to_json(),
                "residual": self.residual,
                "covered_cells": int(np.count_nonzero(self.covered)),
                "unimodular": bool(self.unimodular),
                "modulus_lattice": self.modulus_lattice,
                "power_like_source": bool(self.power_like_source),
                "details": self.details}


def _fit_modulus_lattice(moduli: np.ndarray) -> Optional[dict]:
    """Fit |a| values to a geometric ladder A * gamma**k, k integer."""
    logs = np.sort(np.log(moduli))
    uniq = [logs[0]]
    for x in logs[1:]:
        if x - uniq[-1] > LATTICE_TOL:
            uniq.append(x)
    if len(uniq) == 1:
        return {"A": float(np.exp(uniq[0])), "gamma": 1.0, "levels": 1}
    gaps = np.diff(uniq)
    step = float(np.min(gaps))
    ks = gaps / step
    if np.any(np.abs(ks - np.round(ks)) > LATTICE_TOL / step):
        return None
    return {"A": float(np.exp(uniq[0])), "gamma": float(np.exp(step)),
            "levels": len(uniq)}


def source_is_power_like(phi: OrliczFunction, t0: float = 0.5,
                         points: int = 240) -> bool:
    """Does log M regress linearly on log u over (0, t0] with R^2 at least
    1 - 1e-6?  True for pure powers, false for the power-log hybrid."""
    u = np.geomspace(1e-6, t0, points)
    y = np.log(phi.m0(u))
    x = np.log(u)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(np.sum(resid ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    return 1.0 - ss_res / ss_tot >= POWER_FIT_R2


def recover_weighted_composition(
        T: Operator, resolution: int, phi: OrliczFunction,
        rng: Optional[np.random.Generator] = None,
        validation: int = 24) -> RecoveryResult:
    """Infer (a, sigma) by probing T with the uniform indicator basis.

    Each target cell must be covered by the image of exactly one basis
    indicator (two is an AmbiguityError: the black box does not preserve
    disjointness at this resolution).  Basis norms must be preserved.
    """
    rng = rng or np.random.default_rng(0)
    grid = np.linspace(0.0, 1.0, resolution + 1)
    images = []
    for i in range(resolution):
        vals = np.zeros(resolution)
        vals[i] = 1.0
        chi = StepFunction(grid, vals)
        img = T(chi)
        dev = abs(luxemburg_norm(img, phi) - luxemburg_norm(chi, phi))
        if dev > ISOMETRY_TOL:
            raise PreconditionError(
                f"basis indicator {i} changes norm by {dev:g}; "
                "operator is not isometric at this resolution")
        images.append(resample_to_uniform(img, resolution))

    sigma = np.zeros(resolution, dtype=np.int64)
    a_vals = np.zeros(resolution)
    covered = np.zeros(resolution, dtype=bool)
    for i, img in enumerate(images):
        hit = np.abs(img) > SUPPORT_FLOOR
        clash = hit & covered
        if np.any(clash):
            j = int(np.nonzero(clash)[0][0])
            raise AmbiguityError(
                f"target cell {j} is covered by two basis images; "
                "operator does not preserve disjointness at this resolution")
        sigma[hit] = i
        a_vals[hit] = img[hit]
        covered |= hit

    wc = WeightedComposition(sigma, StepFunction(grid, a_vals))
    worst = 0.0
    probes = [StepFunction(grid, rng.uniform(-1.5, 1.5, size=resolution))
              for _ in range(validation)]
    probes += [StepFunction(grid, np.ones(resolution))]
    for f in probes:
        diff = T(f) - wc(f)
        worst = max(worst, luxemburg_norm(diff, phi))
    moduli = np.abs(a_vals[covered])
    unimodular = bool(np.all(np.abs(moduli - 1.0) <= UNIMODULAR_TOL))
    lattice = None if unimodular else _fit_modulus_lattice(moduli)
    return RecoveryResult(
        operator=wc, residual=worst, covered=covered,
        unimodular=unimodular, modulus_lattice=lattice,
        power_like_source=source_is_power_like(phi),
        details={"resolution": resolution,
                 "uncovered_cells": int(np.count_nonzero(~covered))})


def spanning_testset(rng: np.random.Generator, phi: OrliczFunction,
                     size: int = 20, cells: int = 64) -> list:
    """Random testset plus the constant function (so scalings are caught)."""
    base = random_testset(rng, phi, size, cells=cells)
    base.append(StepFunction.from_values(np.ones(cells)))
    return base
