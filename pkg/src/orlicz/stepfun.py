"""Piecewise-constant functions on [0, 1] with Lebesgue measure.

Arithmetic happens on the common refinement of the breakpoint sets and is
exact; supports are unions of cells, so support measures come out as plain
sums of widths.  Values at or below ``SUPPORT_FLOOR`` in magnitude count as
zero when supports are computed (guards constructed functionals against
arithmetic dust; honest step arithmetic never produces it).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

SUPPORT_FLOOR = 1e-14


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Right-open step function: value[i] on [breakpoints[i], breakpoints[i+1])."""

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=np.float64).copy()
        v = np.asarray(self.values, dtype=np.float64).copy()
        if b.ndim != 1 or v.ndim != 1 or len(b) != len(v) + 1:
            raise ValueError("need n+1 breakpoints for n values")
        if b[0] != 0.0 or b[-1] != 1.0:
            raise ValueError("breakpoints must run from 0.0 to 1.0")
        if np.any(np.diff(b) <= 0.0):
            raise ValueError("breakpoints must be strictly increasing")
        b.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)

    # --- constructors ----------------------------------------------------

    @classmethod
    def from_values(cls, values) -> "StepFunction":
        """Uniform partition carrying the given cell values."""
        v = np.asarray(values, dtype=np.float64)
        b = np.linspace(0.0, 1.0, len(v) + 1)
        return cls(b, v)

    @classmethod
    def constant(cls, c: float) -> "StepFunction":
        return cls(np.array([0.0, 1.0]), np.array([float(c)]))

    @classmethod
    def zero(cls) -> "StepFunction":
        return cls.constant(0.0)

    @classmethod
    def indicator(cls, a: float, b: float, height: float = 1.0) -> "StepFunction":
        """height * indicator of [a, b) inside [0, 1]."""
        if not 0.0 <= a < b <= 1.0:
            raise ValueError(f"need 0 <= a < b <= 1, got [{a}, {b}]")
        keep_b = [0.0] + [x for x in (a, b) if 0.0 < x < 1.0] + [1.0]
        keep_v = []
        for i in range(len(keep_b) - 1):
            mid = 0.5 * (keep_b[i] + keep_b[i + 1])
            keep_v.append(height if a <= mid < b else 0.0)
        return cls(np.array(keep_b), np.array(keep_v))

    # --- basic queries -----------------------------------------------------

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    @property
    def n_cells(self) -> int:
        return len(self.values)

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    @property
    def is_zero(self) -> bool:
        return bool(np.all(self.values == 0.0))

    def value_at(self, t: float) -> float:
        i = np.searchsorted(self.breakpoints, t, side="right") - 1
        i = min(max(int(i), 0), self.n_cells - 1)
        return float(self.values[i])

    def support_mask(self) -> np.ndarray:
        return np.abs(self.values) > SUPPORT_FLOOR

    def support_measure(self) -> float:
        return float(np.sum(self.widths[self.support_mask()]))

    # --- arithmetic --------------------------------------------------------

    def on_grid(self, breakpoints: np.ndarray) -> np.ndarray:
        """Cell values of this function on a refinement of its grid."""
        mids = 0.5 * (breakpoints[:-1] + breakpoints[1:])
        idx = np.searchsorted(self.breakpoints, mids, side="right") - 1
        return self.values[np.clip(idx, 0, self.n_cells - 1)]

    def __add__(self, other: "StepFunction") -> "StepFunction":
        b, fv, gv = refine_pair(self, other)
        return StepFunction(b, fv + gv)

    def __sub__(self, other: "StepFunction") -> "StepFunction":
        b, fv, gv = refine_pair(self, other)
        return StepFunction(b, fv - gv)

    def __mul__(self, c: float) -> "StepFunction":
        return StepFunction(self.breakpoints, self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self) -> "StepFunction":
        return StepFunction(self.breakpoints, -self.values)

    def axpy(self, alpha: float, other: "StepFunction") -> "StepFunction":
        """self + alpha * other on the common refinement."""
        b, fv, gv = refine_pair(self, other)
        return StepFunction(b, fv + float(alpha) * gv)

    def simplify(self) -> "StepFunction":
        """Merge adjacent cells carrying identical values."""
        keep = np.concatenate([[True], self.values[1:] != self.values[:-1]])
        b = np.concatenate([self.breakpoints[:-1][keep], [1.0]])
        return StepFunction(b, self.values[keep])

    # --- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {"breakpoints": [float(x) for x in self.breakpoints],
                "values": [float(x) for x in self.values]}

    @classmethod
    def from_json(cls, doc: dict) -> "StepFunction":
        return cls(np.asarray(doc["breakpoints"], dtype=np.float64),
                   np.asarray(doc["values"], dtype=np.float64))

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2)

    @classmethod
    def load(cls, path: str) -> "StepFunction":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))

    def to_csv(self, path: str) -> None:
        """(breakpoint, value) rows; the last row repeats the final value
        so step plots close at t = 1."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["breakpoint", "value"])
            for i, v in enumerate(self.values):
                w.writerow([repr(float(self.breakpoints[i])), repr(float(v))])
            w.writerow([repr(1.0), repr(float(self.values[-1]))])

    @classmethod
    def from_csv(cls, path: str) -> "StepFunction":
        bps, vals = [], []
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        for row in rows[1:]:
            bps.append(float(row[0]))
            vals.append(float(row[1]))
        return cls(np.asarray(bps), np.asarray(vals[:-1]))


def refine_pair(f: StepFunction, g: StepFunction):
    """Common refinement: (breakpoints, f values, g values)."""
    if np.array_equal(f.breakpoints, g.breakpoints):
        return f.breakpoints, f.values, g.values
    b = np.union1d(f.breakpoints, g.breakpoints)
    return b, f.on_grid(b), g.on_grid(b)


def pairing(f: StepFunction, g: StepFunction) -> float:
    """The integral of f * g over [0, 1]."""
    b, fv, gv = refine_pair(f, g)
    return float(np.dot(np.diff(b), fv * gv))


@dataclass(frozen=True)
class SupportRelation:
    """How two supports sit relative to each other, with the measures."""

    relation: str
    mu_f_minus_g: float
    mu_g_minus_f: float
    mu_intersection: float

    def to_json(self) -> dict:
        return {"relation": self.relation,
                "mu_f_minus_g": self.mu_f_minus_g,
                "mu_g_minus_f": self.mu_g_minus_f,
                "mu_intersection": self.mu_intersection}


def support_relation(f: StepFunction, g: StepFunction) -> SupportRelation:
    """Classify supp f against supp g as cell unions."""
    b, fv, gv = refine_pair(f, g)
    w = np.diff(b)
    sf = np.abs(fv) > SUPPORT_FLOOR
    sg = np.abs(gv) > SUPPORT_FLOOR
    mu_fg = float(np.sum(w[sf & ~sg]))
    mu_gf = float(np.sum(w[sg & ~sf]))
    mu_int = float(np.sum(w[sf & sg]))
    if mu_fg == 0.0 and mu_gf == 0.0:
        rel = "equal"
    elif mu_fg == 0.0:
        rel = "f_subset_g"
    elif mu_gf == 0.0:
        rel = "g_subset_f"
    elif mu_int == 0.0:
        rel = "disjoint"
    else:
        rel = "proper_overlap"
    return SupportRelation(rel, mu_fg, mu_gf, mu_int)
