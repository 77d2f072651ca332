"""Knot-based Orlicz functions defined through their first derivative.

A ``PiecewiseOrlicz`` stores breakpoints and, per interval, a rule for M':
either "source" (defer to the function it was built from) or "poly" (a
cubic in the local coordinate, which covers constant, linear and Hermite
segments).  M itself is recovered from cached exact segment integrals, so
M(0) = 0 holds by construction and evaluation below the first modified
knot reproduces the source bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import OrliczFunction, orlicz_from_json
from .errors import ConstructionError

SRC = 0
POLY = 1

_JUNCTION_TOL = 1e-12
_KINK_TOL = 1e-9


def hermite_coefs(v_l: float, s_l: float, v_r: float, s_r: float,
                  length: float) -> np.ndarray:
    """Cubic c0 + c1 t + c2 t^2 + c3 t^3 on [0, length] matching both
    endpoint values and endpoint slopes."""
    d = v_r - v_l
    c2 = (3.0 * d / length - 2.0 * s_l - s_r) / length
    c3 = (s_l + s_r - 2.0 * d / length) / length ** 2
    return np.array([v_l, s_l, c2, c3])


def _poly_val(c: np.ndarray, t: np.ndarray) -> np.ndarray:
    return ((c[..., 3] * t + c[..., 2]) * t + c[..., 1]) * t + c[..., 0]


def _poly_deriv(c: np.ndarray, t: np.ndarray) -> np.ndarray:
    return (3.0 * c[..., 3] * t + 2.0 * c[..., 2]) * t + c[..., 1]


def _poly_integral(c: np.ndarray, t: np.ndarray) -> np.ndarray:
    return (((c[..., 3] / 4.0 * t + c[..., 2] / 3.0) * t
             + c[..., 1] / 2.0) * t + c[..., 0]) * t


def _poly_min_deriv(c: np.ndarray, length: float) -> float:
    """Minimum of the segment's slope (d/dt of the cubic) over [0, length]."""
    cands = [_poly_deriv(c, np.array(0.0)), _poly_deriv(c, np.array(length))]
    if c[3] != 0.0:
        t_star = -c[2] / (3.0 * c[3])
        if 0.0 < t_star < length:
            cands.append(_poly_deriv(c, np.array(t_star)))
    return float(min(cands))


@dataclass(frozen=True, eq=False)
class PiecewiseOrlicz(OrliczFunction):
    """Orlicz function assembled from per-interval rules for M'."""

    knots: np.ndarray
    seg_kinds: np.ndarray
    seg_coefs: np.ndarray
    source: OrliczFunction
    tag: str = ""
    probe_points: tuple = ()
    u_max: float = 0.0
    zero_class: str = ""
    integral_cache: np.ndarray = field(default=None, repr=False)
    _kinks: np.ndarray = field(default=None, repr=False)

    kind = "piecewise_hermite"

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=np.float64)
        kinds = np.asarray(self.seg_kinds, dtype=np.int8)
        coefs = np.asarray(self.seg_coefs, dtype=np.float64)
        if knots[0] != 0.0 or np.any(np.diff(knots) <= 0.0):
            raise ConstructionError("knots must start at 0 and increase")
        if len(kinds) != len(knots) - 1 or coefs.shape != (len(kinds), 4):
            raise ConstructionError("segment table shape mismatch")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "seg_kinds", kinds)
        object.__setattr__(self, "seg_coefs", coefs)
        if not self.u_max:
            object.__setattr__(self, "u_max", self.source.u_max)
        if not self.zero_class:
            object.__setattr__(self, "zero_class", self.source.zero_class)
        object.__setattr__(self, "integral_cache", self._build_cache())
        object.__setattr__(self, "_kinks", self._find_kinks())
        self._validate()

    # --- construction-time checks ---------------------------------------

    def _seg_m1_at(self, i: int, u: float) -> float:
        if self.seg_kinds[i] == SRC:
            return float(self.source.m1(np.array([u]))[0])
        return float(_poly_val(self.seg_coefs[i], np.array(u - self.knots[i])))

    def _seg_m2_at(self, i: int, u: float) -> float:
        if self.seg_kinds[i] == SRC:
            return float(self.source.m2(np.array([u]))[0])
        return float(_poly_deriv(self.seg_coefs[i], np.array(u - self.knots[i])))

    def _build_cache(self) -> np.ndarray:
        cum = np.zeros(len(self.knots))
        for i in range(len(self.seg_kinds)):
            a, b = self.knots[i], self.knots[i + 1]
            if self.seg_kinds[i] == SRC:
                seg = float(self.source.m0(np.array([b]))[0]
                            - self.source.m0(np.array([a]))[0])
            else:
                seg = float(_poly_integral(self.seg_coefs[i], np.array(b - a)))
            cum[i + 1] = cum[i] + seg
        return cum

    def _find_kinks(self) -> np.ndarray:
        kinks = []
        for j in range(1, len(self.knots) - 1):
            left = self._seg_m2_at(j - 1, self.knots[j])
            right = self._seg_m2_at(j, self.knots[j])
            if abs(left - right) > _KINK_TOL * max(1.0, abs(left), abs(right)):
                kinks.append(self.knots[j])
        return np.asarray(kinks)

    def _validate(self) -> None:
        for j in range(1, len(self.knots) - 1):
            left = self._seg_m1_at(j - 1, self.knots[j])
            right = self._seg_m1_at(j, self.knots[j])
            if abs(left - right) > _JUNCTION_TOL * max(1.0, abs(left)):
                raise ConstructionError(
                    f"M' jumps at junction u = {self.knots[j]:g}: "
                    f"{left!r} vs {right!r}")
        for i in range(len(self.seg_kinds)):
            if self.seg_kinds[i] != POLY:
                continue
            length = self.knots[i + 1] - self.knots[i]
            scale = max(1.0, abs(self.seg_coefs[i, 0]))
            if _poly_min_deriv(self.seg_coefs[i], length) < -1e-12 * scale:
                raise ConstructionError(
                    f"segment {i} on [{self.knots[i]:g}, {self.knots[i+1]:g}] "
                    "has a decreasing stretch of M'")

    # --- evaluation ------------------------------------------------------

    def _locate(self, u: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.knots, u, side="right") - 1
        return np.clip(idx, 0, len(self.seg_kinds) - 1)

    def m0(self, u):
        u = np.asarray(u, dtype=np.float64)
        idx = self._locate(u)
        out = np.empty_like(u)
        src = self.seg_kinds[idx] == SRC
        if np.any(src):
            base = self.source.m0(self.knots[idx[src]])
            out[src] = (self.integral_cache[idx[src]]
                        + self.source.m0(u[src]) - base)
        poly = ~src
        if np.any(poly):
            t = u[poly] - self.knots[idx[poly]]
            out[poly] = (self.integral_cache[idx[poly]]
                         + _poly_integral(self.seg_coefs[idx[poly]], t))
        return out

    def m1(self, u):
        u = np.asarray(u, dtype=np.float64)
        idx = self._locate(u)
        out = np.empty_like(u)
        src = self.seg_kinds[idx] == SRC
        if np.any(src):
            out[src] = self.source.m1(u[src])
        poly = ~src
        if np.any(poly):
            t = u[poly] - self.knots[idx[poly]]
            out[poly] = _poly_val(self.seg_coefs[idx[poly]], t)
        return out

    def m2(self, u):
        u = np.asarray(u, dtype=np.float64)
        idx = self._locate(u)
        out = np.empty_like(u)
        src = self.seg_kinds[idx] == SRC
        if np.any(src):
            out[src] = self.source.m2(u[src])
        poly = ~src
        if np.any(poly):
            t = u[poly] - self.knots[idx[poly]]
            out[poly] = _poly_deriv(self.seg_coefs[idx[poly]], t)
        if self._kinks.size:
            out = np.where(np.isin(u, self._kinks), np.nan, out)
        return out

    def derivative_kink_points(self) -> np.ndarray:
        return self._kinks

    @property
    def params(self) -> dict:
        return {"segments": int(len(self.seg_kinds)), "tag": self.tag}

    @property
    def satisfies_delta2(self) -> Optional[bool]:
        return self.source.satisfies_delta2

    def to_json(self) -> dict:
        segments = []
        for i in range(len(self.seg_kinds)):
            segments.append({
                "kind": "source" if self.seg_kinds[i] == SRC else "poly",
                "coefs": [float(c) for c in self.seg_coefs[i]],
            })
        return {"kind": self.kind,
                "knots": [float(k) for k in self.knots],
                "segments": segments,
                "source": self.source.to_json(),
                "tag": self.tag,
                "probe_points": [float(x) for x in self.probe_points],
                "u_max": float(self.u_max),
                "zero_class": self.zero_class}

    @classmethod
    def from_json(cls, doc: dict) -> "PiecewiseOrlicz":
        source = orlicz_from_json(doc["source"])
        kinds = np.array([SRC if s["kind"] == "source" else POLY
                          for s in doc["segments"]], dtype=np.int8)
        coefs = np.array([s["coefs"] for s in doc["segments"]], dtype=np.float64)
        return cls(knots=np.asarray(doc["knots"], dtype=np.float64),
                   seg_kinds=kinds, seg_coefs=coefs, source=source,
                   tag=doc.get("tag", ""),
                   probe_points=tuple(doc.get("probe_points", ())),
                   u_max=float(doc.get("u_max", 0.0)),
                   zero_class=doc.get("zero_class", ""))


class SegmentBuilder:
    """Accumulates contiguous segments for a ``PiecewiseOrlicz``."""

    def __init__(self, source: OrliczFunction):
        self.source = source
        self.knots = [0.0]
        self.kinds: list[int] = []
        self.coefs: list[np.ndarray] = []

    @property
    def cursor(self) -> float:
        return self.knots[-1]

    def _push(self, end: float, kind: int, coefs: np.ndarray) -> None:
        if end <= self.cursor:
            raise ConstructionError(
                f"segment end {end!r} does not advance past {self.cursor!r}")
        self.knots.append(float(end))
        self.kinds.append(kind)
        self.coefs.append(coefs)

    def source_until(self, end: float) -> None:
        self._push(end, SRC, np.zeros(4))

    def line_until(self, end: float, value_at_start: float, slope: float) -> None:
        self._push(end, POLY, np.array([value_at_start, slope, 0.0, 0.0]))

    def cubic_until(self, end: float, v_l: float, s_l: float,
                    v_r: float, s_r: float) -> None:
        length = end - self.cursor
        self._push(end, POLY, hermite_coefs(v_l, s_l, v_r, s_r, length))

    def build(self, tag: str = "", probe_points: tuple = (),
              u_max: float = 0.0) -> PiecewiseOrlicz:
        return PiecewiseOrlicz(
            knots=np.array(self.knots), seg_kinds=np.array(self.kinds),
            seg_coefs=np.array(self.coefs), source=self.source,
            tag=tag, probe_points=probe_points, u_max=u_max)
