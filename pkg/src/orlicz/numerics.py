"""Shared numerical primitives: root bracketing, line search, quadrature,
and Richardson-refined central differences."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import BracketError, SearchError

MACHEPS = np.finfo(np.float64).eps


def bisect_inverse(fn: Callable[[np.ndarray], np.ndarray],
                   targets: np.ndarray,
                   lo: float,
                   hi: float,
                   max_iter: int = 200) -> np.ndarray:
    """Leftmost preimages of ``targets`` under the nondecreasing ``fn``.

    Solves fn(u) >= t by predicate bisection on [lo, hi], which lands on the
    infimum of the preimage even across flat stretches of ``fn``.  ``fn`` must
    accept and return arrays.
    """
    t = np.asarray(targets, dtype=np.float64)
    lo_v = np.full(t.shape, float(lo))
    hi_v = np.full(t.shape, float(hi))
    # targets at or below fn(lo) resolve to lo immediately
    for _ in range(max_iter):
        mid = 0.5 * (lo_v + hi_v)
        ge = fn(mid) >= t
        hi_v = np.where(ge, mid, hi_v)
        lo_v = np.where(ge, lo_v, mid)
        gap = hi_v - lo_v
        if np.all(gap <= 4.0 * MACHEPS * np.maximum(np.abs(hi_v), 1e-300)):
            break
    out = 0.5 * (lo_v + hi_v)
    # exact endpoints beat the midpoint when the target saturates the bracket
    out = np.where(fn(np.full(t.shape, float(lo))) >= t, float(lo), out)
    return out


def bisect_decreasing(fn: Callable[[float], float],
                      lo: float,
                      hi: float,
                      target: float,
                      max_iter: int = 160) -> float:
    """Root of the decreasing scalar map fn(x) = target on [lo, hi].

    Requires fn(lo) >= target >= fn(hi).  Iterates until the bracket collapses
    to machine precision so downstream difference quotients stay clean.
    """
    if not (fn(lo) >= target >= fn(hi)):
        raise BracketError(
            f"bracket [{lo:g}, {hi:g}] does not straddle target {target:g}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if fn(mid) > target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 2.0 * MACHEPS * hi:
            break
    return 0.5 * (lo + hi)


def golden_section_min(fn: Callable[[float], float],
                       lo: float,
                       hi: float,
                       rel_tol: float = 1e-10,
                       max_iter: int = 400) -> tuple[float, float]:
    """Minimize a unimodal scalar function on [lo, hi].

    Returns (argmin, min).  ``rel_tol`` bounds the final bracket width
    relative to the midpoint.
    """
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lo), float(hi)
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
        mid = 0.5 * (a + b)
        if b - a <= rel_tol * max(abs(mid), 1e-300):
            break
    x = c if fc < fd else d
    return x, min(fc, fd)


def descend_to_bracket(fn: Callable[[float], float],
                       k0: float,
                       factor: float = 2.0,
                       max_steps: int = 240) -> tuple[float, float]:
    """Bracket the minimizer of a unimodal fn over (0, inf) starting at k0.

    Walks geometrically in the descent direction until the objective turns
    around; returns a (lo, hi) bracket containing the turnaround point.
    """
    f0 = fn(k0)
    f_lo = fn(k0 / factor)
    f_hi = fn(k0 * factor)
    if f_lo >= f0 <= f_hi:
        return k0 / factor, k0 * factor
    step = factor if f_hi < f0 else 1.0 / factor
    prev_k = k0
    k = k0 * step
    f = f_hi if step > 1 else f_lo
    for _ in range(max_steps):
        nk = k * step
        nf = fn(nk)
        if nf >= f:
            return (prev_k, nk) if step > 1 else (nk, prev_k)
        prev_k, k, f = k, nk, nf
    raise BracketError("no turnaround found while bracketing the minimizer")


def check_unimodal(fn: Callable[[float], float], lo: float, hi: float,
                   samples: int = 17, noise: float = 1e-12) -> None:
    """Raise SearchError if fn shows descent after ascent on [lo, hi]."""
    ks = np.geomspace(lo, hi, samples)
    vals = np.array([fn(k) for k in ks])
    scale = np.maximum(np.abs(vals[:-1]), np.abs(vals[1:]))
    rising = False
    for d, s in zip(np.diff(vals), scale):
        if d > noise * max(s, 1.0):
            rising = True
        elif d < -noise * max(s, 1.0) and rising:
            raise SearchError("objective not unimodal on the search bracket")


_LEGENDRE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _LEGENDRE_CACHE:
        _LEGENDRE_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _LEGENDRE_CACHE[n]


def panel_quadrature(fn: Callable[[np.ndarray], np.ndarray],
                     lows: np.ndarray,
                     highs: np.ndarray,
                     nodes: int = 16) -> np.ndarray:
    """Gauss-Legendre integral of ``fn`` over each panel [lows_i, highs_i].

    Batched: one call to ``fn`` for all panels.  Accurate to machine
    precision per panel for integrands analytic on the closed panel.
    """
    x, w = _leggauss(nodes)
    lows = np.asarray(lows, dtype=np.float64)
    highs = np.asarray(highs, dtype=np.float64)
    half = 0.5 * (highs - lows)
    mid = 0.5 * (highs + lows)
    pts = mid[..., None] + half[..., None] * x
    vals = fn(pts.ravel()).reshape(pts.shape)
    return half * (vals @ w)


def adaptive_simpson(fn: Callable[[float], float],
                     a: float,
                     b: float,
                     tol: float = 1e-12,
                     max_depth: int = 48) -> float:
    """Classic recursive adaptive Simpson rule with absolute tolerance."""
    fa, fb = fn(a), fn(b)
    m = 0.5 * (a + b)
    fm = fn(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, fa, b, fb, m, fm, whole, tol, depth):
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = fn(lm), fn(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if depth >= max_depth or abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        return (recurse(a, fa, m, fm, lm, flm, left, tol / 2, depth + 1)
                + recurse(m, fm, b, fb, rm, frm, right, tol / 2, depth + 1))

    return recurse(a, fa, b, fb, m, fm, whole, tol, 0)


def central_first(fn: Callable[[float], float], x: float, h: float,
                  richardson: bool = True) -> float:
    """Central difference first derivative, one Richardson refinement."""
    d = lambda s: (fn(x + s) - fn(x - s)) / (2.0 * s)
    if not richardson:
        return d(h)
    return (4.0 * d(h / 2.0) - d(h)) / 3.0


def central_second(fn: Callable[[float], float], x: float, h: float,
                   richardson: bool = True) -> float:
    """Central difference second derivative, one Richardson refinement."""
    f0 = fn(x)
    s = lambda t: (fn(x + t) - 2.0 * f0 + fn(x - t)) / (t * t)
    if not richardson:
        return s(h)
    return (4.0 * s(h / 2.0) - s(h)) / 3.0


def central_mixed(fn2: Callable[[float, float], float], x: float, y: float,
                  h: float, richardson: bool = True) -> float:
    """Central cross difference for a mixed second partial."""
    def m(t):
        return (fn2(x + t, y + t) - fn2(x + t, y - t)
                - fn2(x - t, y + t) + fn2(x - t, y - t)) / (4.0 * t * t)
    if not richardson:
        return m(h)
    return (4.0 * m(h / 2.0) - m(h)) / 3.0


def geometric_grid(lo: float, hi: float, per_octave: int,
                   extra: Sequence[float] = ()) -> np.ndarray:
    """Log-uniform grid from lo to hi, optionally unioned with extra points."""
    if not (0 < lo < hi):
        raise ValueError(f"need 0 < lo < hi, got [{lo}, {hi}]")
    octaves = np.log2(hi / lo)
    n = max(int(round(octaves * per_octave)) + 1, 2)
    pts = 2.0 ** np.linspace(np.log2(lo), np.log2(hi), n)
    pts[0], pts[-1] = lo, hi
    if len(extra):
        ex = np.asarray(extra, dtype=np.float64)
        ex = ex[(ex >= lo) & (ex <= hi)]
        pts = np.union1d(pts, ex)
    return pts
