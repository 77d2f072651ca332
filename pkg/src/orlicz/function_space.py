"""Luxemburg norms, the dual (Amemiya) norm, and norming functionals.

The Luxemburg norm is the root of the strictly decreasing modular equation
and is found by bisection driven to machine precision; for the pure-power
catalog kind the whole bisection runs inside the active kernel backend.
The dual norm uses the Amemiya formula over the complementary function.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .constructions import complementary
from .core import OrliczFunction, PowerFunction
from .errors import BracketError, DomainError, PreconditionError
from .numerics import check_unimodal, descend_to_bracket, golden_section_min
from .stepfun import StepFunction, pairing

MODULAR_TOL = 1e-12


def modular(f: StepFunction, lam: float, phi: OrliczFunction) -> float:
    """Integral of M(|f| / lam): an exact finite sum over the cells."""
    if lam <= 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")
    scaled = np.abs(f.values) / lam
    if np.max(scaled, initial=0.0) > phi.u_max:
        raise DomainError(
            f"|f|/lambda reaches {np.max(scaled):g}, beyond u_max = {phi.u_max:g}")
    return float(np.dot(f.widths, phi.m0(scaled)))


def luxemburg_norm(f: StepFunction, phi: OrliczFunction) -> float:
    """The norm lambda* with modular(f, lambda*) = 1; 0 for the zero function.

    Requires a doubling-growth function so the modular attains 1 exactly at
    the norm.  Bisection runs until the bracket collapses, which leaves the
    modular residual well under 1e-12.
    """
    if f.is_zero:
        return 0.0
    if phi.satisfies_delta2 is False:
        raise PreconditionError(
            "norm attainment needs the doubling-growth condition")
    if isinstance(phi, PowerFunction):
        lam = _kernels.get_backend().norm_power(f.values, f.widths, phi.p)
        if f.sup_norm > lam * phi.u_max:
            raise BracketError(
                "cannot bracket the norm: the modular is not evaluable at "
                "the norm within u_max")
        _check_attained(f, lam, phi)
        return lam

    hi = f.sup_norm
    lam_floor = (hi / phi.u_max) * (1.0 + 1e-12)
    lo = None
    lam = hi
    for _ in range(300):
        nxt = lam * 0.5
        if nxt <= lam_floor:
            if modular(f, lam_floor, phi) >= 1.0:
                lo = lam_floor
                break
            raise BracketError(
                "cannot bracket the norm: the modular stays below 1 down to "
                "the smallest lambda evaluable within u_max")
        lam = nxt
        if modular(f, lam, phi) > 1.0:
            lo = lam
            break
    if lo is None:
        raise BracketError("no lower bracket found after 300 halvings")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if modular(f, mid, phi) > 1.0:
            lo = mid
        else:
            hi = mid
    lam = 0.5 * (lo + hi)
    _check_attained(f, lam, phi)
    return lam


def _check_attained(f: StepFunction, lam: float, phi: OrliczFunction) -> None:
    resid = abs(modular(f, lam, phi) - 1.0)
    if resid > MODULAR_TOL:
        raise BracketError(
            f"modular residual {resid:.3g} at the computed norm; "
            "the modular equation did not attain 1")


def normalize(f: StepFunction, phi: OrliczFunction) -> StepFunction:
    n = luxemburg_norm(f, phi)
    if n == 0.0:
        raise ValueError("cannot normalize the zero function")
    return f * (1.0 / n)


def amemiya_dual_norm(g: StepFunction, phi: OrliczFunction) -> float:
    """Dual norm inf_k (1 + integral of M*(k |g|)) / k over k > 0.

    The objective is unimodal in k; a geometric descent brackets the
    minimizer, a quick scan guards unimodality, and golden-section search
    polishes to relative tolerance 1e-10.
    """
    if g.is_zero:
        return 0.0
    mstar = complementary(phi)
    av = np.abs(g.values)
    w = g.widths
    k_cap = mstar.u_max / g.sup_norm

    def objective(k: float) -> float:
        return (1.0 + float(np.dot(w, mstar.m0(k * av)))) / k

    k0 = min(1.0 / g.sup_norm, k_cap / 4.0)
    lo, hi = descend_to_bracket(objective, k0)
    check_unimodal(objective, lo, hi)
    _, best = golden_section_min(objective, lo, hi, rel_tol=1e-10)
    return best


def norming_functional(h: StepFunction, phi: OrliczFunction) -> StepFunction:
    """The aligned dual element: C * M'(|h| / ||h||) * sgn(h).

    C is fixed by the pairing <h^N, h> = ||h||**2; with that choice the
    Amemiya norm of the result equals ||h|| (up to quadrature error).
    """
    if h.is_zero:
        raise ValueError("the zero function has no norming functional")
    lam = luxemburg_norm(h, phi)
    base = phi.m1(np.abs(h.values) / lam) * np.sign(h.values)
    hn = StepFunction(h.breakpoints, base)
    scale = lam * lam / pairing(hn, h)
    return StepFunction(h.breakpoints, base * scale)
