"""The modular surface F(alpha, eta), its closed-form partials, and the
norm curve N(alpha) = ||f + alpha g|| with implicit first and second
derivatives.

All integrals are exact finite sums over the common refinement of the two
step functions.  Closed-form partials are cross-checked against Richardson-
refined central differences of F and of the norm itself.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .core import OrliczFunction, PowerFunction
from .errors import (CrossingPointError, DomainError, InfiniteCurvatureError,
                     OrliczError, PreconditionError, UndefinedDerivativeError)
from .function_space import luxemburg_norm, modular
from .numerics import central_first, central_mixed, central_second
from .stepfun import StepFunction, refine_pair

UNIT_TOL = 1e-10
FD_STEP_SCALE = 1e-4


@dataclass(frozen=True)
class FPartials:
    """The five partials of F at one point (alpha, eta)."""

    alpha: float
    alphaalpha: float
    eta: float
    alphaeta: float
    etaeta: float


class _Pair:
    """f, g on a shared grid with unit norms verified once."""

    def __init__(self, f: StepFunction, g: StepFunction, phi: OrliczFunction,
                 checked: bool = False):
        b, fv, gv = refine_pair(f, g)
        self.breakpoints = b
        self.widths = np.diff(b)
        self.fv = fv
        self.gv = gv
        self.phi = phi
        if not checked:
            for name, vals in (("f", fv), ("g", gv)):
                sf = StepFunction(b, vals)
                n = luxemburg_norm(sf, phi)
                if abs(n - 1.0) > UNIT_TOL:
                    raise PreconditionError(
                        f"||{name}|| = {n!r} but the modular surface needs "
                        "unit-norm inputs")

    def combo(self, alpha: float) -> StepFunction:
        return StepFunction(self.breakpoints, self.fv + alpha * self.gv)

    def crossing_alphas(self) -> np.ndarray:
        mask = (self.gv != 0.0) & (self.fv != 0.0)
        return np.unique(-self.fv[mask] / self.gv[mask])

    def norm(self, alpha: float) -> float:
        if isinstance(self.phi, PowerFunction):
            return _kernels.get_backend().norm_power(
                self.fv + alpha * self.gv, self.widths, self.phi.p)
        return luxemburg_norm(self.combo(alpha), self.phi)

    def f_value(self, alpha: float, eta: float) -> float:
        if eta <= 0.0:
            raise ValueError(f"eta must be positive, got {eta}")
        return modular(self.combo(alpha), eta, self.phi) - 1.0

    def f_partials(self, alpha: float, eta: float) -> FPartials:
        s = self.fv + alpha * self.gv
        zero_hit = (s == 0.0) & (self.gv != 0.0)
        m2_zero = 0.0
        if np.any(zero_hit):
            if self.phi.zero_class == "infinite":
                raise InfiniteCurvatureError(
                    "a cell of f + alpha g vanishes while M'' blows up at 0; "
                    "perturb alpha")
            m2_zero = self.phi.m2_at_zero()
        if isinstance(self.phi, PowerFunction):
            vals = _kernels.get_backend().partials_power(
                self.fv, self.gv, self.widths, alpha, eta, self.phi.p, m2_zero)
            return FPartials(*vals)

        az = np.abs(s)
        z = az / eta
        if np.max(z, initial=0.0) > self.phi.u_max:
            raise DomainError("|f + alpha g| / eta exceeds u_max")
        sgn = np.sign(s)
        m1v = self.phi.m1(z)
        m2v = np.zeros_like(z)
        pos = z > 0.0
        m2v[pos] = self.phi.m2(z[pos])
        m2v[zero_hit] = m2_zero
        if np.any(np.isnan(m1v)) or np.any(np.isnan(m2v)):
            raise UndefinedDerivativeError(
                "M' or M'' undefined at a scaled cell value")
        w = self.widths
        f_a = float(np.dot(w, m1v * sgn * self.gv)) / eta
        f_aa = float(np.dot(w, m2v * self.gv * self.gv)) / eta ** 2
        f_e = -float(np.dot(w, m1v * az)) / eta ** 2
        f_ae = (-float(np.dot(w, m2v * s * self.gv)) / eta ** 3
                - float(np.dot(w, m1v * sgn * self.gv)) / eta ** 2)
        f_ee = (float(np.dot(w, m2v * s * s)) / eta ** 4
                + 2.0 * float(np.dot(w, m1v * az)) / eta ** 3)
        return FPartials(f_a, f_aa, f_e, f_ae, f_ee)


def F_value(f: StepFunction, g: StepFunction, alpha: float, eta: float,
            phi: OrliczFunction) -> float:
    """F(alpha, eta): the modular of f + alpha g at scale eta, minus 1."""
    return _Pair(f, g, phi).f_value(alpha, eta)


def F_partials(f: StepFunction, g: StepFunction, alpha: float, eta: float,
               phi: OrliczFunction) -> FPartials:
    """Closed-form (F_alpha, F_alphaalpha, F_eta, F_alphaeta, F_etaeta)."""
    return _Pair(f, g, phi).f_partials(alpha, eta)


def crossing_alphas(f: StepFunction, g: StepFunction) -> np.ndarray:
    """The finite set of alphas where some cell of f + alpha g is exactly 0."""
    b, fv, gv = refine_pair(f, g)
    mask = (gv != 0.0) & (fv != 0.0)
    return np.unique(-fv[mask] / gv[mask])


@dataclass(frozen=True)
class FDCheck:
    """Relative residuals of closed-form derivatives against central
    differences (one Richardson refinement)."""

    residuals: dict
    step: float

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    def to_json(self) -> dict:
        return {"residuals": dict(self.residuals), "step": self.step,
                "max_residual": self.max_residual}


@dataclass(frozen=True)
class NormCurveSample:
    """One evaluation of the norm curve with its implicit derivatives."""

    alpha: float
    N: float
    Nprime: float
    Nsecond: float
    F_alpha: float
    F_eta: float
    F_alphaalpha: float
    F_alphaeta: float
    F_etaeta: float
    F_residual: float
    fd: Optional[FDCheck] = None

    def to_json(self) -> dict:
        doc = {"alpha": self.alpha, "N": self.N, "Nprime": self.Nprime,
               "Nsecond": self.Nsecond, "F_alpha": self.F_alpha,
               "F_eta": self.F_eta, "F_alphaalpha": self.F_alphaalpha,
               "F_alphaeta": self.F_alphaeta, "F_etaeta": self.F_etaeta,
               "F_residual": self.F_residual}
        if self.fd is not None:
            doc["fd"] = self.fd.to_json()
        return doc


def _curve_sample(pair: _Pair, alpha: float,
                  fd_step: Optional[float]) -> NormCurveSample:
    n = pair.norm(alpha)
    if n <= 0.0:
        raise CrossingPointError(
            f"f + {alpha:g} g vanishes identically; the curve is singular")
    p = pair.f_partials(alpha, n)
    if p.eta == 0.0:
        raise OrliczError("F_eta vanished; implicit derivatives undefined")
    nprime = -p.alpha / p.eta
    nsecond = (-p.alphaalpha - 2.0 * p.alphaeta * nprime
               - p.etaeta * nprime * nprime) / p.eta
    f_res = pair.f_value(alpha, n)
    fd = _fd_check(pair, alpha, n, p, nprime, nsecond, fd_step) \
        if fd_step is not None else None
    return NormCurveSample(alpha=alpha, N=n, Nprime=nprime, Nsecond=nsecond,
                           F_alpha=p.alpha, F_eta=p.eta,
                           F_alphaalpha=p.alphaalpha, F_alphaeta=p.alphaeta,
                           F_etaeta=p.etaeta, F_residual=f_res, fd=fd)


def norm_curve(f: StepFunction, g: StepFunction, alpha: float,
               phi: OrliczFunction,
               fd_step: Optional[float] = None) -> NormCurveSample:
    """Norm, implicit N' and N'', and the partials behind them.

    Pass ``fd_step`` (or use ``finite_difference_check``) to attach central
    difference residuals.  Unit-norm inputs are required.
    """
    pair = _Pair(f, g, phi)
    return _curve_sample(pair, alpha, fd_step)


def _fd_check(pair: _Pair, alpha: float, eta: float, p: FPartials,
              nprime: float, nsecond: float, h: float) -> FDCheck:
    rel = lambda closed, fd: abs(closed - fd) / max(1.0, abs(closed))
    fa = lambda a: pair.f_value(a, eta)
    fe = lambda e: pair.f_value(alpha, e)
    fae = lambda a, e: pair.f_value(a, e)
    nrm = pair.norm
    residuals = {
        "F_alpha": rel(p.alpha, central_first(fa, alpha, h)),
        "F_alphaalpha": rel(p.alphaalpha, central_second(fa, alpha, h)),
        "F_eta": rel(p.eta, central_first(fe, eta, h)),
        "F_etaeta": rel(p.etaeta, central_second(fe, eta, h)),
        "F_alphaeta": rel(p.alphaeta, central_mixed(fae, alpha, eta, h)),
        "Nprime": rel(nprime, central_first(nrm, alpha, h)),
        "Nsecond": rel(nsecond, central_second(nrm, alpha, h)),
    }
    return FDCheck(residuals=residuals, step=h)


def finite_difference_check(f: StepFunction, g: StepFunction, alpha: float,
                            phi: OrliczFunction,
                            h: Optional[float] = None) -> FDCheck:
    """Validate every closed-form derivative at (alpha, N(alpha))."""
    if h is None:
        h = FD_STEP_SCALE * max(1.0, abs(alpha))
    sample = norm_curve(f, g, alpha, phi, fd_step=h)
    return sample.fd


def default_fd_step(alpha: float) -> float:
    return FD_STEP_SCALE * max(1.0, abs(alpha))


def sweep_norm_curve(f: StepFunction, g: StepFunction,
                     alphas: Sequence[float], phi: OrliczFunction,
                     fd: bool = False):
    """Samples along the curve, skipping exact crossing alphas.

    Returns (samples, skipped_alphas).
    """
    pair = _Pair(f, g, phi)
    crossings = set(pair.crossing_alphas().tolist())
    samples, skipped = [], []
    for a in alphas:
        if a in crossings:
            skipped.append(a)
            continue
        step = default_fd_step(a) if fd else None
        samples.append(_curve_sample(pair, a, step))
    return samples, skipped


def write_curve_csv(samples: Sequence[NormCurveSample], path: str) -> None:
    """Columns: alpha, N, Nprime, Nsecond, F_eta, residual_max."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["alpha", "N", "Nprime", "Nsecond", "F_eta", "residual_max"])
        for s in samples:
            res = s.fd.max_residual if s.fd is not None else ""
            w.writerow([repr(s.alpha), repr(s.N), repr(s.Nprime),
                        repr(s.Nsecond), repr(s.F_eta), res])
