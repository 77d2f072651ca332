"""Pure-numpy implementations of the hot kernels.

Same contracts as the numba twins in ``numba_backend``: power-kind modular
sums, Luxemburg-norm bisection, and the five modular partials.  Inputs are
float64 arrays of cell values and widths; no domain checks happen here.
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"


def modular_power(values: np.ndarray, widths: np.ndarray, lam: float,
                  p: float) -> float:
    return float(np.dot(widths, (np.abs(values) / lam) ** p))


def norm_power(values: np.ndarray, widths: np.ndarray, p: float) -> float:
    amax = float(np.max(np.abs(values))) if values.size else 0.0
    if amax == 0.0:
        return 0.0
    hi = amax
    lo = amax
    for _ in range(300):
        lo *= 0.5
        with np.errstate(over="ignore"):
            if modular_power(values, widths, lo, p) > 1.0:
                break
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if modular_power(values, widths, mid, p) > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def partials_power(fv: np.ndarray, gv: np.ndarray, widths: np.ndarray,
                   alpha: float, eta: float, p: float,
                   m2_zero: float) -> tuple[float, float, float, float, float]:
    s = fv + alpha * gv
    az = np.abs(s)
    z = az / eta
    sgn = np.sign(s)
    with np.errstate(divide="ignore", invalid="ignore"):
        m1 = p * z ** (p - 1.0)
        m2 = np.where(z > 0.0, p * (p - 1.0) * z ** (p - 2.0), 0.0)
    m2 = np.where((z == 0.0) & (gv != 0.0), m2_zero, m2)
    f_a = float(np.dot(widths, m1 * sgn * gv) / eta)
    f_aa = float(np.dot(widths, m2 * gv * gv) / eta ** 2)
    f_e = -float(np.dot(widths, m1 * az) / eta ** 2)
    f_ae = (-float(np.dot(widths, m2 * s * gv)) / eta ** 3
            - float(np.dot(widths, m1 * sgn * gv)) / eta ** 2)
    f_ee = (float(np.dot(widths, m2 * s * s)) / eta ** 4
            + 2.0 * float(np.dot(widths, m1 * az)) / eta ** 3)
    return f_a, f_aa, f_e, f_ae, f_ee
