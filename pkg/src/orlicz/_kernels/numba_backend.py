"""Numba-jitted hot kernels; drop-in twins of ``numpy_backend``.

The bisection logic mirrors the numpy backend step for step so the two
backends agree to rounding error.
"""

from __future__ import annotations

from numba import njit

NAME = "numba"


@njit(cache=True)
def modular_power(values, widths, lam, p):
    s = 0.0
    for i in range(values.shape[0]):
        s += widths[i] * (abs(values[i]) / lam) ** p
    return s


@njit(cache=True)
def norm_power(values, widths, p):
    amax = 0.0
    for i in range(values.shape[0]):
        a = abs(values[i])
        if a > amax:
            amax = a
    if amax == 0.0:
        return 0.0
    hi = amax
    lo = amax
    for _ in range(300):
        lo *= 0.5
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


@njit(cache=True)
def partials_power(fv, gv, widths, alpha, eta, p, m2_zero):
    f_a = 0.0
    f_aa = 0.0
    f_e = 0.0
    f_ae1 = 0.0
    f_ee1 = 0.0
    for i in range(fv.shape[0]):
        s = fv[i] + alpha * gv[i]
        az = abs(s)
        z = az / eta
        g = gv[i]
        w = widths[i]
        if z > 0.0:
            m1 = p * z ** (p - 1.0)
            m2 = p * (p - 1.0) * z ** (p - 2.0)
        else:
            m1 = 0.0
            m2 = m2_zero if g != 0.0 else 0.0
        sgn = 0.0
        if s > 0.0:
            sgn = 1.0
        elif s < 0.0:
            sgn = -1.0
        f_a += w * m1 * sgn * g
        f_aa += w * m2 * g * g
        f_e += w * m1 * az
        f_ae1 += w * m2 * s * g
        f_ee1 += w * m2 * s * s
    f_ae = -f_ae1 / eta ** 3 - f_a / eta ** 2
    f_ee = f_ee1 / eta ** 4 + 2.0 * f_e / eta ** 3
    return f_a / eta, f_aa / eta ** 2, -f_e / eta ** 2, f_ae, f_ee
