"""Seeded generators for step-function test suites.

Pairs come with guaranteed ground-truth support relations and margins (cell
counts, value floors) chosen so the curve detectors have clear signal:
overlaps of at least ~6% of the interval and values bounded away from 0.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .core import OrliczFunction
from .function_space import luxemburg_norm
from .stepfun import StepFunction

DEFAULT_CELLS = 64
MIN_SUPPORT_CELLS = 10
MIN_SHARED_CELLS = 4
VALUE_LO = 0.6
VALUE_HI = 1.6


def rng_from_seed(seed: Optional[int]) -> np.random.Generator:
    return np.random.default_rng(seed)


def _values_on(rng: np.random.Generator, cells: int, support: np.ndarray,
               signs: bool) -> np.ndarray:
    v = np.zeros(cells)
    v[support] = rng.uniform(VALUE_LO, VALUE_HI, size=len(support))
    if signs:
        v[support] *= rng.choice([-1.0, 1.0], size=len(support))
    return v


def unit_step(rng: np.random.Generator, phi: OrliczFunction,
              cells: int = DEFAULT_CELLS, signs: bool = False,
              support: Optional[np.ndarray] = None) -> StepFunction:
    """Random unit-norm step function on the uniform partition."""
    if support is None:
        size = rng.integers(MIN_SUPPORT_CELLS, cells + 1)
        support = rng.choice(cells, size=size, replace=False)
    f = StepFunction.from_values(_values_on(rng, cells, support, signs))
    return f * (1.0 / luxemburg_norm(f, phi))


def unit_pair(rng: np.random.Generator, phi: OrliczFunction, relation: str,
              cells: int = DEFAULT_CELLS, signs: bool = False):
    """Unit-norm pair (f, g) with the requested support relation.

    relation: disjoint | overlap | g_subset_f | f_subset_g | equal.
    Strict subsets leave at least MIN_SHARED_CELLS cells of slack, overlaps
    share at least MIN_SHARED_CELLS cells.
    """
    idx = rng.permutation(cells)
    third = cells // 3
    if relation == "disjoint":
        sf, sg = idx[:third], idx[third:2 * third]
    elif relation == "overlap":
        shared = MIN_SHARED_CELLS + int(rng.integers(0, third - MIN_SHARED_CELLS))
        own = max((cells - shared) // 2 - 1, MIN_SHARED_CELLS)
        sf = idx[:shared + own]
        sg = np.concatenate([idx[:shared], idx[shared + own: shared + own * 2]])
    elif relation == "g_subset_f":
        nf = 2 * third
        ng = nf - MIN_SHARED_CELLS - int(rng.integers(0, third // 2))
        sf, sg = idx[:nf], idx[:ng]
    elif relation == "f_subset_g":
        g, f = unit_pair(rng, phi, "g_subset_f", cells, signs)
        return f, g
    elif relation == "equal":
        sf = idx[:2 * third]
        sg = sf
    else:
        raise ValueError(f"unknown relation {relation!r}")
    f = StepFunction.from_values(_values_on(rng, cells, sf, signs))
    g = StepFunction.from_values(_values_on(rng, cells, sg, signs))
    return (f * (1.0 / luxemburg_norm(f, phi)),
            g * (1.0 / luxemburg_norm(g, phi)))


def testset(rng: np.random.Generator, phi: OrliczFunction, size: int,
            cells: int = DEFAULT_CELLS, signs: bool = True) -> list:
    """Unit-norm functions for isometry testing (varied supports)."""
    return [unit_step(rng, phi, cells=cells, signs=signs)
            for _ in range(size)]


def disjoint_pairs(rng: np.random.Generator, phi: OrliczFunction, count: int,
                   cells: int = DEFAULT_CELLS, signs: bool = False) -> list:
    return [unit_pair(rng, phi, "disjoint", cells=cells, signs=signs)
            for _ in range(count)]
