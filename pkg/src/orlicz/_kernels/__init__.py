"""Hot-kernel backend selection.

The package ships two implementations of its numeric inner loops: numba
@njit kernels and pure-numpy twins.  The env var ``ORLICZ_BACKEND`` picks
one at import time ("numba" or "numpy"); unset or "auto" uses numba when it
imports cleanly and falls back to numpy otherwise.  ``set_backend`` switches
at runtime (used by the benchmark and the consistency tests).
"""

from __future__ import annotations

import os

from . import numpy_backend

_BACKENDS = {"numpy": numpy_backend}

try:
    from . import numba_backend
    _BACKENDS["numba"] = numba_backend
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba_backend = None


def _initial() -> str:
    choice = os.environ.get("ORLICZ_BACKEND", "auto").strip().lower()
    if choice in ("", "auto"):
        return "numba" if "numba" in _BACKENDS else "numpy"
    if choice not in _BACKENDS:
        available = ", ".join(sorted(_BACKENDS))
        raise RuntimeError(
            f"ORLICZ_BACKEND={choice!r} not available (have: {available})")
    return choice


_active = _initial()


def get_backend():
    """Module implementing the active kernel set."""
    return _BACKENDS[_active]


def backend_name() -> str:
    return _active


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def set_backend(name: str) -> None:
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}")
    _active = name


def warm_up() -> None:
    """Trigger jit compilation of the active kernels on tiny inputs."""
    import numpy as np

    b = get_backend()
    v = np.array([0.5, 1.0])
    w = np.array([0.5, 0.5])
    b.modular_power(v, w, 1.0, 2.0)
    b.norm_power(v, w, 2.0)
    b.partials_power(v, w, w, 0.25, 1.0, 2.0, 2.0)
