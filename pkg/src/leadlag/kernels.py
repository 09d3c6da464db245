"""Backend selection for the harmonic-sum kernel.

The compiled extension is preferred when it imported cleanly; setting
``LEADLAG_NO_EXT=1`` in the environment forces the NumPy fallback (used
by the benchmark and the backend-equivalence tests).
"""

import os

import numpy as np

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # pragma: no cover - depends on build environment
    _compiled = None

_FORCE_FALLBACK = os.environ.get("LEADLAG_NO_EXT", "") not in ("", "0")

COMPILED_AVAILABLE = _compiled is not None


def active_backend():
    """Name of the backend used when none is requested explicitly."""
    if COMPILED_AVAILABLE and not _FORCE_FALLBACK:
        return "compiled"
    return "numpy"


def available_backends():
    """Backends that can run in this environment, preferred first."""
    if COMPILED_AVAILABLE:
        return ("compiled", "numpy")
    return ("numpy",)


def harmonic_jump_sums(times, jumps, n_harmonics, backend=None):
    """Sums S_k = sum_j jumps[j]*exp(1j*k*times[j]) for k = 1..n_harmonics.

    Parameters
    ----------
    times, jumps : array_like
        Event times on the rescaled circle and the log-price jumps there.
    n_harmonics : int
        Highest harmonic K.
    backend : {"compiled", "numpy", None}
        Explicit backend, or None for the import-time default.
    """
    if backend is None:
        backend = active_backend()
    n_harmonics = int(n_harmonics)
    if n_harmonics < 1:
        raise ValueError(f"n_harmonics must be >= 1, got {n_harmonics}")
    t = np.ascontiguousarray(times, dtype=np.float64)
    dp = np.ascontiguousarray(jumps, dtype=np.float64)
    if t.shape != dp.shape or t.ndim != 1:
        raise ValueError("times and jumps must be 1-d arrays of equal length")
    if backend == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernel requested but extension not built")
        return _compiled.harmonic_jump_sums(t, dp, n_harmonics)
    if backend == "numpy":
        return _kernels_py.harmonic_jump_sums(t, dp, n_harmonics)
    raise ValueError(f"unknown backend {backend!r}")
