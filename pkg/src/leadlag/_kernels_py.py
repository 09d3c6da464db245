"""NumPy fallback for the harmonic-sum kernel.

Mirrors the compiled extension's semantics (rotation recurrence across
harmonics, rotor renormalization every ``RENORM_EVERY`` steps) using
vectorized operations, so results agree with the compiled path to full
double precision.  It is the import-time fallback when the extension is
unavailable; expect roughly an order of magnitude less throughput.
"""

import numpy as np

RENORM_EVERY = 1024


def harmonic_jump_sums(times, jumps, n_harmonics):
    """Return complex sums S_k = sum_j jumps[j]*exp(1j*k*times[j]), k=1..K."""
    t = np.ascontiguousarray(times, dtype=np.float64)
    dp = np.ascontiguousarray(jumps, dtype=np.float64)
    if t.shape != dp.shape or t.ndim != 1:
        raise ValueError("times and jumps must be 1-d arrays of equal length")
    K = int(n_harmonics)
    if K < 0:
        raise ValueError("harmonic count must be non-negative")
    out = np.zeros(K, dtype=np.complex128)
    if K == 0 or t.size == 0:
        return out
    w = np.exp(1j * t)
    z = np.ones_like(w)
    for k in range(1, K + 1):
        z *= w
        out[k - 1] = dp @ z
        if k % RENORM_EVERY == 0:
            z /= np.abs(z)
    return out
