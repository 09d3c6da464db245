"""Kernel backends against a direct transcendental evaluation."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leadlag import kernels


def naive_sums(times, jumps, n_harmonics):
    """Reference: evaluate exp(i k t) per (harmonic, event), no recurrence."""
    ks = np.arange(1, n_harmonics + 1, dtype=np.float64)
    return (jumps[None, :] * np.exp(1j * ks[:, None] * times[None, :])).sum(axis=1)


BACKENDS = ["numpy"] + (["compiled"] if kernels.COMPILED_AVAILABLE else [])


@pytest.mark.parametrize("backend", BACKENDS)
def test_matches_naive_reference(backend, rng):
    t = np.sort(rng.uniform(0.0, 2.0 * np.pi, size=777))
    dp = rng.normal(size=777)
    got = kernels.harmonic_jump_sums(t, dp, 513, backend=backend)
    want = naive_sums(t, dp, 513)
    scale = np.abs(want).max()
    assert np.abs(got - want).max() < 1e-11 * max(scale, 1.0)


@pytest.mark.parametrize("backend", BACKENDS)
def test_rotor_renormalization_over_many_harmonics(backend, rng):
    # k runs far past the renorm interval; drift must stay bounded
    t = np.sort(rng.uniform(0.0, 2.0 * np.pi, size=64))
    dp = rng.normal(size=64)
    k = 5000
    got = kernels.harmonic_jump_sums(t, dp, k, backend=backend)
    want = naive_sums(t, dp, k)
    assert np.abs(got - want).max() < 1e-10 * max(np.abs(want).max(), 1.0)


@pytest.mark.parametrize("backend", BACKENDS)
def test_zero_events(backend):
    t = np.empty(0)
    out = kernels.harmonic_jump_sums(t, t, 10, backend=backend)
    assert out.shape == (10,)
    assert np.all(out == 0)


@pytest.mark.skipif(not kernels.COMPILED_AVAILABLE, reason="extension not built")
@settings(max_examples=60, deadline=None)
@given(
    data=st.lists(
        st.tuples(st.floats(0.0, 2.0 * np.pi), st.floats(-5.0, 5.0)),
        min_size=1, max_size=120,
    ),
    k=st.integers(1, 64),
)
def test_backends_agree(data, k):
    t = np.sort(np.array([d[0] for d in data]))
    dp = np.array([d[1] for d in data])
    a = kernels.harmonic_jump_sums(t, dp, k, backend="compiled")
    b = kernels.harmonic_jump_sums(t, dp, k, backend="numpy")
    scale = max(np.abs(dp).sum(), 1.0)
    assert np.abs(a - b).max() < 1e-11 * scale


def test_input_validation():
    t = np.array([0.1, 0.2])
    with pytest.raises(Exception):
        kernels.harmonic_jump_sums(t, np.array([1.0]), 4)
    with pytest.raises(Exception):
        kernels.harmonic_jump_sums(t, t, 0)
    with pytest.raises(Exception):
        kernels.harmonic_jump_sums(t, t, 4, backend="fortran")


def test_env_var_forces_fallback():
    code = (
        "from leadlag import kernels; "
        "print(kernels.active_backend())"
    )
    env = dict(os.environ, LEADLAG_NO_EXT="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


@pytest.fixture
def rng():
    return np.random.default_rng(77)
