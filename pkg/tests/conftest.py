import numpy as np
import pytest

from leadlag.series import TWO_PI, TickSeries


def random_series(rng, asset_id="A", n_events=200, t_span=TWO_PI):
    """Random rescaled tick series with strictly changing prices."""
    t = np.sort(rng.uniform(0.0, TWO_PI, size=n_events))
    t[0] = 0.0
    t = np.unique(t)
    steps = rng.normal(size=t.size)
    steps[steps == 0.0] = 1e-9
    p = np.cumsum(steps)
    return TickSeries(asset_id, t, p, t_span=t_span, rescaled=True)


def dense_sampled(fn, asset_id, n=20000, t_span=TWO_PI):
    """Dense piecewise-constant sampling of a smooth path on [0, 2*pi)."""
    t = np.linspace(0.0, TWO_PI, n, endpoint=False)
    return TickSeries.from_samples(asset_id, t, fn(t), t_span=t_span, rescaled=True)


def random_correlation(rng, n, rank=None, tau=60.0, t_span=18000.0,
                       n_harmonics=150):
    """Random Hermitian PSD correlation matrix with exact unit diagonal."""
    from leadlag.estimator import ComplexCorrelationMatrix

    m = rank if rank is not None else 2 * n
    b = rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))
    sigma = b @ b.conj().T
    d = np.sqrt(np.diagonal(sigma).real)
    values = sigma / np.outer(d, d)
    values = (values + values.conj().T) / 2.0
    np.fill_diagonal(values, 1.0)
    # Cauchy-Schwarz can overshoot 1 by a few ulp after the division
    mags = np.abs(values)
    np.divide(values, mags, out=values, where=mags > 1.0)
    return ComplexCorrelationMatrix(tuple(f"A{i:03d}" for i in range(n)),
                                    values, tau=tau, t_span=t_span,
                                    n_harmonics=n_harmonics)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
