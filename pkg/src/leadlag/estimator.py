"""Fourier correlation estimator for unevenly spaced tick data.

Coefficients of the price increment process are computed directly from the
tick times, so no interpolation or synchronization grid is involved.  The
Hilbert-transformed copy of each series enters through a coefficient swap,
which turns the covariance into a Hermitian complex matrix whose phases
carry lead-lag information.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import InputError, NumericalError
from .kernels import harmonic_jump_sums
from .series import TWO_PI, TickSeries

DEFAULT_TAU = 60.0


@dataclass(frozen=True)
class EstimatorConfig:
    """Estimation parameters.

    ``tau`` is the target resolution in seconds; the harmonic cutoff is
    K = floor(T / (2 tau)) unless ``n_harmonics`` pins it explicitly.
    ``t_span`` may be left unset and bound later from the series.
    """

    tau: float = DEFAULT_TAU
    t_span: float | None = None
    n_harmonics: int | None = None

    def __post_init__(self):
        if not (self.tau > 0) or not math.isfinite(self.tau):
            raise InputError(f"tau must be positive and finite, got {self.tau}")
        if self.t_span is not None and not self.t_span > 0:
            raise InputError(f"t_span must be positive, got {self.t_span}")
        if self.n_harmonics is not None and self.n_harmonics < 1:
            raise InputError(f"n_harmonics must be >= 1, got {self.n_harmonics}")

    def harmonics_for(self, t_span: float) -> int:
        if self.n_harmonics is not None:
            return self.n_harmonics
        k = int(math.floor(t_span / (2.0 * self.tau)))
        if k < 1:
            raise InputError(
                f"tau={self.tau} too coarse for T={t_span}: no usable harmonics"
            )
        return k

    @property
    def k(self) -> int:
        """Harmonic cutoff for the bound span."""
        if self.t_span is None:
            raise InputError("config has no bound t_span")
        return self.harmonics_for(self.t_span)

    def bound(self, t_span: float) -> "EstimatorConfig":
        return replace(self, t_span=float(t_span))


@dataclass(frozen=True)
class FourierCoefficients:
    """Fourier coefficients a_k, b_k of one asset's price increments,
    k = 1..K, plus the zero-frequency drift (p_N - p_1)/pi."""

    asset_id: str
    a: np.ndarray
    b: np.ndarray
    drift: float
    t_span: float
    n_events: int

    def __post_init__(self):
        a = np.ascontiguousarray(self.a, dtype=np.float64)
        b = np.ascontiguousarray(self.b, dtype=np.float64)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if a.ndim != 1 or a.shape != b.shape or a.size == 0:
            raise InputError(f"{self.asset_id}: malformed coefficient arrays")
        if not np.all(np.isfinite(a)) or not np.all(np.isfinite(b)):
            raise NumericalError(f"{self.asset_id}: non-finite Fourier coefficients")

    @property
    def n_harmonics(self) -> int:
        return int(self.a.size)

    @property
    def c(self) -> np.ndarray:
        """Combined coefficients c_k = a_k + i b_k."""
        return self.a + 1j * self.b


def fourier_coeffs(series: TickSeries, config: EstimatorConfig,
                   n_harmonics: int | None = None,
                   backend: str | None = None) -> FourierCoefficients:
    """Fourier coefficients of the increment process of one series.

    For a step function with jumps dp_m at times t_m on [0, 2*pi], the
    coefficients of the increments reduce to

        a_k = (1/pi) * sum_m dp_m cos(k t_m)
        b_k = (1/pi) * sum_m dp_m sin(k t_m)

    which is the summation-by-parts form of the integral against the
    price path itself, with the path extended to the full circle.  Only
    actual jumps contribute, so the estimator never touches a grid.
    """
    if not series.rescaled:
        raise InputError(f"{series.asset_id}: series must be rescaled to [0, 2*pi]")
    if series.n_events < 2:
        raise InputError(f"{series.asset_id}: need at least 2 events, have {series.n_events}")
    if series.t_span is None:
        raise InputError(f"{series.asset_id}: series has no recorded span")
    k = n_harmonics if n_harmonics is not None else config.harmonics_for(series.t_span)
    jump_t = series.t[1:]
    jump_p = np.diff(series.p)
    sums = harmonic_jump_sums(jump_t, jump_p, k, backend=backend)
    drift = (series.p[-1] - series.p[0]) / math.pi
    return FourierCoefficients(series.asset_id, sums.real / math.pi,
                               sums.imag / math.pi, drift,
                               t_span=series.t_span, n_events=series.n_events)


def coefficients_for_series(series_list, config: EstimatorConfig,
                            threads: int = 1,
                            backend: str | None = None) -> list[FourierCoefficients]:
    """Coefficients for a basket of series sharing one time span.

    The per-asset kernels run on a thread pool; the compiled kernel
    releases the interpreter lock, so assets scale across cores.
    """
    if not series_list:
        raise InputError("no series given")
    spans = {s.t_span for s in series_list}
    if None in spans or len(spans) > 1:
        raise InputError(f"series must share one time span, saw {sorted(spans, key=str)}")
    t_span = series_list[0].t_span
    k = config.harmonics_for(t_span)
    if threads <= 1 or len(series_list) == 1:
        return [fourier_coeffs(s, config, n_harmonics=k, backend=backend)
                for s in series_list]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fourier_coeffs, s, config, k, backend)
                   for s in series_list]
        return [f.result() for f in futures]


def _common_span(all_coeffs) -> tuple[float, int]:
    if not all_coeffs:
        raise InputError("no coefficients given")
    spans = {c.t_span for c in all_coeffs}
    ks = {c.n_harmonics for c in all_coeffs}
    if len(spans) > 1 or len(ks) > 1:
        raise InputError("coefficient sets disagree on time span or harmonic count")
    return all_coeffs[0].t_span, all_coeffs[0].n_harmonics


def real_covariance(ci: FourierCoefficients, cj: FourierCoefficients,
                    config: EstimatorConfig) -> float:
    """Integrated covariance of two assets from the real coefficients:
    (2 pi^2 tau / T) * sum_k (a_k(i) a_k(j) + b_k(i) b_k(j))."""
    t_span, _ = _common_span([ci, cj])
    scale = 2.0 * math.pi ** 2 * config.tau / t_span
    return scale * float(ci.a @ cj.a + ci.b @ cj.b)


def complex_covariance_matrix(all_coeffs, config: EstimatorConfig) -> np.ndarray:
    """Hermitian covariance of the Hilbert-complexified series.

    The swapped coefficients (a, b) -> (-b, a) of the transformed copy
    make both coefficient products collapse onto conj(c_k(i)) * c_k(j),
    so the matrix is the Gram matrix of the columns c(i) scaled by
    4 pi^2 tau / T.  Positive semidefiniteness is structural.
    """
    t_span, _ = _common_span(all_coeffs)
    c = np.column_stack([fc.c for fc in all_coeffs])
    sigma = (c.conj().T @ c) * (4.0 * math.pi ** 2 * config.tau / t_span)
    # exact Hermitian symmetrization; Gram rounding noise otherwise leaks
    # into eigensolver input checks downstream
    return (sigma + sigma.conj().T) / 2.0


@dataclass(frozen=True)
class ComplexCorrelationMatrix:
    """Hermitian correlation matrix with unit diagonal and |rho| <= 1.

    Carries the asset order and the estimation parameters that produced
    it, so downstream artifacts can be stamped and reproduced.
    """

    assets: tuple[str, ...]
    values: np.ndarray
    tau: float
    t_span: float
    n_harmonics: int

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.complex128)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "assets", tuple(self.assets))
        n = len(self.assets)
        if v.shape != (n, n):
            raise InputError(f"correlation matrix shape {v.shape} does not match {n} assets")
        if n == 0:
            raise InputError("empty correlation matrix")
        if not np.all(np.isfinite(v.real)) or not np.all(np.isfinite(v.imag)):
            raise NumericalError("non-finite correlation entries")
        if not np.array_equal(v, v.conj().T):
            raise NumericalError("correlation matrix is not exactly Hermitian")
        if not np.array_equal(np.diagonal(v), np.ones(n)):
            raise NumericalError("correlation diagonal is not exactly 1")
        mags = np.abs(v)
        if mags.max() > 1.0 + 1e-9:
            raise NumericalError(f"correlation magnitude {mags.max()} exceeds 1")
        w = np.linalg.eigvalsh(v)
        if w[0] < -1e-9 * max(1.0, w[-1]):
            raise NumericalError(f"correlation matrix not positive semidefinite "
                                 f"(min eigenvalue {w[0]:.3e})")
        self.values.flags.writeable = False

    @property
    def n(self) -> int:
        return len(self.assets)

    def index_of(self, asset_id: str) -> int:
        try:
            return self.assets.index(asset_id)
        except ValueError:
            raise InputError(f"unknown asset {asset_id!r}") from None


def covariance_to_correlation(sigma: np.ndarray, assets, *,
                              tau: float, t_span: float,
                              n_harmonics: int) -> ComplexCorrelationMatrix:
    """Normalize a Hermitian covariance to unit diagonal.

    rho_ij = sigma_ij / sqrt(sigma_ii sigma_jj).  The diagonal is forced
    to exactly 1 and the lower triangle mirrored from the upper so the
    result is Hermitian to the bit.
    """
    sigma = np.asarray(sigma, dtype=np.complex128)
    n = sigma.shape[0]
    if sigma.shape != (n, n) or n != len(assets):
        raise InputError("covariance shape does not match asset list")
    diag = np.diagonal(sigma)
    if np.any(np.abs(diag.imag) > 1e-12 * np.maximum(1.0, np.abs(diag.real))):
        worst = int(np.argmax(np.abs(diag.imag)))
        raise NumericalError(f"variance of {assets[worst]!r} is not real: {diag[worst]}")
    var = diag.real
    if np.any(var <= 0):
        bad = int(np.argmin(var))
        raise NumericalError(f"non-positive variance for {assets[bad]!r}: {var[bad]:.3e}")
    inv = 1.0 / np.sqrt(var)
    rho = sigma * inv[:, None] * inv[None, :]
    iu = np.triu_indices(n, k=1)
    out = np.eye(n, dtype=np.complex128)
    out[iu] = rho[iu]
    out[(iu[1], iu[0])] = np.conj(rho[iu])
    return ComplexCorrelationMatrix(tuple(assets), out, tau=tau, t_span=t_span,
                                    n_harmonics=n_harmonics)


def estimate_correlation(series_list, config: EstimatorConfig,
                         threads: int = 1,
                         backend: str | None = None) -> ComplexCorrelationMatrix:
    """Full estimation path: coefficients, complex covariance, correlation."""
    coeffs = coefficients_for_series(series_list, config, threads=threads,
                                     backend=backend)
    sigma = complex_covariance_matrix(coeffs, config)
    return covariance_to_correlation(
        sigma, [c.asset_id for c in coeffs], tau=config.tau,
        t_span=coeffs[0].t_span, n_harmonics=coeffs[0].n_harmonics)


def magnitude_phase(rho_entry):
    """Split rho = s * exp(-i theta) into magnitude and lead-lag phase.

    theta is in (-pi, pi]; a negative theta_ij means asset i leads asset
    j.  A zero entry maps to (0, 0).  Accepts scalars or arrays.
    """
    rho = np.asarray(rho_entry, dtype=np.complex128)
    s = np.abs(rho)
    theta = -np.angle(rho)
    theta = np.where(theta <= -math.pi, theta + TWO_PI, theta)
    theta = np.where(s == 0.0, 0.0, theta)
    if rho.ndim == 0:
        return float(s), float(theta)
    return s, theta
