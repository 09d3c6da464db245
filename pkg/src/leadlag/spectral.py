"""Hermitian eigenanalysis of the complex correlation matrix.

Eigenvalues order the dependence structure; the top component is the
market mode.  Eigenvector coefficient phases separate components whose
assets move together from components built around systematic delays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericalError
from .estimator import ComplexCorrelationMatrix, covariance_to_correlation

PHASE_SPREAD_IMMEDIATE = 0.15
PHASE_SPREAD_CHAOTIC = 1.0
SECTOR_CONCENTRATION = 2.0


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigensystem of a Hermitian correlation matrix.

    ``eigenvalues`` are sorted descending; ``vectors[:, i]`` is the unit
    eigenvector of eigenvalue i with its phase gauge fixed so that the
    largest-magnitude coefficient (index ``gauge_anchor[i]``) is real
    and positive.
    """

    assets: tuple[str, ...]
    eigenvalues: np.ndarray
    vectors: np.ndarray
    gauge_anchor: np.ndarray

    def __post_init__(self):
        w = np.ascontiguousarray(self.eigenvalues, dtype=np.float64)
        v = np.ascontiguousarray(self.vectors, dtype=np.complex128)
        anchors = np.ascontiguousarray(self.gauge_anchor, dtype=np.int64)
        object.__setattr__(self, "eigenvalues", w)
        object.__setattr__(self, "vectors", v)
        object.__setattr__(self, "gauge_anchor", anchors)
        object.__setattr__(self, "assets", tuple(self.assets))
        n = len(self.assets)
        if n == 0:
            raise InputError("empty spectrum")
        if w.shape != (n,) or v.shape != (n, n) or anchors.shape != (n,):
            raise InputError("eigensystem shapes do not match asset count")
        if np.any(np.diff(w) > 0):
            raise NumericalError("eigenvalues not sorted descending")
        if w[0] <= 0 or w[-1] < -1e-9 * w[0]:
            raise NumericalError(f"spectrum not PSD within tolerance "
                                 f"(min {w[-1]:.3e}, max {w[0]:.3e})")
        gram = v.conj().T @ v
        if np.abs(gram - np.eye(n)).max() > 1e-10:
            raise NumericalError("eigenvectors not orthonormal within 1e-10")
        self.eigenvalues.flags.writeable = False
        self.vectors.flags.writeable = False
        self.gauge_anchor.flags.writeable = False

    @property
    def n(self) -> int:
        return len(self.assets)

    def vector(self, component: int) -> np.ndarray:
        """Eigenvector of the 1-based component index (1 = largest)."""
        if not 1 <= component <= self.n:
            raise InputError(f"component {component} out of range 1..{self.n}")
        return self.vectors[:, component - 1]


def eig_hermitian(rho: ComplexCorrelationMatrix) -> EigenDecomposition:
    """Eigendecomposition with a deterministic phase gauge.

    The input must be Hermitian to 1e-10.  Output satisfies, and is
    checked for: descending real eigenvalues summing to the trace,
    orthonormal vectors, and reconstruction to Frobenius 1e-8 * n.
    """
    if isinstance(rho, ComplexCorrelationMatrix):
        values, assets = rho.values, rho.assets
    else:
        values = np.asarray(rho, dtype=np.complex128)
        assets = tuple(str(i) for i in range(values.shape[0]))
    n = values.shape[0]
    if values.shape != (n, n) or n == 0:
        raise InputError("matrix must be square and non-empty")
    asym = np.abs(values - values.conj().T).max()
    if asym > 1e-10:
        raise InputError(f"matrix not Hermitian (asymmetry {asym:.3e})")
    try:
        w, v = np.linalg.eigh(values)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed to converge: {exc}") from exc
    w = w[::-1].copy()
    v = v[:, ::-1].copy()
    anchors = np.empty(n, dtype=np.int64)
    for i in range(n):
        j = int(np.argmax(np.abs(v[:, i])))
        anchors[i] = j
        pivot = v[j, i]
        mag = abs(pivot)
        if mag > 0:
            v[:, i] *= np.conj(pivot) / mag
            v[j, i] = mag  # exact real-positive anchor

    recon = (v * w) @ v.conj().T
    err = np.linalg.norm(recon - values)
    if err > 1e-8 * n:
        raise NumericalError(f"eigendecomposition reconstruction error {err:.3e}")
    trace = values.trace().real
    if abs(w.sum() - trace) > 1e-8 * max(1.0, abs(trace)):
        raise NumericalError(f"eigenvalue sum {w.sum()} deviates from trace {trace}")
    return EigenDecomposition(assets, w, v, anchors)


@dataclass(frozen=True)
class ComplexPrincipalComponent:
    """Step-increment series of one principal component.

    Increment at each union event time is sum_j dp_j(t) * V_j, taken
    over the assets that jump at that time.
    """

    component: int
    eigenvalue: float
    t: np.ndarray
    increments: np.ndarray

    @property
    def path(self) -> np.ndarray:
        return np.cumsum(self.increments)


def principal_components(decomp: EigenDecomposition, series_list,
                         top: int | None = None) -> list[ComplexPrincipalComponent]:
    """Project all assets' increments onto the eigenvectors.

    The projection runs on the union of the assets' jump times; an asset
    without a jump at a given time contributes zero there.  ``top``
    limits output to the first components.
    """
    order = tuple(s.asset_id for s in series_list)
    if order != decomp.assets:
        raise InputError(f"series order {order} does not match "
                         f"decomposition order {decomp.assets}")
    for s in series_list:
        if not s.rescaled:
            raise InputError(f"{s.asset_id}: series must be rescaled")
    t_all = np.concatenate([s.t[1:] for s in series_list])
    dp_all = np.concatenate([np.diff(s.p) for s in series_list])
    col_all = np.concatenate([np.full(s.n_events - 1, j, dtype=np.int64)
                              for j, s in enumerate(series_list)])
    if t_all.size == 0:
        raise InputError("no increments in any series")
    order_ix = np.argsort(t_all, kind="stable")
    t_all, dp_all, col_all = t_all[order_ix], dp_all[order_ix], col_all[order_ix]

    n_comp = decomp.n if top is None else min(top, decomp.n)
    contrib = dp_all[:, None] * decomp.vectors[col_all, :n_comp]
    uniq_mask = np.empty(t_all.size, dtype=bool)
    uniq_mask[0] = True
    uniq_mask[1:] = t_all[1:] != t_all[:-1]
    starts = np.flatnonzero(uniq_mask)
    uniq_t = t_all[starts]
    inc = np.add.reduceat(contrib, starts, axis=0)
    return [ComplexPrincipalComponent(i + 1, float(decomp.eigenvalues[i]),
                                      uniq_t, np.ascontiguousarray(inc[:, i]))
            for i in range(n_comp)]


def remove_market_mode(rho: ComplexCorrelationMatrix, decomp: EigenDecomposition,
                       drop: set | None = None) -> np.ndarray:
    """Partial spectral sum with the given 1-based components removed.

    Returns sum over kept components of lambda_i v_i v_i^H.  The result
    is Hermitian PSD but is NOT re-normalized to unit diagonal.
    """
    if decomp.n == 0:
        raise InputError("empty spectrum")
    if rho.assets != decomp.assets:
        raise InputError("matrix and decomposition asset orders differ")
    if drop is None:
        drop = {1}
    drop = set(int(i) for i in drop)
    bad = [i for i in drop if not 1 <= i <= decomp.n]
    if bad:
        raise InputError(f"component indices out of range 1..{decomp.n}: {sorted(bad)}")
    keep = np.array([i for i in range(decomp.n) if (i + 1) not in drop], dtype=np.int64)
    if keep.size == 0:
        return np.zeros((decomp.n, decomp.n), dtype=np.complex128)
    v = decomp.vectors[:, keep]
    out = (v * decomp.eigenvalues[keep]) @ v.conj().T
    return (out + out.conj().T) / 2.0


def residual_correlation(rho: ComplexCorrelationMatrix,
                         decomp: EigenDecomposition,
                         drop: set | None = None) -> ComplexCorrelationMatrix:
    """Mode-removed matrix re-normalized back to unit diagonal.

    This is the matrix the graph stage filters by default, so magnitudes
    stay comparable across assets after the market mode is removed.
    """
    residual = remove_market_mode(rho, decomp, drop)
    diag = np.diagonal(residual).real
    if np.any(diag <= 0):
        bad = rho.assets[int(np.argmin(diag))]
        raise NumericalError(
            f"asset {bad!r} has no variance left after mode removal; "
            f"cannot re-normalize")
    return covariance_to_correlation(residual, rho.assets, tau=rho.tau,
                                     t_span=rho.t_span, n_harmonics=rho.n_harmonics)


def phase_spread(vector: np.ndarray) -> float:
    """Magnitude-weighted circular standard deviation of coefficient phases.

    Defined through the resultant R = |sum w e^{i phi}| / sum w as
    sqrt(-2 ln R); zero when all phases align, unbounded as coefficients
    spread around the circle.  Invariant under a global phase rotation.
    """
    v = np.asarray(vector, dtype=np.complex128)
    w = np.abs(v)
    total = w.sum()
    if total == 0:
        return math.inf
    r = abs(v.sum()) / total
    if r <= 0:
        return math.inf
    if r >= 1.0:
        return 0.0
    return math.sqrt(-2.0 * math.log(r))


@dataclass(frozen=True)
class ComponentTag:
    component: int
    tag: str
    phase_spread: float
    eigenvalue: float
    top_sector: str | None
    concentration: float


@dataclass(frozen=True)
class SectorCoefficientSummary:
    component: int
    sector: str
    members: int
    mean_magnitude: float
    mean_phase: float


def classify_components(decomp: EigenDecomposition,
                        phase_spread_threshold: float = PHASE_SPREAD_IMMEDIATE,
                        sectors=None,
                        spread_ceiling: float = PHASE_SPREAD_CHAOTIC,
                        concentration: float = SECTOR_CONCENTRATION,
                        ) -> tuple[list[ComponentTag], list[SectorCoefficientSummary]]:
    """Tag each component as immediate, delayed, or chaotic.

    immediate: coefficient phases nearly aligned (spread below the low
    threshold).  delayed: moderate spread AND the coefficient magnitudes
    concentrate on one sector (mean magnitude above ``concentration``
    times the all-asset mean).  chaotic: everything else.  Without a
    sector table the delayed tag cannot be established and such
    components fall through to chaotic.
    """
    if not phase_spread_threshold < spread_ceiling:
        raise InputError("phase spread thresholds must be ordered")
    sector_of = _sector_lookup(sectors)
    groups: dict[str, list[int]] = {}
    if sector_of is not None:
        for j, asset in enumerate(decomp.assets):
            groups.setdefault(sector_of(asset), []).append(j)

    tags = []
    summaries = []
    for i in range(decomp.n):
        v = decomp.vectors[:, i]
        mags = np.abs(v)
        spread = phase_spread(v)
        all_mean = mags.mean()
        top_sector = None
        top_ratio = 0.0
        for sector, members in sorted(groups.items()):
            ix = np.array(members)
            mean_mag = float(mags[ix].mean())
            resultant = v[ix].sum()
            mean_phase = float(np.angle(resultant)) if abs(resultant) > 0 else 0.0
            summaries.append(SectorCoefficientSummary(
                i + 1, sector, len(members), mean_mag, mean_phase))
            ratio = mean_mag / all_mean if all_mean > 0 else 0.0
            if ratio > top_ratio:
                top_ratio, top_sector = ratio, sector
        if spread < phase_spread_threshold:
            tag = "immediate"
        elif spread < spread_ceiling and top_ratio > concentration:
            tag = "delayed"
        else:
            tag = "chaotic"
        tags.append(ComponentTag(i + 1, tag, spread, float(decomp.eigenvalues[i]),
                                 top_sector, top_ratio))
    return tags, summaries


def _sector_lookup(sectors):
    """Accept a SectorTable-like object, a plain mapping, or None."""
    if sectors is None:
        return None
    if hasattr(sectors, "sector"):
        return sectors.sector
    if hasattr(sectors, "get"):
        def lookup(asset):
            entry = sectors.get(asset)
            if entry is None:
                return "UNKNOWN"
            if isinstance(entry, str):
                return entry
            return entry[-1]
        return lookup
    raise InputError(f"unsupported sector table type {type(sectors)!r}")
