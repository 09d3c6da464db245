"""Synthetic asynchronous tick data with known lead-lag structure.

Assets load on a common latent factor observed with per-asset delays,
optionally on a sector factor, plus idiosyncratic noise.  Observation
times are Poisson; timestamps are quantized to the exchange clock.  The
injected delays are the ground truth every estimator test checks against.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import InputError
from .series import (
    QuoteEvent,
    TickSeries,
    build_tick_series,
    rescale_to_circle,
    splice_sessions,
)

FINE_GRID = 0.1


@dataclass(frozen=True)
class AssetSpec:
    """One synthetic asset: market loading beta with delay lag (seconds),
    optional sector factor loading gamma with its own delay, idiosyncratic
    volatility eta, and Poisson event intensity (events/second)."""

    ticker: str
    beta: float = 1.0
    lag: float = 0.0
    eta: float = 0.0
    intensity: float = 1.0
    sector: str | None = None
    subsector: str | None = None
    gamma: float = 0.0
    sector_lag: float = 0.0

    def __post_init__(self):
        if not self.ticker:
            raise InputError("asset needs a ticker")
        if not self.intensity > 0:
            raise InputError(f"{self.ticker}: intensity must be > 0")
        if self.eta < 0:
            raise InputError(f"{self.ticker}: eta must be >= 0")
        if self.lag < 0 or self.sector_lag < 0:
            raise InputError(f"{self.ticker}: lags must be >= 0")
        if self.gamma != 0.0 and self.sector is None:
            raise InputError(f"{self.ticker}: sector loading without a sector")


@dataclass(frozen=True)
class MarketScenario:
    assets: tuple
    sessions: tuple = ((0.0, 3600.0),)
    quantum: float = 1.0
    seed: int = 0
    grid: float = FINE_GRID
    price_scale: float = 1e-4
    base_price: float = 100.0
    rel_spread: float = 2e-5

    def __post_init__(self):
        assets = tuple(self.assets)
        object.__setattr__(self, "assets", assets)
        object.__setattr__(self, "sessions",
                           tuple((float(a), float(b)) for a, b in self.sessions))
        if not assets:
            raise InputError("scenario has no assets")
        tickers = [a.ticker for a in assets]
        if len(set(tickers)) != len(tickers):
            raise InputError("duplicate tickers in scenario")
        if not self.grid > 0:
            raise InputError("grid must be positive")
        if self.quantum < 1 or self.quantum != int(self.quantum):
            raise InputError(f"quantum must be a whole number of seconds,"
                             f" got {self.quantum}")
        prev = -math.inf
        for a, b in self.sessions:
            if b <= a:
                raise InputError(f"zero-duration session ({a}, {b})")
            if a < prev:
                raise InputError("sessions overlap or are out of order")
            if a % self.quantum or b % self.quantum:
                raise InputError(f"session ({a}, {b}) not aligned to the"
                                 f" {self.quantum}s timestamp quantum")
            prev = b

    @property
    def t_span(self) -> float:
        return sum(b - a for a, b in self.sessions)

    @property
    def sector_names(self) -> list[str]:
        """Sectors in first-appearance order; fixes the seed-stream layout."""
        seen = []
        for a in self.assets:
            if a.sector is not None and a.sector not in seen:
                seen.append(a.sector)
        return seen

    def to_dict(self) -> dict:
        return {
            "assets": [asdict(a) for a in self.assets],
            "sessions": [list(s) for s in self.sessions],
            "quantum": self.quantum,
            "seed": self.seed,
            "grid": self.grid,
            "price_scale": self.price_scale,
            "base_price": self.base_price,
            "rel_spread": self.rel_spread,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MarketScenario":
        d = dict(d)
        assets = tuple(AssetSpec(**a) for a in d.pop("assets"))
        d["sessions"] = tuple(tuple(s) for s in d.pop("sessions", [(0.0, 3600.0)]))
        return cls(assets=assets, **d)


@dataclass(frozen=True)
class GroundTruth:
    """What the generator actually did: the scenario plus the latent
    factor paths on the fine grid (spliced time axis)."""

    scenario: MarketScenario
    market_values: np.ndarray
    sector_values: dict
    pad: float

    def factor_value(self, times, lag: float = 0.0, sector: str | None = None):
        """Latent factor level at the given spliced times, delayed by lag."""
        values = self.market_values if sector is None else self.sector_values[sector]
        grid = self.scenario.grid
        idx = np.floor((np.asarray(times) - lag + self.pad) / grid).astype(np.int64)
        idx = np.clip(idx, 0, values.size - 1)
        return values[idx]

    def factor_series(self, sector: str | None = None) -> TickSeries:
        """The latent factor itself as a rescaled tick series, for
        correlating components against the truth."""
        t_span = self.scenario.t_span
        grid = self.scenario.grid
        n = int(math.floor(t_span / grid))
        t = np.arange(n) * grid
        p = self.factor_value(t, 0.0, sector)
        name = "__MARKET__" if sector is None else f"__SECTOR_{sector}__"
        series = TickSeries.from_samples(name, t, p, t_span=t_span)
        return rescale_to_circle(series)


@dataclass(frozen=True)
class SimulationResult:
    quotes: dict
    series: list
    truth: GroundTruth


def generate(scenario: MarketScenario) -> SimulationResult:
    """Simulate the scenario into quote streams and ready-to-use series.

    The latent walks live on the spliced (in-session) time axis at the
    fine grid resolution; observation arrivals are Poisson on the same
    axis, mapped back to the raw session clock for quote timestamps.
    Identical seeds give byte-identical output.
    """
    t_span = scenario.t_span
    grid = scenario.grid
    max_lag = max([a.lag for a in scenario.assets]
                  + [a.sector_lag for a in scenario.assets] + [0.0])
    pad = math.ceil(max_lag / grid) * grid
    n_grid = int(math.ceil((t_span + pad) / grid)) + 1

    sectors = scenario.sector_names
    root = np.random.SeedSequence(scenario.seed)
    children = root.spawn(1 + len(sectors) + 2 * len(scenario.assets))
    market_rng = np.random.default_rng(children[0])
    market_values = np.cumsum(market_rng.normal(0.0, math.sqrt(grid), size=n_grid))
    sector_values = {}
    for c, name in enumerate(sectors):
        rng = np.random.default_rng(children[1 + c])
        sector_values[name] = np.cumsum(rng.normal(0.0, math.sqrt(grid), size=n_grid))
    truth = GroundTruth(scenario, market_values, sector_values, pad)

    quotes = {}
    series = []
    base = 1 + len(sectors)
    for i, spec in enumerate(scenario.assets):
        arrival_rng = np.random.default_rng(children[base + 2 * i])
        idio_rng = np.random.default_rng(children[base + 2 * i + 1])
        n_arr = arrival_rng.poisson(spec.intensity * t_span)
        if n_arr < 2:
            raise InputError(f"{spec.ticker}: intensity {spec.intensity} produced "
                             f"{n_arr} events; need at least 2")
        arr = np.sort(arrival_rng.uniform(0.0, t_span, size=n_arr))

        x = spec.beta * truth.factor_value(arr, spec.lag)
        if spec.gamma != 0.0:
            x = x + spec.gamma * truth.factor_value(arr, spec.sector_lag, spec.sector)
        if spec.eta > 0.0:
            dw = idio_rng.normal(size=n_arr) * np.sqrt(
                np.diff(arr, prepend=0.0))
            x = x + spec.eta * np.cumsum(dw)
        mid = scenario.base_price * np.exp(scenario.price_scale * x)
        events = _emit_quotes(arr, mid, scenario)
        quotes[spec.ticker] = events

        built = build_tick_series(events, spec.ticker)
        spliced, _ = splice_sessions(built, scenario.sessions)
        series.append(rescale_to_circle(spliced))
    return SimulationResult(quotes, series, truth)


def _emit_quotes(arrivals, mids, scenario: MarketScenario) -> list:
    """Quantize arrival times to the exchange clock and wrap mids in a
    symmetric spread."""
    raw = _unsplice(arrivals, scenario.sessions)
    half = scenario.rel_spread / 2.0
    events = []
    seq = 0
    prev_stamp = None
    for r, mid in zip(raw, mids):
        stamp = int(math.floor(r / scenario.quantum) * scenario.quantum)
        seq = seq + 1 if stamp == prev_stamp else 0
        prev_stamp = stamp
        events.append(QuoteEvent(stamp, seq, mid * (1.0 - half), mid * (1.0 + half)))
    return events


def _unsplice(times, sessions) -> np.ndarray:
    """Map spliced in-session times back onto the raw session clock."""
    times = np.asarray(times, dtype=np.float64)
    out = np.empty_like(times)
    offset = 0.0
    done = np.zeros(times.size, dtype=bool)
    for a, b in sessions:
        width = b - a
        m = (~done) & (times >= offset) & (times < offset + width)
        out[m] = times[m] - offset + a
        done |= m
        offset += width
    # times land in [0, T); anything at the boundary goes to the last session
    if not done.all():
        a, b = sessions[-1]
        out[~done] = b - 1e-9
    return out


def sector_block_scenario(sectors, intra_lag=0.0, inter_lag=0.0, beta=1.0,
                          gamma=1.2, eta=0.3, intensity=0.5, duration=7200.0,
                          seed=0, quantum=1.0) -> MarketScenario:
    """Two-level factor scenario: one market factor plus a factor per
    sector.

    ``sectors`` maps sector name to its ticker list.  ``inter_lag`` sets
    each sector's delay to the market factor: a scalar spaces sectors
    at multiples of it, a sequence gives the delay per sector directly.
    ``intra_lag`` staggers members inside a sector on their sector
    factor, member j delayed by j * intra_lag.
    """
    if hasattr(sectors, "items"):
        parts = list(sectors.items())
    else:
        parts = [(name, list(members)) for name, members in sectors]
    if not parts:
        raise InputError("empty sector partition")
    if np.isscalar(inter_lag):
        sector_lags = [c * float(inter_lag) for c in range(len(parts))]
    else:
        sector_lags = [float(x) for x in inter_lag]
        if len(sector_lags) != len(parts):
            raise InputError(f"need {len(parts)} inter-sector lags, "
                             f"got {len(sector_lags)}")
    assets = []
    for (name, members), market_lag in zip(parts, sector_lags):
        if not members:
            raise InputError(f"sector {name!r} has no members")
        for j, ticker in enumerate(members):
            assets.append(AssetSpec(
                ticker, beta=beta, lag=market_lag, eta=eta, intensity=intensity,
                sector=name, subsector=name, gamma=gamma,
                sector_lag=j * float(intra_lag)))
    return MarketScenario(tuple(assets), sessions=((0.0, float(duration)),),
                          quantum=quantum, seed=seed)


def one_factor_scenario(n_assets=2, lags=(0.0, 30.0), beta=1.0, eta=0.0,
                        intensity=1.0, duration=3600.0, seed=0,
                        quantum=1.0) -> MarketScenario:
    """Single-factor scenario with explicit per-asset market lags."""
    lags = list(lags)
    if len(lags) != n_assets:
        raise InputError(f"need {n_assets} lags, got {len(lags)}")
    assets = tuple(AssetSpec(f"A{i:03d}", beta=beta, lag=float(lags[i]),
                             eta=eta, intensity=intensity)
                   for i in range(n_assets))
    return MarketScenario(assets, sessions=((0.0, float(duration)),),
                          quantum=quantum, seed=seed)


def scenario_from_dict(d: dict) -> MarketScenario:
    """Build a scenario from a config mapping, honoring preset forms.

    A plain mapping with an "assets" list maps straight onto
    MarketScenario; {"preset": "sector_block", ...} and
    {"preset": "one_factor", ...} route through the builders.
    """
    d = dict(d)
    preset = d.pop("preset", None)
    if preset is None:
        return MarketScenario.from_dict(d)
    if preset == "sector_block":
        return sector_block_scenario(**d)
    if preset == "one_factor":
        return one_factor_scenario(**d)
    raise InputError(f"unknown scenario preset {preset!r}")
