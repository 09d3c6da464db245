"""Tick series construction: mid prices, session splicing, circle rescale.

A TickSeries is the estimator's input: a right-continuous step function of
log mid-price, stored as parallel arrays of strictly increasing times and
strictly changing prices.  Times start in seconds, are concatenated across
trading sessions (gaps deleted), and are finally rescaled onto [0, 2*pi].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InputError

TWO_PI = 2.0 * math.pi


class QuoteEvent(NamedTuple):
    """One best-bid/best-ask update; seq orders events within a second."""

    time: int
    seq: int
    bid: float
    ask: float


class SpliceStats(NamedTuple):
    dropped_outside: int
    collapsed_after: int


@dataclass(frozen=True)
class TickSeries:
    """Step-function log mid-price of one asset.

    ``t``/``p`` hold event times and log prices; ``t_span`` is the total
    in-session duration T in seconds once sessions are spliced; ``rescaled``
    marks that times live on [0, 2*pi] with t[0] == 0.
    """

    asset_id: str
    t: np.ndarray
    p: np.ndarray
    t_span: float | None = None
    session_map: tuple[tuple[float, float], ...] = ()
    rescaled: bool = False

    def __post_init__(self):
        t = np.ascontiguousarray(self.t, dtype=np.float64)
        p = np.ascontiguousarray(self.p, dtype=np.float64)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "p", p)
        if t.ndim != 1 or t.shape != p.shape:
            raise InputError(f"{self.asset_id}: times and prices must be 1-d and equal length")
        if t.size == 0:
            raise InputError(f"{self.asset_id}: no events")
        if not np.all(np.isfinite(t)) or not np.all(np.isfinite(p)):
            raise InputError(f"{self.asset_id}: non-finite time or price")
        if t.size > 1:
            dt = np.diff(t)
            if not np.all(dt > 0):
                raise InputError(f"{self.asset_id}: event times not strictly increasing")
            if np.any(np.diff(p) == 0.0):
                raise InputError(f"{self.asset_id}: consecutive events with unchanged price")
        if self.rescaled:
            if t[0] != 0.0:
                raise InputError(f"{self.asset_id}: rescaled series must start at t=0")
            if t[-1] > TWO_PI:
                raise InputError(f"{self.asset_id}: rescaled time beyond 2*pi")
        self.t.flags.writeable = False
        self.p.flags.writeable = False

    @property
    def n_events(self) -> int:
        return int(self.t.size)

    @classmethod
    def from_samples(cls, asset_id, t, p, t_span=None, rescaled=False,
                     session_map=()) -> "TickSeries":
        """Build a series from raw samples, collapsing repeated prices."""
        t = np.asarray(t, dtype=np.float64)
        p = np.asarray(p, dtype=np.float64)
        t, p = collapse_unchanged(t, p)
        return cls(asset_id, t, p, t_span=t_span, session_map=tuple(session_map),
                   rescaled=rescaled)


def collapse_unchanged(t: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Drop events whose price equals the previous retained price.

    Keeps the first occurrence of each run, so applying it twice equals
    applying it once.
    """
    if p.size <= 1:
        return t, p
    keep = np.empty(p.size, dtype=bool)
    keep[0] = True
    keep[1:] = p[1:] != p[:-1]
    return t[keep], p[keep]


def build_tick_series(events: Sequence[QuoteEvent], asset_id: str) -> TickSeries:
    """Turn a quote stream into a log mid-price step function.

    Mid price is (bid+ask)/2; events that leave the mid unchanged are
    collapsed to the first occurrence.  Events sharing a timestamp second
    are spread inside it at spacing 1/(count+1) so the step function keeps
    strictly increasing times, with the first event of the second staying
    on the second boundary.
    """
    if not events:
        raise InputError(f"{asset_id}: no events")
    if len(events) == 1:
        raise InputError(f"{asset_id}: degenerate series (single event, no increments)")
    secs = np.array([e.time for e in events], dtype=np.float64)
    seqs = np.array([e.seq for e in events], dtype=np.int64)
    mid = np.array([(e.bid + e.ask) / 2.0 for e in events], dtype=np.float64)
    if np.any(mid <= 0):
        raise InputError(f"{asset_id}: non-positive mid price")
    order = np.lexsort((seqs, secs))
    secs, mid = secs[order], mid[order]

    secs, mid = collapse_unchanged(secs, mid)
    t = secs.copy()
    # fractional offsets inside each shared second, first event on the boundary
    start = 0
    n = secs.size
    while start < n:
        stop = start + 1
        while stop < n and secs[stop] == secs[start]:
            stop += 1
        count = stop - start
        if count > 1:
            t[start:stop] += np.arange(count) / (count + 1.0)
        start = stop
    return TickSeries(asset_id, t, np.log(mid))


def splice_sessions(series: TickSeries, sessions: Sequence[tuple[float, float]],
                    strict: bool = False) -> tuple[TickSeries, SpliceStats]:
    """Concatenate in-session trading time, deleting the gaps.

    Sessions are half-open [start, end) in the series' time unit and must
    be disjoint and ordered.  Events outside every session are dropped
    (error in strict mode).  T becomes the summed session length.
    """
    sessions = [(float(a), float(b)) for a, b in sessions]
    if not sessions:
        raise InputError("no sessions given")
    prev_end = -math.inf
    for a, b in sessions:
        if b <= a:
            raise InputError(f"empty session ({a}, {b})")
        if a < prev_end:
            raise InputError("sessions overlap or are out of order")
        prev_end = b

    t = series.t
    new_t = np.full(t.size, np.nan)
    offset = 0.0
    inside = np.zeros(t.size, dtype=bool)
    for a, b in sessions:
        m = (t >= a) & (t < b)
        new_t[m] = t[m] - a + offset
        inside |= m
        offset += b - a

    dropped = int(t.size - inside.sum())
    if dropped and strict:
        offenders = t[~inside][:5]
        raise InputError(
            f"{series.asset_id}: {dropped} events outside all sessions "
            f"(first offenders at t={offenders.tolist()})"
        )
    if not inside.any():
        raise InputError(f"{series.asset_id}: no events inside sessions")

    kept_t = new_t[inside]
    kept_p = series.p[inside]
    # dropping events can create equal-price neighbours; re-collapse them
    ct, cp = collapse_unchanged(kept_t, kept_p)
    stats = SpliceStats(dropped_outside=dropped, collapsed_after=int(kept_t.size - ct.size))
    out = TickSeries(series.asset_id, ct, cp, t_span=offset,
                     session_map=tuple(sessions), rescaled=False)
    return out, stats


def rescale_to_circle(series: TickSeries) -> TickSeries:
    """Map spliced times onto [0, 2*pi] and anchor the series at t=0.

    If the first event falls after the session open, its price is extended
    back to the open (the step function starts at the first observed
    price), which moves that event to t=0 without adding a jump.
    """
    if series.t_span is None or series.t_span <= 0:
        raise InputError(f"{series.asset_id}: cannot rescale, T is not positive")
    scale = TWO_PI / series.t_span
    t = np.minimum(series.t * scale, TWO_PI)
    if t[0] != 0.0:
        t = t.copy()
        t[0] = 0.0
    return TickSeries(series.asset_id, t, series.p, t_span=series.t_span,
                      session_map=series.session_map, rescaled=True)


def reverse_time(series: TickSeries) -> TickSeries:
    """Time-reversed series: the step function p(2*pi - t) as a tick list."""
    if not series.rescaled:
        raise InputError("reverse_time expects a rescaled series")
    t = series.t
    p = series.p
    new_t = np.concatenate(([0.0], TWO_PI - t[:0:-1]))
    new_p = p[::-1].copy()
    return TickSeries(series.asset_id, new_t, new_p, t_span=series.t_span,
                      session_map=series.session_map, rescaled=True)


def parse_sessions(text: str) -> list[tuple[float, float]]:
    """Parse session windows like "09:00-11:30,12:30-15:00" or "0-9000"."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.rpartition("-")
        if not sep or not lo:
            raise InputError(f"bad session window {part!r}")
        out.append((_window_seconds(lo), _window_seconds(hi)))
    if not out:
        raise InputError("no session windows given")
    return out


def _window_seconds(token: str) -> float:
    token = token.strip()
    if ":" in token:
        fields = token.split(":")
        if len(fields) == 2:
            h, m = fields
            s = "0"
        elif len(fields) == 3:
            h, m, s = fields
        else:
            raise InputError(f"bad time of day {token!r}")
        try:
            return int(h) * 3600 + int(m) * 60 + float(s)
        except ValueError as exc:
            raise InputError(f"bad time of day {token!r}") from exc
    try:
        return float(token)
    except ValueError as exc:
        raise InputError(f"bad session boundary {token!r}") from exc
