"""Quote stream parsing and reference data.

The quote format is delimited text with a declared column layout; the
parser assigns within-second sequence numbers from row order, which the
exchange guarantees to be the true quote order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import InputError
from .series import QuoteEvent

MAX_RECORDED_ERRORS = 20


@dataclass(frozen=True)
class ColumnSchema:
    """Column layout of a quote file.

    Indices are zero-based.  ``date`` is optional; when present, rows
    from successive dates are laid out on one absolute time axis at
    86400 s per day.
    """

    timestamp: int = 0
    ticker: int = 1
    bid: int = 2
    ask: int = 3
    date: int | None = None
    delimiter: str = ","
    has_header: bool = False

    def min_columns(self) -> int:
        cols = [self.timestamp, self.ticker, self.bid, self.ask]
        if self.date is not None:
            cols.append(self.date)
        return max(cols) + 1

    @classmethod
    def from_dict(cls, d: dict) -> "ColumnSchema":
        allowed = {"timestamp", "ticker", "bid", "ask", "date", "delimiter",
                   "has_header"}
        unknown = set(d) - allowed
        if unknown:
            raise InputError(f"unknown schema keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class ParseReport:
    rows_read: int = 0
    accepted: int = 0
    crossed_rejected: int = 0
    malformed_skipped: int = 0
    errors: list = field(default_factory=list)

    def record_error(self, lineno: int, reason: str):
        if len(self.errors) < MAX_RECORDED_ERRORS:
            self.errors.append((lineno, reason))

    def to_dict(self) -> dict:
        return {
            "rows_read": self.rows_read,
            "accepted": self.accepted,
            "crossed_rejected": self.crossed_rejected,
            "malformed_skipped": self.malformed_skipped,
            "errors": [{"line": ln, "reason": r} for ln, r in self.errors],
        }


def parse_timestamp(token: str) -> int:
    """Seconds from either HH:MM:SS or integer epoch seconds."""
    token = token.strip()
    if ":" in token:
        fields = token.split(":")
        if len(fields) != 3:
            raise ValueError(f"bad clock timestamp {token!r}")
        h, m, s = (int(f) for f in fields)
        if not (0 <= m < 60 and 0 <= s < 60):
            raise ValueError(f"bad clock timestamp {token!r}")
        return h * 3600 + m * 60 + s
    return int(token)


def parse_quotes(stream: Iterable[str], schema: ColumnSchema | None = None,
                 on_error: str = "skip") -> tuple[dict, ParseReport]:
    """Parse a quote stream into per-asset event lists.

    Returns (events_by_ticker, report).  Malformed rows are skipped and
    recorded with their line numbers, or abort the parse when
    ``on_error="abort"``.  Crossed quotes (ask < bid) are rejected and
    counted; locked quotes (ask == bid) pass.
    """
    if schema is None:
        schema = ColumnSchema()
    if on_error not in ("skip", "abort"):
        raise InputError(f"on_error must be 'skip' or 'abort', got {on_error!r}")
    report = ParseReport()
    events: dict[str, list[QuoteEvent]] = {}
    seq_counter: dict[tuple, int] = {}
    date_index: dict[str, int] = {}

    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n")
        if lineno == 1 and schema.has_header:
            continue
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        report.rows_read += 1
        parts = line.split(schema.delimiter)
        try:
            if len(parts) < schema.min_columns():
                raise ValueError(f"expected at least {schema.min_columns()} columns,"
                                 f" got {len(parts)}")
            ticker = parts[schema.ticker].strip()
            if not ticker:
                raise ValueError("empty ticker")
            t = parse_timestamp(parts[schema.timestamp])
            if schema.date is not None:
                day = parts[schema.date].strip()
                if day not in date_index:
                    date_index[day] = len(date_index)
                t += date_index[day] * 86400
            bid = float(parts[schema.bid])
            ask = float(parts[schema.ask])
            if not (bid > 0 and ask > 0):
                raise ValueError(f"non-positive quote bid={bid} ask={ask}")
        except ValueError as exc:
            report.malformed_skipped += 1
            report.record_error(lineno, str(exc))
            if on_error == "abort":
                raise InputError(f"line {lineno}: {exc}") from exc
            continue
        if ask < bid:
            report.crossed_rejected += 1
            continue
        key = (ticker, t)
        seq = seq_counter.get(key, 0)
        seq_counter[key] = seq + 1
        events.setdefault(ticker, []).append(QuoteEvent(t, seq, bid, ask))
        report.accepted += 1
    return events, report


@dataclass(frozen=True)
class SectorTable:
    """Maps ticker -> (subsector, sector)."""

    entries: dict

    def sector(self, ticker: str) -> str:
        entry = self.entries.get(ticker)
        return entry[1] if entry else "UNKNOWN"

    def subsector(self, ticker: str) -> str:
        entry = self.entries.get(ticker)
        return entry[0] if entry else "UNKNOWN"

    def get(self, ticker: str):
        return self.entries.get(ticker)

    def __contains__(self, ticker: str) -> bool:
        return ticker in self.entries

    def __len__(self) -> int:
        return len(self.entries)


def load_sector_table(stream: Iterable[str], delimiter: str = ",") -> SectorTable:
    """Read a {ticker, subsector, sector} delimited file."""
    entries = {}
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(delimiter)]
        if len(parts) < 3:
            raise InputError(f"sector file line {lineno}: need ticker, subsector,"
                             f" sector; got {line!r}")
        ticker, subsector, sector = parts[0], parts[1], parts[2]
        if ticker in entries:
            raise InputError(f"sector file line {lineno}: duplicate ticker {ticker!r}")
        entries[ticker] = (subsector, sector)
    return SectorTable(entries)


def filter_active(series_list, min_events: int):
    """Drop assets with fewer retained events than the threshold.

    Counts events after mid-collapse and session splicing, the same
    events the estimator will see.
    """
    if min_events < 0:
        raise InputError(f"min_events must be >= 0, got {min_events}")
    kept = [s for s in series_list if s.n_events >= min_events]
    dropped = [s.asset_id for s in series_list if s.n_events < min_events]
    return kept, dropped


def write_quote_rows(events_by_ticker: dict) -> list[str]:
    """Serialize per-ticker events back to the parser's default layout.

    Rows are merged across tickers ordered by (time, seq, ticker), which
    keeps each ticker's within-second order intact for a round trip.
    """
    rows = []
    for ticker in sorted(events_by_ticker):
        for ev in events_by_ticker[ticker]:
            rows.append((ev.time, ev.seq, ticker, ev.bid, ev.ask))
    rows.sort()
    # plain float repr: shortest round-trip digits, no numpy scalar wrapper
    return [f"{t},{ticker},{float(bid)!r},{float(ask)!r}"
            for t, _, ticker, bid, ask in rows]
