"""Tab-separated formats: rating logs, snapshot series, ledgers, metric tables."""

from __future__ import annotations

import math
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Optional, Sequence

from .engine import EngineConfig, RatingEvent, ReputationError, ReputationSnapshot, ReputationState
from .market import IdentityRecord, Ledger, TransactionRecord
from .metrics import MetricsReport

RATINGS_HEADER = ("day", "rater", "ratee", "value", "financial")
SNAPSHOT_HEADER = ("day", "identity", "rank")
TRANSACTION_HEADER = ("day", "buyer_identity", "seller_identity", "buyer_agent_id",
                      "seller_agent_id", "value", "outcome", "rating_value")
IDENTITY_HEADER = ("identity", "agent_id", "role", "honest", "active_from_day", "active_to_day")
METRICS_HEADER = ("scam_period", "system", "lts", "pfs",
                  "lts_relative_decrease", "pfs_relative_decrease")

TRANSACTIONS_SECTION = "# transactions"
IDENTITIES_SECTION = "# identities"


class LogFormatError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _row(fields) -> str:
    return "\t".join(str(f) for f in fields) + "\n"


def parse_ratings_log(text: str) -> list[RatingEvent]:
    """Parse a rating log. Line 1 is the header; errors carry the 1-based line."""
    lines = text.splitlines()
    if not lines:
        return []
    if tuple(lines[0].strip().split("\t")) != RATINGS_HEADER:
        raise LogFormatError(1, f"expected header {_row(RATINGS_HEADER).strip()!r}")
    events = []
    last_day = 0
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.rstrip("\r\n").split("\t")
        if len(parts) != len(RATINGS_HEADER):
            raise LogFormatError(lineno, f"expected {len(RATINGS_HEADER)} fields, got {len(parts)}")
        day_s, rater, ratee, value_s, fin_s = parts
        try:
            day = int(day_s)
            value = float(value_s)
            financial = float(fin_s)
        except ValueError as exc:
            raise LogFormatError(lineno, f"malformed number ({exc})") from None
        if not (math.isfinite(value) and math.isfinite(financial)):
            raise LogFormatError(lineno, "non-finite number")
        if not -1.0 <= value <= 1.0:
            raise LogFormatError(lineno, f"rating value {value} outside [-1, 1]")
        if day < last_day:
            raise LogFormatError(lineno, f"day {day} decreases (previous {last_day})")
        try:
            events.append(RatingEvent(day, rater, ratee, value, financial))
        except ReputationError as exc:
            raise LogFormatError(lineno, str(exc)) from None
        last_day = day
    return events


def write_ratings_log(events: Iterable[RatingEvent]) -> str:
    out = [_row(RATINGS_HEADER)]
    for ev in events:
        out.append(_row((ev.day, ev.rater, ev.ratee, repr(float(ev.value)), repr(float(ev.financial)))))
    return "".join(out)


def replay_ratings(events: Sequence[RatingEvent], config: Optional[EngineConfig] = None) -> list[ReputationSnapshot]:
    """Feed a rating log through a fresh engine, one batch per day.

    Identities are registered on the day they first appear; days without
    ratings are empty batches. Returns one snapshot per day 1..last day.
    """
    state = ReputationState(config=config or EngineConfig())
    by_day: dict[int, list] = {}
    for ev in events:
        by_day.setdefault(ev.day, []).append(ev)
    snapshots = []
    last = max(by_day, default=0)
    for day in range(1, last + 1):
        batch = by_day.get(day, [])
        for ev in batch:
            for who in (ev.rater, ev.ratee):
                if who not in state:
                    state.register(who, day)
        state.update_period(batch)
        snapshots.append(state.snapshot())
    return snapshots


def write_snapshot_series(snapshots: Sequence[ReputationSnapshot]) -> str:
    out = [_row(SNAPSHOT_HEADER)]
    prev = None
    for snap in snapshots:
        if prev is not None and snap.day <= prev:
            raise ValueError(f"snapshots out of order: day {snap.day} after day {prev}")
        prev = snap.day
        for ident, rank in sorted(snap.entries, key=lambda e: str(e[0])):
            out.append(f"{snap.day}\t{ident}\t{rank:.6f}\n")
    return "".join(out)


def write_ledger(ledger: Ledger) -> str:
    out = [TRANSACTIONS_SECTION + "\n", _row(TRANSACTION_HEADER)]
    for tx in ledger.transactions:
        out.append(_row((tx.day, tx.buyer_identity, tx.seller_identity, tx.buyer_agent_id,
                         tx.seller_agent_id, repr(float(tx.value)), tx.outcome,
                         repr(float(tx.rating_value)))))
    out.append(IDENTITIES_SECTION + "\n")
    out.append(_row(IDENTITY_HEADER))
    for rec in ledger.identities:
        to_day = "" if rec.active_to_day is None else rec.active_to_day
        out.append(_row((rec.identity, rec.agent_id, rec.role, int(rec.honest),
                         rec.active_from_day, to_day)))
    return "".join(out)


def parse_ledger(text: str) -> Ledger:
    """Inverse of :func:`write_ledger`."""
    ledger = Ledger()
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line in (TRANSACTIONS_SECTION, IDENTITIES_SECTION):
            section = line
            continue
        parts = line.split("\t")
        if tuple(parts) in (TRANSACTION_HEADER, IDENTITY_HEADER) or not line:
            continue
        try:
            if section == TRANSACTIONS_SECTION:
                day, b, s, bid, sid, value, outcome, rating = parts
                ledger.transactions.append(TransactionRecord(
                    int(day), b, s, int(bid), int(sid), float(value), outcome, float(rating)))
            elif section == IDENTITIES_SECTION:
                ident, aid, role, honest, start, end = parts
                ledger.identities.append(IdentityRecord(
                    ident, int(aid), role, honest == "1", int(start), int(end) if end else None))
            else:
                raise ValueError("row outside a section")
        except ValueError as exc:
            raise LogFormatError(lineno, str(exc)) from None
    return ledger


def format_percent(fraction: Optional[float], decimals: int = 0) -> str:
    """``0.024 -> '2.4%'`` with half-up rounding, as printed in result tables."""
    if fraction is None:
        return ""
    quantum = Decimal(1).scaleb(-decimals)
    pct = Decimal(repr(fraction * 100)).quantize(quantum, rounding=ROUND_HALF_UP)
    if pct == 0:
        pct = abs(pct)
    return f"{pct}%"


def _metrics_cells(rep: MetricsReport, raw: bool) -> tuple:
    if raw:
        fmt = lambda x: "" if x is None else repr(float(x))  # noqa: E731
        return (rep.scam_period, rep.label, fmt(rep.lts), fmt(rep.pfs),
                fmt(rep.lts_relative_decrease), fmt(rep.pfs_relative_decrease))
    return (rep.scam_period, rep.label, format_percent(rep.lts, 1), format_percent(rep.pfs),
            format_percent(rep.lts_relative_decrease), format_percent(rep.pfs_relative_decrease))


def write_metrics_table(table: Sequence[MetricsReport], raw: bool = False) -> str:
    """Metric rows as TSV; ``raw=True`` keeps full-precision fractions."""
    return "".join([_row(METRICS_HEADER)] + [_row(_metrics_cells(r, raw)) for r in table])


def parse_metrics_table(text: str) -> list[MetricsReport]:
    """Read back a ``raw=True`` metrics table."""
    from .market import parse_system

    rows = []
    for line in text.splitlines()[1:]:
        if not line:
            continue
        period, system, lts, pfs, dl, dp = line.split("\t")
        opt = lambda s: float(s) if s else None  # noqa: E731
        rows.append(MetricsReport(int(period), parse_system(system), float(lts), float(pfs), opt(dl), opt(dp)))
    return rows


def format_aligned(table: Sequence[MetricsReport]) -> str:
    """Human-readable fixed-width rendering of a comparison table."""
    cells = [METRICS_HEADER] + [_metrics_cells(r, raw=False) for r in table]
    widths = [max(len(str(row[i])) for row in cells) for i in range(len(METRICS_HEADER))]
    lines = ["  ".join(str(c).rjust(w) for c, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"
