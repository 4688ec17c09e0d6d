"""Loss-to-scam / profit-from-scam metrics and comparison tables.

Buyers and sellers are classified by their underlying agent, so identity
rotation never hides a scam from the evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

from .engine import Mode
from .market import Ledger, parse_system, system_label

SYSTEM_ORDER = (None, Mode.REGULAR, Mode.WEIGHTED, Mode.TOM, Mode.SOM)


class MetricUndefinedError(ValueError):
    pass


@dataclass(frozen=True)
class ScamVolumes:
    honest_spend: float
    honest_to_dishonest: float
    dishonest_spend: float


def scam_volumes(ledger: Ledger) -> ScamVolumes:
    honesty = ledger.agent_honesty()
    honest, lost, dishonest = [], [], []
    for tx in ledger.transactions:
        if honesty[tx.buyer_agent_id]:
            honest.append(tx.value)
            if not honesty[tx.seller_agent_id]:
                lost.append(tx.value)
        else:
            dishonest.append(tx.value)
    return ScamVolumes(math.fsum(honest), math.fsum(lost), math.fsum(dishonest))


def compute_lts(ledger: Ledger) -> float:
    """Share of honest-buyer spend that went to dishonest sellers."""
    v = scam_volumes(ledger)
    if v.honest_spend <= 0:
        raise MetricUndefinedError("loss to scam undefined: no honest-buyer volume")
    return v.honest_to_dishonest / v.honest_spend


def compute_pfs(ledger: Ledger) -> float:
    """Honest money captured by scammers per unit of dishonest-buyer spend."""
    v = scam_volumes(ledger)
    if v.dishonest_spend <= 0:
        raise MetricUndefinedError("profit from scam undefined: no dishonest-buyer spend")
    return v.honest_to_dishonest / v.dishonest_spend


def relative_decrease(baseline: float, value: float) -> float:
    """``(baseline - value) / baseline``; positive means ``value`` is an improvement."""
    if not baseline > 0:
        raise ValueError(f"baseline must be positive, got {baseline}")
    return (baseline - value) / baseline


@dataclass(frozen=True)
class MetricsReport:
    scam_period: int
    system: Optional[Mode]
    lts: float
    pfs: float
    lts_relative_decrease: Optional[float] = None
    pfs_relative_decrease: Optional[float] = None

    @property
    def label(self) -> str:
        return system_label(self.system)


def report_from_ledger(ledger: Ledger, scam_period: int, system) -> MetricsReport:
    return MetricsReport(scam_period, parse_system(system), compute_lts(ledger), compute_pfs(ledger))


def build_comparison_table(reports: Iterable[MetricsReport]) -> list:
    """Order reports like the published comparison and fill relative decreases.

    Rows go by scam period (longest first), then system in the order
    none, regular, weighted, tom, som. Every period needs a ``none`` row.
    """
    groups: dict = {}
    for rep in reports:
        groups.setdefault(rep.scam_period, {})[rep.system] = rep
    rows = []
    for period in sorted(groups, reverse=True):
        group = groups[period]
        if None not in group:
            raise ValueError(f"scam period {period} has no baseline (system none) row")
        base = group[None]
        for system in SYSTEM_ORDER:
            rep = group.get(system)
            if rep is None:
                continue
            if system is None:
                rows.append(MetricsReport(period, None, rep.lts, rep.pfs))
                continue
            rows.append(MetricsReport(
                period, system, rep.lts, rep.pfs,
                _decrease_or_none(base.lts, rep.lts),
                _decrease_or_none(base.pfs, rep.pfs),
            ))
    return rows


def _decrease_or_none(baseline, value):
    # a baseline with no scam at all leaves the decrease undefined
    return relative_decrease(baseline, value) if baseline > 0 else None
