"""Weighted liquid rank engine.

Ranks live in [0, 1] and start at 0.5. Once per day the engine folds in that
day's ratings: each rating counts with the rater's previous-day rank, the
log-scaled transaction value, and (TOM / SOM modes) an implicit rater weight
derived from time on the market or spend on the market. Aggregates are
normalized by the largest magnitude of the day and blended into the prior
rank; identities nobody rated decay geometrically.
"""

from __future__ import annotations

import enum
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

Identity = Hashable

DEFAULT_RANK = 0.5


class ReputationError(ValueError):
    """Raised on invalid input to the reputation engine."""


class Mode(str, enum.Enum):
    REGULAR = "regular"
    WEIGHTED = "weighted"
    TOM = "tom"
    SOM = "som"

    @classmethod
    def parse(cls, value: "Mode | str") -> "Mode":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"tom-based": "tom", "som-based": "som"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ReputationError(f"unknown mode {value!r}") from None


@dataclass(frozen=True)
class RatingEvent:
    """One rater -> ratee measure.

    ``value`` is the rating in [-1, 1]; ``financial`` the transaction value
    backing it (currency units, >= 0).
    """

    day: int
    rater: Identity
    ratee: Identity
    value: float
    financial: float = 0.0

    def __post_init__(self):
        if self.rater == self.ratee:
            raise ReputationError(f"self-rating by {self.rater!r}")
        if not -1.0 <= self.value <= 1.0:
            raise ReputationError(f"rating value {self.value} outside [-1, 1]")
        if not self.financial >= 0.0:
            raise ReputationError(f"negative financial value {self.financial}")
        if self.day < 1:
            raise ReputationError(f"day must be >= 1, got {self.day}")


@dataclass(frozen=True)
class EngineConfig:
    mode: Mode = Mode.WEIGHTED
    blend_d: float = 0.5
    retention_lambda: float = 0.99
    default_rank: float = DEFAULT_RANK
    log_base: float = 10.0

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        if not 0.0 < self.blend_d <= 1.0:
            raise ReputationError(f"blend_d must be in (0, 1], got {self.blend_d}")
        if not 0.0 < self.retention_lambda <= 1.0:
            raise ReputationError(
                f"retention_lambda must be in (0, 1], got {self.retention_lambda}"
            )
        if self.default_rank != DEFAULT_RANK:
            raise ReputationError("default_rank is fixed at 0.5")
        if self.log_base != 10.0:
            raise ReputationError("log_base is fixed at 10")

    def financial_weight(self, financial: float) -> float:
        if self.mode is Mode.REGULAR:
            return 1.0
        return math.log10(1.0 + financial)


@dataclass(frozen=True)
class ReputationSnapshot:
    day: int
    entries: tuple[tuple[Identity, float], ...]

    def as_dict(self) -> dict:
        return dict(self.entries)


@dataclass
class ReputationState:
    """Mutable per-identity reputation bookkeeping.

    Single writer: call :meth:`update_period` once per day, in day order.
    """

    config: EngineConfig = field(default_factory=EngineConfig)
    current_day: int = 0
    ranks: dict = field(default_factory=dict)
    first_active_day: dict = field(default_factory=dict)
    cumulative_spend: dict = field(default_factory=dict)

    def __contains__(self, identity) -> bool:
        return identity in self.ranks

    def __len__(self) -> int:
        return len(self.ranks)

    def register(self, identity: Identity, day: int) -> None:
        """Add a fresh identity at the default rank, first active on ``day``."""
        if identity in self.ranks:
            raise ReputationError(f"identity {identity!r} already registered")
        if day < self.current_day:
            raise ReputationError(
                f"cannot register {identity!r} at day {day} < current day {self.current_day}"
            )
        self.ranks[identity] = DEFAULT_RANK
        self.first_active_day[identity] = day
        self.cumulative_spend[identity] = 0.0

    def get_rank(self, identity: Identity) -> float:
        try:
            return self.ranks[identity]
        except KeyError:
            raise ReputationError(f"unknown identity {identity!r}") from None

    def snapshot(self) -> ReputationSnapshot:
        return ReputationSnapshot(self.current_day, tuple(self.ranks.items()))

    def time_on_market(self, identity: Identity) -> int:
        # inclusive day count, so a first-day rater has TOM 1
        return max(1, self.current_day - self.first_active_day[identity] + 1)

    def rater_multiplier(self, rater: Identity, period_raters: Iterable[Identity]) -> float:
        """Implicit rater weight in [0, 1], normalized over this period's raters."""
        if rater not in self.ranks:
            raise ReputationError(f"unknown rater {rater!r}")
        return self._multipliers(set(period_raters) | {rater})[rater]

    def _multipliers(self, raters: set) -> dict:
        mode = self.config.mode
        if mode is Mode.TOM:
            tom = {r: self.time_on_market(r) for r in raters}
            top = max(tom.values(), default=1)
            return {r: t / top for r, t in tom.items()}
        if mode is Mode.SOM:
            top = max((self.cumulative_spend[r] for r in raters), default=0.0)
            if top <= 0.0:
                return dict.fromkeys(raters, 1.0)
            denom = math.log1p(top)
            return {r: math.log1p(self.cumulative_spend[r]) / denom for r in raters}
        return dict.fromkeys(raters, 1.0)

    def update_period(self, ratings: Sequence[RatingEvent]) -> None:
        """Apply one day's batch of ratings and advance the day by one.

        The result does not depend on the order of ``ratings``: raters use
        their previous-day rank and per-ratee sums are exactly rounded.
        """
        day = self.current_day + 1
        for ev in ratings:
            if ev.day != day:
                raise ReputationError(
                    f"rating for day {ev.day} in batch for day {day}"
                )
            for who in (ev.rater, ev.ratee):
                if who not in self.ranks:
                    raise ReputationError(f"unregistered identity {who!r}")

        cfg = self.config
        # TOM counts today inclusively; SOM sees spend before today's purchases
        self.current_day = day
        raters = {ev.rater for ev in ratings}
        multipliers = self._multipliers(raters)

        terms = defaultdict(list)
        spend = defaultdict(list)
        for ev in ratings:
            terms[ev.ratee].append(
                self.ranks[ev.rater] * ev.value * cfg.financial_weight(ev.financial)
                * multipliers[ev.rater]
            )
            spend[ev.rater].append(ev.financial)
        raw = {j: math.fsum(t) for j, t in terms.items()}
        top = max((abs(v) for v in raw.values()), default=0.0)

        d = cfg.blend_d
        lam = cfg.retention_lambda
        new_ranks = {}
        for ident, prev in self.ranks.items():
            if ident in raw:
                q = (raw[ident] / top + 1.0) / 2.0 if top > 0.0 else 0.5
                new_ranks[ident] = min(1.0, max(0.0, (1.0 - d) * prev + d * q))
            else:
                new_ranks[ident] = lam * prev
        self.ranks = new_ranks
        for r, amounts in spend.items():
            self.cumulative_spend[r] += math.fsum(amounts)


def init_state(identities: Iterable[Identity], config: EngineConfig | None = None) -> ReputationState:
    """Fresh state with every identity at rank 0.5, first active on day 1."""
    state = ReputationState(config=config or EngineConfig())
    for ident in identities:
        if ident in state.ranks:
            raise ReputationError(f"duplicate identity {ident!r}")
        state.register(ident, 1)
    return state
