"""Seeded agent-based marketplace with periodic scammer identity rotation.

Each day every consumer (in agent-id order) may buy one item. Honest consumers
pick a supplier by roulette over ``rank + EPSILON`` (uniformly when no
reputation system runs) and never go back to an identity that scammed them.
Dishonest consumers only buy from dishonest suppliers and rate them +1.
After the day's ratings reach the engine, dishonest agents swap identities
whenever the day is a multiple of the scam period.
"""

from __future__ import annotations

import bisect
import itertools
import math
import random
from dataclasses import dataclass, field, replace
from decimal import ROUND_HALF_UP, Decimal
from typing import Optional

from .engine import EngineConfig, Mode, RatingEvent, ReputationSnapshot, ReputationState

EPSILON = 0.01
# rejection draws before falling back to an explicit candidate list
_MAX_REJECTIONS = 32

GOOD, BAD, SCAM = "good", "bad", "scam"
CONSUMER, SUPPLIER = "consumer", "supplier"


class SimulationError(ValueError):
    pass


def parse_system(value) -> Optional[Mode]:
    """``None`` / "none" / "no" mean no reputation system; otherwise a :class:`Mode`."""
    if value is None:
        return None
    if isinstance(value, Mode):
        return value
    if str(value).strip().lower() in ("none", "no", ""):
        return None
    return Mode.parse(value)


def system_label(system: Optional[Mode]) -> str:
    return "none" if system is None else system.value


@dataclass(frozen=True)
class SimConfig:
    n_agents: int = 1000
    consumer_fraction: float = 0.9
    dishonest_supplier_fraction: float = 0.05
    dishonest_consumer_fraction: float = 0.05
    duration_days: int = 183
    scam_period_days: int = 182
    system: Optional[Mode] = None
    price: float = 1.0
    purchase_probability: float = 1.0
    bad_service_rate: float = 0.10
    seed: int = 0
    blend_d: float = 0.5
    retention_lambda: float = 0.99

    def __post_init__(self):
        object.__setattr__(self, "system", parse_system(self.system))
        for name in ("consumer_fraction", "dishonest_supplier_fraction",
                     "dishonest_consumer_fraction", "purchase_probability",
                     "bad_service_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise SimulationError(f"{name} must be in [0, 1], got {v}")
        if self.duration_days < 1:
            raise SimulationError("duration_days must be >= 1")
        if self.scam_period_days < 1:
            raise SimulationError("scam_period_days must be >= 1")
        if not self.price > 0:
            raise SimulationError("price must be > 0")
        # validates blend_d / retention_lambda
        self.engine_config()

    def engine_config(self) -> EngineConfig:
        return EngineConfig(
            mode=self.system or Mode.REGULAR,
            blend_d=self.blend_d,
            retention_lambda=self.retention_lambda,
        )


def round_count(n: int, fraction: float) -> int:
    """Round ``n * fraction`` half-up, but never below 1 when fraction > 0."""
    exact = Decimal(n) * Decimal(str(fraction))
    count = int(exact.quantize(Decimal(1), rounding=ROUND_HALF_UP))
    if fraction > 0 and count < 1:
        return 1
    return count


def population_counts(config: SimConfig) -> dict:
    consumers = round_count(config.n_agents, config.consumer_fraction)
    suppliers = config.n_agents - consumers
    if consumers < 1 or suppliers < 1:
        raise SimulationError(
            f"{config.n_agents} agents cannot yield at least one consumer and one supplier"
        )
    return {
        "consumers": consumers,
        "suppliers": suppliers,
        "dishonest_suppliers": min(suppliers, round_count(suppliers, config.dishonest_supplier_fraction)),
        "dishonest_consumers": min(consumers, round_count(consumers, config.dishonest_consumer_fraction)),
    }


@dataclass
class Agent:
    agent_id: int
    role: str
    honest: bool
    current_identity: str
    generation: int = 0
    blacklist: set = field(default_factory=set)


@dataclass(frozen=True)
class TransactionRecord:
    day: int
    buyer_identity: str
    seller_identity: str
    buyer_agent_id: int
    seller_agent_id: int
    value: float
    outcome: str
    rating_value: float


@dataclass
class IdentityRecord:
    identity: str
    agent_id: int
    role: str
    honest: bool
    active_from_day: int
    active_to_day: Optional[int] = None


@dataclass
class Ledger:
    """Append-only record of transactions and identity lifetimes."""

    transactions: list = field(default_factory=list)
    identities: list = field(default_factory=list)

    def agent_honesty(self) -> dict:
        return {rec.agent_id: rec.honest for rec in self.identities}


@dataclass
class World:
    config: SimConfig
    agents: list
    ledger: Ledger
    reputation: ReputationState
    rng: random.Random
    day: int = 0
    _open: dict = field(default_factory=dict)

    @property
    def consumers(self) -> list:
        return [a for a in self.agents if a.role == CONSUMER]

    @property
    def suppliers(self) -> list:
        return [a for a in self.agents if a.role == SUPPLIER]

    def active_suppliers(self) -> list:
        return [a.current_identity for a in self.agents if a.role == SUPPLIER]

    def active_dishonest_suppliers(self) -> list:
        return [a.current_identity for a in self.agents if a.role == SUPPLIER and not a.honest]

    def agent_of(self, identity: str) -> Agent:
        return self.agents[self._open[identity].agent_id]


def _identity_name(agent: Agent) -> str:
    prefix = "c" if agent.role == CONSUMER else "s"
    base = f"{prefix}{agent.agent_id:05d}"
    return base if agent.generation == 0 else f"{base}.{agent.generation}"


def _open_identity(world: World, agent: Agent, day: int) -> None:
    agent.current_identity = _identity_name(agent)
    rec = IdentityRecord(agent.current_identity, agent.agent_id, agent.role, agent.honest, day)
    world.ledger.identities.append(rec)
    world._open[agent.current_identity] = rec
    world.reputation.register(agent.current_identity, day)


def build_population(config: SimConfig, seed: Optional[int] = None) -> World:
    """Create agents and register their first identities at rank 0.5.

    Consumers take agent ids ``0 .. C-1`` and suppliers the rest; which ones
    are dishonest is drawn from the seeded stream.
    """
    if seed is not None:
        config = replace(config, seed=seed)
    counts = population_counts(config)
    rng = random.Random(config.seed)
    n_c, n_s = counts["consumers"], counts["suppliers"]
    bad_consumers = set(rng.sample(range(n_c), counts["dishonest_consumers"]))
    bad_suppliers = set(n_c + i for i in rng.sample(range(n_s), counts["dishonest_suppliers"]))

    agents = []
    for aid in range(n_c + n_s):
        role = CONSUMER if aid < n_c else SUPPLIER
        honest = aid not in bad_consumers and aid not in bad_suppliers
        agents.append(Agent(aid, role, honest, current_identity=""))

    world = World(
        config=config,
        agents=agents,
        ledger=Ledger(),
        reputation=ReputationState(config=config.engine_config()),
        rng=rng,
    )
    for agent in agents:
        _open_identity(world, agent, 1)
    return world


class Wheel:
    """Cumulative-weight roulette over the day's active supplier identities."""

    def __init__(self, identities: list, weights: list):
        self.identities = identities
        self.weights = weights
        self.cumulative = list(itertools.accumulate(weights))
        self.total = self.cumulative[-1] if self.cumulative else 0.0

    @classmethod
    def for_world(cls, world: World) -> "Wheel":
        ids = world.active_suppliers()
        if world.config.system is None:
            weights = [1.0] * len(ids)
        else:
            ranks = world.reputation.ranks
            weights = [ranks[i] + EPSILON for i in ids]
        return cls(ids, weights)

    def spin(self, rng: random.Random, exclude=frozenset()) -> Optional[str]:
        if not self.identities:
            return None
        for _ in range(_MAX_REJECTIONS):
            idx = bisect.bisect_right(self.cumulative, rng.random() * self.total)
            pick = self.identities[min(idx, len(self.identities) - 1)]
            if pick not in exclude:
                return pick
        # heavily blacklisted buyer: sample the conditional distribution directly
        pool = [(i, w) for i, w in zip(self.identities, self.weights) if i not in exclude]
        if not pool:
            return None
        ids, weights = zip(*pool)
        return rng.choices(ids, weights=weights)[0]


def choose_supplier(world: World, consumer: Agent, wheel: Optional[Wheel] = None) -> Optional[str]:
    """Supplier identity ``consumer`` buys from today, or None for no purchase."""
    if consumer.role != CONSUMER:
        raise SimulationError(f"agent {consumer.agent_id} is not a consumer")
    if not consumer.honest:
        targets = world.active_dishonest_suppliers()
        return world.rng.choice(targets) if targets else None
    wheel = wheel or Wheel.for_world(world)
    return wheel.spin(world.rng, consumer.blacklist)


def step_day(world: World) -> list:
    """Run one market day; returns the day's transactions."""
    cfg = world.config
    if world.day >= cfg.duration_days:
        raise SimulationError(f"simulation already finished at day {world.day}")
    day = world.day + 1
    rng = world.rng
    wheel = Wheel.for_world(world)
    dishonest_targets = world.active_dishonest_suppliers()

    todays = []
    events = []
    for buyer in world.agents:
        if buyer.role != CONSUMER:
            continue
        if rng.random() >= cfg.purchase_probability:
            continue
        if buyer.honest:
            seller_id = wheel.spin(rng, buyer.blacklist)
        else:
            seller_id = rng.choice(dishonest_targets) if dishonest_targets else None
        if seller_id is None:
            continue
        seller = world.agent_of(seller_id)
        if not seller.honest:
            outcome = SCAM
            rating = 1.0 if not buyer.honest else -1.0
            if buyer.honest:
                buyer.blacklist.add(seller_id)
        elif rng.random() < cfg.bad_service_rate:
            outcome, rating = BAD, -1.0
        else:
            outcome, rating = GOOD, 1.0
        tx = TransactionRecord(day, buyer.current_identity, seller_id, buyer.agent_id,
                               seller.agent_id, cfg.price, outcome, rating)
        todays.append(tx)
        events.append(RatingEvent(day, buyer.current_identity, seller_id, rating, cfg.price))

    if cfg.system is None:
        world.reputation.current_day = day
    else:
        world.reputation.update_period(events)
    world.ledger.transactions.extend(todays)
    world.day = day
    return todays


def rotate_identities(world: World) -> None:
    """Give every dishonest agent a fresh identity at the end of a scam period.

    No rotation happens on the final day, so each dishonest agent ends up with
    ceil(duration / period) identities. Blacklists keep the dead identities.
    """
    cfg = world.config
    day = world.day
    if day % cfg.scam_period_days or day >= cfg.duration_days:
        return
    for agent in world.agents:
        if agent.honest:
            continue
        world._open.pop(agent.current_identity).active_to_day = day
        agent.generation += 1
        _open_identity(world, agent, day + 1)


def _close_all(world: World) -> None:
    for rec in world._open.values():
        rec.active_to_day = world.day


def run_simulation(config: SimConfig, record_snapshots: bool = True):
    """Run a full simulation; returns ``(ledger, snapshots)``.

    ``snapshots`` holds the reputation state after day 0 (initial) and after
    every simulated day; it is empty when ``record_snapshots`` is False.
    """
    world = build_population(config)
    snapshots: list[ReputationSnapshot] = []
    if record_snapshots:
        snapshots.append(world.reputation.snapshot())
    for _ in range(config.duration_days):
        step_day(world)
        rotate_identities(world)
        if record_snapshots:
            snapshots.append(world.reputation.snapshot())
    _close_all(world)
    return world.ledger, snapshots


def expected_identity_count(config: SimConfig) -> int:
    return math.ceil(config.duration_days / config.scam_period_days)
