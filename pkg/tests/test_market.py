import dataclasses
import math
from collections import Counter

import pytest

from liquidrank.engine import ReputationError
from liquidrank.ledger_io import write_ledger, write_snapshot_series
from liquidrank.market import (
    EPSILON,
    SCAM,
    SimConfig,
    SimulationError,
    Wheel,
    build_population,
    choose_supplier,
    expected_identity_count,
    population_counts,
    rotate_identities,
    run_simulation,
    step_day,
)
from liquidrank.metrics import compute_lts, scam_volumes


def small(**kw):
    base = dict(n_agents=100, duration_days=40, scam_period_days=10, seed=3)
    base.update(kw)
    return SimConfig(**base)


@pytest.mark.parametrize("n, expected", [
    (1000, (900, 100, 5, 45)),
    (10000, (9000, 1000, 50, 450)),
    (100, (90, 10, 1, 5)),
])
def test_population_counts(n, expected):
    c = population_counts(SimConfig(n_agents=n))
    assert (c["consumers"], c["suppliers"], c["dishonest_suppliers"], c["dishonest_consumers"]) == expected


def test_build_population_registers_everyone():
    world = build_population(SimConfig(n_agents=1000), seed=1)
    assert sum(a.role == "consumer" for a in world.agents) == 900
    assert sum(not a.honest and a.role == "supplier" for a in world.agents) == 5
    assert sum(not a.honest and a.role == "consumer" for a in world.agents) == 45
    assert len(world.reputation) == 1000
    assert set(world.reputation.ranks.values()) == {0.5}


@pytest.mark.parametrize("n", [0, 1, 5])
def test_population_too_small(n):
    with pytest.raises(SimulationError):
        build_population(SimConfig(n_agents=n))


@pytest.mark.parametrize("kw", [dict(consumer_fraction=1.2), dict(duration_days=0),
                                dict(scam_period_days=0), dict(price=0.0)])
def test_config_validation(kw):
    with pytest.raises(SimulationError):
        SimConfig(**kw)


def test_config_rejects_bad_engine_params():
    with pytest.raises(ReputationError):
        SimConfig(blend_d=0.0)


# --- supplier choice ------------------------------------------------------

def test_uniform_choice_without_system():
    world = build_population(SimConfig(n_agents=100, dishonest_supplier_fraction=0,
                                       dishonest_consumer_fraction=0, seed=5))
    buyer = world.agents[0]
    draws = Counter(choose_supplier(world, buyer) for _ in range(50_000))
    assert len(draws) == 10
    for count in draws.values():
        # binomial sd ~ 67; 5 sd band
        assert abs(count - 5000) < 340


def test_roulette_proportional_to_rank_plus_epsilon():
    world = build_population(SimConfig(n_agents=20, system="weighted",
                                       dishonest_supplier_fraction=0, seed=9))
    s1, s2 = [a.current_identity for a in world.suppliers]
    world.reputation.ranks[s1] = 0.99
    world.reputation.ranks[s2] = 0.0
    buyer = next(a for a in world.consumers if a.honest)
    wheel = Wheel.for_world(world)
    n = 100_000
    hits = sum(choose_supplier(world, buyer, wheel) == s1 for _ in range(n))
    p = (0.99 + EPSILON) / (0.99 + 2 * EPSILON)
    assert p == pytest.approx(0.990, abs=5e-4)
    assert abs(hits / n - p) < 5 * math.sqrt(p * (1 - p) / n)


def test_wheel_respects_blacklist_and_empty():
    import random

    wheel = Wheel(["x", "y", "z"], [1.0, 1000.0, 1.0])
    rng = random.Random(0)
    picks = {wheel.spin(rng, {"y"}) for _ in range(200)}
    assert picks == {"x", "z"}
    assert wheel.spin(rng, {"x", "y", "z"}) is None
    assert Wheel([], []).spin(rng) is None


def test_dishonest_consumer_picks_dishonest_supplier():
    world = build_population(SimConfig(n_agents=100, seed=2))
    buyer = next(a for a in world.consumers if not a.honest)
    (target,) = world.active_dishonest_suppliers()
    assert {choose_supplier(world, buyer) for _ in range(20)} == {target}


def test_choose_supplier_rejects_supplier_agent():
    world = build_population(small())
    with pytest.raises(SimulationError):
        choose_supplier(world, world.suppliers[0])


# --- stepping -------------------------------------------------------------

def test_single_honest_buyer_blacklists_scammer():
    cfg = SimConfig(n_agents=2, consumer_fraction=0.5, dishonest_supplier_fraction=1.0,
                    dishonest_consumer_fraction=0.0, duration_days=5, scam_period_days=100,
                    system="tom", seed=0)
    world = build_population(cfg)
    buyer, seller = world.agents
    assert buyer.honest and not seller.honest
    (tx,) = step_day(world)
    assert tx.outcome == SCAM and tx.rating_value == -1.0
    assert seller.current_identity in buyer.blacklist
    for _ in range(4):
        assert step_day(world) == []
    assert len(world.ledger.transactions) == 1


def test_all_honest_no_bad_service():
    cfg = small(dishonest_supplier_fraction=0, dishonest_consumer_fraction=0,
                bad_service_rate=0.0, system="weighted")
    ledger, _ = run_simulation(cfg, record_snapshots=False)
    assert ledger.transactions
    assert all(tx.rating_value == 1.0 and tx.outcome == "good" for tx in ledger.transactions)
    assert compute_lts(ledger) == 0.0


def test_no_purchases_means_pure_decay():
    world = build_population(small(purchase_probability=0.0, system="som"))
    before = dict(world.reputation.ranks)
    assert step_day(world) == []
    assert world.reputation.current_day == 1
    for ident, rank in world.reputation.ranks.items():
        assert rank == 0.99 * before[ident]


def test_no_system_keeps_default_ranks():
    ledger, snaps = run_simulation(small(system=None))
    assert all(r == 0.5 for snap in snaps for _, r in snap.entries)
    assert [s.day for s in snaps] == list(range(41))


def test_step_past_end_rejected():
    world = build_population(small(duration_days=1))
    step_day(world)
    with pytest.raises(SimulationError):
        step_day(world)


# --- rotation -------------------------------------------------------------

def test_rotation_at_period_boundary():
    world = build_population(small())
    dishonest = [a for a in world.agents if not a.honest]
    for _ in range(9):
        step_day(world)
        rotate_identities(world)
    old = {a.agent_id: a.current_identity for a in dishonest}
    step_day(world)  # day 10
    rotate_identities(world)
    for a in dishonest:
        assert a.current_identity != old[a.agent_id]
        assert world.reputation.get_rank(a.current_identity) == 0.5
        assert world.reputation.first_active_day[a.current_identity] == 11
        assert world.reputation.cumulative_spend[a.current_identity] == 0.0
    honest = [a for a in world.agents if a.honest]
    assert all(a.generation == 0 for a in honest)


def test_rotation_noop_without_dishonest():
    world = build_population(small(dishonest_supplier_fraction=0, dishonest_consumer_fraction=0))
    for _ in range(20):
        step_day(world)
        rotate_identities(world)
    assert len(world.ledger.identities) == 100


# --- whole-run invariants -------------------------------------------------

RUNS = [
    small(system=None),
    small(system="regular", scam_period_days=7),
    small(system="tom", scam_period_days=3, duration_days=31),
    small(system="som", purchase_probability=0.6, price=2.5),
    small(system="weighted", n_agents=300, scam_period_days=40),
]


@pytest.fixture(scope="module", params=RUNS, ids=lambda c: f"{c.system}-{c.scam_period_days}")
def run(request):
    cfg = request.param
    ledger, snaps = run_simulation(cfg)
    return cfg, ledger, snaps


def test_determinism(run):
    cfg, ledger, snaps = run
    ledger2, snaps2 = run_simulation(cfg)
    assert write_ledger(ledger) == write_ledger(ledger2)
    assert write_snapshot_series(snaps) == write_snapshot_series(snaps2)


def test_conservation(run):
    _, ledger, _ = run
    honesty = ledger.agent_honesty()
    honest_total = sum(t.value for t in ledger.transactions if honesty[t.buyer_agent_id])
    hh = sum(t.value for t in ledger.transactions
             if honesty[t.buyer_agent_id] and honesty[t.seller_agent_id])
    hd = sum(t.value for t in ledger.transactions
             if honesty[t.buyer_agent_id] and not honesty[t.seller_agent_id])
    assert abs(honest_total - (hh + hd)) <= 1e-12 * max(1.0, honest_total)
    assert scam_volumes(ledger).honest_to_dishonest == pytest.approx(hd, abs=1e-12)


def test_blacklist_soundness(run):
    _, ledger, _ = run
    honesty = ledger.agent_honesty()
    pairs = Counter((t.buyer_agent_id, t.seller_identity) for t in ledger.transactions
                    if honesty[t.buyer_agent_id] and not honesty[t.seller_agent_id])
    assert all(n == 1 for n in pairs.values())


def test_rotation_intervals(run):
    cfg, ledger, snaps = run
    per_agent = {}
    for rec in ledger.identities:
        per_agent.setdefault(rec.agent_id, []).append(rec)
    for aid, recs in per_agent.items():
        if recs[0].honest:
            assert len(recs) == 1
            assert (recs[0].active_from_day, recs[0].active_to_day) == (1, cfg.duration_days)
            continue
        assert len(recs) == expected_identity_count(cfg)
        spans = sorted((r.active_from_day, r.active_to_day) for r in recs)
        assert spans[0][0] == 1 and spans[-1][1] == cfg.duration_days
        for (_, end), (start, _) in zip(spans, spans[1:]):
            assert start == end + 1
    # every identity starts at 0.5 in the snapshot of the day it appears
    by_day = {s.day: dict(s.entries) for s in snaps}
    for rec in ledger.identities:
        start_snap = by_day[rec.active_from_day - 1]
        assert start_snap[rec.identity] == 0.5


def test_classification_and_active_identities(run):
    _, ledger, _ = run
    honesty = ledger.agent_honesty()
    spans = {r.identity: (r.active_from_day, r.active_to_day, r.agent_id) for r in ledger.identities}
    for t in ledger.transactions:
        assert (t.outcome == SCAM) == (not honesty[t.seller_agent_id])
        for ident, aid in ((t.buyer_identity, t.buyer_agent_id), (t.seller_identity, t.seller_agent_id)):
            start, end, owner = spans[ident]
            assert owner == aid and start <= t.day <= end
        assert t.value > 0


def test_engine_consistency_each_day():
    world = build_population(small(system="tom"))
    for day in range(1, 41):
        step_day(world)
        rotate_identities(world)
        assert world.reputation.current_day == world.day == day
        assert all(0.0 <= r <= 1.0 for r in world.reputation.ranks.values())


def test_no_dishonest_means_zero_lts():
    cfg = small(dishonest_supplier_fraction=0, dishonest_consumer_fraction=0, system="tom")
    ledger, _ = run_simulation(cfg, record_snapshots=False)
    assert compute_lts(ledger) == 0.0


def test_seed_changes_outcome():
    a, _ = run_simulation(small(system="tom"), record_snapshots=False)
    b, _ = run_simulation(dataclasses.replace(small(system="tom"), seed=4), record_snapshots=False)
    assert write_ledger(a) != write_ledger(b)
