"""Command line: ``liquidrank {simulate,compare,rank}``.

Exit codes: 0 success, 1 runtime failure, 2 bad flags or config.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .engine import EngineConfig, ReputationError
from .grid import GridConfig, run_grid
from .ledger_io import (
    LogFormatError,
    format_aligned,
    parse_ratings_log,
    replay_ratings,
    write_ledger,
    write_metrics_table,
    write_snapshot_series,
)
from .market import SimConfig, SimulationError, population_counts, run_simulation
from .metrics import MetricUndefinedError, report_from_ledger

SYSTEMS = ("none", "regular", "weighted", "tom", "som")


def _add_engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--blend-d", type=float, default=0.5)
    p.add_argument("--retention", type=float, default=0.99)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="liquidrank", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one marketplace simulation")
    sim.add_argument("--agents", type=int, default=1000)
    sim.add_argument("--days", type=int, default=183)
    sim.add_argument("--scam-period", type=int, default=182)
    sim.add_argument("--system", choices=SYSTEMS, default="none")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", type=Path, default=Path("."))
    sim.add_argument("--price", type=float, default=1.0)
    sim.add_argument("--purchase-prob", type=float, default=1.0)
    sim.add_argument("--bad-rate", type=float, default=0.10)
    _add_engine_flags(sim)
    sim.set_defaults(subparser=sim)

    cmp_ = sub.add_parser("compare", help="run a scam-period x system grid from a JSON config")
    cmp_.add_argument("config", type=Path)
    cmp_.add_argument("--out", type=Path, default=Path("."))
    cmp_.add_argument("--jobs", type=int, default=1)
    cmp_.set_defaults(subparser=cmp_)

    rank = sub.add_parser("rank", help="replay a rating log and write the rank series")
    rank.add_argument("--input", type=Path, required=True)
    rank.add_argument("--system", choices=SYSTEMS[1:], default="weighted")
    rank.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
    _add_engine_flags(rank)
    rank.set_defaults(subparser=rank)
    return parser


def cmd_simulate(args, parser) -> int:
    try:
        config = SimConfig(
            n_agents=args.agents,
            duration_days=args.days,
            scam_period_days=args.scam_period,
            system=args.system,
            seed=args.seed,
            price=args.price,
            purchase_probability=args.purchase_prob,
            bad_service_rate=args.bad_rate,
            blend_d=args.blend_d,
            retention_lambda=args.retention,
        )
        population_counts(config)
    except (SimulationError, ReputationError) as exc:
        parser.error(str(exc))

    ledger, snapshots = run_simulation(config)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "ledger.tsv").write_text(write_ledger(ledger))
    (args.out / "snapshots.tsv").write_text(write_snapshot_series(snapshots))
    try:
        report = report_from_ledger(ledger, config.scam_period_days, config.system)
    except MetricUndefinedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    (args.out / "metrics.tsv").write_text(write_metrics_table([report]))
    (args.out / "metrics_raw.tsv").write_text(write_metrics_table([report], raw=True))
    print(f"LTS\t{report.lts!r}")
    print(f"PFS\t{report.pfs!r}")
    return 0


def cmd_compare(args, parser) -> int:
    try:
        grid = GridConfig.from_json(args.config.read_text())
        population_counts(grid.base)
    except OSError as exc:
        parser.error(f"cannot read config: {exc}")
    except (ValueError, TypeError) as exc:
        parser.error(f"malformed config: {exc}")

    try:
        table = run_grid(grid, jobs=args.jobs)
    except (MetricUndefinedError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "comparison.tsv").write_text(write_metrics_table(table))
    (args.out / "comparison_raw.tsv").write_text(write_metrics_table(table, raw=True))
    sys.stdout.write(format_aligned(table))
    return 0


def cmd_rank(args, parser) -> int:
    try:
        config = EngineConfig(mode=args.system, blend_d=args.blend_d, retention_lambda=args.retention)
    except ReputationError as exc:
        parser.error(str(exc))
    try:
        events = parse_ratings_log(args.input.read_text())
        series = write_snapshot_series(replay_ratings(events, config))
    except (OSError, LogFormatError, ReputationError) as exc:
        print(f"error: {args.input}: {exc}", file=sys.stderr)
        return 1
    if args.out is None:
        sys.stdout.write(series)
    else:
        args.out.write_text(series)
    return 0


COMMANDS = {"simulate": cmd_simulate, "compare": cmd_compare, "rank": cmd_rank}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args, args.subparser)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1


if __name__ == "__main__":
    sys.exit(main())
