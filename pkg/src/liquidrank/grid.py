"""Scam-period x reputation-system comparison grids."""

from __future__ import annotations

import dataclasses
import json
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .market import SimConfig, parse_system, run_simulation
from .metrics import MetricsReport, build_comparison_table, compute_lts, compute_pfs

DEFAULT_PERIODS = (182, 92, 30, 10)
DEFAULT_SYSTEMS = (None, "regular", "weighted", "tom", "som")


@dataclass(frozen=True)
class GridConfig:
    base: SimConfig = field(default_factory=SimConfig)
    scam_periods: tuple = DEFAULT_PERIODS
    systems: tuple = DEFAULT_SYSTEMS
    replications: int = 5
    aggregation: str = "median"

    def __post_init__(self):
        object.__setattr__(self, "systems", tuple(parse_system(s) for s in self.systems))
        object.__setattr__(self, "scam_periods", tuple(int(p) for p in self.scam_periods))
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not self.scam_periods or any(p < 1 for p in self.scam_periods):
            raise ValueError("scam_periods must be positive integers")
        if not self.systems:
            raise ValueError("systems must not be empty")
        if self.aggregation != "median":
            raise ValueError(f"unsupported aggregation {self.aggregation!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "GridConfig":
        """Build from a flat JSON object: SimConfig field names plus grid fields."""
        data = dict(data)
        grid_keys = {"scam_periods", "systems", "replications", "aggregation"}
        sim_keys = {f.name for f in dataclasses.fields(SimConfig)}
        unknown = set(data) - grid_keys - sim_keys
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        grid = {k: data.pop(k) for k in grid_keys & set(data)}
        for key in ("scam_periods", "systems"):
            if key in grid:
                if not isinstance(grid[key], list):
                    raise ValueError(f"{key} must be a list")
                grid[key] = tuple(grid[key])
        return cls(base=SimConfig(**data), **grid)

    @classmethod
    def from_json(cls, text: str) -> "GridConfig":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ValueError("grid config must be a JSON object")
        return cls.from_dict(data)

    def cells(self) -> list:
        """``(period, system, replication, SimConfig)`` in output order.

        Cell ``i`` (period-major, then system, in config order) runs
        replication ``r`` with seed ``base.seed + i * replications + r``.
        """
        out = []
        index = 0
        for period in self.scam_periods:
            for system in self.systems:
                for r in range(self.replications):
                    seed = self.base.seed + index * self.replications + r
                    cfg = dataclasses.replace(self.base, scam_period_days=period, system=system, seed=seed)
                    out.append((period, system, r, cfg))
                index += 1
        return out


def _run_cell(cfg: SimConfig) -> tuple:
    ledger, _ = run_simulation(cfg, record_snapshots=False)
    return compute_lts(ledger), compute_pfs(ledger)


def run_grid(grid: GridConfig, jobs: int = 1) -> list[MetricsReport]:
    """Run every cell and return the comparison table (median over seeds)."""
    cells = grid.cells()
    configs = [c[3] for c in cells]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell, configs))
    else:
        results = [_run_cell(c) for c in configs]

    per_cell: dict = {}
    for (period, system, _, _), res in zip(cells, results):
        per_cell.setdefault((period, system), []).append(res)
    reports = [
        MetricsReport(
            period, system,
            statistics.median(r[0] for r in runs),
            statistics.median(r[1] for r in runs),
        )
        for (period, system), runs in per_cell.items()
    ]
    return build_comparison_table(reports)
