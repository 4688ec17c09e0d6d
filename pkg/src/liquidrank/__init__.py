"""Weighted liquid rank reputation engine and scam-marketplace simulator."""

from .engine import (
    EngineConfig,
    Mode,
    RatingEvent,
    ReputationError,
    ReputationSnapshot,
    ReputationState,
    init_state,
)
from .grid import GridConfig, run_grid
from .market import SimConfig, build_population, run_simulation
from .metrics import (
    MetricsReport,
    build_comparison_table,
    compute_lts,
    compute_pfs,
    relative_decrease,
)

__all__ = [
    "EngineConfig",
    "GridConfig",
    "MetricsReport",
    "Mode",
    "RatingEvent",
    "ReputationError",
    "ReputationSnapshot",
    "ReputationState",
    "SimConfig",
    "build_comparison_table",
    "build_population",
    "compute_lts",
    "compute_pfs",
    "init_state",
    "relative_decrease",
    "run_grid",
    "run_simulation",
]
