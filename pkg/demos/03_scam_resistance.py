"""Loss to scam and profit from scam across reputation systems.

One seed per cell keeps this under a minute; the acceptance suite uses the
median over five seeds. Each cell is an independent 1000-agent, 183-day
market where 5% of suppliers sell nothing and 5% of consumers pump them.
"""
import time

from liquidrank import GridConfig, SimConfig, run_grid
from liquidrank.ledger_io import format_aligned

grid = GridConfig(base=SimConfig(n_agents=1000, duration_days=183, seed=0), replications=1)

t0 = time.perf_counter()
table = run_grid(grid)
print(format_aligned(table))
print(f"{len(grid.cells())} simulations in {time.perf_counter() - t0:.0f}s")

# Compare the 182-day rows: nobody changes identity before day 182, so every
# rater has the same time on market and the same spend. TOM and SOM then
# collapse to weighted, and weighted equals regular whenever every transaction
# costs the same.
