"""Sustained versus fading reputation over three months of ratings.

Five accounts keep getting rated every day. Five more get a burst of
positive ratings in the first week and then go quiet. Replaying the log
shows the quiet accounts shrinking by 1% a day while the active ones hold.
"""
import random

from liquidrank import EngineConfig
from liquidrank.ledger_io import parse_ratings_log, replay_ratings, write_ratings_log
from liquidrank.engine import RatingEvent

rng = random.Random(1)
active = [f"steady{i}" for i in range(5)]
fading = [f"burst{i}" for i in range(5)]
raters = [f"user{i}" for i in range(30)]

events = []
for day in range(1, 91):
    for account in active:
        for rater in rng.sample(raters, 3):
            events.append(RatingEvent(day, rater, account, rng.choice([1.0, 1.0, 1.0, -1.0]), 9.0))
    if day <= 7:
        for account in fading:
            events.append(RatingEvent(day, rng.choice(raters), account, 1.0, 9.0))

# round-trip through the on-disk format, as `liquidrank rank` would read it
text = write_ratings_log(events)
series = replay_ratings(parse_ratings_log(text), EngineConfig(mode="weighted"))

print("day  " + "  ".join(f"{a:>8}" for a in active[:2] + fading[:2]))
for snap in series:
    if snap.day % 10 == 0 or snap.day in (1, 7):
        ranks = snap.as_dict()
        print(f"{snap.day:3d}  " + "  ".join(f"{ranks[a]:8.3f}" for a in active[:2] + fading[:2]))

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots(figsize=(7, 3.5))
    for account in active + fading:
        ax.plot([s.day for s in series], [s.as_dict()[account] for s in series],
                color="tab:blue" if account in active else "tab:red", lw=1)
    ax.set_xlabel("day")
    ax.set_ylabel("rank")
    ax.set_ylim(0, 1)
    fig.tight_layout()
    fig.savefig("reputation_decay.png", dpi=120)
    print("wrote reputation_decay.png")
