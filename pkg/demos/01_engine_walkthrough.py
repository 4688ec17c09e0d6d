"""A few days of rating traffic pushed through each engine mode."""
from liquidrank import EngineConfig, Mode, RatingEvent, init_state

# Three buyers, two sellers. "veteran" has been around since day 1,
# "newbie" only shows up on day 5; "big" has spent a lot already.
identities = ["veteran", "newbie", "big", "seller1", "seller2"]

days = [
    [RatingEvent(1, "veteran", "seller1", 1.0, 9.0)],
    [RatingEvent(2, "big", "seller1", 1.0, 999.0), RatingEvent(2, "veteran", "seller2", -1.0, 9.0)],
    [],
    [],
    [RatingEvent(5, "newbie", "seller2", 1.0, 9.0), RatingEvent(5, "veteran", "seller2", -1.0, 9.0)],
]

for mode in Mode:
    state = init_state([i for i in identities if i != "newbie"], EngineConfig(mode=mode))
    for batch in days:
        if state.current_day == 4:
            state.register("newbie", 5)
        state.update_period(batch)
    ranks = ", ".join(f"{k}={v:.3f}" for k, v in sorted(state.ranks.items()))
    print(f"{mode.value:>8}: {ranks}")

# regular ignores the 999-unit purchase behind big's rating; weighted counts it
# with log10(1 + 999) = 3. On day 5, tom trusts the veteran's -1 far more than
# the newbie's +1 (time on market 5 vs 1), so seller2 ends lower than in weighted.
