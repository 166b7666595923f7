"""Track class shares over weekly windows while one camp grows."""

# %% three weeks; camp 2 gains users every week
from stancewalk import WEEK, SynthConfig, evolve, generate, shifted

base = SynthConfig(users_per_class=200, rng_seed=21)
records, _, seeds = generate(base)
for week, size in ((1, 300), (2, 450)):
    more, _, _ = generate(shifted(base, users_per_class=(200, size), start_ts=week * WEEK, rng_seed=21 + week))
    records += more

# %% the full pipeline runs separately inside each window
rows = evolve(records, seeds, window_length=WEEK)
for r in rows:
    if r.cls != "unclassified":
        print(f"week {r.window}  {r.cls}  users {r.user_pct:5.1f}%  hashtags {r.hashtag_pct:5.1f}%")

# %% the same table as CSV, ready for plotting
import sys

from stancewalk import write_composition

write_composition(rows, sys.stdout)
