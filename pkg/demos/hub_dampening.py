"""What entropy dampening does when some hashtags are used by every camp.

Hubs get attached to posts regardless of stance. By symmetry they score
near-zero intensity either way. The difference shows up elsewhere: without
dampening, walkers from both seeds leak through the hubs into the other
camp, and the partisan hashtags lose most of their intensity too.
"""

# %%
import numpy as np

from stancewalk import PRESETS, LRMConfig, WalkConfig, generate, lrm_classify, prepare
from stancewalk import build_sharing_graph
from stancewalk.walk import seed_entropies

records, golden, seeds = generate(PRESETS["reference_hubs"])
matrix = prepare(records, seeds)
hubs = [i for i, t in enumerate(matrix.hashtags) if t.startswith("hub")]

# %% seed entropy: how evenly a hashtag connects to the seeds
graph = build_sharing_graph(matrix)
ent = seed_entropies(graph, seeds)
print("hub entropies", np.round(ent[hubs], 3))

# %% intensity of hubs with and without dampening
for mode in ("incident", "seed_edges", "none"):
    res = lrm_classify(matrix, seeds, LRMConfig(WalkConfig(dampening=mode)))
    h = res.hashtags
    partisan = np.nanmedian(h.intensity[[i for i, t in enumerate(matrix.hashtags) if "tag" in t]])
    print(f"{mode:>10}  hub intensity {np.round(h.intensity[hubs], 4)}  partisan median {partisan:.3f}")
# a hub with exactly balanced seed weights gets entropy 1 and is cut off
# entirely, so it stays unclassified (nan intensity)
