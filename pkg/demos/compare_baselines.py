"""LRM against the four baselines on an easy and a noisier corpus."""

# %%
from stancewalk import METHODS, PRESETS, SynthConfig, evaluate, generate, prepare, run_method

easy = PRESETS["reference"]
# more leakage, more general hashtags and a few hubs everyone uses
hard = SynthConfig(in_class_share_prob=0.6, shared_general_hashtags=30,
                   hub_hashtags=5, hub_prob=0.4, rng_seed=8)

# %%
for label, config in (("easy", easy), ("hard", hard)):
    records, golden, seeds = generate(config)
    matrix = prepare(records, seeds)
    print(f"-- {label}: {matrix.n} users, {matrix.m} hashtags")
    for method in METHODS:
        # SRM and LPM rebuild a co-occurrence graph from the posts
        reports = evaluate(run_method(method, matrix, seeds, records), golden)
        print(f"{method:>4}  users {reports['user'].macro_f1:.3f}  hashtags {reports['hashtag'].macro_f1:.3f}")
