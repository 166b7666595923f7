"""Planted-partition post corpora with known user and hashtag classes."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .evaluate import GoldenSet
from .ingest import PostRecord, SeedSet

WEEK = 7 * 24 * 3600


@dataclass(frozen=True)
class SynthConfig:
    """Corpus shape.

    Every post carries ``tags_per_post`` hashtags (inclusive range). Each tag
    comes from the author's class pool with probability
    ``in_class_share_prob``; otherwise a leak target is chosen uniformly among
    the general pool and the other classes' pools. Class pools are Zipf-like
    (``popularity_exponent``) with the seed as the most popular entry. Hubs
    are appended to a post with probability ``hub_prob`` regardless of class.
    """

    t: int = 2
    users_per_class: int | tuple[int, ...] = 500
    hashtags_per_class: int = 50
    shared_general_hashtags: int = 10
    in_class_share_prob: float = 0.8
    posts_per_user: int = 40
    tags_per_post: tuple[int, int] = (1, 3)
    popularity_exponent: float = 0.8
    hub_hashtags: int = 0
    hub_prob: float = 0.0
    activity_skew: float = 0.0
    start_ts: int = 0
    duration: int = WEEK
    rng_seed: int = 0

    def __post_init__(self):
        if self.t < 2:
            raise ValueError("need at least two classes")
        if not (1.0 / self.t < self.in_class_share_prob <= 1.0):
            raise ValueError("in_class_share_prob must lie in (1/t, 1]")
        sizes = self.class_sizes
        if len(sizes) != self.t or min(sizes) < 1:
            raise ValueError("users_per_class must give t positive sizes")
        if min(self.hashtags_per_class, self.posts_per_user) < 1:
            raise ValueError("hashtags_per_class and posts_per_user must be >= 1")
        if self.shared_general_hashtags < 0 or self.hub_hashtags < 0:
            raise ValueError("pool sizes must be non-negative")
        lo, hi = self.tags_per_post
        if not 1 <= lo <= hi:
            raise ValueError("tags_per_post must be a range with 1 <= lo <= hi")
        if not 0.0 <= self.hub_prob <= 1.0 or (self.hub_prob > 0 and self.hub_hashtags == 0):
            raise ValueError("hub_prob needs hub hashtags and must be in [0, 1]")
        if self.duration < 1 or self.activity_skew < 0:
            raise ValueError("duration must be >= 1 and activity_skew >= 0")

    @property
    def class_sizes(self) -> tuple[int, ...]:
        if isinstance(self.users_per_class, int):
            return (self.users_per_class,) * self.t
        return tuple(self.users_per_class)


PRESETS = {
    "reference": SynthConfig(rng_seed=20191212),
    "reference_hubs": SynthConfig(rng_seed=20191212, hub_hashtags=5, hub_prob=0.5),
    "desk": SynthConfig(
        users_per_class=5000, hashtags_per_class=995, posts_per_user=40, rng_seed=20160623,
    ),
    "separable": SynthConfig(
        users_per_class=100, hashtags_per_class=20, shared_general_hashtags=0,
        in_class_share_prob=1.0, posts_per_user=20, rng_seed=1,
    ),
}


def class_hashtag(c: int, j: int) -> str:
    return f"seed{c + 1}" if j == 0 else f"c{c + 1}tag{j:04d}"


def user_id(c: int, k: int) -> str:
    return f"c{c + 1}user{k:05d}"


def generate(config: SynthConfig) -> tuple[list[PostRecord], GoldenSet, SeedSet]:
    """Draw a corpus; identical configs give identical corpora."""
    rng = np.random.default_rng(config.rng_seed)
    t, hp = config.t, config.hashtags_per_class
    pools = [[class_hashtag(c, j) for j in range(hp)] for c in range(t)]
    general = [f"general{j:03d}" for j in range(config.shared_general_hashtags)]
    hubs = [f"hub{j:02d}" for j in range(config.hub_hashtags)]

    pop = 1.0 / np.arange(1, hp + 1) ** config.popularity_exponent
    pop /= pop.sum()

    # one row per post
    user_class = np.repeat(np.arange(t), config.class_sizes)
    user_rank = np.concatenate([np.arange(s) for s in config.class_sizes])
    if config.activity_skew > 0:
        act = rng.lognormal(0.0, config.activity_skew, size=len(user_class))
        n_posts = np.maximum(1, np.rint(config.posts_per_user * act / act.mean())).astype(int)
    else:
        n_posts = np.full(len(user_class), config.posts_per_user)
    post_user = np.repeat(np.arange(len(user_class)), n_posts)
    lo, hi = config.tags_per_post
    n_tags = rng.integers(lo, hi + 1, size=len(post_user))

    # one row per tag slot
    slot_post = np.repeat(np.arange(len(post_user)), n_tags)
    own = user_class[post_user[slot_post]]
    stay = rng.random(len(slot_post)) < config.in_class_share_prob
    in_pick = rng.choice(hp, size=len(slot_post), p=pop)
    # leak targets: 0..t-2 index the other classes, t-1 is the general pool
    n_targets = (t - 1) + (1 if general else 0)
    target = rng.integers(0, n_targets, size=len(slot_post))
    other_pick = rng.integers(0, hp, size=len(slot_post))
    gen_pick = rng.integers(0, max(len(general), 1), size=len(slot_post))
    has_hub = rng.random(len(post_user)) < config.hub_prob
    hub_pick = rng.integers(0, max(len(hubs), 1), size=len(post_user))
    ts = config.start_ts + rng.integers(0, config.duration, size=len(post_user))

    tags = []
    for s in range(len(slot_post)):
        c = own[s]
        if stay[s]:
            tags.append(pools[c][in_pick[s]])
        elif target[s] == t - 1:
            tags.append(general[gen_pick[s]])
        else:
            other = target[s] + (target[s] >= c)
            tags.append(pools[other][other_pick[s]])

    records = []
    bounds = np.concatenate([[0], np.cumsum(n_tags)])
    for p, k in enumerate(post_user):
        post_tags = tags[bounds[p]:bounds[p + 1]]
        if has_hub[p]:
            post_tags.append(hubs[hub_pick[p]])
        records.append(
            PostRecord(user_id(user_class[k], user_rank[k]), tuple(post_tags), int(ts[p]))
        )

    golden = GoldenSet(
        users={f"class{c + 1}": {user_id(c, k) for k in range(config.class_sizes[c])} for c in range(t)},
        hashtags={f"class{c + 1}": set(pools[c]) for c in range(t)},
    )
    seeds = SeedSet(tuple(pools[c][0] for c in range(t)), tuple(f"class{c + 1}" for c in range(t)))
    return records, golden, seeds


def shifted(config: SynthConfig, **changes) -> SynthConfig:
    return replace(config, **changes)
