"""Seeded random walks over the hashtag graph.

For each seed the walker is confined to that seed's side of the graph: every
other seed is removed, and hashtags that relate evenly to all seeds (high
seed entropy) are made hard to enter. Similarity of a hashtag to the seed is
the visit probability accumulated over a fixed number of steps.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import IO

import numpy as np
import scipy.sparse as sp

from .errors import MissingSeedError
from .graph import HashtagGraph
from .ingest import SeedSet

INCIDENT = "incident"
SEED_EDGES = "seed_edges"
NO_DAMPENING = "none"


@dataclass(frozen=True)
class WalkConfig:
    rho: int = 10
    # INCIDENT scales every edge touching a hashtag; SEED_EDGES only rescales
    # the hashtag -> seed entries; NO_DAMPENING leaves weights alone
    dampening: str = INCIDENT
    block_other_seeds: bool = True

    def __post_init__(self):
        if int(self.rho) != self.rho or self.rho < 1:
            raise ValueError(f"rho must be a positive integer, got {self.rho!r}")
        if self.dampening not in (INCIDENT, SEED_EDGES, NO_DAMPENING):
            raise ValueError(f"unknown dampening mode {self.dampening!r}")


@dataclass(frozen=True, eq=False)
class SimilarityScores:
    scores: np.ndarray  # (t, m)
    seeds: SeedSet
    hashtags: tuple[str, ...]

    def write(self, stream: IO[str]) -> None:
        out = csv.writer(stream, lineterminator="\n")
        out.writerow(["class", "hashtag", "score"])
        for c, name in enumerate(self.seeds.class_names):
            for i in np.flatnonzero(self.scores[c]):
                out.writerow([name, self.hashtags[i], repr(float(self.scores[c, i]))])


def normalized_entropy(weights: np.ndarray) -> np.ndarray:
    """Shannon entropy of each row of ``weights`` (normalised to a
    distribution), divided by ``ln(t)`` for ``t`` columns.

    Zero entries contribute nothing; an all-zero row has entropy 0.
    """
    weights = np.atleast_2d(np.asarray(weights, dtype=np.float64))
    t = weights.shape[1]
    total = weights.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(total > 0, weights / total, 0.0)
        terms = np.where(p > 0, p * np.log(p), 0.0)
    return np.clip(-terms.sum(axis=1) / np.log(t), 0.0, 1.0)


def seed_indices(graph: HashtagGraph, seeds: SeedSet) -> np.ndarray:
    out = []
    for s in seeds.seeds:
        if s not in graph.hashtag_index:
            raise MissingSeedError(s)
        out.append(graph.hashtag_index[s])
    return np.asarray(out, dtype=np.int64)


def seed_entropies(graph: HashtagGraph, seeds: SeedSet) -> np.ndarray:
    """Entropy of every hashtag's weight distribution over the seeds.

    Seeds themselves get 0; they are never dampened.
    """
    idx = seed_indices(graph, seeds)
    to_seeds = graph.weights[:, idx].toarray()
    e = normalized_entropy(to_seeds)
    e[idx] = 0.0
    return e


def entropy(graph: HashtagGraph, seeds: SeedSet, i: int) -> float:
    return float(seed_entropies(graph, seeds)[i])


def _dampening_factors(graph: HashtagGraph, seed_idx: np.ndarray, ent: np.ndarray) -> np.ndarray:
    deg = graph.degrees.astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.where(deg > 0, (1.0 - ent) / deg, 0.0)
    f[seed_idx] = 1.0
    return f


def build_transition(
    graph: HashtagGraph,
    seeds: SeedSet,
    active: int,
    config: WalkConfig = WalkConfig(),
    entropies: np.ndarray | None = None,
) -> sp.csr_matrix:
    """Row-stochastic (or zero-row) transition matrix for the walk from seed
    number ``active``."""
    seed_idx = seed_indices(graph, seeds)
    w = graph.weights.tocoo()
    rows, cols, data = w.row, w.col, w.data.copy()

    if config.dampening != NO_DAMPENING:
        ent = seed_entropies(graph, seeds) if entropies is None else entropies
        f = _dampening_factors(graph, seed_idx, ent)
        if config.dampening == INCIDENT:
            data *= f[rows] * f[cols]
        else:
            into_seed = np.isin(cols, seed_idx)
            data[into_seed] *= f[rows[into_seed]]

    if config.block_other_seeds:
        blocked = np.zeros(graph.m, dtype=bool)
        blocked[np.delete(seed_idx, active)] = True
        data[blocked[rows] | blocked[cols]] = 0.0

    p = sp.csr_matrix((data, (rows, cols)), shape=(graph.m, graph.m))
    p.eliminate_zeros()
    rowsum = np.asarray(p.sum(axis=1)).ravel()
    with np.errstate(divide="ignore"):
        inv = np.where(rowsum > 0, 1.0 / rowsum, 0.0)
    return sp.csr_matrix(sp.diags(inv) @ p)


def walk_trajectory(transition: sp.spmatrix, start: int, rho: int) -> np.ndarray:
    """Visit distributions ``pi(1..rho)`` of a walker started at ``start``.

    Rows with no out-edges absorb whatever mass reaches them.
    """
    pt = sp.csr_matrix(transition.T)
    pi = np.zeros(transition.shape[0])
    pi[start] = 1.0
    steps = np.empty((rho, transition.shape[0]))
    for z in range(rho):
        pi = pt @ pi
        steps[z] = pi
    return steps


def run_walk(transition: sp.spmatrix, start: int, rho: int = 10) -> np.ndarray:
    return walk_trajectory(transition, start, rho).sum(axis=0)


def all_similarities(
    graph: HashtagGraph,
    seeds: SeedSet,
    config: WalkConfig = WalkConfig(),
    workers: int = 1,
) -> SimilarityScores:
    """Similarity of every hashtag to every seed, one walk per seed."""
    seed_idx = seed_indices(graph, seeds)
    ent = seed_entropies(graph, seeds) if config.dampening != NO_DAMPENING else None

    def one(c: int) -> np.ndarray:
        p = build_transition(graph, seeds, c, config, ent)
        return run_walk(p, seed_idx[c], config.rho)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, range(seeds.t)))
    else:
        rows = [one(c) for c in range(seeds.t)]
    return SimilarityScores(np.vstack(rows), seeds, graph.hashtags)
