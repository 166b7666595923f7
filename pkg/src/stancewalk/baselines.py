"""Reference baselines: random assignment (RDM), simple random walk on the
co-occurrence graph (SRM), seed cosine similarity (HSM) and clamped label
propagation (LPM)."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .classify import (
    UNCLASSIFIED,
    Classification,
    HashtagAssignment,
    UserAssignment,
    argmax_with_ties,
    majority_users,
)
from .errors import MissingSeedError, UnsupportedInputError
from .graph import HashtagGraph, build_cooccurrence_graph
from .ingest import PostRecord, SeedSet, SharingMatrix

RDM, SRM, HSM, LPM = "rdm", "srm", "hsm", "lpm"


@dataclass(frozen=True)
class BaselineConfig:
    rng_seed: int | None = None
    rho: int = 10
    max_iterations: int = 1000
    tolerance: float = 1e-8

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.rho < 1 or self.max_iterations < 1:
            raise ValueError("rho and max_iterations must be >= 1")


def _hashtag_assignment(hashtags, scores: np.ndarray) -> HashtagAssignment:
    labels, tie, margin = argmax_with_ties(scores)
    return HashtagAssignment(tuple(hashtags), labels, np.full(len(labels), np.nan), tie, margin)


def _seed_columns(hashtags: Sequence[str], seeds: SeedSet) -> list[int]:
    index = {h: i for i, h in enumerate(hashtags)}
    try:
        return [index[s] for s in seeds.seeds]
    except KeyError as exc:
        raise MissingSeedError(exc.args[0]) from None


def _require_records(records) -> None:
    if records is None or isinstance(records, SharingMatrix):
        raise UnsupportedInputError(
            "this method needs post-level records (co-occurrence graph); "
            "pre-aggregated counts are not enough"
        )


def rdm_classify(
    matrix: SharingMatrix, seeds: SeedSet | int, config: BaselineConfig
) -> Classification:
    """Uniformly random classes for every hashtag and user."""
    if config.rng_seed is None:
        raise ValueError("RDM needs an explicit rng_seed")
    if isinstance(seeds, SeedSet):
        t, names = seeds.t, seeds.class_names
    else:
        t, names = int(seeds), tuple(f"class_{c + 1}" for c in range(int(seeds)))
    rng = np.random.default_rng(config.rng_seed)
    h_labels = rng.integers(0, t, size=matrix.m)
    u_labels = rng.integers(0, t, size=matrix.n)
    h = HashtagAssignment(
        matrix.hashtags, h_labels, np.full(matrix.m, np.nan),
        np.zeros(matrix.m, bool), np.full(matrix.m, np.nan),
    )
    u = UserAssignment(
        matrix.users, u_labels, np.eye(t)[u_labels], np.zeros(matrix.n, bool)
    )
    return Classification(RDM, tuple(names), h, u)


def row_normalize(w: sp.spmatrix) -> sp.csr_matrix:
    w = sp.csr_matrix(w, dtype=np.float64, copy=True)
    counts = np.diff(w.indptr)
    sums = np.bincount(np.repeat(np.arange(w.shape[0]), counts), weights=w.data, minlength=w.shape[0])
    sums = np.where(counts > 0, sums, 1.0)
    w.data /= np.repeat(sums, counts)
    return w


def simple_walk_similarities(graph: HashtagGraph, seeds: SeedSet, rho: int) -> np.ndarray:
    """Plain seeded walk: no seed blocking, no dampening. Returns (t, m)."""
    p = row_normalize(graph.weights)
    cols = _seed_columns(graph.hashtags, seeds)
    pi = np.zeros((seeds.t, graph.m))
    pi[np.arange(seeds.t), cols] = 1.0
    total = np.zeros_like(pi)
    for _ in range(rho):
        # row-vector form: pi(z) = pi(z-1) P
        pi = np.asarray(pi @ p)
        total += pi
    return total


def srm_classify(
    records: Sequence[PostRecord],
    matrix: SharingMatrix,
    seeds: SeedSet,
    config: BaselineConfig = BaselineConfig(),
) -> Classification:
    _require_records(records)
    graph = build_cooccurrence_graph(records, matrix.hashtags, matrix.users)
    sims = simple_walk_similarities(graph, seeds, config.rho)
    h = _hashtag_assignment(matrix.hashtags, sims.T)
    u = majority_users(matrix, h.labels, seeds.t)
    return Classification(SRM, seeds.class_names, h, u, {"similarity": sims})


def cosine_to_seeds(matrix: SharingMatrix, seeds: SeedSet) -> np.ndarray:
    """Cosine between each hashtag's user-count column and each seed's. (m, t)"""
    cols = _seed_columns(matrix.hashtags, seeds)
    r = matrix.counts.astype(np.float64).tocsc()
    dots = np.asarray((r.T @ r[:, cols]).todense())
    norms = np.sqrt(np.asarray(r.multiply(r).sum(axis=0)).ravel())
    denom = np.outer(norms, norms[cols])
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(denom > 0, dots / denom, 0.0)


def hsm_classify(matrix: SharingMatrix, seeds: SeedSet) -> Classification:
    sims = cosine_to_seeds(matrix, seeds)
    h = _hashtag_assignment(matrix.hashtags, sims)
    u = majority_users(matrix, h.labels, seeds.t)
    return Classification(HSM, seeds.class_names, h, u, {"similarity": sims.T})


def label_propagation(
    graph: HashtagGraph, seeds: SeedSet, max_iterations: int = 1000, tolerance: float = 1e-8
) -> tuple[np.ndarray, bool, int]:
    """Push label mass along the row-normalised graph with seeds clamped.

    Iterates ``L <- P^T L`` and resets seed rows to their one-hot label after
    every step. Returns ``(labels (m, t), converged, iterations)``.
    """
    p = row_normalize(graph.weights)
    pt = sp.csr_matrix(p.T)
    cols = _seed_columns(graph.hashtags, seeds)
    clamp = np.zeros((len(cols), seeds.t))
    clamp[np.arange(seeds.t), np.arange(seeds.t)] = 1.0
    lab = np.zeros((graph.m, seeds.t))
    lab[cols] = clamp
    for it in range(1, max_iterations + 1):
        new = pt @ lab
        new[cols] = clamp
        delta = np.abs(new - lab).max()
        lab = new
        if delta < tolerance:
            return lab, True, it
    return lab, False, max_iterations


def lpm_classify(
    records: Sequence[PostRecord],
    matrix: SharingMatrix,
    seeds: SeedSet,
    config: BaselineConfig = BaselineConfig(),
) -> Classification:
    _require_records(records)
    graph = build_cooccurrence_graph(records, matrix.hashtags, matrix.users)
    lab, converged, iters = label_propagation(graph, seeds, config.max_iterations, config.tolerance)
    if not converged:
        warnings.warn(f"label propagation did not converge in {iters} iterations", RuntimeWarning)
    h = _hashtag_assignment(matrix.hashtags, lab)
    u = majority_users(matrix, h.labels, seeds.t)
    return Classification(
        LPM, seeds.class_names, h, u,
        {"converged": converged, "iterations": iters, "similarity": lab.T},
    )


__all__ = [
    "RDM", "SRM", "HSM", "LPM", "UNCLASSIFIED", "BaselineConfig",
    "rdm_classify", "srm_classify", "hsm_classify", "lpm_classify",
    "simple_walk_similarities", "cosine_to_seeds", "label_propagation", "row_normalize",
]
