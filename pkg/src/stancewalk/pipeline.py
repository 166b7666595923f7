"""End-to-end runs: records or counts in, :class:`Classification` out."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import baselines
from .classify import ONE_MINUS_ENTROPY, Classification, classify_hashtags, classify_users
from .errors import MissingSeedError
from .graph import build_sharing_graph
from .ingest import PostRecord, SeedSet, SharingMatrix, aggregate, filter_low_engagement
from .walk import WalkConfig, all_similarities

LRM = "lrm"
METHODS = (LRM, baselines.SRM, baselines.HSM, baselines.LPM, baselines.RDM)


@dataclass(frozen=True)
class LRMConfig:
    walk: WalkConfig = field(default_factory=WalkConfig)
    intensity: str = ONE_MINUS_ENTROPY


def lrm_classify(
    matrix: SharingMatrix,
    seeds: SeedSet,
    config: LRMConfig = LRMConfig(),
    workers: int = 1,
) -> Classification:
    graph = build_sharing_graph(matrix)
    sims = all_similarities(graph, seeds, config.walk, workers=workers)
    h = classify_hashtags(sims, config.intensity)
    u = classify_users(matrix, h, seeds.t)
    return Classification(LRM, seeds.class_names, h, u, {"similarity": sims.scores})


def prepare(
    records: Sequence[PostRecord] | None,
    seeds: SeedSet,
    matrix: SharingMatrix | None = None,
    filter: bool = True,
) -> SharingMatrix:
    """Aggregate (unless ``matrix`` is given), filter once, check seeds."""
    if matrix is None:
        matrix = aggregate(records)
    if filter:
        matrix = filter_low_engagement(matrix, seeds)
    for s in seeds.seeds:
        if s not in matrix.hashtag_index:
            raise MissingSeedError(s)
    return matrix


def run_method(
    method: str,
    matrix: SharingMatrix,
    seeds: SeedSet,
    records: Sequence[PostRecord] | None = None,
    lrm_config: LRMConfig = LRMConfig(),
    baseline_config: baselines.BaselineConfig = baselines.BaselineConfig(rng_seed=0),
    workers: int = 1,
) -> Classification:
    """Run one method on an already prepared (filtered) matrix."""
    method = method.lower()
    if method == LRM:
        return lrm_classify(matrix, seeds, lrm_config, workers)
    if method == baselines.SRM:
        return baselines.srm_classify(records, matrix, seeds, baseline_config)
    if method == baselines.LPM:
        return baselines.lpm_classify(records, matrix, seeds, baseline_config)
    if method == baselines.HSM:
        return baselines.hsm_classify(matrix, seeds)
    if method == baselines.RDM:
        return baselines.rdm_classify(matrix, seeds, baseline_config)
    raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
