"""Seed-hashtag stance classification of users and hashtags by a dampened
random walk over the hashtag-sharing graph."""

from .baselines import BaselineConfig, hsm_classify, lpm_classify, rdm_classify, srm_classify
from .classify import (
    UNCLASSIFIED,
    Classification,
    HashtagAssignment,
    UserAssignment,
    classify_hashtags,
    classify_users,
)
from .errors import (
    EmptyInputError,
    FilterError,
    MalformedInputError,
    MissingSeedError,
    StanceError,
    UnsupportedInputError,
)
from .evaluate import (
    GoldenSet, EvalReport, derive_golden_hashtags, evaluate, evolve, score, time_run,
    write_composition,
)
from .graph import HashtagGraph, build_cooccurrence_graph, build_sharing_graph
from .ingest import (
    PostRecord,
    SeedSet,
    SharingMatrix,
    aggregate,
    filter_low_engagement,
    parse_posts,
    read_triples,
    window,
)
from .pipeline import LRM, METHODS, LRMConfig, lrm_classify, prepare, run_method
from .synth import PRESETS, WEEK, SynthConfig, generate, shifted
from .walk import SimilarityScores, WalkConfig, all_similarities, build_transition, entropy, run_walk

__version__ = "0.1.0"
