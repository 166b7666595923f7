import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stancewalk.baselines import (
    BaselineConfig,
    cosine_to_seeds,
    hsm_classify,
    label_propagation,
    lpm_classify,
    rdm_classify,
    row_normalize,
    simple_walk_similarities,
    srm_classify,
)
from stancewalk.classify import UNCLASSIFIED, majority_users
from stancewalk.errors import UnsupportedInputError
from stancewalk.graph import build_cooccurrence_graph
from stancewalk.ingest import PostRecord, SeedSet, aggregate
from stancewalk.walk import NO_DAMPENING, WalkConfig, all_similarities

from conftest import graph_from_dense, matrix_from_table, random_symmetric
from oracles import cosine, path_similarity, transition


def test_rdm_deterministic():
    m = matrix_from_table(np.ones((50, 30), int))
    cfg = BaselineConfig(rng_seed=7)
    a, b = rdm_classify(m, SeedSet(("h0", "h1")), cfg), rdm_classify(m, SeedSet(("h0", "h1")), cfg)
    assert (a.hashtags.labels == b.hashtags.labels).all()
    assert (a.users.labels == b.users.labels).all()


def test_rdm_balance():
    m = matrix_from_table(np.ones((10_000, 2), int))
    r = rdm_classify(m, 2, BaselineConfig(rng_seed=123))
    per_class = np.bincount(r.users.labels, minlength=2)
    assert (abs(per_class - 5000) <= 300).all()


def test_rdm_single_class():
    m = matrix_from_table(np.ones((20, 5), int))
    r = rdm_classify(m, 1, BaselineConfig(rng_seed=0))
    assert (r.users.labels == 0).all() and (r.hashtags.labels == 0).all()


def test_rdm_needs_seed():
    with pytest.raises(ValueError):
        rdm_classify(matrix_from_table([[1]]), 2, BaselineConfig())


def test_baseline_config_validation():
    with pytest.raises(ValueError):
        BaselineConfig(tolerance=0)
    with pytest.raises(ValueError):
        BaselineConfig(rho=0)


def _oracle_srm(w, seed_cols, rho):
    n = len(w)
    p = transition(w, seed_cols, 0, dampening="none", block=False)
    return np.array([path_similarity(p, s, rho) for s in seed_cols]).reshape(len(seed_cols), n)


def test_srm_four_node_oracle():
    w = [[0, 2, 1, 0], [2, 0, 1, 1], [1, 1, 0, 3], [0, 1, 3, 0]]
    g = graph_from_dense(w)
    seeds = SeedSet((g.hashtags[0], g.hashtags[3]))
    got = simple_walk_similarities(g, seeds, rho=2)
    np.testing.assert_allclose(got, _oracle_srm(w, [0, 3], 2), atol=1e-9)


@given(st.integers(0, 2**32 - 1), st.integers(3, 8), st.integers(1, 6))
@settings(max_examples=60, deadline=None)
def test_srm_is_degenerate_lrm(seed, m, rho):
    rng = np.random.default_rng(seed)
    w = random_symmetric(rng, m, 0.5)
    g = graph_from_dense(w)
    seeds = SeedSet((g.hashtags[0], g.hashtags[1]))
    srm = simple_walk_similarities(g, seeds, rho)
    lrm = all_similarities(g, seeds, WalkConfig(rho=rho, dampening=NO_DAMPENING, block_other_seeds=False))
    np.testing.assert_allclose(lrm.scores, srm, rtol=0, atol=1e-12)


def test_srm_symmetric_graph_ties():
    # s1 - a - x - b - s2 mirrored around x
    posts = [("s1", "a"), ("a", "x"), ("x", "b"), ("b", "s2")]
    records = [PostRecord(f"u{k}", tags) for k, tags in enumerate(posts)]
    m = aggregate(records)
    r = srm_classify(records, m, SeedSet(("s1", "s2")), BaselineConfig(rho=4))
    labels = r.hashtag_labels()
    assert labels["a"] == 0 and labels["b"] == 1
    assert r.hashtags.tie[m.hashtag_index["x"]]


def test_majority_rule():
    m = matrix_from_table([[1, 1, 1, 1], [0, 0, 0, 2]])
    u = majority_users(m, np.array([0, 0, 0, 1]), 2)
    assert u.labels.tolist() == [0, 1]
    u = majority_users(m, np.array([0, UNCLASSIFIED, UNCLASSIFIED, 1]), 2)
    assert u.labels.tolist() == [0, 1] and u.tie[0]


def test_srm_rejects_aggregated_input():
    m = matrix_from_table([[1, 1]])
    with pytest.raises(UnsupportedInputError):
        srm_classify(m, m, SeedSet(("h0", "h1")))
    with pytest.raises(UnsupportedInputError):
        lpm_classify(None, m, SeedSet(("h0", "h1")))
    with pytest.raises(UnsupportedInputError):
        build_cooccurrence_graph(m)


@pytest.mark.parametrize("a, b, expected", [
    ([2, 4, 0], [1, 2, 0], 1.0),
    ([1, 0, 0], [0, 3, 1], 0.0),
    ([1, 1, 0], [1, 0, 1], 0.5),
])
def test_cosine_examples(a, b, expected):
    m = matrix_from_table(np.array([a, b]).T)
    sims = cosine_to_seeds(m, SeedSet(("h0", "h1")))
    assert sims[0, 1] == pytest.approx(expected, abs=1e-15)
    assert sims[0, 1] == pytest.approx(cosine(a, b), abs=1e-15)


def test_hsm_classifies_by_cosine():
    m = matrix_from_table([[3, 0, 1, 0], [2, 0, 2, 0], [0, 4, 0, 1], [0, 1, 0, 3]])
    r = hsm_classify(m, SeedSet(("h0", "h1")))
    assert r.hashtags.labels.tolist() == [0, 1, 0, 1]
    assert r.users.labels.tolist() == [0, 0, 1, 1]


def test_lpm_disconnected_components():
    posts = [("s1", "a"), ("a", "b"), ("s2", "c"), ("c", "d")]
    records = [PostRecord("u", tags) for tags in posts]
    m = aggregate(records)
    r = lpm_classify(records, m, SeedSet(("s1", "s2")), BaselineConfig(rng_seed=0))
    lab = r.hashtag_labels()
    assert [lab[h] for h in "ab"] == [0, 0] and [lab[h] for h in "cd"] == [1, 1]
    assert r.info["converged"]


def test_lpm_path_tie():
    g = graph_from_dense([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    lab, converged, _ = label_propagation(g, SeedSet((g.hashtags[0], g.hashtags[2])))
    assert converged and lab[1, 0] == lab[1, 1] > 0


def test_lpm_matches_linear_solve():
    w = np.array([
        [0, 2, 0, 1, 0],
        [2, 0, 1, 1, 0],
        [0, 1, 0, 2, 1],
        [1, 1, 2, 0, 3],
        [0, 0, 1, 3, 0],
    ], float)
    g = graph_from_dense(w)
    seeds = SeedSet((g.hashtags[0], g.hashtags[4]))
    lab, converged, _ = label_propagation(g, seeds, tolerance=1e-8)
    assert converged
    # fixed point on free nodes: L_f = P_ff^T L_f + P_sf^T L_s
    p = w / w.sum(axis=1, keepdims=True)
    s, f = [0, 4], [1, 2, 3]
    ls = np.eye(2)
    exact = np.linalg.solve(np.eye(3) - p[np.ix_(f, f)].T, p[np.ix_(s, f)].T @ ls)
    np.testing.assert_allclose(lab[f], exact, atol=1e-6)


def test_lpm_nonconvergence_warns():
    records = [PostRecord("u", ("s1", "a")), PostRecord("u", ("a", "b")), PostRecord("v", ("b", "s2"))]
    m = aggregate(records)
    with pytest.warns(RuntimeWarning, match="did not converge"):
        r = lpm_classify(records, m, SeedSet(("s1", "s2")), BaselineConfig(max_iterations=1))
    assert r.info["converged"] is False and r.info["iterations"] == 1


def test_row_normalize_keeps_zero_rows():
    p = row_normalize(np.array([[0, 2, 2], [0, 0, 0], [1, 0, 0]]))
    np.testing.assert_allclose(p.toarray(), [[0, .5, .5], [0, 0, 0], [1, 0, 0]])
