import io
import pytest
from hypothesis import given, settings, strategies as st

from stancewalk.errors import EmptyInputError, FilterError, MalformedInputError, MissingSeedError
from stancewalk.ingest import (
    PostRecord,
    SeedSet,
    aggregate,
    filter_low_engagement,
    parse_posts,
    read_triples,
    window,
    write_posts,
)

from conftest import matrix_from_table


def test_parse_normalizes_tags():
    recs, diags = parse_posts(['{"user":"u1","tags":["#VoteLabour","GE2019"],"ts":1573900000}\n'])
    assert recs == [PostRecord("u1", ("votelabour", "ge2019"), 1573900000)]
    assert diags == []


def test_parse_skips_empty_tag_list():
    recs, diags = parse_posts(['{"user":"u1","tags":[]}'])
    assert recs == []
    assert len(diags) == 1 and diags[0].line == 1


def test_parse_lenient_reports_line_numbers():
    lines = [
        '{"user":"a","tags":["x"]}',
        'not json',
        '{"user":"b","tags":["y","z"],"ts":5}',
    ]
    recs, diags = parse_posts(io.StringIO("\n".join(lines)))
    assert [r.user_id for r in recs] == ["a", "b"]
    assert [d.line for d in diags] == [2]


def test_parse_strict_raises():
    with pytest.raises(MalformedInputError, match="line 2"):
        parse_posts(['{"user":"a","tags":["x"]}', '{"user":"a","tags":"x"}'], strict=True)


@pytest.mark.parametrize("line", [
    '{"tags":["x"]}',
    '{"user":"a","tags":["x"],"ts":"soon"}',
    '{"user":"a","tags":["#"]}',
    '[1,2]',
])
def test_parse_rejects(line):
    recs, diags = parse_posts([line])
    assert not recs and len(diags) == 1


def test_roundtrip_write_parse():
    recs = [PostRecord("u1", ("a", "b"), 3), PostRecord("u2", ("c",))]
    buf = io.StringIO()
    write_posts(recs, buf)
    buf.seek(0)
    assert parse_posts(buf)[0] == recs


def test_aggregate_counts_and_marginals():
    m = aggregate([PostRecord("u1", ("a", "b")), PostRecord("u1", ("a",))])
    a, b, u1 = m.hashtag_index["a"], m.hashtag_index["b"], m.user_index["u1"]
    assert m.counts[u1, a] == 2 and m.counts[u1, b] == 1
    assert m.hashtag_totals[a] == 2
    assert m.user_totals[u1] == 3


def test_aggregate_within_post_multiplicity():
    m = aggregate([PostRecord("u1", ("a", "a"))])
    assert m.counts[0, 0] == 2


def test_aggregate_block_diagonal():
    m = aggregate([PostRecord("u1", ("a",)), PostRecord("u2", ("b",))])
    assert m.counts.toarray().tolist() == [[1, 0], [0, 1]]


def test_aggregate_empty():
    with pytest.raises(EmptyInputError):
        aggregate([])


posts = st.lists(
    st.builds(
        PostRecord,
        st.sampled_from(["u1", "u2", "u3", "u4"]),
        st.lists(st.sampled_from(["a", "b", "c", "d", "e"]), min_size=1, max_size=4).map(tuple),
    ),
    min_size=1,
    max_size=30,
)


@given(posts, st.randoms())
@settings(max_examples=60, deadline=None)
def test_aggregate_permutation_invariant_and_marginals(records, rnd):
    shuffled = list(records)
    rnd.shuffle(shuffled)
    m1, m2 = aggregate(records), aggregate(shuffled)
    assert m1 == m2
    total = sum(len(r.hashtags) for r in records)
    assert m1.hashtag_totals.sum() == m1.user_totals.sum() == total
    dense = m1.counts.toarray()
    assert (dense.sum(axis=0) == m1.hashtag_totals).all()
    assert (dense.sum(axis=1) == m1.user_totals).all()


def test_read_triples():
    m = read_triples(["user,hashtag,count", "u1,#A,2", "u1,b,1", "u2,a,3", "bad,row"])
    assert m.hashtags == ("a", "b")
    assert m.counts.toarray().tolist() == [[2, 1], [3, 0]]
    with pytest.raises(MalformedInputError):
        read_triples(["u1,a,x"], strict=True)


def test_filter_threshold_arithmetic():
    # hashtag totals [10, 2, 3], mean 5
    m = matrix_from_table([[10, 2, 3]], hashtags=["x", "y", "z"])
    f = filter_low_engagement(m)
    assert f.hashtags == ("x",)


def test_filter_equal_totals_keeps_all():
    m = matrix_from_table([[2, 0, 1], [0, 2, 1]])
    f = filter_low_engagement(m)
    assert f.m == 3 and f.n == 2


def test_filter_seed_exempt():
    m = matrix_from_table([[10, 2, 3]], hashtags=["x", "y", "z"])
    seeds = SeedSet(("x", "y"))
    f = filter_low_engagement(m, seeds)
    assert f.hashtags == ("x", "y")


def test_filter_users_below_mean():
    # user totals 6 and 2 (mean 4)
    m = matrix_from_table([[3, 3], [1, 1]])
    f = filter_low_engagement(m)
    assert f.users == ("u0",)
    assert (f.user_totals >= 1).all() and (f.hashtag_totals >= 1).all()


def test_filter_marginals_recomputed_and_positive(rng):
    counts = rng.integers(0, 4, size=(30, 12)) * (rng.random((30, 12)) < 0.4)
    counts[:, 0] += 1
    m = matrix_from_table(counts)
    f = filter_low_engagement(m)
    dense = f.counts.toarray()
    assert (dense.sum(axis=0) == f.hashtag_totals).all()
    assert (f.hashtag_totals >= 1).all() and (f.user_totals >= 1).all()


def test_filter_everything_removed():
    # the only user above the mean shares only hashtags below the mean
    m = matrix_from_table([[1, 1, 1, 0], [0, 0, 0, 2]])
    with pytest.raises(FilterError, match="0/2 users"):
        filter_low_engagement(m)


def test_seedset_validation():
    with pytest.raises(ValueError):
        SeedSet(("a",))
    with pytest.raises(ValueError):
        SeedSet(("a", "#A"))
    s = SeedSet(("#VoteLeave", "voteremain"))
    assert s.seeds == ("voteleave", "voteremain") and s.class_names == s.seeds
    with pytest.raises(MissingSeedError, match="voteremain"):
        s.indices(matrix_from_table([[1]], hashtags=["voteleave"]))


def _rec(ts):
    return PostRecord("u", ("a",), ts)


def test_window_boundaries():
    assert window([_rec(604800)], 604800, 0)[0][0] == 1
    assert window([_rec(604799)], 604800, 0)[0][0] == 0


def test_window_four_weeks_partition():
    day = 86400
    recs = [_rec(d * day + 17) for d in range(28)]
    out = window(recs, 7 * day, 0)
    assert [w for w, _ in out] == [0, 1, 2, 3]
    assert sum(len(r) for _, r in out) == len(recs)
    flat = [r for _, rs in out for r in rs]
    assert sorted(flat, key=lambda r: r.timestamp) == recs


def test_window_omits_empty_and_needs_timestamps():
    out = window([_rec(0), _rec(30)], 10, 0)
    assert [w for w, _ in out] == [0, 3]
    with pytest.raises(MalformedInputError):
        window([PostRecord("u", ("a",))], 10)


def test_window_infinite_length():
    out = window([_rec(0), _rec(10**9)], float("inf"))
    assert len(out) == 1 and len(out[0][1]) == 2
