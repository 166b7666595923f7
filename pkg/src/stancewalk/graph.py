"""Hashtag graphs: the user-sharing projection and the post co-occurrence graph."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import EmptyInputError, UnsupportedInputError
from .ingest import PostRecord, SharingMatrix

SHARING = "sharing"
COOCCURRENCE = "cooccurrence"


@dataclass(frozen=True, eq=False)
class HashtagGraph:
    hashtags: tuple[str, ...]
    weights: sp.csr_matrix
    flavor: str = SHARING
    degrees: np.ndarray = field(init=False)
    hashtag_index: dict = field(init=False, repr=False)

    def __post_init__(self):
        w = sp.coo_matrix(self.weights, dtype=np.float64)
        off = w.row != w.col
        w = sp.csr_matrix((w.data[off], (w.row[off], w.col[off])), shape=w.shape)
        w.eliminate_zeros()
        w.sort_indices()
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "degrees", np.diff(w.indptr))
        object.__setattr__(self, "hashtag_index", {h: i for i, h in enumerate(self.hashtags)})

    @property
    def m(self) -> int:
        return len(self.hashtags)

    def dense(self) -> np.ndarray:
        return self.weights.toarray()


def _level_indicators(counts: sp.csr_matrix):
    """Yield ``(step, B)`` with ``B = [R >= v]`` over the distinct count values.

    ``min(a, b) = sum_v step_v * [a >= v] * [b >= v]`` which turns the
    sum-of-minimums into a handful of sparse products.
    """
    levels = np.unique(counts.data)
    prev = 0
    for v in levels:
        b = counts.copy()
        b.data = (b.data >= v).astype(np.int64)
        b.eliminate_zeros()
        yield int(v - prev), b
        prev = v


def build_sharing_graph(matrix: SharingMatrix) -> HashtagGraph:
    """Weight each hashtag pair by the shares its common users have in both,
    relative to the smaller of the two hashtag totals.

    ``A[i, j] = sum_k min(R[k, i], R[k, j]) / min(total_i, total_j)``, diagonal
    zero, absent entries for pairs with no common user.
    """
    if matrix.n == 0 or matrix.m == 0:
        raise EmptyInputError("cannot build a graph from an empty matrix")
    numer = sp.csr_matrix((matrix.m, matrix.m), dtype=np.int64)
    for step, b in _level_indicators(matrix.counts):
        numer = numer + step * (b.T @ b).tocsr()
    numer = numer.tocoo()
    off = numer.row != numer.col
    rows, cols, num = numer.row[off], numer.col[off], numer.data[off]
    tot = matrix.hashtag_totals
    vals = num / np.minimum(tot[rows], tot[cols])
    w = sp.csr_matrix((vals, (rows, cols)), shape=(matrix.m, matrix.m))
    return HashtagGraph(matrix.hashtags, w, SHARING)


def build_cooccurrence_graph(
    records: Sequence[PostRecord],
    hashtags: Sequence[str] | None = None,
    users: Iterable[str] | None = None,
) -> HashtagGraph:
    """Count, for each hashtag pair, the posts that contain both.

    A hashtag repeated within a post counts once. ``hashtags`` fixes the node
    set (tags outside it are dropped from posts); ``users`` restricts the posts
    used to those authors.
    """
    if isinstance(records, SharingMatrix):
        raise UnsupportedInputError(
            "co-occurrence graph needs post-level records; aggregated counts are not enough"
        )
    if hashtags is None:
        hashtags = sorted({h for r in records for h in r.hashtags})
    hashtags = tuple(hashtags)
    index = {h: i for i, h in enumerate(hashtags)}
    keep_users = None if users is None else set(users)

    indptr = [0]
    indices: list[int] = []
    for r in records:
        if keep_users is not None and r.user_id not in keep_users:
            continue
        cols = {index[h] for h in r.hashtags if h in index}
        if len(cols) < 2:
            continue
        indices.extend(cols)
        indptr.append(len(indices))
    if not hashtags:
        raise EmptyInputError("no hashtags for co-occurrence graph")
    x = sp.csr_matrix(
        (np.ones(len(indices), dtype=np.int64), np.asarray(indices, dtype=np.int64), indptr),
        shape=(len(indptr) - 1, len(hashtags)),
    )
    return HashtagGraph(hashtags, (x.T @ x).tocsr(), COOCCURRENCE)


def write_graph(graph: HashtagGraph, stream: IO[str]) -> None:
    """Dump ``hashtag_i,hashtag_j,weight`` rows, each undirected edge once."""
    out = csv.writer(stream, lineterminator="\n")
    out.writerow(["hashtag_i", "hashtag_j", "weight"])
    coo = sp.triu(graph.weights, k=1).tocoo()
    order = np.lexsort((coo.col, coo.row))
    for j in order:
        out.writerow(
            [graph.hashtags[coo.row[j]], graph.hashtags[coo.col[j]], repr(float(coo.data[j]))]
        )
