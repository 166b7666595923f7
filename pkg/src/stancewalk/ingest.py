"""Post parsing, aggregation into a user x hashtag sharing matrix, engagement
filtering and time windowing."""

from __future__ import annotations

import csv
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import IO, Iterable, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import EmptyInputError, FilterError, MalformedInputError, MissingSeedError


def normalize_tag(tag: str) -> str:
    return tag.strip().lstrip("#").lower()


@dataclass(frozen=True)
class PostRecord:
    user_id: str
    hashtags: tuple[str, ...]
    timestamp: int | None = None

    def __post_init__(self):
        tags = tuple(normalize_tag(h) for h in self.hashtags)
        tags = tuple(h for h in tags if h)
        if not tags:
            raise MalformedInputError(f"post by {self.user_id!r} has no hashtags")
        object.__setattr__(self, "hashtags", tags)

    def to_json(self) -> str:
        obj = {"user": self.user_id, "tags": list(self.hashtags)}
        if self.timestamp is not None:
            obj["ts"] = self.timestamp
        return json.dumps(obj, separators=(",", ":"))


class Diagnostic(NamedTuple):
    line: int
    message: str


@dataclass(frozen=True)
class SeedSet:
    """One seed hashtag per stance class, in class order."""

    seeds: tuple[str, ...]
    class_names: tuple[str, ...] | None = None

    def __post_init__(self):
        seeds = tuple(normalize_tag(s) for s in self.seeds)
        object.__setattr__(self, "seeds", seeds)
        if len(seeds) < 2:
            raise ValueError("need at least two seed hashtags")
        if len(set(seeds)) != len(seeds):
            raise ValueError(f"seed hashtags must be distinct: {seeds}")
        if self.class_names is None:
            object.__setattr__(self, "class_names", seeds)
        else:
            names = tuple(self.class_names)
            if len(names) != len(seeds):
                raise ValueError("class_names must align with seeds")
            object.__setattr__(self, "class_names", names)

    @property
    def t(self) -> int:
        return len(self.seeds)

    def indices(self, matrix: "SharingMatrix") -> np.ndarray:
        """Column index of each seed in ``matrix``; raises on the first missing one."""
        out = []
        for s in self.seeds:
            if s not in matrix.hashtag_index:
                raise MissingSeedError(s)
            out.append(matrix.hashtag_index[s])
        return np.asarray(out, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class SharingMatrix:
    """Counts ``R[k, i]`` of user k sharing hashtag i, with both marginals.

    Users and hashtags are kept in sorted order so the matrix does not depend
    on the order records were seen in.
    """

    users: tuple[str, ...]
    hashtags: tuple[str, ...]
    counts: sp.csr_matrix
    hashtag_totals: np.ndarray = field(init=False)
    user_totals: np.ndarray = field(init=False)
    user_index: dict = field(init=False, repr=False)
    hashtag_index: dict = field(init=False, repr=False)

    def __post_init__(self):
        counts = sp.csr_matrix(self.counts, dtype=np.int64)
        counts.sum_duplicates()
        counts.eliminate_zeros()
        counts.sort_indices()
        if counts.shape != (len(self.users), len(self.hashtags)):
            raise ValueError(f"counts shape {counts.shape} does not match index sizes")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "hashtag_totals", np.asarray(counts.sum(axis=0)).ravel())
        object.__setattr__(self, "user_totals", np.asarray(counts.sum(axis=1)).ravel())
        object.__setattr__(self, "user_index", {u: k for k, u in enumerate(self.users)})
        object.__setattr__(self, "hashtag_index", {h: i for i, h in enumerate(self.hashtags)})

    @property
    def n(self) -> int:
        return len(self.users)

    @property
    def m(self) -> int:
        return len(self.hashtags)

    def __eq__(self, other):
        if not isinstance(other, SharingMatrix):
            return NotImplemented
        return (
            self.users == other.users
            and self.hashtags == other.hashtags
            and (self.counts != other.counts).nnz == 0
        )

    def subset(self, user_mask: np.ndarray, hashtag_mask: np.ndarray) -> "SharingMatrix":
        ku = np.flatnonzero(user_mask)
        kh = np.flatnonzero(hashtag_mask)
        return SharingMatrix(
            tuple(self.users[k] for k in ku),
            tuple(self.hashtags[i] for i in kh),
            self.counts[ku][:, kh],
        )

    def to_triples(self) -> list[tuple[str, str, int]]:
        coo = self.counts.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return [
            (self.users[coo.row[j]], self.hashtags[coo.col[j]], int(coo.data[j]))
            for j in order
        ]


def parse_posts(
    source: IO[str] | Iterable[str], strict: bool = False
) -> tuple[list[PostRecord], list[Diagnostic]]:
    """Parse line-delimited JSON posts (``user``, ``tags``, optional ``ts``).

    Malformed lines are skipped and reported as diagnostics; with ``strict``
    the first one raises :class:`MalformedInputError` instead.
    """
    records: list[PostRecord] = []
    diagnostics: list[Diagnostic] = []
    for lineno, line in enumerate(source, start=1):
        if not line.strip():
            continue
        try:
            records.append(_parse_line(line))
        except (MalformedInputError, ValueError, TypeError) as exc:
            if strict:
                raise MalformedInputError(f"line {lineno}: {exc}") from exc
            diagnostics.append(Diagnostic(lineno, str(exc)))
    return records, diagnostics


def _parse_line(line: str) -> PostRecord:
    obj = json.loads(line)
    if not isinstance(obj, dict):
        raise MalformedInputError("record is not an object")
    user = obj.get("user")
    tags = obj.get("tags")
    if not isinstance(user, str) or not user:
        raise MalformedInputError("missing or non-string 'user'")
    if not isinstance(tags, list) or not all(isinstance(h, str) for h in tags):
        raise MalformedInputError("'tags' must be a list of strings")
    ts = obj.get("ts")
    if ts is not None and (isinstance(ts, bool) or not isinstance(ts, int)):
        raise MalformedInputError("'ts' must be an integer")
    return PostRecord(user, tuple(tags), ts)


def write_posts(records: Iterable[PostRecord], stream: IO[str]) -> None:
    for r in records:
        stream.write(r.to_json())
        stream.write("\n")


def aggregate(records: Sequence[PostRecord]) -> SharingMatrix:
    """Sum hashtag multiplicities per (user, hashtag) over all posts."""
    if not records:
        raise EmptyInputError("no post records to aggregate")
    cells: dict[tuple[str, str], int] = defaultdict(int)
    for r in records:
        for h in r.hashtags:
            cells[r.user_id, h] += 1
    return _from_cells(cells)


def read_triples(source: IO[str] | Iterable[str], strict: bool = False) -> SharingMatrix:
    """Read pre-aggregated ``user,hashtag,count`` rows (header optional)."""
    cells: dict[tuple[str, str], int] = defaultdict(int)
    for lineno, row in enumerate(csv.reader(source), start=1):
        if not row or (lineno == 1 and row[:3] == ["user", "hashtag", "count"]):
            continue
        try:
            user, tag, count = row
            count = int(count)
            tag = normalize_tag(tag)
            if count < 0 or not tag or not user:
                raise ValueError("bad triple")
        except ValueError as exc:
            if strict:
                raise MalformedInputError(f"line {lineno}: {exc}") from exc
            continue
        if count:
            cells[user, tag] += count
    if not cells:
        raise EmptyInputError("no sharing triples")
    return _from_cells(cells)


def _from_cells(cells: dict[tuple[str, str], int]) -> SharingMatrix:
    users = sorted({u for u, _ in cells})
    tags = sorted({h for _, h in cells})
    uidx = {u: k for k, u in enumerate(users)}
    hidx = {h: i for i, h in enumerate(tags)}
    rows = np.fromiter((uidx[u] for u, _ in cells), dtype=np.int64, count=len(cells))
    cols = np.fromiter((hidx[h] for _, h in cells), dtype=np.int64, count=len(cells))
    vals = np.fromiter(cells.values(), dtype=np.int64, count=len(cells))
    counts = sp.csr_matrix((vals, (rows, cols)), shape=(len(users), len(tags)))
    return SharingMatrix(tuple(users), tuple(tags), counts)


def filter_low_engagement(matrix: SharingMatrix, seeds: SeedSet | None = None) -> SharingMatrix:
    """Drop hashtags shared less than the mean hashtag total, then users with
    fewer shares than the mean user total.

    Both means and both criteria use the unfiltered matrix. Seed hashtags are
    never dropped for low engagement. Entities left with no shares afterwards
    are removed as well.
    """
    if matrix.n == 0 or matrix.m == 0:
        raise EmptyInputError("cannot filter an empty matrix")
    keep_h = matrix.hashtag_totals >= matrix.hashtag_totals.mean()
    if seeds is not None:
        for s in seeds.seeds:
            i = matrix.hashtag_index.get(s)
            if i is not None:
                keep_h[i] = True
    keep_u = matrix.user_totals >= matrix.user_totals.mean()

    # drop anything emptied by the other criterion
    sub = matrix.counts[np.flatnonzero(keep_u)][:, np.flatnonzero(keep_h)]
    live_u = np.zeros(matrix.n, dtype=bool)
    live_h = np.zeros(matrix.m, dtype=bool)
    live_u[np.flatnonzero(keep_u)] = np.asarray(sub.sum(axis=1)).ravel() > 0
    live_h[np.flatnonzero(keep_h)] = np.asarray(sub.sum(axis=0)).ravel() > 0
    if not live_u.any() or not live_h.any():
        raise FilterError(
            f"engagement filter left {int(live_u.sum())}/{matrix.n} users and "
            f"{int(live_h.sum())}/{matrix.m} hashtags"
        )
    return matrix.subset(live_u, live_h)


def window(
    records: Sequence[PostRecord], window_length: float, origin: float = 0
) -> list[tuple[int, list[PostRecord]]]:
    """Split records into half-open windows ``[origin + w*L, origin + (w+1)*L)``.

    An infinite ``window_length`` puts everything into window 0. Empty windows
    are omitted; records before ``origin`` get negative indices.
    """
    if not window_length > 0:
        raise ValueError("window_length must be positive")
    buckets: dict[int, list[PostRecord]] = defaultdict(list)
    for r in records:
        if r.timestamp is None:
            raise MalformedInputError(f"record by {r.user_id!r} has no timestamp")
        if math.isinf(window_length):
            w = 0
        else:
            w = int((r.timestamp - origin) // window_length)
        buckets[w].append(r)
    return [(w, buckets[w]) for w in sorted(buckets)]
