"""Golden sets, per-class F1 scoring, timing and windowed evolution runs."""

from __future__ import annotations

import csv
import time
import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from typing import IO, Callable, Iterable, Mapping, Sequence

import numpy as np

from .classify import UNCLASSIFIED, Classification
from .errors import EmptyInputError, MalformedInputError, StanceError
from .ingest import PostRecord, SeedSet, SharingMatrix, normalize_tag, window
from .pipeline import LRM, prepare, run_method

USER, HASHTAG = "user", "hashtag"


@dataclass
class GoldenSet:
    users: dict[str, set[str]] = field(default_factory=dict)
    hashtags: dict[str, set[str]] = field(default_factory=dict)

    def __post_init__(self):
        for kind, groups in ((USER, self.users), (HASHTAG, self.hashtags)):
            seen: dict[str, str] = {}
            for cls, members in groups.items():
                for e in members:
                    if e in seen and seen[e] != cls:
                        raise StanceError(f"golden {kind} {e!r} is in classes {seen[e]!r} and {cls!r}")
                    seen[e] = cls

    def write(self, stream: IO[str]) -> None:
        out = csv.writer(stream, lineterminator="\n")
        out.writerow(["class", "entity_kind", "entity_id"])
        for kind, groups in ((USER, self.users), (HASHTAG, self.hashtags)):
            for cls in groups:
                for e in sorted(groups[cls]):
                    out.writerow([cls, kind, e])


def read_golden(stream: IO[str] | Iterable[str]) -> GoldenSet:
    """Parse ``class,entity_kind,entity_id`` rows (header optional)."""
    users: dict[str, set[str]] = defaultdict(set)
    tags: dict[str, set[str]] = defaultdict(set)
    for lineno, row in enumerate(csv.reader(stream), start=1):
        if not row:
            continue
        if lineno == 1 and row == ["class", "entity_kind", "entity_id"]:
            continue
        if len(row) != 3 or not all(row):
            raise MalformedInputError(f"golden file line {lineno}: expected class,entity_kind,entity_id")
        cls, kind, ent = row
        if kind == USER:
            users[cls].add(ent)
        elif kind == HASHTAG:
            tags[cls].add(normalize_tag(ent))
        else:
            raise MalformedInputError(f"golden file line {lineno}: unknown entity kind {kind!r}")
    return GoldenSet(dict(users), dict(tags))


def derive_golden_hashtags(
    matrix: SharingMatrix,
    golden_users: Mapping[str, set[str]],
    min_shares: int = 30,
    min_users: int = 2,
    dominance: float = 5.0,
) -> dict[str, set[str]]:
    """Hashtags that one class's golden users share heavily and (nearly)
    exclusively.

    A hashtag goes to class c when c's golden users share it at least
    ``min_shares`` times, at least ``min_users`` of them share it, and c's
    share count is at least ``dominance`` times that of every other class.
    Golden users absent from ``matrix`` are ignored.
    """
    names = list(golden_users)
    for cls in names:
        if not golden_users[cls]:
            raise StanceError(f"golden user set for class {cls!r} is empty")
    shares = np.zeros((len(names), matrix.m))
    sharers = np.zeros((len(names), matrix.m))
    for c, cls in enumerate(names):
        rows = sorted(matrix.user_index[u] for u in golden_users[cls] if u in matrix.user_index)
        if rows:
            sub = matrix.counts[rows]
            shares[c] = np.asarray(sub.sum(axis=0)).ravel()
            sharers[c] = np.diff(sub.tocsc().indptr)
    out: dict[str, set[str]] = {}
    for c, cls in enumerate(names):
        others = np.delete(shares, c, axis=0)
        rival = others.max(axis=0) if len(others) else np.zeros(matrix.m)
        ok = (shares[c] >= min_shares) & (sharers[c] >= min_users) & (shares[c] >= dominance * rival)
        out[cls] = {matrix.hashtags[i] for i in np.flatnonzero(ok)}
    return out


@dataclass
class EvalReport:
    classes: tuple[str, ...]
    per_class_f1: dict[str, float]
    precision: dict[str, float]
    recall: dict[str, float]
    support: dict[str, int]
    macro_f1: float
    dropped: list[str] = field(default_factory=list)
    runtime_seconds: float | None = None


def score(
    predicted: Mapping[str, int],
    golden: Mapping[str, set[str]],
    class_names: Sequence[str],
) -> EvalReport:
    """Per-class and macro F1 over golden-labelled entities only.

    ``predicted`` maps entity id to class index (``UNCLASSIFIED`` allowed and
    always counted wrong). Golden entities with no prediction are dropped and
    listed in ``report.dropped``.
    """
    class_names = tuple(class_names)
    index = {name: c for c, name in enumerate(class_names)}
    unknown = set(golden) - set(index)
    if unknown:
        raise StanceError(f"golden classes not among method classes: {sorted(unknown)}")
    if not any(golden.values()):
        raise EmptyInputError("golden set is empty")

    t = len(class_names)
    tp, fp, fn = np.zeros(t), np.zeros(t), np.zeros(t)
    support = np.zeros(t, dtype=int)
    dropped = []
    for cls, members in golden.items():
        true = index[cls]
        for e in sorted(members):
            if e not in predicted:
                dropped.append(e)
                continue
            pred = predicted[e]
            support[true] += 1
            if pred == true:
                tp[true] += 1
            else:
                fn[true] += 1
                if pred != UNCLASSIFIED:
                    fp[pred] += 1
    if support.sum() == 0:
        raise EmptyInputError("no golden entity has a prediction")
    with np.errstate(divide="ignore", invalid="ignore"):
        prec = np.where(tp + fp > 0, tp / (tp + fp), 0.0)
        rec = np.where(tp + fn > 0, tp / (tp + fn), 0.0)
        f1 = np.where(prec + rec > 0, 2 * prec * rec / (prec + rec), 0.0)
    return EvalReport(
        class_names,
        dict(zip(class_names, f1.tolist())),
        dict(zip(class_names, prec.tolist())),
        dict(zip(class_names, rec.tolist())),
        dict(zip(class_names, support.tolist())),
        float(f1.mean()),
        dropped,
    )


def evaluate(result: Classification, golden: GoldenSet) -> dict[str, EvalReport]:
    """Score users and (if the golden set has any) hashtags.

    Golden entities missing from the result end up in each report's
    ``dropped`` list.
    """
    out = {}
    if any(golden.users.values()):
        out[USER] = score(result.user_labels(), golden.users, result.class_names)
    if any(golden.hashtags.values()):
        out[HASHTAG] = score(result.hashtag_labels(), golden.hashtags, result.class_names)
    return out


def time_run(fn: Callable[[], object], repeat: int = 3) -> float:
    """Mean wall-clock seconds of ``fn()`` over ``repeat`` sequential runs."""
    if repeat < 1:
        raise ValueError("repeat must be >= 1")
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return float(np.mean(times))


def time_method(
    method: str,
    seeds: SeedSet,
    records: Sequence[PostRecord] | None = None,
    matrix: SharingMatrix | None = None,
    repeat: int = 3,
    **kwargs,
) -> float:
    """Seconds for aggregate + filter + classify (parsing excluded)."""

    def run():
        m = prepare(records, seeds, matrix)
        run_method(method, m, seeds, records, **kwargs)

    return time_run(run, repeat)


@dataclass(frozen=True)
class WindowComposition:
    window: int
    cls: str
    user_pct: float | None
    hashtag_pct: float | None
    user_count: int
    hashtag_count: int


def composition(result: Classification, window_index: int = 0,
                include_unclassified: bool = False) -> list[WindowComposition]:
    """Share of users and hashtags per class.

    Percentages are over classified entities unless ``include_unclassified``;
    an ``unclassified`` row always carries the counts.
    """
    t = result.t
    u = np.bincount(result.users.labels + 1, minlength=t + 1)
    h = np.bincount(result.hashtags.labels + 1, minlength=t + 1)
    u_den = u.sum() if include_unclassified else u[1:].sum()
    h_den = h.sum() if include_unclassified else h[1:].sum()

    def pct(x, den):
        return 100.0 * x / den if den else 0.0

    rows = [
        WindowComposition(window_index, name, pct(u[c + 1], u_den), pct(h[c + 1], h_den),
                          int(u[c + 1]), int(h[c + 1]))
        for c, name in enumerate(result.class_names)
    ]
    rows.append(WindowComposition(
        window_index, "unclassified",
        pct(u[0], u_den) if include_unclassified else None,
        pct(h[0], h_den) if include_unclassified else None,
        int(u[0]), int(h[0]),
    ))
    return rows


def evolve(
    records: Sequence[PostRecord],
    seeds: SeedSet,
    window_length: float,
    origin: float = 0,
    method: str = LRM,
    include_unclassified: bool = False,
    filter: bool = True,
    **kwargs,
) -> list[WindowComposition]:
    """Run the full pipeline separately on each time window's records."""
    rows: list[WindowComposition] = []
    for w, recs in window(records, window_length, origin):
        try:
            matrix = prepare(recs, seeds, filter=filter)
        except StanceError as exc:
            warnings.warn(f"window {w} skipped: {exc}", RuntimeWarning)
            continue
        result = run_method(method, matrix, seeds, recs, **kwargs)
        rows.extend(composition(result, w, include_unclassified))
    return rows


def write_composition(rows: Iterable[WindowComposition], stream: IO[str]) -> None:
    out = csv.writer(stream, lineterminator="\n")
    out.writerow(["window", "class", "user_pct", "hashtag_pct", "user_count", "hashtag_count"])
    for r in rows:
        out.writerow([
            r.window, r.cls,
            "" if r.user_pct is None else f"{r.user_pct:.6f}",
            "" if r.hashtag_pct is None else f"{r.hashtag_pct:.6f}",
            r.user_count, r.hashtag_count,
        ])
