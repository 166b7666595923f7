"""Hashtag classes and stance intensities from seed similarities, and user
classes from intensity-weighted sharing."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import IO

import numpy as np
import scipy.sparse as sp

from .ingest import SharingMatrix
from .walk import SimilarityScores, normalized_entropy

UNCLASSIFIED = -1

# intensity orientations
ONE_MINUS_ENTROPY = "one_minus_entropy"
ENTROPY = "entropy"

TIE_RTOL = 1e-9
NEAR_TIE_MARGIN = 0.2


def argmax_with_ties(
    scores: np.ndarray, tie_rtol: float = TIE_RTOL
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Row-wise argmax over classes.

    Returns ``(labels, tie, margin)``. Classes within ``tie_rtol`` (relative)
    of the row maximum count as tied and the lowest index wins. ``margin`` is
    ``(best - runner_up) / best``. All-zero rows get :data:`UNCLASSIFIED`,
    ``tie=False`` and ``margin=nan``.
    """
    scores = np.asarray(scores, dtype=np.float64)
    k, t = scores.shape
    top = scores.max(axis=1) if t else np.zeros(k)
    live = top > 0
    close = scores >= (top * (1.0 - tie_rtol))[:, None]
    labels = np.where(live, np.argmax(close, axis=1), UNCLASSIFIED)
    tie = live & (close.sum(axis=1) > 1)
    if t > 1:
        second = np.sort(scores, axis=1)[:, -2]
    else:
        second = np.zeros(k)
    with np.errstate(divide="ignore", invalid="ignore"):
        margin = np.where(live, (top - second) / top, np.nan)
    return labels.astype(np.int64), tie, margin


@dataclass(frozen=True, eq=False)
class HashtagAssignment:
    hashtags: tuple[str, ...]
    labels: np.ndarray  # class index or UNCLASSIFIED
    intensity: np.ndarray  # nan where unclassified (or method has none)
    tie: np.ndarray
    margin: np.ndarray

    def near_tie(self, margin: float = NEAR_TIE_MARGIN) -> np.ndarray:
        return self.tie | (np.nan_to_num(self.margin, nan=1.0) <= margin)


@dataclass(frozen=True, eq=False)
class UserAssignment:
    users: tuple[str, ...]
    labels: np.ndarray
    inclination: np.ndarray  # (n, t)
    tie: np.ndarray


def classify_hashtags(
    scores: SimilarityScores,
    intensity: str = ONE_MINUS_ENTROPY,
    tie_rtol: float = TIE_RTOL,
) -> HashtagAssignment:
    """Assign each hashtag to its most similar seed and score how partisan it is.

    Intensity is one minus the normalised entropy of the hashtag's similarity
    profile across seeds: 1 when all similarity goes to one seed, 0 when it is
    spread evenly. ``intensity=ENTROPY`` keeps the raw normalised entropy.
    """
    if intensity not in (ONE_MINUS_ENTROPY, ENTROPY):
        raise ValueError(f"unknown intensity orientation {intensity!r}")
    s = scores.scores.T  # (m, t)
    labels, tie, margin = argmax_with_ties(s, tie_rtol)
    ent = normalized_entropy(s)
    inten = 1.0 - ent if intensity == ONE_MINUS_ENTROPY else ent
    inten = np.where(labels == UNCLASSIFIED, np.nan, inten)
    return HashtagAssignment(scores.hashtags, labels, inten, tie, margin)


def class_indicator(labels: np.ndarray, t: int, weights: np.ndarray | None = None) -> sp.csr_matrix:
    """(m, t) matrix with ``weights[i]`` (default 1) at column ``labels[i]``."""
    keep = np.flatnonzero(labels != UNCLASSIFIED)
    vals = np.ones(len(keep)) if weights is None else np.asarray(weights, dtype=float)[keep]
    return sp.csr_matrix((vals, (keep, labels[keep])), shape=(len(labels), t))


def classify_users(
    matrix: SharingMatrix,
    hashtags: HashtagAssignment,
    t: int,
    tie_rtol: float = TIE_RTOL,
) -> UserAssignment:
    """Inclination of user k to class c: intensity-weighted fraction of the
    user's shares that fall on class-c hashtags."""
    if tuple(hashtags.hashtags) != tuple(matrix.hashtags):
        raise ValueError("hashtag assignment is not aligned with the sharing matrix")
    totals = matrix.user_totals.astype(np.float64)
    assert (totals > 0).all(), "users without shares should not survive ingest"
    frac = sp.diags(1.0 / totals) @ matrix.counts.astype(np.float64)
    ind = class_indicator(hashtags.labels, t, np.nan_to_num(hashtags.intensity))
    incl = np.asarray((frac @ ind).todense())
    labels, tie, _ = argmax_with_ties(incl, tie_rtol)
    return UserAssignment(matrix.users, labels, incl, tie)


def majority_users(
    matrix: SharingMatrix, hashtag_labels: np.ndarray, t: int, tie_rtol: float = TIE_RTOL
) -> UserAssignment:
    """Users go to the class holding most of their shares (unclassified
    hashtags ignored). Used by the baselines."""
    counts = np.asarray((matrix.counts.astype(np.float64) @ class_indicator(hashtag_labels, t)).todense())
    labels, tie, _ = argmax_with_ties(counts, tie_rtol)
    return UserAssignment(matrix.users, labels, counts, tie)


@dataclass(frozen=True, eq=False)
class Classification:
    """Full output of one method run: hashtag and user assignments."""

    method: str
    class_names: tuple[str, ...]
    hashtags: HashtagAssignment
    users: UserAssignment
    info: dict = field(default_factory=dict)

    @property
    def t(self) -> int:
        return len(self.class_names)

    def label_name(self, label: int) -> str:
        return "unclassified" if label == UNCLASSIFIED else self.class_names[label]

    def hashtag_labels(self) -> dict[str, int]:
        return dict(zip(self.hashtags.hashtags, self.hashtags.labels.tolist()))

    def user_labels(self) -> dict[str, int]:
        return dict(zip(self.users.users, self.users.labels.tolist()))

    def write_hashtags(self, stream: IO[str]) -> None:
        out = csv.writer(stream, lineterminator="\n")
        out.writerow(["hashtag", "class", "intensity", "tie"])
        h = self.hashtags
        for i, tag in enumerate(h.hashtags):
            inten = "" if np.isnan(h.intensity[i]) else repr(float(h.intensity[i]))
            out.writerow([tag, self.label_name(h.labels[i]), inten, int(h.tie[i])])

    def write_users(self, stream: IO[str]) -> None:
        out = csv.writer(stream, lineterminator="\n")
        out.writerow(["user", "class"] + [f"l_{c + 1}" for c in range(self.t)] + ["tie"])
        u = self.users
        for k, user in enumerate(u.users):
            row = [user, self.label_name(u.labels[k])]
            row += [repr(float(x)) for x in u.inclination[k]]
            row.append(int(u.tie[k]))
            out.writerow(row)
