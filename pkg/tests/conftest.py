import sys
from pathlib import Path

import numpy as np
import pytest
import scipy.sparse as sp

sys.path.insert(0, str(Path(__file__).parent))

from stancewalk.graph import HashtagGraph  # noqa: E402
from stancewalk.ingest import SharingMatrix  # noqa: E402


def matrix_from_table(counts, users=None, hashtags=None):
    counts = np.asarray(counts)
    n, m = counts.shape
    users = users or [f"u{k}" for k in range(n)]
    hashtags = hashtags or [f"h{i}" for i in range(m)]
    return SharingMatrix(tuple(users), tuple(hashtags), sp.csr_matrix(counts))


def graph_from_dense(weights, names=None):
    w = np.asarray(weights, dtype=float)
    names = names or [f"h{i}" for i in range(len(w))]
    return HashtagGraph(tuple(names), sp.csr_matrix(w))


def random_symmetric(rng, m, density=0.6):
    w = rng.random((m, m)) * (rng.random((m, m)) < density)
    w = np.triu(w, 1)
    return w + w.T


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
