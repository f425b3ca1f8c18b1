"""Shared oracles and generators for the test suite."""

from __future__ import annotations

import numpy as np
import pytest
from scipy.special import logsumexp

from qcldpc.construct import BaseMatrix, MaskMatrix, ParityCheckMatrix


def gf2_nullspace(h: np.ndarray) -> np.ndarray:
    """Basis of the GF(2) nullspace of a dense binary matrix (rows = vectors)."""
    a = h.copy().astype(np.uint8)
    r, n = a.shape
    pivots = []
    pr = 0
    for c in range(n):
        hit = np.nonzero(a[pr:, c])[0]
        if hit.size == 0:
            continue
        if hit[0] != 0:
            a[[pr, pr + hit[0]]] = a[[pr + hit[0], pr]]
        for i in np.nonzero(a[:, c])[0]:
            if i != pr:
                a[i] ^= a[pr]
        pivots.append(c)
        pr += 1
        if pr == r:
            break
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        x = np.zeros(n, np.uint8)
        x[f] = 1
        for i, c in enumerate(pivots):
            x[c] = a[i, f]
        basis.append(x)
    return np.array(basis) if basis else np.zeros((0, n), np.uint8)


def all_codewords(h: np.ndarray) -> np.ndarray:
    words = np.zeros((1, h.shape[1]), np.uint8)
    for b in gf2_nullspace(h):
        words = np.vstack([words, words ^ b])
    return words


def map_posterior(h: np.ndarray, llr: np.ndarray) -> np.ndarray:
    """Exact bitwise MAP marginals by codeword enumeration."""
    words = all_codewords(h)
    scores = -(words * llr).sum(axis=1)
    post = np.empty(h.shape[1])
    for i in range(h.shape[1]):
        post[i] = logsumexp(scores[words[:, i] == 0]) - logsumexp(scores[words[:, i] == 1])
    return post


def random_tree_h(rng: np.random.Generator, n_vars: int) -> np.ndarray:
    """Random cycle-free H whose checks all have degree >= 2.

    Grown by either hanging a fresh (check, variable) pair off an existing
    variable or attaching a fresh variable to an existing check; both moves
    preserve the tree property.
    """
    n, checks, edges = 1, 0, []
    while n < n_vars:
        if checks == 0 or rng.random() < 0.6:
            c = checks
            checks += 1
            edges.append((c, int(rng.integers(n))))
            edges.append((c, n))
        else:
            edges.append((int(rng.integers(checks)), n))
        n += 1
    h = np.zeros((checks, n), np.uint8)
    for c, v in edges:
        h[c, v] = 1
    return h


def random_qc(rng: np.random.Generator, j_rng=(2, 4), l_rng=(3, 8), p_rng=(5, 64)):
    """Random fully-masked QC description (base, mask, p)."""
    jj = int(rng.integers(j_rng[0], j_rng[1] + 1))
    ll = int(rng.integers(l_rng[0], l_rng[1] + 1))
    p = int(rng.integers(p_rng[0], p_rng[1] + 1))
    base = BaseMatrix(rng.integers(0, p, size=(jj, ll)))
    mask = MaskMatrix(np.ones((jj, ll), dtype=np.int8))
    return base, mask, p


def ring_h(n_vars: int) -> np.ndarray:
    """Isolated cycle of length 2*n_vars: n variables chained by n checks."""
    h = np.zeros((n_vars, n_vars), np.uint8)
    for i in range(n_vars):
        h[i, i] = 1
        h[i, (i + 1) % n_vars] = 1
    return h


def ts53_h() -> np.ndarray:
    """Girth-8 graph holding a (5, 3) trapping set made of three 8-cycles.

    Five degree-3 variables: six degree-2 checks wire the K_{2,3} pair
    structure ({v0, v1} x {v2, v3, v4}) and three degree-1 checks complete
    the odd side.
    """
    h = np.zeros((9, 5), np.uint8)
    pairs = [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]
    for c, (u, v) in enumerate(pairs):
        h[c, u] = h[c, v] = 1
    for i, v in enumerate((2, 3, 4)):
        h[6 + i, v] = 1
    return h


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pcm_of(h: np.ndarray) -> ParityCheckMatrix:
    return ParityCheckMatrix.from_dense(h)
