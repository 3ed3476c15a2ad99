"""Rank-revealing helpers shared by the classifier and the dynamics."""

from __future__ import annotations

import numpy as np

DEFAULT_RANK_RTOL = 1e-12


def rank_threshold(s: np.ndarray, shape: tuple[int, int], rtol: float = DEFAULT_RANK_RTOL) -> float:
    """Singular values at or below ``max(m, n) * s_max * rtol`` count as zero."""
    smax = s.max() if s.size else 0.0
    return max(shape) * smax * rtol


def null_space(A: np.ndarray, rtol: float = DEFAULT_RANK_RTOL) -> np.ndarray:
    """Orthonormal basis (columns) of the right null space of ``A``.

    An all-zero matrix has the whole space as its kernel.
    """
    A = np.atleast_2d(A)
    m, n = A.shape
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    if m == 0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(A)
    tol = rank_threshold(s, A.shape, rtol)
    rank = int(np.sum(s > tol)) if s.max() > 0 else 0
    return vh[rank:].conj().T


def numerical_rank(A: np.ndarray, rtol: float = DEFAULT_RANK_RTOL) -> int:
    A = np.atleast_2d(A)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s.max() == 0:
        return 0
    return int(np.sum(s > rank_threshold(s, A.shape, rtol)))


def cluster_values(values, tol: float) -> list[list[int]]:
    """Group indices whose sorted values are chained by gaps of at most ``tol``."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return []
    order = np.argsort(values, kind="stable")
    groups = [[int(order[0])]]
    for prev, cur in zip(order[:-1], order[1:]):
        if values[cur] - values[prev] > tol:
            groups.append([])
        groups[-1].append(int(cur))
    return [sorted(g) for g in groups]
