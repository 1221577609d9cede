"""Shared fixtures and independent oracles used across the test modules."""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla

from sfgft import SamplingSet, VariationOperator


def is_connected(weights: np.ndarray) -> bool:
    n = weights.shape[0]
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for u in np.flatnonzero(weights[v]):
            if int(u) not in seen:
                seen.add(int(u))
                stack.append(int(u))
    return len(seen) == n


def random_connected_variation(
    n: int, seed: int, edge_prob: float = 0.45, ridge_rel: float = 0.05
) -> VariationOperator:
    """Random weighted connected graph as Laplacian + relative ridge."""
    rng = np.random.default_rng(seed)
    while True:
        w = np.zeros((n, n))
        iu = np.triu_indices(n, 1)
        mask = rng.random(iu[0].size) < edge_prob
        weights = rng.uniform(0.5, 1.5, iu[0].size) * mask
        w[iu] = weights
        w = w + w.T
        if is_connected(w):
            lap = np.diag(w.sum(axis=1)) - w
            delta = ridge_rel * np.trace(lap) / n
            return VariationOperator(lap + delta * np.eye(n))


def path_variation(n: int, ridge: float = 0.5) -> VariationOperator:
    """Unweighted path Laplacian plus a ridge."""
    w = np.eye(n, k=1) + np.eye(n, k=-1)
    lap = np.diag(w.sum(axis=1)) - w
    return VariationOperator(lap + ridge * np.eye(n))


def cycle_variation(n: int, ridge: float = 0.5) -> VariationOperator:
    w = np.zeros((n, n))
    for i in range(n):
        w[i, (i + 1) % n] = 1.0
        w[(i + 1) % n, i] = 1.0
    lap = np.diag(w.sum(axis=1)) - w
    return VariationOperator(lap + ridge * np.eye(n))


def random_sampling_set(n: int, size: int, rng: np.random.Generator) -> SamplingSet:
    return SamplingSet(n, tuple(int(i) for i in rng.choice(n, size=size, replace=False)))


def whitened_coupling_sigma_min(m: VariationOperator, s: SamplingSet) -> float:
    """Oracle: sigma_min of the Cholesky-whitened coupling block.

    Independent route to 1 - lambda_{|S|}: whiten M_S,Sc by the Cholesky
    factors of the Q(S) blocks and take the smallest singular value.
    """
    s_idx, sc_idx = s.index_array, s.complement
    chol_s = sla.cholesky(m.matrix[np.ix_(s_idx, s_idx)], lower=True)
    chol_sc = sla.cholesky(m.matrix[np.ix_(sc_idx, sc_idx)], lower=True)
    c = sla.solve_triangular(chol_s, m.matrix[np.ix_(s_idx, sc_idx)], lower=True)
    c = sla.solve_triangular(chol_sc, c.T, lower=True).T
    return float(sla.svdvals(c)[-1])


def coupling_rank(m: VariationOperator, s: SamplingSet, threshold: float = 1e-10) -> int:
    """Rank of M_S,Sc via SVD with a relative threshold."""
    sv = sla.svdvals(m.matrix[np.ix_(s.index_array, s.complement)])
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > threshold * sv[0]))
