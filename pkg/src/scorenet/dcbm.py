"""
Degree-corrected block model sampling, undirected and directed.

Undirected: ``P(A[i, j] = 1) = theta[i] * theta[j] * P[k_i, k_j]``.
Directed:   ``P(A[i, j] = 1) = theta[i] * delta[j] * P[k_i, k_j]``, where
``theta`` scales a node's activity as a citer and ``delta`` as a citee.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .community import PartitionLabels
from .graph import Graph

__all__ = [
    "DcbmParams",
    "edge_probabilities",
    "sample_undirected",
    "sample_directed",
    "planted_params",
]


@dataclass(frozen=True)
class DcbmParams:
    """
    Block-model parameters.

    Probabilities above 1 are rejected at construction rather than clipped.
    """

    P: np.ndarray
    theta: np.ndarray
    labels: np.ndarray
    delta: np.ndarray | None = None
    directed: bool = False

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.P, dtype=np.float64))
        theta = np.asarray(self.theta, dtype=np.float64).ravel()
        labels = np.asarray(self.labels, dtype=np.int64).ravel()
        delta = None if self.delta is None else np.asarray(self.delta, dtype=np.float64).ravel()
        K = P.shape[0]
        if P.shape != (K, K):
            raise ValueError(f"P must be square, got {P.shape}")
        if np.any(P < 0) or not np.all(np.isfinite(P)):
            raise ValueError("P must be finite and non-negative")
        n = len(theta)
        if len(labels) != n:
            raise ValueError("labels and theta differ in length")
        if n and (labels.min() < 0 or labels.max() >= K):
            raise ValueError(f"labels must lie in [0, {K})")
        if np.any(theta <= 0):
            raise ValueError("theta entries must be positive")
        if self.directed:
            if delta is None:
                raise ValueError("directed model needs delta")
            if len(delta) != n or np.any(delta <= 0):
                raise ValueError("delta must be positive with one entry per node")
        elif not np.allclose(P, P.T, rtol=0, atol=1e-12):
            raise ValueError("undirected model needs a symmetric P")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "delta", delta)
        # max over blocks of max theta * max (theta or delta) * P
        col = delta if self.directed else theta
        top = 0.0
        for k in range(K):
            tk = theta[labels == k]
            if not len(tk):
                continue
            for l in range(K):
                cl = col[labels == l]
                if len(cl):
                    top = max(top, tk.max() * cl.max() * P[k, l])
        if top > 1 + 1e-12:
            raise ValueError(f"edge probability {top:.4g} exceeds 1")

    @property
    def n(self) -> int:
        return len(self.theta)

    @property
    def K(self) -> int:
        return self.P.shape[0]


def edge_probabilities(params: DcbmParams) -> np.ndarray:
    """Dense ``n x n`` matrix of edge probabilities with a zero diagonal."""
    col = params.delta if params.directed else params.theta
    Pi = np.outer(params.theta, col) * params.P[np.ix_(params.labels, params.labels)]
    np.fill_diagonal(Pi, 0.0)
    return Pi


def sample_undirected(params: DcbmParams, seed: int = 0) -> tuple[Graph, PartitionLabels]:
    """Draw each unordered pair once; returns the graph and planted labels."""
    if params.directed:
        raise ValueError("parameters describe a directed model")
    rng = np.random.default_rng(seed)
    Pi = edge_probabilities(params)
    iu, ju = np.triu_indices(params.n, k=1)
    hit = rng.random(len(iu)) < Pi[iu, ju]
    g = Graph(params.n, np.column_stack([iu[hit], ju[hit]]), directed=False)
    return g, PartitionLabels.from_labels(params.labels, params.K)


def sample_directed(params: DcbmParams, seed: int = 0) -> tuple[Graph, PartitionLabels]:
    """Draw every ordered pair ``i != j`` independently."""
    if not params.directed:
        raise ValueError("parameters describe an undirected model")
    rng = np.random.default_rng(seed)
    Pi = edge_probabilities(params)
    hit = rng.random(Pi.shape) < Pi
    np.fill_diagonal(hit, False)
    src, dst = np.nonzero(hit)
    g = Graph(params.n, np.column_stack([src, dst]), directed=True)
    return g, PartitionLabels.from_labels(params.labels, params.K)


def planted_params(n: int, K: int, p_in: float, p_out: float, *,
                   theta_range=(0.5, 1.5), delta_range=None, seed: int = 0,
                   directed: bool = False) -> DcbmParams:
    """
    Equal-block assortative model with uniform degree parameters.

    Node ``i`` sits in block ``i * K // n``. ``theta`` (and ``delta`` when
    directed) are drawn uniformly from the given ranges with ``seed``.
    """
    rng = np.random.default_rng([seed, 7919])
    labels = (np.arange(n) * K) // n
    P = np.full((K, K), float(p_out))
    np.fill_diagonal(P, float(p_in))
    theta = rng.uniform(*theta_range, size=n)
    delta = None
    if directed:
        delta = rng.uniform(*(delta_range or theta_range), size=n)
    return DcbmParams(P=P, theta=theta, labels=labels, delta=delta, directed=directed)
