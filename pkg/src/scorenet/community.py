"""
Community detection: SCORE, D-SCORE and Newman's spectral bisection.

SCORE clusters the rows of entry-wise eigenvector ratios, which cancels the
per-node degree factor of a degree-corrected block model. D-SCORE does the
same with left and right singular vectors of a directed adjacency matrix and
treats the four citer/citee subsets of nodes separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse.linalg import LinearOperator

from .graph import (
    Graph,
    GraphError,
    citee_network,
    citer_network,
    connected_components,
    induced_subgraph,
    weakly_connected_components,
)
from .linalg import DEFAULT_TOL, kmeans, top_k_eigs_symmetric, top_k_svd

__all__ = [
    "DegenerateError",
    "PartitionLabels",
    "RatioMatrix",
    "DScoreResult",
    "score",
    "score_ratios",
    "dscore",
    "dscore_details",
    "dscore_ratios",
    "nsc",
    "community_sizes",
    "intersection_table",
]


class DegenerateError(RuntimeError):
    """The input leaves the algorithm nothing to cluster."""


@dataclass(frozen=True)
class PartitionLabels:
    """
    Node-indexed community ids.

    Ids are renumbered by first appearance, so node 0 is always in community
    0 and the ids form ``0 .. k_effective - 1``.
    """

    labels: np.ndarray
    k_requested: int
    k_effective: int

    @classmethod
    def from_labels(cls, labels: Sequence, k_requested: int | None = None) -> "PartitionLabels":
        arr = np.asarray(labels)
        if arr.ndim != 1:
            raise ValueError("labels must be one-dimensional")
        _, first, inv = np.unique(arr, return_index=True, return_inverse=True)
        rank = np.empty(len(first), dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(len(first))
        canon = rank[inv.reshape(-1)]
        canon.setflags(write=False)
        k_eff = len(first)
        return cls(labels=canon, k_requested=k_eff if k_requested is None else int(k_requested),
                   k_effective=k_eff)

    def __len__(self) -> int:
        return len(self.labels)

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.labels == c)


@dataclass(frozen=True)
class RatioMatrix:
    """Rows of entry-wise vector ratios; rows outside ``support`` are zero."""

    entries: np.ndarray
    support: np.ndarray


def _ratios(lead: np.ndarray, others: np.ndarray, bound: float | None) -> np.ndarray:
    """
    ``others[i, k] / lead[i]`` with magnitude optionally capped at ``bound``.

    A zero denominator yields ``+-bound`` (or 0 when the numerator is 0 too),
    matching the limit of the capped ratio.
    """
    lead = lead[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        r = others / lead
    zero = lead[:, 0] == 0
    if np.any(zero):
        if bound is None:
            raise DegenerateError("leading vector has zero entries; enable clamping")
        r[zero] = np.sign(others[zero]) * bound
    if bound is not None:
        r = np.sign(r) * np.minimum(np.abs(r), bound)
    return r


def _require_connected(g: Graph):
    if g.directed:
        raise GraphError("expected an undirected graph")
    if g.n == 0:
        raise GraphError("empty graph")
    if connected_components(g).count != 1:
        raise GraphError("graph is disconnected; restrict it to its giant component first")


def score_ratios(g: Graph, K: int, clamp: bool = True, tol: float = DEFAULT_TOL,
                 seed: int = 0) -> RatioMatrix:
    """The ``n x (K-1)`` SCORE ratio matrix of leading adjacency eigenvectors."""
    eig = top_k_eigs_symmetric(g.adjacency(), K, tol=tol, seed=seed)
    xi = eig.left_vectors
    bound = math.log(g.n) if clamp else None
    R = _ratios(xi[:, 0], xi[:, 1:], bound)
    return RatioMatrix(entries=R, support=np.arange(g.n))


def score(g: Graph, K: int, seed: int = 42, *, clamp: bool = True, restarts: int = 100,
          tol: float = DEFAULT_TOL) -> PartitionLabels:
    """
    SCORE community detection on a connected undirected graph.

    Takes the ``K`` leading eigenvectors of the adjacency matrix (by
    magnitude), divides eigenvectors 2..K entry-wise by the first, and runs
    k-means on the rows. Ratios are capped at ``log(n)`` in magnitude unless
    ``clamp=False``.
    """
    _require_connected(g)
    if K < 2:
        raise ValueError("SCORE needs K >= 2")
    if K > g.n:
        raise ValueError(f"K={K} exceeds node count {g.n}")
    R = score_ratios(g, K, clamp=clamp, tol=tol)
    km = kmeans(R.entries, K, restarts=restarts, seed=seed)
    return PartitionLabels.from_labels(km.labels, K)


# -- D-SCORE -------------------------------------------------------------------

@dataclass(frozen=True)
class DScoreResult:
    """Partition plus the intermediate sets and ratio matrices of D-SCORE."""

    partition: PartitionLabels
    citer_giant: np.ndarray
    citee_giant: np.ndarray
    left: RatioMatrix
    right: RatioMatrix

    @property
    def both(self) -> np.ndarray:
        return np.intersect1d(self.citer_giant, self.citee_giant)

    @property
    def neither(self) -> np.ndarray:
        n = len(self.partition)
        covered = np.union1d(self.citer_giant, self.citee_giant)
        return np.setdiff1d(np.arange(n), covered)


def dscore_ratios(g: Graph, K: int, tol: float = DEFAULT_TOL, seed: int = 0):
    """
    Capped left/right singular-vector ratio matrices of a digraph.

    Returns ``(left, right)``; left rows are supported on the giant component
    of the citer network, right rows on that of the citee network.
    """
    n = g.n
    n1 = connected_components(citer_network(g)).giant_nodes()
    n2 = connected_components(citee_network(g)).giant_nodes()
    svd = top_k_svd(g.adjacency(), K, tol=tol, seed=seed)
    bound = math.log(n)
    out = []
    for vecs, support in ((svd.left_vectors, n1), (svd.right_vectors, n2)):
        R = np.zeros((n, K - 1))
        R[support] = _ratios(vecs[support, 0], vecs[support, 1:], bound)
        out.append(RatioMatrix(entries=R, support=support))
    return out[0], out[1]


def _nearest(rows: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d2 = ((rows[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1)


def dscore_details(g: Graph, K: int, seed: int = 42, *, restarts: int = 100,
                   tol: float = DEFAULT_TOL) -> DScoreResult:
    """D-SCORE returning intermediate sets alongside the partition."""
    if not g.directed:
        raise GraphError("D-SCORE needs a directed graph")
    if K < 2:
        raise ValueError("D-SCORE needs K >= 2")
    if K > g.n:
        raise ValueError(f"K={K} exceeds node count {g.n}")
    if g.n == 0 or weakly_connected_components(g).count != 1:
        raise GraphError("graph is not weakly connected; restrict it to its giant component")
    left, right = dscore_ratios(g, K, tol=tol)
    n1, n2 = left.support, right.support
    both = np.intersect1d(n1, n2)
    if len(both) < K:
        raise DegenerateError(f"citer and citee giant components share {len(both)} nodes; "
                              f"need at least K={K}")

    labels = np.full(g.n, -1, dtype=np.int64)
    Rl, Rr = left.entries, right.entries
    km = kmeans(np.hstack([Rl[both], Rr[both]]), K, restarts=restarts, seed=seed)
    labels[both] = km.labels
    k_found = km.n_clusters

    # community centers from the left (resp. right) block of the clustered rows
    for R, own, other in ((Rl, n1, n2), (Rr, n2, n1)):
        only = np.setdiff1d(own, other)
        if len(only) == 0:
            continue
        centers = np.array([R[both][km.labels == c].mean(axis=0) for c in range(k_found)])
        labels[only] = _nearest(R[only], centers)

    # remaining nodes follow the majority of their labelled weak neighbours
    sym = g.symmetrize().adjacency()
    pending = np.flatnonzero(labels < 0)
    while len(pending):
        counts = np.zeros((len(pending), k_found), dtype=np.int64)
        nbr = sym[pending]
        for row, (lo, hi) in enumerate(zip(nbr.indptr[:-1], nbr.indptr[1:])):
            lab = labels[nbr.indices[lo:hi]]
            lab = lab[lab >= 0]
            if len(lab):
                counts[row] = np.bincount(lab, minlength=k_found)
        ready = counts.sum(axis=1) > 0
        if not np.any(ready):
            raise DegenerateError("unlabelled nodes have no path to labelled ones")
        labels[pending[ready]] = np.argmax(counts[ready], axis=1)
        pending = pending[~ready]

    return DScoreResult(partition=PartitionLabels.from_labels(labels, K),
                        citer_giant=n1, citee_giant=n2, left=left, right=right)


def dscore(g: Graph, K: int, seed: int = 42, *, restarts: int = 100,
           tol: float = DEFAULT_TOL) -> PartitionLabels:
    """
    D-SCORE community detection on a weakly connected digraph.

    Nodes in both the citer-network and citee-network giant components are
    clustered by k-means on the concatenated left and right ratio rows.
    Nodes in only one of them go to the nearest community center in that
    side's ratio space; the rest take the community holding most of their
    undirected neighbours (ties to the smaller id).
    """
    return dscore_details(g, K, seed, restarts=restarts, tol=tol).partition


# -- Newman spectral clustering ---------------------------------------------------

def _modularity_operator(A, d, two_m, members):
    """Generalized modularity matrix of the subgroup ``members``."""
    sub = A[members][:, members].astype(np.float64).tocsr()
    dg = d[members].astype(np.float64)
    # row sums of B restricted to the group
    diag = np.asarray(sub.sum(axis=1)).ravel() - dg * dg.sum() / two_m

    def mv(x):
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            return sub @ x - dg * (dg @ x) / two_m - diag * x
        return sub @ x - np.outer(dg, dg @ x) / two_m - diag[:, None] * x

    size = len(members)
    return LinearOperator((size, size), matvec=mv, matmat=mv, rmatvec=mv, rmatmat=mv,
                          dtype=np.float64)


def _best_split(A, d, two_m, members, tol):
    """Leading-eigenvector split of a group and its modularity gain (x 4m)."""
    if len(members) < 2:
        return None, 0.0
    op = _modularity_operator(A, d, two_m, members)
    eig = top_k_eigs_symmetric(op, 1, tol=tol, which="LA")
    lam = eig.values[0]
    scale = max(1.0, float(np.abs(d[members]).max()))
    if lam <= 1e-10 * scale:
        return None, 0.0
    s = np.where(eig.left_vectors[:, 0] >= 0, 1.0, -1.0)
    if np.all(s == s[0]):
        return None, 0.0
    gain = float(s @ op.matvec(s))
    if gain <= 1e-10 * scale:
        return None, 0.0
    return s, gain


def nsc(g: Graph, K: int, *, tol: float = DEFAULT_TOL) -> PartitionLabels:
    """
    Newman's spectral clustering by repeated bisection.

    Each split follows the signs of the leading eigenvector of the group's
    generalized modularity matrix. With ``K >= 3`` the group whose split
    gains the most modularity is divided next. Splitting stops at ``K``
    groups or when no split has positive gain, so ``k_effective`` may be
    smaller than ``K``.
    """
    _require_connected(g)
    if K < 2:
        raise ValueError("NSC needs K >= 2")
    if K > g.n:
        raise ValueError(f"K={K} exceeds node count {g.n}")
    A = g.adjacency()
    d = g.degree().astype(np.float64)
    two_m = float(d.sum())
    groups = [np.arange(g.n)]
    if two_m == 0:
        return PartitionLabels.from_labels(np.zeros(g.n, dtype=np.int64), K)
    cache = {}
    while len(groups) < K:
        best = None
        for gi, members in enumerate(groups):
            key = members.tobytes()
            if key not in cache:
                cache[key] = _best_split(A, d, two_m, members, tol)
            s, gain = cache[key]
            if s is not None and (best is None or gain > best[2]):
                best = (gi, s, gain)
        if best is None:
            break
        gi, s, _ = best
        members = groups.pop(gi)
        groups.insert(gi, members[s < 0])
        groups.insert(gi, members[s > 0])
    labels = np.empty(g.n, dtype=np.int64)
    for c, members in enumerate(groups):
        labels[members] = c
    return PartitionLabels.from_labels(labels, K)


# -- summaries -----------------------------------------------------------------

def community_sizes(p: PartitionLabels) -> list[int]:
    """Community sizes, largest first."""
    counts = np.bincount(np.asarray(p.labels), minlength=p.k_effective)
    return sorted((int(c) for c in counts if c > 0), reverse=True)


def intersection_table(p: PartitionLabels, q: PartitionLabels, map_p=None,
                       map_q=None) -> np.ndarray:
    """
    Cross-tabulate two partitions defined on overlapping node sets.

    ``map_p[i]`` is the shared-universe id of node ``i`` of ``p`` (identity
    when omitted), likewise ``map_q``. The result has shape
    ``(k_p + 1, k_q + 1)``: the last column counts nodes of ``p`` absent
    from ``q``, the last row nodes of ``q`` absent from ``p``.
    """
    mp = np.arange(len(p)) if map_p is None else np.asarray(map_p, dtype=np.int64)
    mq = np.arange(len(q)) if map_q is None else np.asarray(map_q, dtype=np.int64)
    if len(mp) != len(p) or len(mq) != len(q):
        raise ValueError("index map length differs from partition length")
    if len(np.unique(mp)) != len(mp) or len(np.unique(mq)) != len(mq):
        raise ValueError("index maps must be injective")
    kp, kq = p.k_effective, q.k_effective
    table = np.zeros((kp + 1, kq + 1), dtype=np.int64)
    q_of = dict(zip(mq.tolist(), np.asarray(q.labels).tolist()))
    seen = set()
    for u, a in zip(mp.tolist(), np.asarray(p.labels).tolist()):
        b = q_of.get(u)
        if b is None:
            table[a, kq] += 1
        else:
            table[a, b] += 1
            seen.add(u)
    for u, b in q_of.items():
        if u not in seen:
            table[kp, b] += 1
    return table


def restrict_to_giant(g: Graph) -> tuple[Graph, np.ndarray]:
    """Induced subgraph on the (weakly) connected giant component."""
    comps = weakly_connected_components(g) if g.directed else connected_components(g)
    return induced_subgraph(g, comps.giant_nodes())
