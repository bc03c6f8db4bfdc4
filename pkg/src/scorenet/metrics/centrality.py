"""Degree, closeness and betweenness centrality on unweighted graphs."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from ..graph import BipartiteGraph, Graph, GraphError, connected_components

__all__ = [
    "CentralityScores",
    "degree_centrality",
    "closeness_centrality",
    "betweenness_centrality",
    "top_nodes",
]


@dataclass(frozen=True)
class CentralityScores:
    kind: str
    scores: np.ndarray

    def ranking(self) -> np.ndarray:
        """Node indices by decreasing score, ties to the lower index."""
        return np.lexsort((np.arange(len(self.scores)), -self.scores))


def degree_centrality(g, mode: str = "undirected") -> CentralityScores:
    """
    Neighbour counts.

    ``mode`` is ``"undirected"`` for undirected graphs and ``"in"`` or
    ``"out"`` for digraphs (``"in"`` counts distinct citers). For a
    :class:`BipartiteGraph` the result is papers per author.
    """
    if isinstance(g, BipartiteGraph):
        return CentralityScores("degree", g.left_degree().astype(np.int64))
    if mode == "undirected":
        if g.directed:
            raise GraphError("use mode='in' or mode='out' on a directed graph")
        return CentralityScores("degree", g.degree().astype(np.int64))
    if mode not in ("in", "out"):
        raise ValueError(f"unknown degree mode {mode!r}")
    if not g.directed:
        raise GraphError(f"mode={mode!r} needs a directed graph")
    deg = g.in_degree() if mode == "in" else g.out_degree()
    return CentralityScores("in_degree" if mode == "in" else "out_degree", deg.astype(np.int64))


def _adjacency_lists(g: Graph) -> list[list[int]]:
    a = g.adjacency()
    ind, ptr = a.indices.tolist(), a.indptr.tolist()
    return [ind[ptr[i]:ptr[i + 1]] for i in range(g.n)]


def _require_connected(g: Graph, what: str):
    if g.directed:
        raise GraphError(f"{what} is defined here for undirected graphs")
    if g.n == 0 or connected_components(g).count != 1:
        raise GraphError(f"{what} needs a connected graph; restrict to a component first")


def closeness_centrality(g: Graph) -> CentralityScores:
    """Reciprocal of the summed shortest-path distance to every other node."""
    _require_connected(g, "closeness")
    adj = _adjacency_lists(g)
    n = g.n
    out = np.zeros(n)
    for s in range(n):
        dist = [-1] * n
        dist[s] = 0
        q = deque([s])
        total = 0
        while q:
            v = q.popleft()
            dv = dist[v] + 1
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dv
                    total += dv
                    q.append(w)
        out[s] = 1.0 / total if total else 0.0
    return CentralityScores("closeness", out)


def betweenness_centrality(g: Graph) -> CentralityScores:
    """
    Unnormalised shortest-path betweenness over unordered pairs.

    Brandes' single-source accumulation; sources are processed in index
    order so the floating-point sum is reproducible.
    """
    _require_connected(g, "betweenness")
    adj = _adjacency_lists(g)
    n = g.n
    bc = [0.0] * n
    for s in range(n):
        stack = []
        preds = [[] for _ in range(n)]
        sigma = [0] * n
        dist = [-1] * n
        sigma[s], dist[s] = 1, 0
        q = deque([s])
        while q:
            v = q.popleft()
            stack.append(v)
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    q.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        while stack:
            w = stack.pop()
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                bc[w] += delta[w]
    # each unordered pair was counted from both endpoints
    return CentralityScores("betweenness", np.asarray(bc) / 2.0)


def top_nodes(scores: CentralityScores, k: int, names=None) -> list:
    order = scores.ranking()[:k]
    if names is None:
        return [int(i) for i in order]
    return [names[i] for i in order]
