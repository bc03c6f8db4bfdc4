"""
Sparse binary graphs and the derived networks built from them.

Graphs are immutable. Edges are stored once in compressed sparse row form
for out-neighbours and once for in-neighbours, so directed traversals in
either direction are O(degree).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

__all__ = [
    "GraphError",
    "Graph",
    "BipartiteGraph",
    "ComponentDecomposition",
    "connected_components",
    "weakly_connected_components",
    "coauthorship_from_bipartite",
    "citer_network",
    "citee_network",
    "induced_subgraph",
]


class GraphError(ValueError):
    """Raised for malformed graphs or operations applied to the wrong kind."""


def _as_edge_array(edges) -> np.ndarray:
    arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges)
    if arr.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    arr = arr.reshape(-1, 2)
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise GraphError("edge endpoints must be integers")
    return arr.astype(np.int64)


def _csr(n_rows: int, n_cols: int, rows: np.ndarray, cols: np.ndarray) -> sp.csr_matrix:
    data = np.ones(len(rows), dtype=np.int8)
    m = sp.csr_matrix((data, (rows, cols)), shape=(n_rows, n_cols))
    m.sum_duplicates()
    m.data[:] = 1
    m.sort_indices()
    return m


class Graph:
    """
    Simple binary graph on nodes ``0 .. n-1``.

    Self-loops are dropped and duplicate edges collapse to one. Undirected
    edges are kept canonically as ``(i, j)`` with ``i < j``.

    Parameters
    ----------
    n : int
        Node count.
    edges : iterable of (int, int)
        Edge list. For directed graphs ``(i, j)`` means ``i -> j``.
    directed : bool
        Whether edges are directed.
    node_ids : sequence of str, optional
        External names, one per node.
    """

    __slots__ = ("n", "directed", "node_ids", "_edges", "_out", "_in", "_loops_dropped")

    def __init__(self, n: int, edges=(), directed: bool = False,
                 node_ids: Sequence[str] | None = None):
        n = int(n)
        if n < 0:
            raise GraphError("node count must be non-negative")
        arr = _as_edge_array(edges)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise GraphError(f"edge endpoint out of range for n={n}")
        loops = arr[:, 0] == arr[:, 1]
        self._loops_dropped = int(loops.sum())
        arr = arr[~loops]
        if not directed:
            arr = np.sort(arr, axis=1)
        arr = np.unique(arr, axis=0) if len(arr) else arr
        if node_ids is not None:
            node_ids = tuple(str(s) for s in node_ids)
            if len(node_ids) != n:
                raise GraphError(f"expected {n} node ids, got {len(node_ids)}")
        self.n = n
        self.directed = bool(directed)
        self.node_ids = node_ids
        self._edges = arr
        self._edges.setflags(write=False)
        src, dst = arr[:, 0], arr[:, 1]
        if directed:
            self._out = _csr(n, n, src, dst)
            self._in = _csr(n, n, dst, src)
        else:
            sym = _csr(n, n, np.concatenate([src, dst]), np.concatenate([dst, src]))
            self._out = self._in = sym

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_adjacency(cls, adj, directed: bool = False, node_ids=None) -> "Graph":
        """Build from a dense or sparse 0/1 matrix; nonzero entries are edges."""
        m = sp.coo_matrix(adj)
        if m.shape[0] != m.shape[1]:
            raise GraphError(f"adjacency must be square, got {m.shape}")
        nz = m.data != 0
        rows, cols = m.row[nz], m.col[nz]
        if not directed:
            keep = rows <= cols
            sym = sp.csr_matrix((np.ones(nz.sum()), (rows, cols)), shape=m.shape)
            if (sym != sym.T).nnz:
                raise GraphError("undirected adjacency must be symmetric")
            rows, cols = rows[keep], cols[keep]
        return cls(m.shape[0], np.column_stack([rows, cols]), directed, node_ids)

    # -- queries ---------------------------------------------------------------

    @property
    def edges(self) -> np.ndarray:
        """Read-only ``(m, 2)`` array of edges, lexicographically sorted."""
        return self._edges

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    @property
    def loops_dropped(self) -> int:
        return self._loops_dropped

    def adjacency(self) -> sp.csr_matrix:
        """Binary adjacency as CSR; symmetric for undirected graphs."""
        return self._out

    def out_neighbors(self, i: int) -> np.ndarray:
        a = self._out
        return a.indices[a.indptr[i]:a.indptr[i + 1]]

    def in_neighbors(self, i: int) -> np.ndarray:
        a = self._in
        return a.indices[a.indptr[i]:a.indptr[i + 1]]

    def neighbors(self, i: int) -> np.ndarray:
        """Neighbours ignoring direction."""
        if not self.directed:
            return self.out_neighbors(i)
        return np.union1d(self.out_neighbors(i), self.in_neighbors(i))

    def has_edge(self, i: int, j: int) -> bool:
        row = self.out_neighbors(i)
        k = np.searchsorted(row, j)
        return bool(k < len(row) and row[k] == j)

    def out_degree(self) -> np.ndarray:
        return np.diff(self._out.indptr)

    def in_degree(self) -> np.ndarray:
        return np.diff(self._in.indptr)

    def degree(self) -> np.ndarray:
        if self.directed:
            raise GraphError("degree() is for undirected graphs; use in_degree/out_degree")
        return np.diff(self._out.indptr)

    def symmetrize(self) -> "Graph":
        """Undirected graph with an edge wherever either direction exists."""
        if not self.directed:
            return self
        return Graph(self.n, self._edges, directed=False, node_ids=self.node_ids)

    def name(self, i: int) -> str:
        return self.node_ids[i] if self.node_ids is not None else str(i)

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"Graph(n={self.n}, m={self.num_edges}, {kind})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n and self.directed == other.directed
                and np.array_equal(self._edges, other._edges))

    __hash__ = None


class BipartiteGraph:
    """
    Author-paper incidence structure.

    ``n_left`` authors, ``n_right`` papers; an incidence ``(a, p)`` means
    author ``a`` wrote paper ``p``. Every paper must have an author.
    """

    __slots__ = ("n_left", "n_right", "_inc", "node_ids")

    def __init__(self, n_left: int, n_right: int, incidences=(), node_ids=None):
        arr = _as_edge_array(incidences)
        if arr.size:
            if arr[:, 0].min() < 0 or arr[:, 0].max() >= n_left:
                raise GraphError("author index out of range")
            if arr[:, 1].min() < 0 or arr[:, 1].max() >= n_right:
                raise GraphError("paper index out of range")
        self.n_left = int(n_left)
        self.n_right = int(n_right)
        self._inc = _csr(self.n_left, self.n_right, arr[:, 0], arr[:, 1])
        orphans = np.flatnonzero(np.diff(self._inc.tocsc().indptr) == 0)
        if len(orphans):
            raise GraphError(f"paper {int(orphans[0])} has no author "
                             f"({len(orphans)} papers without authors)")
        self.node_ids = tuple(node_ids) if node_ids is not None else None

    def biadjacency(self) -> sp.csr_matrix:
        return self._inc

    @property
    def incidences(self) -> np.ndarray:
        coo = self._inc.tocoo()
        return np.column_stack([coo.row, coo.col]).astype(np.int64)

    def left_degree(self) -> np.ndarray:
        """Papers per author."""
        return np.diff(self._inc.indptr)

    def right_degree(self) -> np.ndarray:
        """Authors per paper."""
        return np.diff(self._inc.tocsc().indptr)

    def __repr__(self) -> str:
        return (f"BipartiteGraph(authors={self.n_left}, papers={self.n_right}, "
                f"incidences={self._inc.nnz})")


@dataclass(frozen=True)
class ComponentDecomposition:
    """
    Connected components of a graph.

    Component ids are ordered by size (descending), ties broken by the
    smallest node index in the component, so id 0 is always the giant.
    """

    labels: np.ndarray
    sizes: np.ndarray
    giant: int = 0

    @property
    def count(self) -> int:
        return len(self.sizes)

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.labels == c)

    def giant_nodes(self) -> np.ndarray:
        return self.members(self.giant)


def _union_find_components(n: int, edges: np.ndarray) -> ComponentDecomposition:
    parent = list(range(n))

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for a, b in edges.tolist():
        ra, rb = find(a), find(b)
        if ra != rb:
            # smaller root wins, keeps roots equal to component minimum
            if ra < rb:
                parent[rb] = ra
            else:
                parent[ra] = rb
    roots = np.fromiter((find(i) for i in range(n)), dtype=np.int64, count=n)
    uniq, inv, counts = np.unique(roots, return_inverse=True, return_counts=True)
    # uniq is each component's minimum node index; order by (-size, min index)
    order = np.lexsort((uniq, -counts))
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    labels = rank[inv]
    sizes = counts[order]
    labels.setflags(write=False)
    sizes.setflags(write=False)
    return ComponentDecomposition(labels=labels, sizes=sizes, giant=0)


def connected_components(g: Graph) -> ComponentDecomposition:
    """Connected components of an undirected graph."""
    if g.directed:
        raise GraphError("connected_components needs an undirected graph; "
                         "use weakly_connected_components for digraphs")
    return _union_find_components(g.n, g.edges)


def weakly_connected_components(g: Graph) -> ComponentDecomposition:
    """Components of a digraph once edge directions are ignored."""
    if not g.directed:
        raise GraphError("weakly_connected_components needs a directed graph")
    return _union_find_components(g.n, g.edges)


def coauthorship_from_bipartite(b: BipartiteGraph, t: int = 1) -> Graph:
    """
    Authors are adjacent when they share at least ``t`` papers.

    All authors are kept as nodes, including those with no coauthor.
    """
    if int(t) != t or t < 1:
        raise GraphError(f"threshold must be a positive integer, got {t!r}")
    inc = b.biadjacency().astype(np.int64)
    shared = sp.triu(inc @ inc.T, k=1).tocoo()
    keep = shared.data >= t
    edges = np.column_stack([shared.row[keep], shared.col[keep]])
    return Graph(b.n_left, edges, directed=False, node_ids=b.node_ids)


def _projection(m: sp.csr_matrix, n: int, node_ids) -> Graph:
    prod = sp.triu(m @ m.T, k=1).tocoo()
    keep = prod.data > 0
    return Graph(n, np.column_stack([prod.row[keep], prod.col[keep]]),
                 directed=False, node_ids=node_ids)


def citer_network(g: Graph) -> Graph:
    """Undirected graph linking nodes that share a common citee."""
    if not g.directed:
        raise GraphError("citer_network needs a directed graph")
    # no self-loops, so a shared target k can never be i or j itself
    return _projection(g.adjacency().astype(np.int64), g.n, g.node_ids)


def citee_network(g: Graph) -> Graph:
    """Undirected graph linking nodes that share a common citer."""
    if not g.directed:
        raise GraphError("citee_network needs a directed graph")
    return _projection(g.adjacency().T.tocsr().astype(np.int64), g.n, g.node_ids)


def induced_subgraph(g: Graph, keep: Iterable[int]) -> tuple[Graph, np.ndarray]:
    """
    Subgraph on ``keep``, reindexed to ``0 .. len(keep)-1``.

    Returns the subgraph and the array mapping new indices to original ones
    (sorted ascending).
    """
    idx = np.unique(np.asarray(list(keep) if not isinstance(keep, np.ndarray) else keep,
                               dtype=np.int64))
    if idx.size == 0:
        raise GraphError("cannot induce a subgraph on an empty node set")
    if idx[0] < 0 or idx[-1] >= g.n:
        raise GraphError("subgraph node index out of range")
    new_index = np.full(g.n, -1, dtype=np.int64)
    new_index[idx] = np.arange(len(idx))
    e = g.edges
    mask = (new_index[e[:, 0]] >= 0) & (new_index[e[:, 1]] >= 0)
    sub_edges = new_index[e[mask]]
    ids = None if g.node_ids is None else [g.node_ids[i] for i in idx]
    idx.setflags(write=False)
    return Graph(len(idx), sub_edges, directed=g.directed, node_ids=ids), idx
