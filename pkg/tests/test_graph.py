import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.sparse.csgraph import connected_components as sp_components

from scorenet.graph import (
    BipartiteGraph,
    Graph,
    GraphError,
    citee_network,
    citer_network,
    coauthorship_from_bipartite,
    connected_components,
    induced_subgraph,
    weakly_connected_components,
)

from oracles import components as oracle_components


@st.composite
def digraphs(draw, max_n=50):
    n = draw(st.integers(1, max_n))
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
    edges = draw(st.lists(pairs, max_size=3 * n))
    return Graph(n, edges, directed=True)


def partition_sets(decomp):
    return {frozenset(np.flatnonzero(decomp.labels == c).tolist()) for c in range(decomp.count)}


class TestGraph:
    def test_self_loops_dropped_and_counted(self):
        g = Graph(3, [(0, 0), (0, 1), (1, 0)], directed=False)
        assert g.num_edges == 1
        assert g.loops_dropped == 1
        assert g.edges.tolist() == [[0, 1]]

    def test_undirected_is_canonical_and_symmetric(self):
        g = Graph(4, [(3, 1), (1, 3), (2, 0)])
        assert g.edges.tolist() == [[0, 2], [1, 3]]
        a = g.adjacency().toarray()
        assert np.array_equal(a, a.T)

    def test_directed_keeps_both_directions(self):
        g = Graph(3, [(0, 1), (1, 0), (2, 1)], directed=True)
        assert g.num_edges == 3
        assert g.in_neighbors(1).tolist() == [0, 2]
        assert g.out_neighbors(2).tolist() == [1]

    def test_out_of_range_rejected(self):
        with pytest.raises(GraphError):
            Graph(2, [(0, 2)])

    def test_node_id_count_checked(self):
        with pytest.raises(GraphError):
            Graph(2, [], node_ids=["a"])

    def test_from_adjacency_rejects_asymmetric(self):
        with pytest.raises(GraphError):
            Graph.from_adjacency([[0, 1], [0, 0]], directed=False)

    def test_bipartite_requires_author_per_paper(self):
        with pytest.raises(GraphError):
            BipartiteGraph(2, 2, [(0, 0)])


class TestComponents:
    def test_path(self):
        d = connected_components(Graph(3, [(0, 1), (1, 2)]))
        assert d.count == 1 and d.sizes.tolist() == [3]

    def test_isolated(self):
        d = connected_components(Graph(4, []))
        assert d.sizes.tolist() == [1, 1, 1, 1]
        assert d.labels.tolist() == [0, 1, 2, 3]

    def test_giant_tie_goes_to_smallest_node(self):
        d = connected_components(Graph(7, [(4, 5), (1, 2), (0, 3)]))
        # three pairs and a singleton; {0,3} contains the smallest index
        assert d.sizes.tolist() == [2, 2, 2, 1]
        assert sorted(d.giant_nodes().tolist()) == [0, 3]
        assert d.labels.tolist() == [0, 1, 1, 0, 2, 2, 3]

    def test_directed_rejected(self):
        with pytest.raises(GraphError):
            connected_components(Graph(2, [(0, 1)], directed=True))

    def test_weak_digraph_star(self):
        d = weakly_connected_components(Graph(3, [(0, 1), (2, 1)], directed=True))
        assert d.count == 1

    def test_weak_two_cycles(self):
        g = Graph(4, [(0, 1), (1, 0), (2, 3), (3, 2)], directed=True)
        d = weakly_connected_components(g)
        assert d.sizes.tolist() == [2, 2]

    @settings(max_examples=150, deadline=None)
    @given(digraphs())
    def test_weak_equals_symmetrized(self, g):
        weak = weakly_connected_components(g)
        sym = connected_components(g.symmetrize())
        assert np.array_equal(weak.labels, sym.labels)
        assert np.array_equal(weak.sizes, sym.sizes)
        assert weak.sizes.sum() == g.n
        assert list(weak.sizes) == sorted(weak.sizes, reverse=True)

    @settings(max_examples=100, deadline=None)
    @given(digraphs())
    def test_matches_bfs_and_scipy(self, g):
        d = connected_components(g.symmetrize())
        expected = set(oracle_components(g.n, g.edges.tolist()))
        assert partition_sets(d) == expected
        ncomp, _ = sp_components(g.adjacency(), directed=True, connection="weak")
        assert ncomp == d.count


class TestCoauthorship:
    def make(self):
        # authors 0,1 share papers 0 and 1; author 2 alone on paper 2
        return BipartiteGraph(3, 3, [(0, 0), (1, 0), (0, 1), (1, 1), (2, 2)])

    def test_threshold_met(self):
        g = coauthorship_from_bipartite(self.make(), 2)
        assert g.edges.tolist() == [[0, 1]]
        assert g.n == 3

    def test_threshold_not_met(self):
        assert coauthorship_from_bipartite(self.make(), 3).num_edges == 0

    def test_zero_threshold_rejected(self):
        with pytest.raises(GraphError):
            coauthorship_from_bipartite(self.make(), 0)

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_thresholds_nest(self, data):
        na = data.draw(st.integers(1, 12))
        npap = data.draw(st.integers(1, 10))
        inc = [(data.draw(st.integers(0, na - 1)), j) for j in range(npap)]
        inc += data.draw(st.lists(st.tuples(st.integers(0, na - 1), st.integers(0, npap - 1)),
                                  max_size=30))
        b = BipartiteGraph(na, npap, inc)
        for t in range(1, 4):
            hi = {tuple(e) for e in coauthorship_from_bipartite(b, t + 1).edges.tolist()}
            lo = {tuple(e) for e in coauthorship_from_bipartite(b, t).edges.tolist()}
            assert hi <= lo

    def test_matches_shared_count(self):
        rng = np.random.default_rng(3)
        M = (rng.random((15, 20)) < 0.2).astype(int)
        M[0, M.sum(axis=0) == 0] = 1
        b = BipartiteGraph(15, 20, np.argwhere(M))
        for t in (1, 2):
            got = {tuple(e) for e in coauthorship_from_bipartite(b, t).edges.tolist()}
            want = {(i, j) for i in range(15) for j in range(i + 1, 15)
                    if (M[i] & M[j]).sum() >= t}
            assert got == want


class TestProjections:
    def test_shared_citee(self):
        g = citer_network(Graph(3, [(0, 2), (1, 2)], directed=True))
        assert g.edges.tolist() == [[0, 1]]

    def test_chain_has_no_shared_citee(self):
        assert citer_network(Graph(3, [(0, 1), (1, 2)], directed=True)).num_edges == 0

    def test_shared_citer(self):
        g = citee_network(Graph(3, [(2, 0), (2, 1)], directed=True))
        assert g.edges.tolist() == [[0, 1]]

    def test_single_edge(self):
        assert citee_network(Graph(2, [(0, 1)], directed=True)).num_edges == 0

    @settings(max_examples=100, deadline=None)
    @given(digraphs(max_n=15))
    def test_definition(self, g):
        A = g.adjacency().toarray()
        n = g.n
        citer = {tuple(e) for e in citer_network(g).edges.tolist()}
        citee = {tuple(e) for e in citee_network(g).edges.tolist()}
        want_er, want_ee = set(), set()
        for i in range(n):
            for j in range(i + 1, n):
                ks = [k for k in range(n) if k not in (i, j)]
                if any(A[i, k] and A[j, k] for k in ks):
                    want_er.add((i, j))
                if any(A[k, i] and A[k, j] for k in ks):
                    want_ee.add((i, j))
        assert citer == want_er
        assert citee == want_ee
        for proj in (citer_network(g), citee_network(g)):
            assert proj.n == g.n and not proj.directed
            assert np.all(proj.edges[:, 0] < proj.edges[:, 1])


class TestInducedSubgraph:
    def test_triangle(self):
        sub, idx = induced_subgraph(Graph(3, [(0, 1), (1, 2), (0, 2)]), [0, 1])
        assert sub.edges.tolist() == [[0, 1]] and idx.tolist() == [0, 1]

    def test_identity(self):
        g = Graph(4, [(0, 1), (2, 3)], node_ids="abcd")
        sub, idx = induced_subgraph(g, range(4))
        assert sub == g and idx.tolist() == [0, 1, 2, 3]
        assert sub.node_ids == g.node_ids

    def test_empty_or_bad(self):
        g = Graph(3, [(0, 1)])
        with pytest.raises(GraphError):
            induced_subgraph(g, [])
        with pytest.raises(GraphError):
            induced_subgraph(g, [0, 5])

    @pytest.mark.parametrize("seed", range(5))
    def test_random_against_pair_filter(self, seed):
        rng = np.random.default_rng(seed)
        A = np.triu(rng.random((20, 20)) < 0.25, 1)
        g = Graph(20, np.argwhere(A))
        keep = np.sort(rng.choice(20, 10, replace=False))
        sub, idx = induced_subgraph(g, keep)
        got = {(int(idx[a]), int(idx[b])) for a, b in sub.edges.tolist()}
        want = {(int(i), int(j)) for i in keep for j in keep if i < j and A[i, j]}
        assert got == want
