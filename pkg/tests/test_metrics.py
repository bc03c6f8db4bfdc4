import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from scorenet.community import PartitionLabels
from scorenet.graph import BipartiteGraph, Graph, GraphError
from scorenet.metrics import (
    BiblioRecord,
    adjusted_rand_index,
    author_paper_counts,
    betweenness_centrality,
    ccdf,
    citation_classification,
    closeness_centrality,
    coauthors_by_year,
    contingency,
    degree_ccdf,
    degree_centrality,
    gini,
    lorenz_curve,
    overall_papers_per_author,
    powerlaw_tail_slope,
    productivity_by_year,
    top_nodes,
    top_share,
    transitivity,
    variation_of_information,
)

import oracles


@st.composite
def small_connected(draw, max_n=7):
    n = draw(st.integers(2, max_n))
    # a random spanning tree keeps the graph connected
    edges = [(draw(st.integers(0, i - 1)), i) for i in range(1, n)]
    extra = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
    edges += draw(st.lists(extra, max_size=2 * n))
    perm = draw(st.permutations(range(n)))
    return Graph(n, [(perm[a], perm[b]) for a, b in edges])


@st.composite
def label_pairs(draw):
    n = draw(st.integers(1, 8))
    p = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    q = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    return p, q


def path(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def complete(n):
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def cycle(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


class TestDegree:
    def test_star_center(self):
        g = Graph(5, [(0, i) for i in range(1, 5)])
        assert degree_centrality(g).scores.tolist() == [4, 1, 1, 1, 1]

    def test_in_degree(self):
        g = Graph(3, [(0, 1), (2, 1)], directed=True)
        s = degree_centrality(g, "in")
        assert s.kind == "in_degree" and s.scores[1] == 2

    def test_mode_mismatch(self):
        with pytest.raises(GraphError):
            degree_centrality(path(3), "in")
        with pytest.raises(GraphError):
            degree_centrality(Graph(2, [(0, 1)], directed=True))

    def test_bipartite_counts_papers(self):
        b = BipartiteGraph(2, 3, [(0, 0), (0, 1), (1, 1), (1, 2)])
        assert degree_centrality(b).scores.tolist() == [2, 2]

    def test_ranking_ties_to_lower_index(self):
        s = degree_centrality(Graph(4, [(0, 3), (1, 3)]))
        assert top_nodes(s, 3) == [3, 0, 1]
        assert top_nodes(s, 1, names="abcd") == ["d"]


class TestCloseness:
    def test_path(self):
        s = closeness_centrality(path(3)).scores
        assert s.tolist() == pytest.approx([1 / 3, 1 / 2, 1 / 3])

    def test_complete(self):
        assert closeness_centrality(complete(5)).scores == pytest.approx([0.25] * 5)

    def test_disconnected_rejected(self):
        with pytest.raises(GraphError):
            closeness_centrality(Graph(3, [(0, 1)]))

    @settings(max_examples=150, deadline=None)
    @given(small_connected())
    def test_matches_floyd_warshall(self, g):
        got = closeness_centrality(g).scores
        want = oracles.closeness(g.n, g.edges.tolist())
        assert np.allclose(got, want, atol=1e-12)


class TestBetweenness:
    def test_path(self):
        assert betweenness_centrality(path(3)).scores.tolist() == [0, 1, 0]

    def test_cycle4(self):
        assert betweenness_centrality(cycle(4)).scores.tolist() == [0.5] * 4

    def test_complete(self):
        assert betweenness_centrality(complete(5)).scores.tolist() == [0] * 5

    def test_star(self):
        g = Graph(5, [(0, i) for i in range(1, 5)])
        assert betweenness_centrality(g).scores[0] == 6

    @settings(max_examples=200, deadline=None)
    @given(small_connected())
    def test_matches_path_enumeration(self, g):
        got = betweenness_centrality(g).scores
        want = oracles.betweenness(g.n, g.edges.tolist())
        assert np.allclose(got, want, atol=1e-9)
        assert np.all(got >= 0)


class TestPartitionMetrics:
    def test_identical(self):
        assert adjusted_rand_index([0, 0, 1], [5, 5, 2]) == 1.0
        assert variation_of_information([0, 0, 1], [5, 5, 2]) == 0.0

    def test_crossed(self):
        p, q = [1, 1, 2, 2], [1, 2, 1, 2]
        assert adjusted_rand_index(p, q) == pytest.approx(-0.5)
        assert variation_of_information(p, q) == pytest.approx(2 * math.log(2))

    def test_contingency(self):
        assert contingency([0, 0, 1], [1, 0, 0]).tolist() == [[1, 1], [1, 0]]

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            adjusted_rand_index([0, 1], [0])
        with pytest.raises(ValueError):
            variation_of_information([0, 1], [0])

    def test_accepts_partition_labels(self):
        p = PartitionLabels.from_labels([0, 1, 1])
        assert adjusted_rand_index(p, [2, 0, 0]) == 1.0

    @settings(max_examples=200, deadline=None)
    @given(label_pairs())
    def test_against_pair_counting(self, pq):
        p, q = pq
        assert adjusted_rand_index(p, q) == pytest.approx(oracles.ari(p, q), abs=1e-9)
        assert variation_of_information(p, q) == pytest.approx(oracles.vi(p, q), abs=1e-9)

    @settings(max_examples=100, deadline=None)
    @given(label_pairs(), st.permutations(range(4)))
    def test_symmetric_and_rename_invariant(self, pq, perm):
        p, q = pq
        renamed = [perm[x] for x in p]
        assert adjusted_rand_index(p, q) == pytest.approx(adjusted_rand_index(q, p), abs=1e-12)
        assert adjusted_rand_index(renamed, q) == pytest.approx(adjusted_rand_index(p, q), abs=1e-12)
        vi = variation_of_information(p, q)
        assert vi == pytest.approx(variation_of_information(q, p), abs=1e-12)
        assert variation_of_information(renamed, q) == pytest.approx(vi, abs=1e-12)
        assert vi >= -1e-12


class TestTransitivity:
    def test_examples(self):
        assert transitivity(complete(3)) == 1.0
        assert transitivity(path(3)) == 0.0
        square_diag = Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
        assert transitivity(square_diag) == pytest.approx(0.75)
        assert transitivity(Graph(3, [])) == 0.0

    @settings(max_examples=100, deadline=None)
    @given(small_connected(max_n=10))
    def test_matches_triple_enumeration(self, g):
        assert transitivity(g) == pytest.approx(oracles.transitivity(g.n, g.edges.tolist()),
                                                abs=1e-12)


positive_lists = st.lists(st.floats(0, 1e3, allow_nan=False), min_size=1, max_size=40).filter(
    lambda x: any(v > 0 for v in x))


class TestInequality:
    def test_gini_examples(self):
        assert gini([3, 3, 3]) == 0.0
        assert gini([0, 1]) == pytest.approx(0.5)

    def test_gini_rejects(self):
        with pytest.raises(ValueError):
            gini([0, 0])
        with pytest.raises(ValueError):
            gini([])
        with pytest.raises(ValueError):
            gini([-1, 2])

    @settings(max_examples=150, deadline=None)
    @given(positive_lists, st.floats(1e-3, 1e3))
    def test_gini_pairwise_and_scale(self, x, c):
        g = gini(x)
        assert g == pytest.approx(oracles.gini(x), abs=1e-12)
        assert gini([c * v for v in x]) == pytest.approx(g, abs=1e-12)
        assert 0 <= g < 1

    def test_lorenz_examples(self):
        assert lorenz_curve([2, 2]) == [(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)]
        pts = lorenz_curve([0, 0, 0, 1])
        assert [y for x, y in pts if x <= 0.75] == [0, 0, 0, 0]
        assert pts[-1] == (1.0, 1.0)

    @settings(max_examples=150, deadline=None)
    @given(positive_lists)
    def test_lorenz_shape(self, x):
        pts = np.array(lorenz_curve(x))
        assert tuple(pts[0]) == (0, 0) and tuple(pts[-1]) == (1, 1)
        assert np.all(np.diff(pts[:, 0]) >= 0) and np.all(np.diff(pts[:, 1]) >= -1e-15)
        assert np.all(pts[:, 1] <= pts[:, 0] + 1e-12)
        slopes = np.diff(pts[:, 1]) / np.diff(pts[:, 0])
        assert np.all(np.diff(slopes) >= -1e-9)

    def test_top_share(self):
        assert top_share([1, 1, 1, 7], 0.25) == pytest.approx(0.7)
        assert top_share([1] * 10, 0.1) == pytest.approx(0.1)


class TestCcdf:
    def test_triangle(self):
        assert degree_ccdf(complete(3)) == [(1.0, 1.0), (2.0, 0.0)]

    def test_star(self):
        pts = dict(degree_ccdf(Graph(5, [(0, i) for i in range(1, 5)])))
        assert pts[0.0] == 1.0 and pts[1.0] == pytest.approx(0.2)

    def test_zero_minimum(self):
        assert ccdf([0, 0, 3]) == [(0.0, pytest.approx(1 / 3)), (3.0, 0.0)]

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.integers(0, 30), min_size=1, max_size=50))
    def test_definition(self, x):
        pts = ccdf(x)
        fr = [f for _, f in pts]
        assert all(a > b for a, b in zip(fr, fr[1:]))
        for d, f in pts:
            assert f == pytest.approx(sum(v > d for v in x) / len(x))

    def test_exact_power_law(self):
        pts = [(d, d ** -2.0) for d in range(1, 50)]
        fit = powerlaw_tail_slope(pts, 1)
        assert fit.slope == pytest.approx(-2, abs=0.01) and not fit.flagged

    def test_exponential_flagged(self):
        pts = [(d, math.exp(-d)) for d in range(1, 30)]
        assert powerlaw_tail_slope(pts, 1).flagged

    def test_constant(self):
        fit = powerlaw_tail_slope([(d, 0.5) for d in range(1, 10)], 1)
        assert fit.slope == pytest.approx(0, abs=1e-12)

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            powerlaw_tail_slope([(1, 0.5), (2, 0.2)], 1)


def record():
    # x and y coauthor p1; z alone on p3; y and z on p4
    papers = [("p1", 2000, ["x", "y"]), ("p2", 2002, ["x"]), ("p3", 2001, ["z"]),
              ("p4", 2003, ["y", "z"]), ("p5", 2003, ["w"])]
    cites = [("p2", "p1"), ("p3", "p2"), ("p5", "p3"), ("p4", "p2")]
    return BiblioRecord(papers, cites)


class TestBiblio:
    def test_divided_credit(self):
        b = BipartiteGraph(2, 1, [(0, 0), (1, 0)])
        assert author_paper_counts(b).tolist() == [0.5, 0.5]
        assert author_paper_counts(b, "non_divided").tolist() == [1, 1]

    def test_record_credit_matches_bipartite(self):
        r = record()
        credit = dict(zip(r.authors, author_paper_counts(r)))
        assert credit == pytest.approx({"w": 1, "x": 1.5, "y": 1.0, "z": 1.5})

    def test_single_year_ratio(self):
        r = BiblioRecord([("a", 2000, ["u"]), ("b", 2000, ["v"]), ("c", 2000, ["w"])])
        (row,) = productivity_by_year(r)
        assert row.papers_per_author == 1.0 and row.credited == 3

    def test_by_year(self):
        rows = productivity_by_year(record(), "non_divided")
        assert [r.year for r in rows] == [2000, 2001, 2002, 2003]
        assert rows[3].papers == 2 and rows[3].authors == 3 and rows[3].credited == 3
        assert overall_papers_per_author(record()) == pytest.approx(5 / 4)

    def test_coauthors_by_year(self):
        assert dict(coauthors_by_year(record()))[2003] == pytest.approx(2 / 3)

    def test_classes(self):
        s = citation_classification(record())
        # p2->p1 share x; p3->p2: z has no tie to x; p5->p3 distant; p4->p2: y coauthored with x
        assert s.classes == ("self", "distant", "distant", "coauthor")
        # delay is a plain year difference, negative when the cited paper is newer
        assert s.delays == (2, -1, 2, 1)
        assert sum(s.counts.values()) == 4
        assert s.mean_delay["distant"] == pytest.approx(0.5)
        assert s.proportions["self"] == pytest.approx(0.25)

    def test_reciprocation_both_directions(self):
        papers = [("a", 2000, ["u"]), ("b", 2001, ["v"]), ("c", 2002, ["u"])]
        s = citation_classification(BiblioRecord(papers, [("b", "a"), ("c", "b")]))
        assert s.reciprocation["distant"] == 1.0

    def test_validation(self):
        with pytest.raises(ValueError):
            BiblioRecord([("a", 2000, ["u"])], [("a", "zz")])
        with pytest.raises(ValueError):
            BiblioRecord([("a", 2000, ["u"])], [("a", "a")])
        with pytest.raises(ValueError):
            BiblioRecord([("a", 1990, ["u"])], year_range=(2000, 2010))
        with pytest.raises(ValueError):
            productivity_by_year(BiblioRecord([]))

    @settings(max_examples=50, deadline=None)
    @given(st.data())
    def test_classes_partition_citations(self, data):
        n = data.draw(st.integers(2, 8))
        authors = st.lists(st.sampled_from("abcdef"), min_size=1, max_size=3, unique=True)
        papers = [(str(i), data.draw(st.integers(2000, 2005)), data.draw(authors)) for i in range(n)]
        pairs = data.draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)),
                                   max_size=15))
        cites = [(str(a), str(b)) for a, b in pairs if a != b]
        assume(cites)
        s = citation_classification(BiblioRecord(papers, cites))
        assert sum(s.counts.values()) == len(cites)
        assert sum(s.proportions.values()) == pytest.approx(1.0)
