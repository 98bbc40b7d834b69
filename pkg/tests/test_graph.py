import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from erld.graph import (
    Graph, RegimeParams, SeededSampler, bipartite_subgraph, complete_graph, cycle_graph, degree_stats,
    disjoint_union, format_edge_list, induced_subgraph, is_forest, pair_uniforms, parse_edge_list,
    path_graph, plant_clique, plant_hub, read_edge_list, sample_er, sample_inhomogeneous, star_graph,
    two_core, write_edge_list,
)
from erld.spectral import spectral_radius
from helpers import graphs


class TestGraphType:
    def test_rejects_loops_and_range(self):
        with pytest.raises(ValueError):
            Graph(3, [(1, 1)])
        with pytest.raises(ValueError):
            Graph(3, [(0, 3)])

    def test_multi_edges_collapse(self):
        g = Graph(3, [(0, 1), (1, 0), (0, 1)])
        assert g.num_edges == 1

    @given(graphs())
    def test_degree_index(self, g):
        for v in range(g.n):
            assert g.degree(v) == sum(1 for e in g.edges if v in e)
        assert 2 * g.num_edges == sum(g.degrees)

    def test_components_and_vertices(self):
        g = Graph(7, [(0, 1), (1, 2), (4, 5)])
        assert g.components() == [[0, 1, 2], [4, 5]]
        assert g.vertices() == [0, 1, 2, 4, 5]

    def test_adjacency_matrix_symmetric(self):
        a = cycle_graph(5).adjacency_matrix()
        assert np.array_equal(a, a.T) and a.sum() == 10
        assert cycle_graph(5).to_sparse().toarray().tolist() == a.tolist()

    def test_disjoint_union_relabels(self):
        u = disjoint_union(complete_graph(3), path_graph(2))
        assert u.n == 5 and u.sorted_edges() == [(0, 1), (0, 2), (1, 2), (3, 4)]


class TestRegimeParams:
    def test_alpha(self):
        prm = RegimeParams(1000, 0.01)
        assert prm.alpha == pytest.approx(math.log(100) / math.log(1000), rel=1e-12)
        assert prm.alpha == pytest.approx(2 / 3, rel=1e-12)

    @pytest.mark.parametrize("kw", [dict(p=0.0), dict(p=1.0), dict(delta=0), dict(t=1), dict(eps=0.25), dict(eta=0)])
    def test_validation(self, kw):
        base = dict(n=100, p=0.1)
        base.update(kw)
        with pytest.raises(ValueError):
            RegimeParams(**base)

    def test_varpi_branches(self):
        lo = RegimeParams(10**4, 1e-4, eta=0.1)  # np = 1 below (log n)^{0.95}
        lg = math.log(10**4)
        assert lo.varpi == pytest.approx(1.0 * math.sqrt(lg / math.log(lg)))
        hi = RegimeParams(10**4, 0.01, eta=0.1)  # np = 100
        assert hi.varpi == pytest.approx(100**1.1)

    def test_varpi_seam_uses_first_branch(self):
        n, eta = 10**6, 0.2
        lg = math.log(n)
        p = lg ** (1 - eta / 2) / n
        prm = RegimeParams(n, p, eta=eta)
        # float rounding may put np a hair either side; pin it to the seam exactly
        if prm.np <= lg ** (1 - eta / 2):
            assert prm.varpi == pytest.approx(prm.np * math.sqrt(lg / math.log(lg)))

    def test_low_cutoff(self):
        assert RegimeParams(100, 0.1, delta=0.5, eps=0.1).low_degree_cutoff() == pytest.approx(1.45 * 10)


class TestSampling:
    def test_degenerate_p(self):
        assert sample_er(5, 0.0, 3).num_edges == 0
        assert sample_er(5, 1.0, 3) == complete_graph(5)

    def test_invalid_p(self):
        with pytest.raises(ValueError):
            sample_er(5, 1.5, 0)
        with pytest.raises(ValueError):
            sample_er(5, -0.1, 0)

    def test_reproducible(self):
        assert sample_er(60, 0.1, 42) == sample_er(60, 0.1, 42)
        assert sample_er(60, 0.1, 42) != sample_er(60, 0.1, 43)

    @given(st.integers(2, 30), st.floats(0, 1), st.floats(0, 1), st.integers(0, 2**32))
    @settings(max_examples=60)
    def test_monotone_coupling(self, n, p1, p2, seed):
        p1, p2 = sorted((p1, p2))
        assert sample_er(n, p1, seed).is_subgraph_of(sample_er(n, p2, seed))

    def test_mean_edge_count(self):
        # 10^4 draws of Bin(4950, 0.1): the sample mean has sd sqrt(445.5)/100
        counts = np.array([sample_er(100, 0.1, s).num_edges for s in range(10**4)])
        assert abs(counts.mean() - 495) <= 3 * math.sqrt(4950 * 0.1 * 0.9) / math.sqrt(len(counts))

    def test_sampler_position(self):
        s = SeededSampler(5)
        s.uniform(7)
        assert s.position == 7
        assert len(pair_uniforms(6, 1)) == 15

    def test_inhomogeneous_matches_er(self):
        probs = np.full(10, 0.3)
        g, mask = sample_inhomogeneous(5, probs, 9)
        assert g == sample_er(5, 0.3, 9) and mask.sum() == g.num_edges


class TestPlanting:
    def test_clique_on_empty(self):
        assert plant_clique(Graph(5), 3) == Graph(5, [(0, 1), (0, 2), (1, 2)])

    def test_clique_m1_noop(self):
        g = sample_er(8, 0.3, 1)
        assert plant_clique(g, 1) == g

    def test_clique_range(self):
        with pytest.raises(ValueError):
            plant_clique(Graph(4), 5)
        with pytest.raises(ValueError):
            plant_clique(Graph(4), 0)

    @given(st.integers(2, 12), st.integers(0, 1000))
    @settings(max_examples=30)
    def test_clique_forces_lambda(self, m, seed):
        g = plant_clique(sample_er(14, 0.2, seed), m)
        assert spectral_radius(g) >= m - 1 - 1e-8

    def test_hub_saturates(self):
        assert plant_hub(Graph(10), 0, 9, 0) == star_graph(9)

    def test_hub_unchanged_when_satisfied(self):
        g = star_graph(5, 8)
        assert plant_hub(g, 0, 3, 0) == g

    def test_hub_star_eigenvalue(self):
        g = plant_hub(Graph(50), 0, 16, 7)
        assert g.degree(0) == 16 and g.num_edges == 16
        assert spectral_radius(g) == pytest.approx(4.0, abs=1e-9)

    def test_hub_errors(self):
        with pytest.raises(ValueError):
            plant_hub(Graph(5), 0, 5, 0)

    def test_hub_touches_only_v(self):
        g = sample_er(20, 0.2, 3)
        h = plant_hub(g, 4, 15, 3)
        assert all(4 in e for e in h.edge_difference(g).edges)
        assert h.degree(4) == 15


class TestSurgery:
    def test_two_core_tree_empty(self):
        assert two_core(path_graph(6)).num_edges == 0
        assert two_core(star_graph(4)).num_edges == 0

    def test_two_core_pendant(self):
        g = cycle_graph(5, 6).with_edges([(0, 5)])
        assert two_core(g) == cycle_graph(5, 6)

    def test_two_core_triangles_path(self):
        tri = [(0, 1), (1, 2), (0, 2), (5, 6), (6, 7), (5, 7)]
        g = Graph(8, tri + [(2, 3), (3, 4), (4, 5)])
        # interior path vertices have degree 2, so the bridge path survives peeling
        assert two_core(g) == g
        # a pendant path hanging off one triangle is peeled away
        g2 = Graph(8, tri[:3] + [(2, 3), (3, 4)])
        assert two_core(g2) == Graph(8, tri[:3])

    @given(graphs(max_n=10))
    def test_two_core_properties(self, g):
        c = two_core(g)
        assert c.is_subgraph_of(g)
        assert all(c.degree(v) >= 2 for v in c.vertices())
        assert two_core(c) == c
        # maximality: nothing outside the core has 2 core-or-self neighbours left
        assert is_forest(g) == (c.num_edges == 0)

    def test_induced(self):
        assert induced_subgraph(complete_graph(4), [0, 1, 2]) == complete_graph(3, 4)
        assert induced_subgraph(cycle_graph(6), []).num_edges == 0
        assert induced_subgraph(cycle_graph(6), [0, 1, 3, 4]).sorted_edges() == [(0, 1), (3, 4)]
        with pytest.raises(ValueError):
            induced_subgraph(cycle_graph(6), [6])

    def test_bipartite(self):
        g = bipartite_subgraph(complete_graph(4), [0, 1], [2, 3])
        assert g.sorted_edges() == [(0, 2), (0, 3), (1, 2), (1, 3)]
        assert bipartite_subgraph(complete_graph(4), [], [0, 1]).num_edges == 0
        assert bipartite_subgraph(star_graph(5), [0], range(1, 6)) == star_graph(5)
        with pytest.raises(ValueError):
            bipartite_subgraph(complete_graph(4), [0, 1], [1, 2])


class TestDegreeStats:
    def test_examples(self):
        s = degree_stats(cycle_graph(7))
        assert (s.max_degree, s.min_degree) == (2, 2)
        s = degree_stats(star_graph(7))
        assert (s.max_degree, s.min_degree) == (7, 1) and s.histogram == {1: 7, 7: 1}
        s = degree_stats(complete_graph(4).without_edges([(0, 1)]))
        assert (s.max_degree, s.min_degree) == (3, 2)

    def test_empty_flagged(self):
        s = degree_stats(Graph(4))
        assert s.max_degree == 0 and s.min_degree is None


class TestEdgeListIO:
    def test_format_is_one_based(self):
        assert format_edge_list(path_graph(3)) == "3 2\n1 2\n2 3\n"

    @given(graphs())
    def test_round_trip(self, g):
        assert parse_edge_list(format_edge_list(g)) == g

    def test_file_round_trip(self, tmp_path):
        g = sample_er(12, 0.3, 2)
        write_edge_list(g, tmp_path / "g.txt")
        assert read_edge_list(tmp_path / "g.txt") == g

    @pytest.mark.parametrize("text", ["", "3\n", "3 2\n1 2\n", "3 2\n1 2\n1 2\n", "3 1\n1 4\n"])
    def test_malformed(self, text):
        with pytest.raises(ValueError):
            parse_edge_list(text)
