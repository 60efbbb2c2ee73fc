import pytest
from hypothesis import given, settings, strategies as st

from pillarkit.errors import GraphParseError, PreconditionError
from pillarkit.generators import (cycle_graph, hypercube, path_graph, prism,
                                  random_bipartite, random_regular,
                                  subdivided_prism, subdivided_prism_rungs)
from pillarkit.graph import (Graph, ball, induced_degree, induced_subgraph,
                             largest_component, load_graph, parity, save_graph)

from util import all_simple_path_lengths, random_connected_graph

class TestLoadGraph:
    def test_path_with_bipartition(self):
        g = load_graph("0 1\n1 2")
        assert g.n == 3 and g.m == 2
        assert g.side is not None
        # {0,2} on one side, {1} on the other
        assert g.side[0] == g.side[2] != g.side[1]

    def test_triangle_not_bipartite(self):
        g = load_graph("0 1\n1 2\n2 0")
        assert g.side is None

    def test_duplicate_edges_collapse(self):
        assert load_graph("0 1\n0 1") == load_graph("0 1")

    def test_self_loop_rejected(self):
        with pytest.raises(GraphParseError):
            load_graph("0 1\n2 2")

    def test_malformed_line_numbered(self):
        with pytest.raises(GraphParseError) as err:
            load_graph("0 1\n1 x")
        assert err.value.line_no == 2

    def test_comments_and_blank_lines(self):
        g = load_graph("# header\n0 1\n\n1 2  # trailing\n")
        assert g.m == 2

    def test_isolated_vertex_line(self):
        g = load_graph("0 1\n5")
        assert g.n == 6 and g.degree(5) == 0

    def test_empty_text(self):
        g = load_graph("")
        assert g.n == 0 and g.m == 0


class TestRoundTrip:
    @given(st.integers(0, 400))
    @settings(max_examples=40, deadline=None)
    def test_random_graph_round_trip(self, seed):
        g = random_connected_graph(2 + seed % 11, seed % 7, seed)
        assert load_graph(save_graph(g)) == g

    def test_isolated_vertices_survive(self):
        g = Graph(4, [(0, 2)])
        assert load_graph(save_graph(g)) == g

    def test_byte_exact(self):
        g = random_regular(30, 3, seed=1)
        assert save_graph(load_graph(save_graph(g))) == save_graph(g)


class TestBall:
    def test_path_radius_two(self):
        g = path_graph(4)
        assert ball(g, {0}, 2) == {0, 1, 2}

    def test_avoid_disconnects(self):
        g = path_graph(4)
        assert ball(g, {0}, 3, {1}) == {0}

    def test_q3_radius_three_covers(self):
        g = hypercube(3)
        for v in range(8):
            assert ball(g, {v}, 3) == set(range(8))

    def test_empty_seed(self):
        assert ball(path_graph(3), set(), 2) == set()

    def test_seed_in_avoid_rejected(self):
        with pytest.raises(PreconditionError):
            ball(path_graph(3), {0}, 1, {0})

    @given(st.integers(0, 500), st.integers(0, 5))
    @settings(max_examples=40, deadline=None)
    def test_monotone_in_radius(self, seed, r):
        g = random_connected_graph(3 + seed % 10, seed % 5, seed)
        avoid = {v for v in range(g.n) if v % 3 == 2 and v != 0}
        assert ball(g, {0}, r, avoid) <= ball(g, {0}, r + 1, avoid)

    @given(st.integers(0, 500))
    @settings(max_examples=30, deadline=None)
    def test_stabilizes_at_reachable_set(self, seed):
        g = random_connected_graph(3 + seed % 10, seed % 5, seed)
        avoid = {v for v in range(1, g.n) if v % 4 == 1}
        full = ball(g, {0}, g.n)if 0 not in avoid else set()
        if 0 not in avoid:
            full = ball(g, {0}, g.n, avoid)
            assert ball(g, {0}, g.n + 3, avoid) == full


class TestParity:
    def test_edge(self):
        assert parity(load_graph("0 1"), 0, 1) == 1

    def test_c4_antipodal(self):
        assert parity(cycle_graph(4), 0, 2) == 0

    def test_q3_antipodal_matches_all_paths(self):
        # oracle: enumerate every simple path between antipodes
        g = hypercube(3)
        lengths = all_simple_path_lengths(g, 0, 7, 7)
        assert lengths == {3, 5, 7}          # frozen from the enumeration
        assert {l % 2 for l in lengths} == {1}
        assert parity(g, 0, 7) == 1

    def test_not_bipartite_errors(self):
        with pytest.raises(PreconditionError):
            parity(cycle_graph(3), 0, 1)

    def test_disconnected_errors(self):
        g = load_graph("0 1\n2 3")
        with pytest.raises(PreconditionError):
            parity(g, 0, 3)

    @given(st.integers(0, 300))
    @settings(max_examples=25, deadline=None)
    def test_matches_bfs_path_parity(self, seed):
        g = random_connected_graph(3 + seed % 8, 0, seed)  # trees are bipartite
        lengths = all_simple_path_lengths(g, 0, g.n - 1, g.n)
        assert all(l % 2 == parity(g, 0, g.n - 1) for l in lengths)


class TestGenerators:
    def test_prism4_is_q3(self):
        g = prism(4)
        assert (g.n, g.m) == (8, 12)
        from util import nx_has_q3
        assert nx_has_q3(g)

    def test_subdivided_prism_identity(self):
        assert subdivided_prism(4, 1) == prism(4)

    def test_subdivided_prism_counts(self):
        g = subdivided_prism(6, 3)
        assert g.n == 6 + 6 + 6 * 2 == 24
        for rung in subdivided_prism_rungs(6, 3):
            assert len(rung) == 4  # length-3 paths

    def test_random_regular_is_regular_and_seeded(self):
        g = random_regular(100, 4, seed=9)
        assert all(g.degree(v) == 4 for v in range(100))
        assert g == random_regular(100, 4, seed=9)
        assert g != random_regular(100, 4, seed=10)

    def test_random_regular_odd_product_rejected(self):
        with pytest.raises(PreconditionError):
            random_regular(5, 3, seed=0)

    def test_random_bipartite_sides(self):
        g = random_bipartite(4, 6, 0.5, seed=3)
        for u, v in g.edges():
            assert (u < 4) != (v < 4)

    def test_path_cycle_ranges(self):
        with pytest.raises(PreconditionError):
            cycle_graph(2)
        assert path_graph(1).n == 1


class TestInducedDegree:
    def test_star_center(self):
        g = Graph(6, [(0, i) for i in range(1, 6)])
        assert induced_degree(g, 0, {1, 2, 3}) == 3

    def test_isolated(self):
        g = Graph(3, [(0, 1)])
        assert induced_degree(g, 2, {0, 1}) == 0

    def test_q3_own_neighborhood(self):
        g = hypercube(3)
        assert induced_degree(g, 0, set(g.neighbors(0))) == 3


class TestSubgraphs:
    def test_induced_labels_map_back(self):
        g = cycle_graph(6)
        h = induced_subgraph(g, [1, 2, 3])
        assert h.n == 3 and h.m == 2
        assert h.original_ids(range(3)) == [1, 2, 3]

    def test_labels_compose(self):
        g = cycle_graph(8)
        h = induced_subgraph(g, [2, 3, 4, 5])
        hh = induced_subgraph(h, [1, 2])
        assert hh.original_ids(range(2)) == [3, 4]

    def test_largest_component(self):
        g = load_graph("0 1\n1 2\n3 4")
        assert largest_component(g).n == 3
