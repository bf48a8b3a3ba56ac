"""Generator post-conditions, structural invariants, and edge-list I/O."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import rumorwalks as rw
from rumorwalks import Graph, InvalidParameterError, LoadError


def check_invariants(g: Graph):
    """Symmetry, simplicity, connectivity, and the handshake identity."""
    assert g.n >= 1
    degs = np.zeros(g.n, dtype=int)
    seen = set()
    for u in range(g.n):
        nbrs = g.neighbors(u)
        assert list(nbrs) == sorted(set(int(v) for v in nbrs)), "sorted, no dups"
        assert u not in set(int(v) for v in nbrs), "self-loop"
        degs[u] = len(nbrs)
        for v in nbrs:
            assert u in set(int(x) for x in g.neighbors(int(v))), "symmetry"
            seen.add((min(u, int(v)), max(u, int(v))))
    assert len(seen) == g.m
    assert degs.sum() == 2 * g.m
    assert np.array_equal(degs, g.degrees)
    assert g.is_connected()


class TestStar:
    def test_basic(self):
        g = rw.generate_star(4)
        assert (g.n, g.m) == (5, 4)
        assert g.degree(0) == 4
        assert all(g.degree(v) == 1 for v in range(1, 5))
        check_invariants(g)

    def test_single_leaf_is_k2(self):
        g = rw.generate_star(1)
        assert (g.n, g.m) == (2, 1)
        assert g == rw.generate_complete(2)

    def test_handshake_large(self):
        g = rw.generate_star(1000)
        assert int(g.degrees.sum()) == 2000

    def test_zero_leaves_rejected(self):
        with pytest.raises(InvalidParameterError):
            rw.generate_star(0)


class TestDoubleStar:
    def test_centers(self):
        g = rw.generate_double_star(8)
        assert g.m == 7
        assert g.degree(0) == 4 and g.degree(1) == 4
        assert 1 in g.neighbors(0)
        check_invariants(g)

    def test_smallest_is_path(self):
        g = rw.generate_double_star(4)
        assert sorted(g.degrees) == [1, 1, 2, 2]

    def test_tree_edge_count(self):
        assert rw.generate_double_star(2 ** 10).m == 1023

    @pytest.mark.parametrize("n", [7, 2, 0, 3])
    def test_bad_sizes(self, n):
        with pytest.raises(InvalidParameterError):
            rw.generate_double_star(n)


class TestHeavyBinaryTree:
    def test_n7(self):
        g = rw.generate_heavy_binary_tree(7)
        assert (g.n, g.m) == (7, 12)  # 6 tree edges + C(4,2) clique edges
        check_invariants(g)

    def test_n3_triangle(self):
        g = rw.generate_heavy_binary_tree(3)
        assert (g.n, g.m) == (3, 3)

    def test_edge_formula_large(self):
        n = 2 ** 10 - 1
        g = rw.generate_heavy_binary_tree(n)
        leaves = (n + 1) // 2
        assert g.m == (n - 1) + leaves * (leaves - 1) // 2

    def test_leaves_form_clique(self):
        g = rw.generate_heavy_binary_tree(15)
        first_leaf = 7
        for u in range(first_leaf, 15):
            nbrs = set(int(v) for v in g.neighbors(u))
            assert set(range(first_leaf, 15)) - {u} <= nbrs

    def test_heap_parent_edges(self):
        g = rw.generate_heavy_binary_tree(15)
        for v in range(1, 15):
            assert (v - 1) // 2 in g.neighbors(v)

    @pytest.mark.parametrize("n", [1, 2, 4, 6, 1022])
    def test_bad_sizes(self, n):
        with pytest.raises(InvalidParameterError):
            rw.generate_heavy_binary_tree(n)


class TestSiameseTrees:
    def test_n7(self):
        g = rw.generate_siamese_trees(7)
        assert g.n == 13
        assert g.m == 24
        assert g.degree(0) == 4
        check_invariants(g)

    def test_n3(self):
        assert rw.generate_siamese_trees(3).n == 5

    def test_vertex_count_large(self):
        assert rw.generate_siamese_trees(2 ** 9 - 1).n == 1021


class TestCycleStarsCliques:
    def test_m3_counts(self):
        g = rw.generate_cycle_stars_cliques(3)
        assert g.n == 3 + 9 + 27
        assert all(g.degree(c) == 3 + 2 for c in range(3))
        check_invariants(g)

    def test_m10_leaf_degree(self):
        g = rw.generate_cycle_stars_cliques(10)
        assert g.n == 1110
        # star leaves sit right after the ring vertices
        assert all(g.degree(10 + j) == 11 for j in range(100))

    def test_too_small(self):
        with pytest.raises(InvalidParameterError):
            rw.generate_cycle_stars_cliques(2)


class TestCompleteAndCycle:
    def test_k3_equals_c3(self):
        assert rw.generate_complete(3) == rw.generate_cycle(3)

    def test_kn_edges(self):
        assert rw.generate_complete(9).m == 36

    def test_cycle_degrees(self):
        g = rw.generate_cycle(11)
        assert all(int(d) == 2 for d in g.degrees)

    def test_bad_sizes(self):
        with pytest.raises(InvalidParameterError):
            rw.generate_complete(1)
        with pytest.raises(InvalidParameterError):
            rw.generate_cycle(2)


class TestCliquePath:
    def test_two_edges_is_path(self):
        g = rw.generate_clique_path(2, 2)
        assert sorted(g.degrees) == [1, 1, 2, 2]
        check_invariants(g)

    def test_path_structure(self):
        g = rw.generate_clique_path(3, 4)
        check_invariants(g)
        # bridge endpoints only: vertex 0 and vertex 11 are in end cliques
        assert g.degree(0) == 3 and g.degree(11) == 3

    @given(k=st.integers(1, 6), d=st.integers(2, 6))
    @settings(max_examples=30, deadline=None)
    def test_connectivity(self, k, d):
        g = rw.generate_clique_path(k, d)
        assert g.n == k * d
        check_invariants(g)

    def test_bad_params(self):
        with pytest.raises(InvalidParameterError):
            rw.generate_clique_path(1, 1)


class TestRandomRegular:
    def test_k4_forced(self):
        g = rw.generate_random_regular(4, 3, seed=5)
        assert g == rw.generate_complete(4)

    def test_n6_d2_is_c6(self):
        # the only connected 2-regular graph on 6 vertices is the 6-cycle
        g = rw.generate_random_regular(6, 2, seed=99)
        assert all(int(d) == 2 for d in g.degrees)
        assert g.is_connected()
        walk = [0, int(g.neighbors(0)[0])]
        while walk[-1] != 0:
            a, b = g.neighbors(walk[-1])
            walk.append(int(b) if int(a) == walk[-2] else int(a))
        assert len(walk) == 7  # closes after visiting all 6 vertices

    def test_degrees_exact_at_scale(self):
        g = rw.generate_random_regular(2 ** 12, 12, seed=1)
        assert all(int(d) == 12 for d in g.degrees)
        assert g.is_connected()

    def test_determinism(self):
        a = rw.generate_random_regular(64, 6, seed=42)
        b = rw.generate_random_regular(64, 6, seed=42)
        c = rw.generate_random_regular(64, 6, seed=43)
        assert a == b
        assert a != c

    def test_infeasible(self):
        with pytest.raises(InvalidParameterError):
            rw.generate_random_regular(5, 3, seed=1)  # odd n*d
        with pytest.raises(InvalidParameterError):
            rw.generate_random_regular(4, 4, seed=1)  # d >= n

    @given(seed=st.integers(0, 10 ** 6))
    @settings(max_examples=20, deadline=None)
    def test_invariants_random_seeds(self, seed):
        g = rw.generate_random_regular(16, 4, seed=seed)
        assert all(int(d) == 4 for d in g.degrees)
        check_invariants(g)


class TestGraphType:
    def test_from_edges_rejects_garbage(self):
        with pytest.raises(InvalidParameterError):
            Graph.from_edges(3, [(0, 0)])
        with pytest.raises(InvalidParameterError):
            Graph.from_edges(3, [(0, 1), (1, 0)])  # duplicate
        with pytest.raises(InvalidParameterError):
            Graph.from_edges(3, [(0, 3)])  # out of range
        with pytest.raises(InvalidParameterError):
            Graph.from_edges(4, [(0, 1), (2, 3)])  # disconnected

    def test_adjacency_view(self):
        g = rw.generate_star(3)
        assert g.adjacency[0] == (1, 2, 3)
        assert g.adjacency[2] == (0,)

    def test_bipartite_detection(self):
        assert rw.generate_star(5).is_bipartite()
        assert rw.generate_cycle(6).is_bipartite()
        assert not rw.generate_cycle(5).is_bipartite()
        assert not rw.generate_heavy_binary_tree(15).is_bipartite()

    def test_is_regular(self):
        assert rw.generate_cycle(7).is_regular
        assert not rw.generate_star(3).is_regular

    def test_edges_canonical_order(self):
        g = rw.generate_double_star(6)
        e = g.edges()
        assert (e[:, 0] < e[:, 1]).all()
        keys = [tuple(row) for row in e.tolist()]
        assert keys == sorted(keys)


class TestEdgeListIO:
    FAMILIES = [
        rw.generate_star(6),
        rw.generate_double_star(8),
        rw.generate_heavy_binary_tree(7),
        rw.generate_siamese_trees(7),
        rw.generate_cycle_stars_cliques(3),
        rw.generate_clique_path(3, 3),
        rw.generate_random_regular(12, 3, seed=2),
    ]

    @pytest.mark.parametrize("g", FAMILIES, ids=lambda g: g.family_tag)
    def test_round_trip(self, g, tmp_path):
        path = tmp_path / "g.el"
        rw.save_edge_list(g, path)
        assert rw.load_edge_list(path) == g

    def test_save_is_byte_stable(self, tmp_path):
        g = rw.generate_random_regular(20, 4, seed=3)
        p1, p2 = tmp_path / "a.el", tmp_path / "b.el"
        rw.save_edge_list(g, p1)
        rw.save_edge_list(g, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_header_format(self, tmp_path):
        path = tmp_path / "s.el"
        rw.save_edge_list(rw.generate_star(4), path)
        lines = path.read_text().splitlines()
        assert lines[0] == "5 4"
        assert lines[1:] == ["0 1", "0 2", "0 3", "0 4"]

    @pytest.mark.parametrize("text,fragment", [
        ("2 1\n0 0\n", "u < v"),
        ("3 2\n0 1\n0 1\n", "duplicate"),
        ("4 2\n0 1\n2 3\n", "connected"),
        ("2 2\n0 1\n", "declares 2 edges"),
        ("2 1\n1 0\n", "u < v"),
        ("x y\n0 1\n", "non-integer"),
        ("2 1\n0 one\n", ":2"),
        ("", "empty"),
    ])
    def test_load_errors(self, tmp_path, text, fragment):
        path = tmp_path / "bad.el"
        path.write_text(text)
        with pytest.raises(LoadError) as err:
            rw.load_edge_list(path)
        assert fragment in str(err.value)

    def test_missing_file(self, tmp_path):
        with pytest.raises(LoadError):
            rw.load_edge_list(tmp_path / "nope.el")
