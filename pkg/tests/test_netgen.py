import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from overload_cascade.errors import ConfigError, EdgeListError
from overload_cascade.netgen import (
    Network,
    degree_stats,
    gen_ba,
    gen_er,
    giant_component,
    load_edge_list,
    poisson_degree_stats,
    save_edge_list,
)

from oracles import bfs_giant, degree_counts


def assert_simple(net):
    adj = net.adjacency
    for v, nb in enumerate(adj):
        assert v not in nb
        assert len(set(nb)) == len(nb)
        for w in nb:
            assert 0 <= w < net.node_count
            assert v in adj[w]


def k4():
    return Network.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])


def path3():
    return Network.from_edges(3, [(0, 1), (1, 2)])


class TestER:
    def test_two_nodes_forced_edge(self):
        net = gen_er(2, 1.0, 0)
        assert net.edges().tolist() == [[0, 1]]

    @pytest.mark.parametrize("n,k", [(1, 0.5), (10, 9), (10, 12), (10, 0)])
    def test_rejects(self, n, k):
        with pytest.raises(ConfigError):
            gen_er(n, k, 0)

    def test_mean_degree_at_paper_scale(self):
        st_ = degree_stats(gen_er(5000, 10, 42))
        assert 9.5 <= st_.mean_degree <= 10.5

    def test_deterministic(self):
        a, b = gen_er(500, 6, 11), gen_er(500, 6, 11)
        assert np.array_equal(a.edges(), b.edges())
        assert not np.array_equal(a.edges(), gen_er(500, 6, 12).edges())

    def test_edge_probability(self):
        # mean edge count over seeds matches p * C(n, 2)
        n, k = 300, 4.0
        counts = [gen_er(n, k, s).edge_count for s in range(40)]
        expected = k / (n - 1) * n * (n - 1) / 2
        sd = np.sqrt(expected) / np.sqrt(len(counts))
        assert abs(np.mean(counts) - expected) < 5 * sd

    @settings(max_examples=40, deadline=None)
    @given(st.integers(3, 80), st.floats(0.1, 1.0), st.integers(0, 2**63))
    def test_simple_graph(self, n, frac, seed):
        net = gen_er(n, frac * (n - 1) * 0.99, seed)
        assert_simple(net)


class TestBA:
    def test_k4(self):
        net = gen_ba(4, 3, 5)
        assert net.edge_count == 6
        assert degree_stats(net).p_k[3] == 1.0

    def test_mean_degree(self):
        net = gen_ba(5000, 5, 7)
        n_edges = 15 + (5000 - 5 - 1) * 5
        assert net.edge_count == n_edges
        assert degree_stats(net).mean_degree == pytest.approx(2 * n_edges / 5000, abs=1e-12)
        assert 9.9 <= degree_stats(net).mean_degree <= 10.0

    @pytest.mark.parametrize("n,m", [(5, 5), (5, 0), (3, 7)])
    def test_rejects(self, n, m):
        with pytest.raises(ConfigError):
            gen_ba(n, m, 0)

    def test_deterministic(self):
        assert np.array_equal(gen_ba(400, 3, 1).edges(), gen_ba(400, 3, 1).edges())

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 60), st.data())
    def test_edge_count_and_simple(self, n, data):
        m = data.draw(st.integers(1, n - 1))
        net = gen_ba(n, m, data.draw(st.integers(0, 2**32)))
        assert net.edge_count == m * (m + 1) // 2 + (n - m - 1) * m
        assert_simple(net)
        size, _ = giant_component(net)
        assert size == n


class TestDegreeStats:
    def test_k4(self):
        s = degree_stats(k4())
        assert s.p_k[3] == 1.0
        assert s.mean_degree == 3.0 and s.second_moment == 9.0

    def test_single_edge(self):
        s = degree_stats(Network.from_edges(2, [(0, 1)]))
        assert s.p_k[1] == 1.0 and s.mean_degree == 1.0

    def test_star(self):
        s = degree_stats(Network.from_edges(5, [(0, i) for i in range(1, 5)]))
        assert s.p_k[1] == pytest.approx(0.8, abs=1e-15)
        assert s.p_k[4] == pytest.approx(0.2, abs=1e-15)
        assert s.mean_degree == pytest.approx(1.6, abs=1e-15)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 200), st.floats(0.2, 8), st.integers(0, 2**32))
    def test_invariants(self, n, k, seed):
        net = gen_er(n, min(k, (n - 1) * 0.9), seed)
        s = degree_stats(net)
        assert abs(s.p_k.sum() - 1) < 1e-12
        assert abs(s.mean_degree - np.arange(s.k_max + 1) @ s.p_k) < 1e-12
        assert abs(s.mean_degree - 2 * net.edge_count / n) < 1e-12
        counts = degree_counts(net.adjacency)
        for k_, c in counts.items():
            assert s.p_k[k_] == pytest.approx(c / n, abs=1e-15)

    def test_poisson(self):
        s = poisson_degree_stats(10)
        assert abs(s.p_k.sum() - 1) < 1e-12
        assert s.mean_degree == pytest.approx(10, abs=1e-9)
        assert s.excess_degree_mean == pytest.approx(10, abs=1e-8)


class TestGiantComponent:
    def test_path_all_alive(self):
        assert giant_component(path3(), np.ones(3, bool))[0] == 3

    def test_path_middle_dead(self):
        size, member = giant_component(path3(), np.array([True, False, True]))
        assert size == 1
        assert member[1] == -1 and member[0] != member[2]

    def test_none_alive(self):
        assert giant_component(path3(), np.zeros(3, bool))[0] == 0

    def test_mask_length_checked(self):
        with pytest.raises(ValueError):
            giant_component(path3(), np.ones(4, bool))

    @settings(max_examples=200, deadline=None)
    @given(st.data())
    def test_matches_bfs(self, data):
        n = 10
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        chosen = data.draw(st.lists(st.sampled_from(pairs), unique=True, max_size=20))
        alive = np.array(data.draw(st.lists(st.booleans(), min_size=n, max_size=n)))
        net = Network.from_edges(n, chosen)
        assert giant_component(net, alive)[0] == bfs_giant(net.adjacency, alive)


class TestEdgeList:
    def test_roundtrip(self, tmp_path):
        p = tmp_path / "k4.txt"
        save_edge_list(k4(), p)
        assert load_edge_list(p).adjacency == k4().adjacency

    def test_roundtrip_keeps_isolated_nodes(self, tmp_path):
        net = Network.from_edges(6, [(0, 1), (2, 3)])
        save_edge_list(net, tmp_path / "g.txt")
        assert load_edge_list(tmp_path / "g.txt").node_count == 6

    def test_self_loop(self, tmp_path):
        (tmp_path / "f").write_text("0 0\n")
        with pytest.raises(EdgeListError, match="self-loop"):
            load_edge_list(tmp_path / "f")

    def test_duplicate(self, tmp_path):
        (tmp_path / "f").write_text("0 1\n1 0\n")
        with pytest.raises(EdgeListError, match="duplicate") as exc:
            load_edge_list(tmp_path / "f")
        assert exc.value.lineno == 2

    def test_comments_and_parse_error(self, tmp_path):
        (tmp_path / "f").write_text("# a graph\n0 1  # first\n\n1 2\n")
        assert load_edge_list(tmp_path / "f").edge_count == 2
        (tmp_path / "g").write_text("0 1\n1 x\n")
        with pytest.raises(EdgeListError, match="line 2"):
            load_edge_list(tmp_path / "g")
        (tmp_path / "h").write_text("0 1 2\n")
        with pytest.raises(EdgeListError, match="line 1"):
            load_edge_list(tmp_path / "h")


def test_network_is_read_only():
    net = k4()
    with pytest.raises(ValueError):
        net.indices[0] = 3
