import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from salvosim.network import (
    DisconnectedGraphError,
    SwitchingSchedule,
    Topology,
    algebraic_connectivity,
    incidence,
    is_connected,
    laplacian,
    laplacian_spectrum,
    neighborhood,
    spectral_summary,
)

CYCLE5 = Topology.from_edge_list(5, [[1, 2], [2, 3], [3, 4], [4, 5], [5, 1]])
# the three published switching topologies
GRAPH_A = Topology.from_edge_list(5, [[1, 3], [1, 4], [2, 5], [3, 4], [3, 5]])
GRAPH_B = Topology.from_edge_list(5, [[1, 2], [1, 3], [1, 5], [2, 4], [2, 5], [3, 5]])
FAMILY = (GRAPH_A, GRAPH_B, CYCLE5)


def random_graph(draw, connected=True):
    n = draw(st.integers(2, 8))
    all_edges = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    chosen = draw(st.sets(st.sampled_from(all_edges), min_size=0, max_size=len(all_edges)))
    if connected:
        # staple a random spanning tree on top
        perm = draw(st.permutations(list(range(1, n + 1))))
        for a, b in zip(perm, perm[1:]):
            chosen.add((min(a, b), max(a, b)))
    return Topology.from_edge_list(n, sorted(chosen))


class TestLaplacian:
    def test_cycle_structure(self):
        lap = laplacian(CYCLE5)
        assert np.allclose(np.diag(lap), 2.0)
        for i, j in CYCLE5.edges:
            assert lap[i - 1, j - 1] == -1.0
        assert np.allclose(lap.sum(axis=1), 0.0)

    def test_single_edge(self):
        g = Topology.from_edge_list(2, [[1, 2]])
        assert np.array_equal(laplacian(g), np.array([[1.0, -1.0], [-1.0, 1.0]]))

    def test_published_topology_degrees(self):
        assert np.allclose(np.diag(laplacian(GRAPH_A)), [2, 1, 3, 2, 2])

    @given(data=st.data())
    def test_positive_semidefinite(self, data):
        g = random_graph(data.draw, connected=False)
        lap = laplacian(g)
        x = np.array(
            data.draw(
                st.lists(st.floats(-10, 10), min_size=g.n, max_size=g.n)
            )
        )
        assert x @ lap @ x >= -1e-9

    @given(data=st.data())
    def test_ones_in_null_space(self, data):
        g = random_graph(data.draw, connected=False)
        assert np.max(np.abs(laplacian(g) @ np.ones(g.n))) <= 1e-12

    @given(data=st.data())
    def test_connectivity_quadratic_form_bound(self, data):
        # x^T L x >= lambda2 ||x - mean(x) 1||^2 for any x
        g = random_graph(data.draw, connected=True)
        lap = laplacian(g)
        lam2 = algebraic_connectivity(g)
        x = np.array(
            data.draw(st.lists(st.floats(-5, 5), min_size=g.n, max_size=g.n))
        )
        centered = x - x.mean()
        assert x @ lap @ x >= lam2 * centered @ centered - 1e-8


class TestIncidence:
    def test_single_edge_column(self):
        g = Topology.from_edge_list(2, [[1, 2]])
        assert np.array_equal(incidence(g), np.array([[1.0], [-1.0]]))

    @given(data=st.data())
    def test_gram_product_is_laplacian(self, data):
        g = random_graph(data.draw, connected=False)
        f = incidence(g)
        assert np.allclose(f @ f.T, laplacian(g))

    def test_cycle_eigenvalues_match_characteristic_oracle(self):
        # C5 Laplacian spectrum is 2 - 2 cos(2 pi k / 5)
        expected = sorted(2.0 - 2.0 * math.cos(2.0 * math.pi * k / 5.0) for k in range(5))
        f = incidence(CYCLE5)
        got = np.sort(np.linalg.eigvalsh(f @ f.T))
        assert np.allclose(got, expected, atol=1e-9)
        assert got[1] == pytest.approx(1.382, abs=5e-4)
        assert got[3] == pytest.approx(3.618, abs=5e-4)


class TestAlgebraicConnectivity:
    def test_published_cycle_value(self):
        assert algebraic_connectivity(CYCLE5) == pytest.approx(1.3820, abs=1e-4)

    def test_complete_graph(self):
        k5 = Topology.from_edge_list(
            5, [(i, j) for i in range(1, 6) for j in range(i + 1, 6)]
        )
        assert algebraic_connectivity(k5) == pytest.approx(5.0, abs=1e-9)

    def test_published_family_minimum(self):
        lam = min(algebraic_connectivity(g) for g in FAMILY)
        assert lam == pytest.approx(0.5188, abs=1e-4)

    def test_disconnected_raises(self):
        g = Topology.from_edge_list(4, [[1, 2], [3, 4]])
        with pytest.raises(DisconnectedGraphError):
            algebraic_connectivity(g)

    @given(data=st.data())
    @settings(max_examples=30)
    def test_jacobi_matches_library_eigensolver(self, data):
        g = random_graph(data.draw, connected=True)
        ours = laplacian_spectrum(g)
        ref = np.linalg.eigvalsh(laplacian(g))
        assert np.allclose(ours, ref, atol=1e-9)
        assert algebraic_connectivity(g) == pytest.approx(ref[1], rel=1e-9, abs=1e-9)

    @given(data=st.data())
    def test_connectedness_matches_bfs(self, data):
        g = random_graph(data.draw, connected=False)
        spectral = np.linalg.eigvalsh(laplacian(g))[1] > 1e-9 if g.n > 1 else True
        assert is_connected(g) == spectral


class TestNeighborhood:
    def test_cycle_vertex(self):
        assert neighborhood(CYCLE5, 1) == {2, 5}

    def test_published_topology_b_vertex_one(self):
        assert neighborhood(GRAPH_B, 1) == {2, 3, 5}

    def test_edgeless(self):
        g = Topology.from_edge_list(3, [])
        assert neighborhood(g, 2) == frozenset()

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            neighborhood(CYCLE5, 6)


class TestSwitchingSchedule:
    def test_constant_signal(self):
        s = SwitchingSchedule.fixed(CYCLE5)
        for t in (0.0, 1.0, 1e3):
            assert s.active_graph(t) is CYCLE5

    def test_right_continuous_at_switch(self):
        s = SwitchingSchedule(
            graphs=FAMILY, segments=((0.0, 1), (2.0, 2), (4.0, 3))
        )
        assert s.active_index(2.0) == 2
        assert s.active_index(4.0) == 3
        assert s.active_index(1.999999) == 1

    def test_random_signal_respects_min_dwell(self):
        s = SwitchingSchedule.random(FAMILY, 0.5, 1.5, 40.0, seed=7)
        starts = [t for t, _ in s.segments]
        dwells = np.diff(starts)
        assert np.all(dwells >= 0.5 - 1e-12)
        assert np.all(dwells <= 1.5 + 1e-12)
        assert starts[0] == 0.0
        # never repeats the active graph across a switch
        idx = [i for _, i in s.segments]
        assert all(a != b for a, b in zip(idx, idx[1:]))

    def test_random_signal_deterministic_per_seed(self):
        a = SwitchingSchedule.random(FAMILY, 0.5, 1.5, 40.0, seed=3)
        b = SwitchingSchedule.random(FAMILY, 0.5, 1.5, 40.0, seed=3)
        assert a.segments == b.segments

    def test_disconnected_member_rejected(self):
        bad = Topology.from_edge_list(5, [[1, 2], [3, 4]])
        with pytest.raises(DisconnectedGraphError):
            SwitchingSchedule(graphs=(bad,), segments=((0.0, 1),))

    def test_spectral_summary_of_family(self):
        s = SwitchingSchedule(graphs=FAMILY, segments=((0.0, 1),))
        summ = spectral_summary(s)
        assert summ.min_edges_family == 5
        assert summ.min_lambda2_family == pytest.approx(0.5188, abs=1e-4)


class TestTopologyValidation:
    def test_self_loop_rejected(self):
        with pytest.raises(ValueError):
            Topology.from_edge_list(3, [[1, 1]])

    def test_duplicate_rejected(self):
        with pytest.raises(ValueError):
            Topology.from_edge_list(3, [[1, 2], [2, 1]])

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            Topology.from_edge_list(3, [[1, 4]])
