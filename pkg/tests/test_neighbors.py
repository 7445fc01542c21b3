"""Grid index tests with the brute-force pairwise scan as the oracle."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kiloswarm.neighbors import (
    BRUTE_FORCE_MAX_BOTS,
    BruteNeighbors,
    GridNeighbors,
    brute_force_range,
    build_index,
    choose_strategy,
    query_range,
)


class TestBuildIndex:
    def test_empty_swarm(self):
        idx = build_index(np.empty((0, 2)), 100.0)
        assert idx.buckets == {}

    def test_two_robots_bucketed(self):
        pos = np.array([[0.0, 0.0], [99.0, 0.0]])
        idx = build_index(pos, 100.0)
        all_ids = sorted(i for ids in idx.buckets.values() for i in ids)
        assert all_ids == [0, 1]
        assert query_range(idx, 0, pos, 100.0).tolist() == [1]
        assert query_range(idx, 1, pos, 100.0).tolist() == [0]

    def test_bucket_coordinates_follow_floor_rule(self):
        pos = np.array([[-0.5, 0.0], [250.0, -130.0]])
        idx = build_index(pos, 100.0)
        assert idx.buckets == {(-1, 0): [0], (2, -2): [1]}

    def test_all_robots_present_exactly_once(self):
        rng = np.random.default_rng(5)
        pos = rng.uniform(-2000, 2000, (500, 2))
        idx = build_index(pos, 120.0)
        members = [i for ids in idx.buckets.values() for i in ids]
        assert sorted(members) == list(range(500))

    def test_rejects_non_finite(self):
        pos = np.array([[0.0, 0.0], [np.nan, 1.0]])
        with pytest.raises(ValueError, match="robot 1"):
            build_index(pos, 100.0)

    def test_rejects_bad_cell_size(self):
        with pytest.raises(ValueError):
            build_index(np.zeros((1, 2)), 0.0)


class TestQueries:
    def test_out_of_range_pair(self):
        pos = np.array([[0.0, 0.0], [150.0, 0.0]])
        idx = build_index(pos, 200.0)
        assert query_range(idx, 0, pos, 100.0).size == 0

    def test_in_range_pair_symmetric(self):
        pos = np.array([[0.0, 0.0], [99.0, 0.0]])
        idx = build_index(pos, 100.0)
        assert query_range(idx, 0, pos, 100.0).tolist() == [1]
        assert query_range(idx, 1, pos, 100.0).tolist() == [0]

    def test_radius_above_cell_size_rejected(self):
        pos = np.zeros((2, 2))
        idx = build_index(pos, 50.0)
        with pytest.raises(ValueError):
            query_range(idx, 0, pos, 60.0)

    def test_unknown_id_rejected(self):
        pos = np.zeros((2, 2))
        idx = build_index(pos, 50.0)
        with pytest.raises(KeyError):
            query_range(idx, 5, pos, 10.0)
        with pytest.raises(KeyError):
            brute_force_range(pos, -1, 10.0)

    def test_brute_single_robot(self):
        assert brute_force_range(np.zeros((1, 2)), 0, 100.0).size == 0

    def test_brute_equilateral_triangle(self):
        pos = np.array([[0.0, 0.0], [60.0, 0.0], [30.0, 30.0 * np.sqrt(3)]])
        for i in range(3):
            assert brute_force_range(pos, i, 61.0).size == 2

    @given(
        seed=st.integers(0, 100_000),
        n=st.integers(1, 300),
        radius=st.floats(10.0, 150.0),
    )
    @settings(max_examples=120, deadline=None)
    def test_grid_matches_brute_force(self, seed, n, radius):
        rng = np.random.default_rng(seed)
        side = 40.0 * np.sqrt(n)
        pos = rng.uniform(-side / 2, side / 2, (n, 2))
        cell = radius * float(rng.uniform(1.0, 2.0))
        idx = build_index(pos, cell)
        probe = int(rng.integers(0, n))
        got = query_range(idx, probe, pos, radius)
        want = brute_force_range(pos, probe, radius)
        assert got.tolist() == want.tolist()

    def test_query_many_matches_single_queries(self):
        rng = np.random.default_rng(11)
        pos = rng.uniform(0, 600, (200, 2))
        grid = GridNeighbors(100.0)
        grid.rebuild(pos)
        brute = BruteNeighbors()
        brute.rebuild(pos)
        ids = np.arange(0, 200, 3)
        for backend in (grid, brute):
            off, cand, dist = backend.query_many(ids, 90.0)
            for k, i in enumerate(ids):
                got = cand[off[k]:off[k + 1]]
                want = brute_force_range(pos, int(i), 90.0)
                assert got.tolist() == want.tolist()
                segment = dist[off[k]:off[k + 1]]
                true = np.hypot(*(pos[got] - pos[i]).T)
                assert np.allclose(segment, true)


class TestPairs:
    @pytest.mark.parametrize("make", [lambda: GridNeighbors(35.0), BruteNeighbors])
    def test_pairs_match_pairwise_scan(self, make):
        rng = np.random.default_rng(23)
        pos = rng.uniform(0, 400, (150, 2))
        backend = make()
        backend.rebuild(pos)
        i_ids, j_ids, dist = backend.pairs(35.0)
        got = {(int(a), int(b)) if a < b else (int(b), int(a)) for a, b in zip(i_ids, j_ids)}
        dx = pos[:, 0, None] - pos[None, :, 0]
        dy = pos[:, 1, None] - pos[None, :, 1]
        d = np.hypot(dx, dy)
        want = {
            (a, b)
            for a in range(150)
            for b in range(a + 1, 150)
            if d[a, b] <= 35.0
        }
        assert got == want
        assert len(got) == len(i_ids)  # no duplicates
        for a, b, dd in zip(i_ids, j_ids, dist):
            assert dd == pytest.approx(d[a, b])


class TestChooseStrategy:
    def test_crossover_rule(self):
        assert choose_strategy(49) == "brute"
        assert choose_strategy(50) == "grid"
        assert BRUTE_FORCE_MAX_BOTS == 50

    def test_override_wins(self):
        assert choose_strategy(10_000, "brute") == "brute"
        assert choose_strategy(3, "grid") == "grid"
        assert choose_strategy(3, "auto") == "brute"

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            choose_strategy(-1)
        with pytest.raises(ValueError):
            choose_strategy(10, "fancy")
