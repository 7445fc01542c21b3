"""Demo controller rules and behaviors, checked against independent oracles."""
import math
from collections import deque

import numpy as np
import pytest

from kiloswarm.config import SimConfig, load_config
from kiloswarm.controllers import (
    GRADIENT_MAX,
    edge_follow_decide,
    gradient_update,
    orbit_decide,
)
from kiloswarm.world import World, run
from kiloswarm.api import controller_factory


def bfs_hops(positions, radius):
    """Hop distance from robot 0 on the communication disc graph."""
    n = len(positions)
    hops = [None] * n
    hops[0] = 0
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in range(n):
            if hops[v] is None and math.dist(positions[u], positions[v]) <= radius:
                hops[v] = hops[u] + 1
                queue.append(v)
    return hops


def connected_static_positions(rng, n, min_sep=34.0, radius=100.0):
    """Random connected placements far enough apart that nobody collides."""
    while True:
        pts = []
        side = 45.0 * math.sqrt(n)
        tries = 0
        while len(pts) < n and tries < 20_000:
            tries += 1
            cand = rng.uniform(0, side, 2)
            if not pts or min(math.dist(cand, p) for p in pts) >= min_sep:
                pts.append(cand.tolist())
        if len(pts) == n and all(h is not None for h in bfs_hops(pts, radius)):
            return np.array(pts)


class TestDecisionRules:
    def test_orbit_rule(self):
        assert orbit_decide(55, 60) == "left"
        assert orbit_decide(65, 60) == "right"
        assert orbit_decide(60, 60) == "right"  # the "otherwise" branch

    def test_orbit_rejects_negative(self):
        with pytest.raises(ValueError):
            orbit_decide(-1, 60)

    def test_edge_follow_uses_minimum(self):
        assert edge_follow_decide(min(70, 90), 60) == "right"
        assert edge_follow_decide(min(55, 90), 60) == "left"

    def test_gradient_update(self):
        assert gradient_update(GRADIENT_MAX, [], seeded=True) == 0
        assert gradient_update(5, [], seeded=False) == 5
        assert gradient_update(GRADIENT_MAX, [3, 7]) == 4
        assert gradient_update(2, [GRADIENT_MAX]) == GRADIENT_MAX  # saturates

    def test_follow_leader_decide_composes_orbit(self):
        make = controller_factory("follow_the_leader")
        ctl = make({"d0_mm": 60})
        assert ctl.decide(75.0) == "right"
        assert ctl.decide(45.0) == "left"

    def test_param_validation(self):
        with pytest.raises(ValueError):
            controller_factory("orbit")({"d0": 60})  # typo'd key
        with pytest.raises(ValueError):
            controller_factory("orbit")({"d0_mm": -5})
        with pytest.raises(ValueError):
            controller_factory("gradient")({"x": 1})


class TestGradientBehavior:
    def test_seed_alone_stays_zero(self):
        cfg = SimConfig(n_bots=1, controller="gradient")
        w = World(cfg)
        run(w, 3.0)
        assert w.controllers[0].value == 0

    def test_disconnected_robot_saturated(self):
        cfg = SimConfig(
            n_bots=3, controller="gradient",
            initial_layout={"type": "explicit", "poses": [[0, 0], [80, 0], [5000, 0]]},
        )
        w = World(cfg)
        run(w, 5.0)
        assert w.controllers[0].value == 0
        assert w.controllers[1].value == 1
        assert w.controllers[2].value == GRADIENT_MAX

    def test_chain_matches_bfs(self):
        poses = [[80.0 * k, 0.0] for k in range(3)]
        cfg = SimConfig(n_bots=3, controller="gradient",
                        initial_layout={"type": "explicit", "poses": poses})
        w = World(cfg)
        run(w, 5.0)
        assert [c.value for c in w.controllers] == [0, 1, 2]

    def test_random_configurations_match_bfs(self):
        rng = np.random.default_rng(1)
        for trial in range(5):
            n = int(rng.integers(5, 30))
            pos = connected_static_positions(rng, n)
            hops = bfs_hops(pos.tolist(), 100.0)
            cfg = SimConfig(n_bots=n, controller="gradient",
                            initial_layout={"type": "explicit", "poses": pos.tolist()},
                            rand_seed=trial)
            w = World(cfg)
            run(w, (max(hops) + 4) * 16 * w.dt + 1.0)
            assert [c.value for c in w.controllers] == hops


class TestOrbitBehavior:
    def test_planet_waits_for_first_message(self):
        cfg = SimConfig(n_bots=2, controller="orbit", msg_success_prob=0.0,
                        initial_layout={"type": "explicit", "poses": [[0, 0], [70, 0]]})
        w = World(cfg)
        run(w, 3.0)
        assert w.xs[1] == 70.0 and w.ys[1] == 0.0

    def test_star_stays_put(self):
        cfg = load_config_fixture("orbit.json")
        w = World(cfg)
        run(w, 30.0)
        assert math.hypot(w.xs[0], w.ys[0]) < 1.0


class TestEdgeFollowBehavior:
    def test_stops_without_neighbors(self):
        cfg = SimConfig(n_bots=1, controller="edge_follow")
        w = World(cfg)
        run(w, 3.0)
        assert w.xs[0] == 0.0 and w.ys[0] == 0.0

    def test_circumnavigates_convex_cluster(self):
        cfg = load_config_fixture("edge_follow.json")
        w = World(cfg)
        result = run(w, 150.0, snapshot_every_n_ticks=1)
        cluster = np.array([[b.x_mm, b.y_mm] for b in result.snapshots[0].bots[1:]])
        cx, cy = cluster.mean(axis=0)
        xs = np.array([s.bots[0].x_mm for s in result.snapshots]) - cx
        ys = np.array([s.bots[0].y_mm for s in result.snapshots]) - cy
        winding = np.unwrap(np.arctan2(ys, xs))
        total = winding[-1] - winding[0]
        assert abs(total) >= 2 * math.pi  # completes a lap
        sign = -1.0 if total < 0 else 1.0
        prog = sign * winding
        assert (np.maximum.accumulate(prog) - prog).max() < 0.35  # near-monotone


class TestFollowLeaderBehavior:
    def test_leader_alone_wanders(self):
        cfg = SimConfig(n_bots=1, controller="follow_the_leader")
        w = World(cfg)
        run(w, 20.0)
        assert math.hypot(w.xs[0], w.ys[0]) > 10.0  # it went somewhere

    def test_every_robot_moves_and_transmits(self):
        # the workload identity the bench relies on
        poses = [[60.0 * k, 0.0] for k in range(6)]
        cfg = SimConfig(n_bots=6, controller="follow_the_leader",
                        initial_layout={"type": "explicit", "poses": poses})
        w = World(cfg)
        offers_before = w.channel_stats.offers
        for _ in range(62):
            w.step()
            moving = (w.motor_left > 0) | (w.motor_right > 0)
            assert moving.all()
        assert w.channel_stats.offers > offers_before

    def test_follower_beyond_d0_turns_right(self):
        poses = [[0.0, 0.0], [80.0, 0.0, 0.0]]
        cfg = SimConfig(n_bots=2, controller="follow_the_leader",
                        initial_layout={"type": "explicit", "poses": poses})
        w = World(cfg)
        for _ in range(5):
            w.step()
        # follower (uid 1) hears rank 0 at ~80 mm > 60 -> turn right = left motor
        assert w.motor_left[1] > 0 and w.motor_right[1] == 0


def load_config_fixture(name):
    from importlib import resources

    with resources.as_file(resources.files("kiloswarm") / "configs" / name) as path:
        return load_config(path)
