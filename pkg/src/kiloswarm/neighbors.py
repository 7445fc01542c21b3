"""Range queries over robot positions: uniform cell grid and brute force.

The grid partitions the plane into square cells whose side equals the
maximal interaction range, so any robot within range of robot ``i`` lives
in the 3x3 block of cells around ``i``'s cell.  Brute force computes
distances against every other robot; it is the oracle for the grid and the
faster choice for small swarms.  The automatic crossover between the two
sits at 50 robots.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Swarms below this size are faster with plain pairwise distances.
BRUTE_FORCE_MAX_BOTS = 50

# Unordered neighbor-cell offsets: together with the (0,0) self cell these
# cover every adjacent cell pair exactly once.
_HALF_OFFSETS = ((1, 0), (0, 1), (1, 1), (-1, 1))


def _as_positions(positions) -> np.ndarray:
    pos = np.asarray(positions, dtype=np.float64)
    if pos.ndim != 2 or pos.shape[1] != 2:
        raise ValueError(f"positions must have shape (n, 2), got {pos.shape}")
    return pos


@dataclass
class NeighborIndex:
    """Uniform grid over robot positions.

    Bucket coordinates are ``floor((pos - origin) / cell_size)``.  Robots are
    stored sorted by bucket (CSR layout) so both single queries and the
    all-pairs sweep stay cheap.
    """

    cell_size: float
    origin: tuple[float, float]
    n: int
    _cells: np.ndarray           # (n, 2) int64 bucket coords per robot
    _order: np.ndarray           # robot ids sorted by bucket key
    _keys: np.ndarray            # sorted unique bucket keys
    _starts: np.ndarray          # CSR segment starts into _order
    _ends: np.ndarray            # CSR segment ends
    _shift: tuple[int, int]      # min bucket coords used for key packing
    _span_y: int
    _positions: np.ndarray       # positions the index was built from
    _cell_map: dict = field(default_factory=dict)  # (cx, cy) -> (start, end)

    @property
    def buckets(self) -> dict[tuple[int, int], list[int]]:
        """Bucket contents as {cell coords: ascending robot ids}."""
        out: dict[tuple[int, int], list[int]] = {}
        for (cx, cy), (s, e) in self._cell_map.items():
            out[(cx, cy)] = sorted(int(i) for i in self._order[s:e])
        return out

    def _segment(self, cx: int, cy: int) -> tuple[int, int]:
        return self._cell_map.get((cx, cy), (0, 0))

    def query(self, robot_id: int, radius: float) -> tuple[np.ndarray, np.ndarray]:
        """Ids (ascending) and true distances of robots within ``radius``."""
        if not 0 <= robot_id < self.n:
            raise KeyError(f"unknown robot id {robot_id}")
        cx, cy = self._cells[robot_id]
        chunks = []
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                s, e = self._segment(cx + dx, cy + dy)
                if e > s:
                    chunks.append(self._order[s:e])
        if not chunks:
            return _EMPTY_IDS, _EMPTY_F64
        cand = np.concatenate(chunks)
        delta = self._positions[cand] - self._positions[robot_id]
        dist = np.hypot(delta[:, 0], delta[:, 1])
        keep = (dist <= radius) & (cand != robot_id)
        cand, dist = cand[keep], dist[keep]
        asc = np.argsort(cand, kind="stable")
        return cand[asc], dist[asc]

    def query_many(self, robot_ids: np.ndarray, radius: float):
        """Batched query: candidates for many robots in one sweep.

        Returns (offsets, ids, dists) where the k-th queried robot's
        neighbors are ``ids[offsets[k]:offsets[k+1]]``, ascending by id.
        """
        m = len(robot_ids)
        if m == 0 or self.n == 0:
            return np.zeros(m + 1, dtype=np.int64), _EMPTY_IDS, _EMPTY_F64
        cx = self._cells[robot_ids, 0] - self._shift[0]
        cy = self._cells[robot_ids, 1] - self._shift[1]
        span_y = self._span_y
        dxs = np.array([-1, -1, -1, 0, 0, 0, 1, 1, 1])
        dys = np.array([-1, 0, 1, -1, 0, 1, -1, 0, 1])
        nx = (cx[:, None] + dxs[None, :]).ravel()
        ny = (cy[:, None] + dys[None, :]).ravel()
        valid = (ny >= 0) & (ny < span_y)
        nkey = nx * span_y + ny
        pos = np.searchsorted(self._keys, nkey)
        ok = valid & (pos < len(self._keys))
        pos_c = np.where(ok, pos, 0)
        hit = ok & (self._keys[pos_c] == nkey)
        seg_s = np.where(hit, self._starts[pos_c], 0)
        seg_e = np.where(hit, self._ends[pos_c], 0)
        counts = seg_e - seg_s
        total = int(counts.sum())
        if total == 0:
            return np.zeros(m + 1, dtype=np.int64), _EMPTY_IDS, _EMPTY_F64
        seg = np.repeat(np.arange(m * 9), counts)
        inner = np.arange(total) - np.concatenate(([0], np.cumsum(counts)[:-1]))[seg]
        cand = self._order[seg_s[seg] + inner]
        q_of = seg // 9
        delta = self._positions[cand] - self._positions[robot_ids[q_of]]
        dist = np.hypot(delta[:, 0], delta[:, 1])
        keep = (dist <= radius) & (cand != robot_ids[q_of])
        cand, dist, q_of = cand[keep], dist[keep], q_of[keep]
        asc = np.lexsort((cand, q_of))
        cand, dist, q_of = cand[asc], dist[asc], q_of[asc]
        offsets = np.zeros(m + 1, dtype=np.int64)
        np.cumsum(np.bincount(q_of, minlength=m), out=offsets[1:])
        return offsets, cand, dist

    def pairs(self, radius: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """All unordered pairs (i, j, distance) with distance <= radius."""
        if self.n < 2:
            return _EMPTY_IDS, _EMPTY_IDS, _EMPTY_F64
        left_s, left_e, right_s, right_e, same = [], [], [], [], []

        # same-cell segments pair with themselves (filtered to i < j below)
        left_s.append(self._starts)
        left_e.append(self._ends)
        right_s.append(self._starts)
        right_e.append(self._ends)
        same.append(np.ones(len(self._keys), dtype=bool))

        span_y = self._span_y
        cx = self._keys // span_y
        cy = self._keys - cx * span_y
        for dx, dy in _HALF_OFFSETS:
            ny = cy + dy
            valid = (ny >= 0) & (ny < span_y)
            nkey = (cx + dx) * span_y + ny
            pos = np.searchsorted(self._keys, nkey)
            pos_ok = valid & (pos < len(self._keys))
            pos_c = np.where(pos_ok, pos, 0)
            hit = pos_ok & (self._keys[pos_c] == nkey)
            if not hit.any():
                continue
            left_s.append(self._starts[hit])
            left_e.append(self._ends[hit])
            right_s.append(self._starts[pos_c[hit]])
            right_e.append(self._ends[pos_c[hit]])
            same.append(np.zeros(int(hit.sum()), dtype=bool))

        ls = np.concatenate(left_s)
        le = np.concatenate(left_e)
        rs = np.concatenate(right_s)
        re = np.concatenate(right_e)
        same_cell = np.concatenate(same)

        la = le - ls
        lb = re - rs
        counts = la * lb
        total = int(counts.sum())
        if total == 0:
            return _EMPTY_IDS, _EMPTY_IDS, _EMPTY_F64

        # flatten the variable-size cross joins without a Python loop
        seg = np.repeat(np.arange(len(counts)), counts)
        offsets = np.concatenate(([0], np.cumsum(counts)[:-1]))
        t = np.arange(total) - offsets[seg]
        li = t // lb[seg]
        ri = t - li * lb[seg]
        i_ids = self._order[ls[seg] + li]
        j_ids = self._order[rs[seg] + ri]

        # same-cell joins produced both orderings and self pairs
        keep = np.where(same_cell[seg], i_ids < j_ids, True)
        i_ids, j_ids = i_ids[keep], j_ids[keep]

        delta = self._positions[i_ids] - self._positions[j_ids]
        dist = np.hypot(delta[:, 0], delta[:, 1])
        close = dist <= radius
        return i_ids[close], j_ids[close], dist[close]


_EMPTY_IDS = np.empty(0, dtype=np.int64)
_EMPTY_F64 = np.empty(0, dtype=np.float64)


def build_index(positions, cell_size: float, origin: tuple[float, float] = (0.0, 0.0)) -> NeighborIndex:
    """Bucket robots into grid cells of side ``cell_size``.

    Cost is linear in the number of robots.  Raises on non-finite
    positions, naming the offending robot.
    """
    pos = _as_positions(positions)
    if cell_size <= 0:
        raise ValueError(f"cell_size must be positive, got {cell_size}")
    bad = ~np.isfinite(pos).all(axis=1)
    if bad.any():
        raise ValueError(f"non-finite position for robot {int(np.nonzero(bad)[0][0])}")
    n = len(pos)
    if n == 0:
        return NeighborIndex(
            cell_size=cell_size, origin=origin, n=0,
            _cells=np.empty((0, 2), dtype=np.int64),
            _order=_EMPTY_IDS, _keys=_EMPTY_IDS,
            _starts=_EMPTY_IDS, _ends=_EMPTY_IDS,
            _shift=(0, 0), _span_y=1, _positions=pos,
        )

    cells = np.floor((pos - np.asarray(origin)) / cell_size).astype(np.int64)
    sx = int(cells[:, 0].min())
    sy = int(cells[:, 1].min())
    span_y = int(cells[:, 1].max()) - sy + 1
    keys = (cells[:, 0] - sx) * span_y + (cells[:, 1] - sy)
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    boundaries = np.flatnonzero(sorted_keys[1:] != sorted_keys[:-1]) + 1
    starts = np.concatenate(([0], boundaries))
    ukeys = sorted_keys[starts]
    ends = np.append(starts[1:], n)

    ux = (ukeys // span_y + sx).tolist()
    uy = (ukeys % span_y + sy).tolist()
    cell_map = dict(zip(zip(ux, uy), zip(starts.tolist(), ends.tolist())))

    return NeighborIndex(
        cell_size=cell_size, origin=origin, n=n,
        _cells=cells, _order=order, _keys=ukeys,
        _starts=starts, _ends=ends,
        _shift=(sx, sy), _span_y=span_y,
        _positions=pos, _cell_map=cell_map,
    )


def query_range(index: NeighborIndex, robot_id: int, positions, radius: float) -> np.ndarray:
    """Ids within ``radius`` of ``robot_id``, self excluded, ascending.

    ``positions`` must be the array the index was built from and ``radius``
    must not exceed the index cell size (the 3x3 cell walk only covers one
    ring of cells).
    """
    if radius > index.cell_size:
        raise ValueError(
            f"query radius {radius} exceeds cell size {index.cell_size}"
        )
    pos = _as_positions(positions)
    if len(pos) != index.n:
        raise ValueError("positions do not match the indexed swarm")
    ids, _ = index.query(robot_id, radius)
    return ids


def brute_force_range(positions, robot_id: int, radius: float) -> np.ndarray:
    """Ids within ``radius`` of ``robot_id`` by checking every robot."""
    pos = _as_positions(positions)
    if not 0 <= robot_id < len(pos):
        raise KeyError(f"unknown robot id {robot_id}")
    delta = pos - pos[robot_id]
    dist = np.hypot(delta[:, 0], delta[:, 1])
    ids = np.nonzero(dist <= radius)[0]
    return ids[ids != robot_id]


def choose_strategy(n_robots: int, override: str | None = None) -> str:
    """Pick ``"brute"`` or ``"grid"``; an explicit override always wins."""
    if n_robots < 0:
        raise ValueError("n_robots must be non-negative")
    if override in ("brute", "grid"):
        return override
    if override not in (None, "auto"):
        raise ValueError(f"unknown strategy {override!r}")
    return "brute" if n_robots < BRUTE_FORCE_MAX_BOTS else "grid"


class BruteNeighbors:
    """Full pairwise-distance backend: one n x n matrix per rebuild."""

    def __init__(self):
        self._dist = None
        self._upper = None
        self.n = 0

    def rebuild(self, positions) -> None:
        pos = _as_positions(positions)
        self.n = len(pos)
        dx = pos[:, 0, None] - pos[None, :, 0]
        dy = pos[:, 1, None] - pos[None, :, 1]
        self._dist = np.sqrt(dx * dx + dy * dy)
        if self._upper is None or self._upper.shape[0] != self.n:
            self._upper = np.triu(np.ones((self.n, self.n), dtype=bool), k=1)

    def query(self, robot_id: int, radius: float) -> tuple[np.ndarray, np.ndarray]:
        row = self._dist[robot_id]
        keep = row <= radius
        keep[robot_id] = False
        ids = np.nonzero(keep)[0]
        return ids, row[ids]

    def query_many(self, robot_ids: np.ndarray, radius: float):
        m = len(robot_ids)
        if m == 0 or self.n == 0:
            return np.zeros(m + 1, dtype=np.int64), _EMPTY_IDS, _EMPTY_F64
        sub = self._dist[robot_ids]
        keep = sub <= radius
        keep[np.arange(m), robot_ids] = False
        q_of, cand = np.nonzero(keep)  # row-major: ascending ids per query
        offsets = np.zeros(m + 1, dtype=np.int64)
        np.cumsum(np.bincount(q_of, minlength=m), out=offsets[1:])
        return offsets, cand, sub[q_of, cand]

    def pairs(self, radius: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if self.n < 2:
            return _EMPTY_IDS, _EMPTY_IDS, _EMPTY_F64
        close = (self._dist <= radius) & self._upper
        i_ids, j_ids = np.nonzero(close)
        return i_ids, j_ids, self._dist[i_ids, j_ids]


class GridNeighbors:
    """Linked-cell backend; cell side must cover the largest query radius."""

    def __init__(self, cell_size: float):
        self.cell_size = cell_size
        self._index = None

    def rebuild(self, positions) -> None:
        self._index = build_index(positions, self.cell_size)

    def query(self, robot_id: int, radius: float) -> tuple[np.ndarray, np.ndarray]:
        return self._index.query(robot_id, radius)

    def query_many(self, robot_ids: np.ndarray, radius: float):
        return self._index.query_many(robot_ids, radius)

    def pairs(self, radius: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self._index.pairs(radius)


def make_backend(strategy: str, n_robots: int, cell_size: float):
    """Instantiate the neighbor backend for a resolved strategy."""
    resolved = choose_strategy(n_robots, strategy)
    if resolved == "brute":
        return BruteNeighbors()
    return GridNeighbors(cell_size)
