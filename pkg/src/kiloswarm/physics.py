"""Motion integration, collision resolution and environment sensing.

Motion follows the three-legged vibration-drive model: with both motors on
the robot translates along its heading at constant speed; with a single
motor on it rotates at constant angular rate about the rear leg on the
side opposite the running motor.  The right motor turns the robot left
(counterclockwise about the left rear leg) and the left motor turns it
right (clockwise about the right rear leg); this sign assignment is the
one under which the classic orbit rule circles its target clockwise and
holds the setpoint distance, which the inverse assignment provably cannot
do (it parks the robot on a turn circle tangent to the decision ring).
Overlapping robots are separated by displacing both equally along the
line joining their centres.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .geometry import Pose
from .neighbors import make_backend

# Centres closer than this are treated as coincident and separated along a
# random direction.
COINCIDENT_EPS = 1e-9


@dataclass
class MotorCommand:
    """Duty pair as set by a controller; kinematics only care which side is on.

    ``spinup_remaining`` records a requested full-power spin-up window.  It
    has no effect on simulated motion: one tick (32 ms) already exceeds the
    15 ms spin-up of the real drive train.
    """

    left: int = 0
    right: int = 0
    spinup_remaining: float = 0.0

    def __post_init__(self) -> None:
        if not (0 <= self.left <= 255 and 0 <= self.right <= 255):
            raise ValueError(f"motor duties must be in [0, 255], got ({self.left}, {self.right})")


@dataclass
class LegGeometry:
    """Leg placement: rear legs sit at +/- leg_angle from the front leg.

    90 degrees puts the pivot points on the lateral axis, which models a
    robot with two centrally placed wheels.
    """

    leg_angle_deg: float = 125.0
    leg_radius_mm: float = 16.5
    body_radius_mm: float = 16.5

    def __post_init__(self) -> None:
        if not 0 < self.leg_angle_deg <= 180:
            raise ValueError(f"leg_angle_deg must be in (0, 180], got {self.leg_angle_deg}")
        if self.leg_radius_mm <= 0 or self.body_radius_mm <= 0:
            raise ValueError("leg_radius_mm and body_radius_mm must be positive")
        if self.leg_radius_mm > self.body_radius_mm:
            raise ValueError("leg_radius_mm cannot exceed body_radius_mm")

    @property
    def leg_angle_rad(self) -> float:
        return math.radians(self.leg_angle_deg)


@dataclass
class MotionParams:
    """Calibrated speeds plus leg geometry.

    The defaults are hardware-derived placeholders; real values depend on
    surface and per-robot calibration and should come from the run config.
    """

    speed_mm_s: float = 10.0
    turn_rate_rad_s: float = 0.7
    legs: LegGeometry = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.legs is None:
            self.legs = LegGeometry()
        if self.speed_mm_s <= 0 or self.turn_rate_rad_s <= 0:
            raise ValueError("speed_mm_s and turn_rate_rad_s must be positive")


@dataclass
class Environment:
    """World callbacks: ambient light profile and blocked-position test.

    Both callbacks must be pure functions of position for the duration of
    a run.
    """

    light_at: Optional[Callable[[float, float], float]] = None
    is_blocked: Optional[Callable[[float, float], bool]] = None


def rotate_about_pivot(pose: Pose, pivot: tuple[float, float], dphi: float) -> Pose:
    """Rotate a pose rigidly by ``dphi`` about a fixed pivot point."""
    px, py = pivot
    c, s = math.cos(dphi), math.sin(dphi)
    rx, ry = pose.x - px, pose.y - py
    return Pose(
        px + c * rx - s * ry,
        py + s * rx + c * ry,
        pose.theta + dphi,
    )


def integrate(pose: Pose, motors: MotorCommand, params: MotionParams, dt: float) -> Pose:
    """Advance one pose by dt under the current motor command."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    left_on = motors.left > 0
    right_on = motors.right > 0
    if left_on and right_on:
        step = params.speed_mm_s * dt
        return Pose(
            pose.x + step * math.cos(pose.theta),
            pose.y + step * math.sin(pose.theta),
            pose.theta,
        )
    if not left_on and not right_on:
        return Pose(pose.x, pose.y, pose.theta)

    alpha = params.legs.leg_angle_rad
    if left_on:
        pivot_angle = pose.theta - alpha           # right rear leg
        dphi = -params.turn_rate_rad_s * dt        # clockwise: turn right
    else:
        pivot_angle = pose.theta + alpha           # left rear leg
        dphi = params.turn_rate_rad_s * dt         # counterclockwise: turn left
    r = params.legs.leg_radius_mm
    pivot = (pose.x + r * math.cos(pivot_angle), pose.y + r * math.sin(pivot_angle))
    return rotate_about_pivot(pose, pivot, dphi)


def integrate_arrays(
    xs: np.ndarray,
    ys: np.ndarray,
    thetas: np.ndarray,
    left: np.ndarray,
    right: np.ndarray,
    params: MotionParams,
    dt: float,
) -> None:
    """Vectorized integrate over the whole swarm, updating arrays in place."""
    left_on = left > 0
    right_on = right > 0
    both = left_on & right_on
    if both.any():
        step = params.speed_mm_s * dt
        th = thetas[both]
        xs[both] += step * np.cos(th)
        ys[both] += step * np.sin(th)

    alpha = params.legs.leg_angle_rad
    r = params.legs.leg_radius_mm
    base_dphi = params.turn_rate_rad_s * dt
    # sign: -1 left motor (pivot right leg, clockwise), +1 right motor
    for mask, sign in ((left_on & ~right_on, -1.0), (right_on & ~left_on, 1.0)):
        if not mask.any():
            continue
        dphi = sign * base_dphi
        pivot_angle = thetas[mask] + sign * alpha
        px = xs[mask] + r * np.cos(pivot_angle)
        py = ys[mask] + r * np.sin(pivot_angle)
        c, s = math.cos(dphi), math.sin(dphi)
        rx = xs[mask] - px
        ry = ys[mask] - py
        xs[mask] = px + c * rx - s * ry
        ys[mask] = py + s * rx + c * ry
        thetas[mask] += dphi

    np.mod(thetas + math.pi, 2.0 * math.pi, out=thetas)
    thetas -= math.pi


def pivot_point(pose: Pose, motors: MotorCommand, legs: LegGeometry) -> tuple[float, float]:
    """Position of the rear leg a single-motor command rotates about."""
    left_on = motors.left > 0
    right_on = motors.right > 0
    if left_on == right_on:
        raise ValueError("pivot is only defined for a single running motor")
    angle = pose.theta - legs.leg_angle_rad if left_on else pose.theta + legs.leg_angle_rad
    return (
        pose.x + legs.leg_radius_mm * math.cos(angle),
        pose.y + legs.leg_radius_mm * math.sin(angle),
    )


def resolve_collisions(
    positions,
    radii,
    max_passes: int = 8,
    tolerance: float = 1e-3,
    rng: Optional[np.random.Generator] = None,
    strategy: str = "auto",
) -> np.ndarray:
    """Separate overlapping discs; returns per-robot displacements (n, 2).

    Each overlapping pair moves apart by half the overlap each, along the
    line joining their centres, so paired displacements cancel exactly.
    Passes repeat until no overlap exceeds ``tolerance`` or ``max_passes``
    is reached.  Coincident centres separate along a direction drawn from
    ``rng`` (a fixed-seed generator when omitted, keeping the function
    deterministic).
    """
    pos = np.array(positions, dtype=np.float64)
    n = len(pos)
    out = np.zeros((n, 2), dtype=np.float64)
    if n < 2:
        return out
    rad = np.broadcast_to(np.asarray(radii, dtype=np.float64), (n,))
    max_reach = 2.0 * float(rad.max())

    # Candidate pairs are gathered with slack so passes can reuse them:
    # while no robot has moved more than `budget` since the last gather,
    # any pair that could overlap is still in the candidate set.  After a
    # pass, only pairs touching a robot that just moved can change state,
    # so later passes scan that active subset.
    cand_radius = 1.25 * max_reach
    budget = 0.45 * (cand_radius - max_reach)
    backend = make_backend(strategy, n, cand_radius)
    i_c = j_c = None
    thresh_sq = None
    moved = None
    active = None

    for _ in range(max_passes):
        if i_c is None:
            backend.rebuild(pos)
            i_c, j_c, _ = backend.pairs(cand_radius)
            thresh_sq = (rad[i_c] + rad[j_c] - tolerance) ** 2
            moved = np.zeros(n)
            active = slice(None)
        ii_c, jj_c = i_c[active], j_c[active]
        if len(ii_c) == 0:
            break
        dx = pos[ii_c, 0] - pos[jj_c, 0]
        dy = pos[ii_c, 1] - pos[jj_c, 1]
        dist_sq = dx * dx + dy * dy
        hit = dist_sq < thresh_sq[active]
        if not hit.any():
            break
        i_ids, j_ids = ii_c[hit], jj_c[hit]
        ux, uy = dx[hit], dy[hit]
        dist_h = np.sqrt(dist_sq[hit])
        overlap = rad[i_ids] + rad[j_ids] - dist_h

        coincident = dist_h < COINCIDENT_EPS
        if coincident.any():
            if rng is None:
                rng = np.random.default_rng(0)
            angles = rng.uniform(0.0, 2.0 * math.pi, int(coincident.sum()))
            ux[coincident] = np.cos(angles)
            uy[coincident] = np.sin(angles)
            dist_h = np.where(coincident, 1.0, dist_h)

        half = 0.5 * overlap / dist_h
        px = ux * half
        py = uy * half
        pos[:, 0] += np.bincount(i_ids, px, minlength=n) - np.bincount(j_ids, px, minlength=n)
        pos[:, 1] += np.bincount(i_ids, py, minlength=n) - np.bincount(j_ids, py, minlength=n)

        # L1 bound on each robot's displacement this pass
        l1 = np.abs(px) + np.abs(py)
        moved += np.bincount(i_ids, l1, minlength=n) + np.bincount(j_ids, l1, minlength=n)
        if moved.max() > budget:
            i_c = None  # displacements may have invalidated the candidates
            continue
        touched = np.zeros(n, dtype=bool)
        touched[i_ids] = True
        touched[j_ids] = True
        active = touched[i_c] | touched[j_c]

    out[:] = pos - np.asarray(positions, dtype=np.float64)
    return out


def clip_to_environment(pose_old: Pose, pose_new: Pose, env: Optional[Environment]) -> Pose:
    """Revert a blocked translation; the heading change is always kept."""
    if env is None or env.is_blocked is None:
        return pose_new
    if env.is_blocked(pose_new.x, pose_new.y):
        return Pose(pose_old.x, pose_old.y, pose_new.theta)
    return pose_new


def sample_light(pose: Pose, env: Optional[Environment]) -> int:
    """Ambient light at the pose, clamped to the 10-bit sensor range."""
    if env is None or env.light_at is None:
        return 0
    value = env.light_at(pose.x, pose.y)
    return int(round(min(max(value, 0.0), 1023.0)))
