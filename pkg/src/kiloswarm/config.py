"""Run configuration: parsing, validation and initial layouts.

Configs are UTF-8 JSON with snake_case, SI-suffixed keys.  Unknown keys
are rejected so typos fail loudly instead of silently running defaults.
``controller_params`` is the one free-form table; each controller checks
its own keys.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Union

import numpy as np

LAYOUT_TYPES = ("grid", "random_disc", "explicit")
STRATEGIES = ("auto", "grid", "brute")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


@dataclass
class SimConfig:
    """All tunable parameters of a run; the single source of truth.

    Speed, turn rate and leg placement default to hardware-derived
    placeholders (the real values depend on surface and calibration);
    override them to match an experiment.
    """

    n_bots: int = 1
    time_step_s: float = 1.0 / 31.0
    duration_s: float = 60.0
    comm_radius_mm: float = 100.0
    msg_success_prob: float = 1.0
    distance_noise_std_mm: float = 0.0
    speed_mm_s: float = 10.0
    turn_rate_rad_s: float = 0.7
    leg_angle_deg: float = 125.0
    leg_radius_mm: float = 16.5
    body_radius_mm: float = 16.5
    rand_seed: int = 0
    neighbor_strategy: str = "auto"
    tx_period_ticks: int = 16
    initial_layout: Union[str, dict] = "grid"
    layout_spacing_mm: float = 35.0
    snapshot_every_n_ticks: int = 0
    controller: str = "idle"
    controller_params: dict = field(default_factory=dict)
    shuffle_loop_order: bool = False
    collision_max_passes: int = 8
    collision_tolerance_mm: float = 1e-3
    loop_budget_ms: float = 10.0
    enforce_loop_budget: bool = False

    def __post_init__(self) -> None:
        self.initial_layout = _normalize_layout(self.initial_layout)
        _validate(self)


def _normalize_layout(layout: Union[str, dict]) -> dict:
    if isinstance(layout, str):
        layout = {"type": layout}
    if not isinstance(layout, dict):
        raise ConfigError(f"initial_layout: expected string or object, got {type(layout).__name__}")
    kind = layout.get("type")
    if kind not in LAYOUT_TYPES:
        raise ConfigError(f"initial_layout.type: expected one of {LAYOUT_TYPES}, got {kind!r}")
    allowed = {
        "grid": {"type"},
        "random_disc": {"type", "radius_mm"},
        "explicit": {"type", "poses"},
    }[kind]
    unknown = set(layout) - allowed
    if unknown:
        raise ConfigError(f"initial_layout: unknown key {sorted(unknown)[0]!r} for type {kind!r}")
    if kind == "explicit" and "poses" not in layout:
        raise ConfigError("initial_layout.poses: required for explicit layouts")
    return dict(layout)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _validate(cfg: SimConfig) -> None:
    _require(isinstance(cfg.n_bots, int) and cfg.n_bots >= 1, f"n_bots: must be a positive integer, got {cfg.n_bots}")
    for key in ("time_step_s", "duration_s", "comm_radius_mm", "speed_mm_s",
                "turn_rate_rad_s", "leg_radius_mm", "body_radius_mm",
                "layout_spacing_mm", "loop_budget_ms"):
        value = getattr(cfg, key)
        _require(isinstance(value, (int, float)) and value > 0, f"{key}: must be positive, got {value}")
        setattr(cfg, key, float(value))
    _require(0.0 <= cfg.msg_success_prob <= 1.0, f"msg_success_prob: must be in [0, 1], got {cfg.msg_success_prob}")
    _require(cfg.distance_noise_std_mm >= 0, f"distance_noise_std_mm: must be >= 0, got {cfg.distance_noise_std_mm}")
    _require(0 < cfg.leg_angle_deg <= 180, f"leg_angle_deg: must be in (0, 180], got {cfg.leg_angle_deg}")
    _require(cfg.leg_radius_mm <= cfg.body_radius_mm,
             f"leg_radius_mm: cannot exceed body_radius_mm ({cfg.leg_radius_mm} > {cfg.body_radius_mm})")
    _require(isinstance(cfg.rand_seed, int), f"rand_seed: must be an integer, got {cfg.rand_seed!r}")
    _require(cfg.neighbor_strategy in STRATEGIES,
             f"neighbor_strategy: expected one of {STRATEGIES}, got {cfg.neighbor_strategy!r}")
    _require(isinstance(cfg.tx_period_ticks, int) and cfg.tx_period_ticks >= 1,
             f"tx_period_ticks: must be a positive integer, got {cfg.tx_period_ticks}")
    _require(isinstance(cfg.snapshot_every_n_ticks, int) and cfg.snapshot_every_n_ticks >= 0,
             f"snapshot_every_n_ticks: must be >= 0, got {cfg.snapshot_every_n_ticks}")
    _require(isinstance(cfg.controller, str) and cfg.controller,
             f"controller: must be a non-empty string, got {cfg.controller!r}")
    _require(isinstance(cfg.controller_params, dict),
             f"controller_params: must be an object, got {type(cfg.controller_params).__name__}")
    _require(isinstance(cfg.collision_max_passes, int) and cfg.collision_max_passes >= 1,
             f"collision_max_passes: must be a positive integer, got {cfg.collision_max_passes}")
    _require(cfg.collision_tolerance_mm > 0,
             f"collision_tolerance_mm: must be positive, got {cfg.collision_tolerance_mm}")
    layout = cfg.initial_layout
    if layout["type"] == "explicit":
        poses = layout["poses"]
        _require(isinstance(poses, list), "initial_layout.poses: must be a list")
        _require(len(poses) == cfg.n_bots,
                 f"initial_layout.poses: {len(poses)} poses for n_bots={cfg.n_bots}")
        for k, pose in enumerate(poses):
            _require(isinstance(pose, (list, tuple)) and len(pose) in (2, 3),
                     f"initial_layout.poses[{k}]: expected [x, y] or [x, y, theta]")
            _require(all(isinstance(v, (int, float)) and math.isfinite(v) for v in pose),
                     f"initial_layout.poses[{k}]: values must be finite numbers")
    elif layout["type"] == "random_disc" and "radius_mm" in layout:
        _require(isinstance(layout["radius_mm"], (int, float)) and layout["radius_mm"] > 0,
                 f"initial_layout.radius_mm: must be positive, got {layout['radius_mm']}")


def from_dict(data: dict) -> SimConfig:
    """Build a config from parsed JSON, rejecting unknown keys."""
    if not isinstance(data, dict):
        raise ConfigError(f"config root: expected an object, got {type(data).__name__}")
    known = {f.name for f in fields(SimConfig)}
    for key in data:
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
    coerced: dict[str, Any] = dict(data)
    # JSON has no int/float distinction worth fighting over for these
    for key in ("time_step_s", "duration_s", "comm_radius_mm", "msg_success_prob",
                "distance_noise_std_mm", "speed_mm_s", "turn_rate_rad_s",
                "leg_angle_deg", "leg_radius_mm", "body_radius_mm",
                "layout_spacing_mm", "collision_tolerance_mm", "loop_budget_ms"):
        if key in coerced and isinstance(coerced[key], int) and not isinstance(coerced[key], bool):
            coerced[key] = float(coerced[key])
    return SimConfig(**coerced)


def load_config(path) -> SimConfig:
    """Load and validate a JSON config file."""
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {p}: {exc}") from exc
    return from_dict(data)


def generate_layout(cfg: SimConfig, rng: np.random.Generator):
    """Initial (xs, ys, thetas) arrays for a config.

    The grid layout is a hexagonal-ish lattice centred on the origin;
    random_disc draws positions uniformly in a disc, resampling any draw
    that would overlap an already placed robot.
    """
    n = cfg.n_bots
    layout = cfg.initial_layout
    kind = layout["type"]
    if kind == "explicit":
        xs = np.empty(n)
        ys = np.empty(n)
        thetas = np.zeros(n)
        for i, pose in enumerate(layout["poses"]):
            xs[i] = pose[0]
            ys[i] = pose[1]
            if len(pose) == 3:
                thetas[i] = pose[2]
        return xs, ys, _wrap(thetas)

    if kind == "grid":
        s = cfg.layout_spacing_mm
        cols = max(1, math.ceil(math.sqrt(n)))
        pitch = s * math.sqrt(3.0) / 2.0
        idx = np.arange(n)
        row = idx // cols
        col = idx % cols
        xs = (col + 0.5 * (row % 2)) * s
        ys = row * pitch
        xs = xs - xs.mean()
        ys = ys - ys.mean()
        return xs.astype(np.float64), ys.astype(np.float64), np.zeros(n)

    # random_disc
    min_sep = 2.0 * cfg.body_radius_mm
    radius = layout.get("radius_mm")
    if radius is None:
        # leave roughly 4 disc-areas of head room per robot
        radius = max(min_sep, cfg.body_radius_mm * 2.0 * math.sqrt(n))
    xs = np.empty(n)
    ys = np.empty(n)
    for i in range(n):
        for _ in range(10_000):
            r = radius * math.sqrt(rng.random())
            phi = rng.uniform(0.0, 2.0 * math.pi)
            x = r * math.cos(phi)
            y = r * math.sin(phi)
            if i == 0 or np.hypot(xs[:i] - x, ys[:i] - y).min() >= min_sep:
                xs[i] = x
                ys[i] = y
                break
        else:
            raise ConfigError(
                f"initial_layout: could not place robot {i} without overlap in a "
                f"disc of radius {radius} mm; increase radius_mm"
            )
    thetas = rng.uniform(-math.pi, math.pi, n)
    return xs, ys, _wrap(thetas)


def _wrap(thetas: np.ndarray) -> np.ndarray:
    return (thetas + math.pi) % (2.0 * math.pi) - math.pi
