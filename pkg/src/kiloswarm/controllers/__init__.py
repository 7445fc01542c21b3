"""Bundled demo controllers; importing this package registers them."""
from ..api import Controller, register_controller
from . import edge_follow, follow_leader, gradient, orbit  # noqa: F401  (registration)
from .edge_follow import EdgeFollowController, edge_follow_decide
from .follow_leader import FollowLeaderController
from .gradient import GRADIENT_MAX, GradientController, gradient_update
from .orbit import OrbitController, orbit_decide


@register_controller("idle")
def make_idle(params) -> Controller:
    """A robot that does nothing; handy for physics-only runs."""
    if params:
        raise ValueError(f"idle: unknown controller_params key {sorted(params)[0]!r}")
    return Controller()


__all__ = [
    "EdgeFollowController",
    "FollowLeaderController",
    "GradientController",
    "GRADIENT_MAX",
    "OrbitController",
    "edge_follow_decide",
    "gradient_update",
    "orbit_decide",
]
