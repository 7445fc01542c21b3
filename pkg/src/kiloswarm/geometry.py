"""2D pose primitives shared by the whole simulator."""
from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


def normalize_angle(theta: float) -> float:
    """Wrap an angle to [-pi, pi)."""
    return (theta + math.pi) % TWO_PI - math.pi


@dataclass
class Pose:
    """Robot pose: position in millimetres, heading in radians.

    Heading is counterclockwise-positive with 0 along the +x axis and is
    kept normalized to [-pi, pi).
    """

    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite pose position ({self.x}, {self.y})")
        self.theta = normalize_angle(self.theta)

    def distance_to(self, other: "Pose") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)
