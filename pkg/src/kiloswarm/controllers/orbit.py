"""Orbit demo: one robot circles a stationary one at a setpoint distance.

Robot 0 is the star: it stays put and broadcasts a beacon.  Every other
robot is a planet: it listens for the star's beacon, estimates the
distance, and steers with a single rule — closer than the setpoint, turn
left; otherwise turn right — which produces a clockwise orbit.  The rule
is a reconstruction of the classic demo from its one-line description;
the exact reference code is not reproduced here.
"""
from __future__ import annotations

from ..api import Controller, RobotApi, register_controller, stop, turn_left, turn_right
from ..comms import Message

DEFAULT_D0_MM = 60.0

ROLE_STAR = 1
ROLE_PLANET = 0


def orbit_decide(d_measured: float, d0: float) -> str:
    """Turn direction for a clockwise orbit: left iff closer than d0."""
    if d_measured < 0:
        raise ValueError(f"d_measured must be >= 0, got {d_measured}")
    return "left" if d_measured < d0 else "right"


class OrbitController(Controller):
    def __init__(self, d0_mm: float = DEFAULT_D0_MM):
        if d0_mm <= 0:
            raise ValueError(f"d0_mm must be positive, got {d0_mm}")
        self.d0_mm = d0_mm
        self.is_star = False
        self.distance: float | None = None

    def setup(self, bot: RobotApi) -> None:
        self.is_star = bot.kilo_uid == 0
        if self.is_star:
            bot.set_color(3, 0, 0)
        else:
            bot.set_color(0, 0, 3)

    def loop(self, bot: RobotApi) -> None:
        if self.is_star:
            return
        d = self.distance
        if d is None:
            stop(bot)
        elif d < self.d0_mm:
            turn_left(bot)
        else:
            turn_right(bot)

    def message_tx(self, bot: RobotApi) -> bytes:
        return bytes([ROLE_STAR if self.is_star else ROLE_PLANET])

    def message_rx(self, bot: RobotApi, message: Message, distance_mm: float) -> None:
        if not self.is_star and message.payload[0] == ROLE_STAR:
            self.distance = distance_mm


@register_controller("orbit")
def make_orbit(params) -> OrbitController:
    extra = set(params) - {"d0_mm"}
    if extra:
        raise ValueError(f"orbit: unknown controller_params key {sorted(extra)[0]!r}")
    return OrbitController(d0_mm=params.get("d0_mm", DEFAULT_D0_MM))
