"""Edge following: circle the boundary of a group of stationary robots.

Robot 0 is mobile; all others sit still and broadcast beacons.  The mover
applies the orbit rule to the distance of the *closest* neighbour heard
recently (a 2 s window), so it slides along the edge of the group.  With
no neighbour heard inside the window it stops.
"""
from __future__ import annotations

from ..api import Controller, RobotApi, register_controller, stop, turn_left, turn_right
from ..comms import Message
from .orbit import DEFAULT_D0_MM

HEARD_WINDOW_S = 2.0
HEARD_WINDOW_KILO_TICKS = int(HEARD_WINDOW_S * 31)


def edge_follow_decide(min_neighbor_distance: float, d0: float) -> str:
    """Same rule as the orbit, applied to the closest recent neighbour."""
    return "left" if min_neighbor_distance < d0 else "right"


class EdgeFollowController(Controller):
    def __init__(self, d0_mm: float = DEFAULT_D0_MM):
        if d0_mm <= 0:
            raise ValueError(f"d0_mm must be positive, got {d0_mm}")
        self.d0_mm = d0_mm
        self.is_mobile = False
        self.heard: dict[int, tuple[int, float]] = {}  # sender -> (kilo_ticks, mm)

    def setup(self, bot: RobotApi) -> None:
        self.is_mobile = bot.kilo_uid == 0
        bot.set_color(0, 3, 0) if self.is_mobile else bot.set_color(1, 1, 1)

    def loop(self, bot: RobotApi) -> None:
        if not self.is_mobile:
            return
        cutoff = bot.kilo_ticks - HEARD_WINDOW_KILO_TICKS
        best = None
        stale = []
        for sender, (heard_at, dist) in self.heard.items():
            if heard_at < cutoff:
                stale.append(sender)
            elif best is None or (dist, sender) < best:
                best = (dist, sender)  # ties break toward the lowest id
        for sender in stale:
            del self.heard[sender]
        if best is None:
            stop(bot)
        elif best[0] < self.d0_mm:
            turn_left(bot)
        else:
            turn_right(bot)

    def message_tx(self, bot: RobotApi) -> bytes | None:
        if self.is_mobile:
            return None
        return b"\x01"

    def message_rx(self, bot: RobotApi, message: Message, distance_mm: float) -> None:
        if self.is_mobile:
            self.heard[message.sender_id] = (bot.kilo_ticks, distance_mm)


@register_controller("edge_follow")
def make_edge_follow(params) -> EdgeFollowController:
    extra = set(params) - {"d0_mm"}
    if extra:
        raise ValueError(f"edge_follow: unknown controller_params key {sorted(extra)[0]!r}")
    return EdgeFollowController(d0_mm=params.get("d0_mm", DEFAULT_D0_MM))
