"""Follow-the-leader: a moving chain where every robot transmits and moves.

Robot 0 leads with a fixed wander schedule; robot k steers toward robot
k-1 with the orbit rule, using only that predecessor's messages.  The
point of this controller is load, not choreography: with every robot
computing, transmitting and moving each tick it is the heavy benchmark
workload.
"""
from __future__ import annotations

from ..api import Controller, RobotApi, go_forward, register_controller, turn_left, turn_right
from ..comms import Message
from .orbit import DEFAULT_D0_MM, orbit_decide

# leader schedule, in kilo_ticks within one period
_WANDER_PERIOD = 248          # 8 s
_SEG_FORWARD_1 = 93           # 3 s forward
_SEG_LEFT = 124               # 1 s left
_SEG_FORWARD_2 = 217          # 3 s forward


class FollowLeaderController(Controller):
    def __init__(self, d0_mm: float = DEFAULT_D0_MM):
        if d0_mm <= 0:
            raise ValueError(f"d0_mm must be positive, got {d0_mm}")
        self.d0_mm = d0_mm
        self.rank = 0
        self.distance: float | None = None

    def setup(self, bot: RobotApi) -> None:
        self.rank = bot.kilo_uid
        bot.set_color(3, 2, 0) if self.rank == 0 else bot.set_color(0, 2, 2)

    def loop(self, bot: RobotApi) -> None:
        if self.rank == 0:
            t = bot.kilo_ticks % _WANDER_PERIOD
            if t < _SEG_FORWARD_1:
                go_forward(bot)
            elif t < _SEG_LEFT:
                turn_left(bot)
            elif t < _SEG_FORWARD_2:
                go_forward(bot)
            else:
                turn_right(bot)
            return
        # follower hot path (the bench workload): motor writes inlined
        d = self.distance
        if d is None:
            bot.set_motors(255, 255)
        elif d < self.d0_mm:
            bot.set_motors(0, 255)   # turn left
        else:
            bot.set_motors(255, 0)   # turn right

    def message_tx(self, bot: RobotApi) -> bytes:
        return self.rank.to_bytes(2, "little")

    def message_rx(self, bot: RobotApi, message: Message, distance_mm: float) -> None:
        if self.rank and int.from_bytes(message.payload[:2], "little") == self.rank - 1:
            self.distance = distance_mm

    def decide(self, distance_mm: float) -> str:
        """Turn choice a follower makes for a predecessor distance."""
        return orbit_decide(distance_mm, self.d0_mm)


@register_controller("follow_the_leader")
def make_follow_leader(params) -> FollowLeaderController:
    extra = set(params) - {"d0_mm"}
    if extra:
        raise ValueError(f"follow_the_leader: unknown controller_params key {sorted(extra)[0]!r}")
    return FollowLeaderController(d0_mm=params.get("d0_mm", DEFAULT_D0_MM))
