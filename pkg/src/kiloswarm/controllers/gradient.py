"""Hop-count gradient: a value spreading outward from a seed robot.

Robot 0 holds value 0 forever; every other robot adopts one more than the
smallest value it hears.  On a static connected swarm the values settle
to the exact hop distance from the seed.  Hop counts (rather than summed
distance estimates) keep the steady state checkable against a plain
breadth-first search.
"""
from __future__ import annotations

from ..api import Controller, RobotApi, register_controller
from ..comms import Message

GRADIENT_MAX = 255  # saturation sentinel: "no value heard yet"

PALETTE = (
    (3, 0, 0), (3, 3, 0), (0, 3, 0), (0, 3, 3), (0, 0, 3), (3, 0, 3),
)


def gradient_update(own: int, neighbor_values, seeded: bool = False) -> int:
    """Next gradient value given the values heard since the last update."""
    if seeded:
        return 0
    values = list(neighbor_values)
    if not values:
        return own
    return min(GRADIENT_MAX, min(values) + 1)


class GradientController(Controller):
    def __init__(self):
        self.seeded = False
        self.value = GRADIENT_MAX
        self.heard: list[int] = []

    def setup(self, bot: RobotApi) -> None:
        self.seeded = bot.kilo_uid == 0
        self.value = 0 if self.seeded else GRADIENT_MAX
        self._show(bot)

    def message_tx(self, bot: RobotApi) -> bytes:
        # fold everything heard since the last transmission into the value
        new = gradient_update(self.value, self.heard, self.seeded)
        self.heard.clear()
        if new != self.value:
            self.value = new
            self._show(bot)
        return bytes([self.value])

    def message_rx(self, bot: RobotApi, message: Message, distance_mm: float) -> None:
        if not self.seeded:
            self.heard.append(message.payload[0])

    def _show(self, bot: RobotApi) -> None:
        bot.set_color(*PALETTE[self.value % len(PALETTE)])
        bot.debug = f"grad={self.value}"


@register_controller("gradient")
def make_gradient(params) -> GradientController:
    if params:
        raise ValueError(f"gradient: unknown controller_params key {sorted(params)[0]!r}")
    return GradientController()
