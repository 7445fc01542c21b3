"""The programming surface robot controllers are written against.

A controller is one object per robot; its instance attributes are the
robot's private state (nothing else persists between ``loop`` calls, and
no other robot can reach them).  Every callback receives the robot's
:class:`RobotApi` handle, which exposes the clock, the actuators and the
sensors.  Callbacks run inside the simulation tick; the handle must not
be used from outside a callback.

Porting rules for code meant to also run on 8-bit targets:

1. keep all persistent state on the controller instance,
2. time actions with ``kilo_ticks`` (31 per second) instead of ``delay``,
   which returns immediately here,
3. stick to explicit-width integer semantics (wrap at 8/16 bits where the
   target would).
"""
from __future__ import annotations

import random
from typing import Callable, Mapping, Optional

from .comms import Message
from .physics import MotorCommand

# duty used by convention for "motor on"; kinematics only test for nonzero
FULL_SPEED = 255


def turn_left(bot: "RobotApi") -> None:
    """Pivot counterclockwise: right motor on, left rear leg planted."""
    bot.set_motors(0, FULL_SPEED)


def turn_right(bot: "RobotApi") -> None:
    """Pivot clockwise: left motor on, right rear leg planted."""
    bot.set_motors(FULL_SPEED, 0)


def go_forward(bot: "RobotApi") -> None:
    bot.set_motors(FULL_SPEED, FULL_SPEED)


def stop(bot: "RobotApi") -> None:
    bot.set_motors(0, 0)


class RobotApi:
    """Per-robot handle: clock, id, motors, LED, light sensor, soft RNG."""

    __slots__ = (
        "kilo_uid", "kilo_ticks", "debug",
        "_world", "_i", "_ml", "_mr", "_spin", "_led", "_xs", "_ys",
        "_rand",
    )

    def __init__(self, world, index: int):
        self.kilo_uid = index
        self.kilo_ticks = 0
        self.debug = ""
        self._world = world
        self._i = index
        self._ml = world.motor_left
        self._mr = world.motor_right
        self._spin = world.spinup
        self._led = world.led
        self._xs = world.xs
        self._ys = world.ys
        self._rand: Optional[random.Random] = None

    def set_motors(self, left: int, right: int) -> None:
        """Set motor duties; takes effect in this tick's motion update."""
        if not (0 <= left <= 255 and 0 <= right <= 255):
            raise ValueError(f"motor duties must be in [0, 255], got ({left}, {right})")
        self._ml[self._i] = left
        self._mr[self._i] = right

    def spinup_motors(self) -> None:
        """Request the hardware spin-up kick; has no simulated effect."""
        self._spin[self._i] = 0.015

    def delay(self, ms: float) -> None:
        """Returns immediately; use ``kilo_ticks`` for timing instead."""

    def set_color(self, r: int, g: int, b: int) -> None:
        """Set the status LED; components clamp to the 2-bit range {0..3}."""
        led = self._led
        i = self._i
        led[i, 0] = min(max(int(r), 0), 3)
        led[i, 1] = min(max(int(g), 0), 3)
        led[i, 2] = min(max(int(b), 0), 3)

    def get_ambientlight(self) -> int:
        """Ambient light at the robot's position, 0 when no profile is set."""
        env = self._world.env
        if env is None or env.light_at is None:
            return 0
        i = self._i
        value = env.light_at(float(self._xs[i]), float(self._ys[i]))
        return int(round(min(max(value, 0.0), 1023.0)))

    def rand_soft(self) -> int:
        """Next byte from the robot's deterministic software RNG."""
        if self._rand is None:
            self._rand = random.Random(self._world.seed * 1_000_003 + self.kilo_uid + 1)
        return self._rand.getrandbits(8)

    def rand_seed(self, seed: int) -> None:
        """Restart the software RNG from an explicit seed."""
        self._rand = random.Random(seed)

    @property
    def motors(self) -> MotorCommand:
        i = self._i
        return MotorCommand(int(self._ml[i]), int(self._mr[i]), float(self._spin[i]))


class Controller:
    """Base controller: override the callbacks your robot needs.

    ``message_tx`` returns the payload to broadcast (up to 9 bytes,
    zero-padded) or ``None`` to stay silent. ``message_tx_success`` is
    called after each send as an always-true notification; its timing is
    not validated against hardware.
    """

    def setup(self, bot: RobotApi) -> None:
        pass

    def loop(self, bot: RobotApi) -> None:
        pass

    def message_tx(self, bot: RobotApi) -> Optional[bytes]:
        return None

    def message_rx(self, bot: RobotApi, message: Message, distance_mm: float) -> None:
        pass

    def message_tx_success(self, bot: RobotApi) -> None:
        pass


ControllerFactory = Callable[[Mapping], Controller]

_REGISTRY: dict[str, ControllerFactory] = {}


def register_controller(name: str):
    """Register a factory mapping config params to a fresh controller."""

    def deco(factory: ControllerFactory) -> ControllerFactory:
        if name in _REGISTRY:
            raise ValueError(f"controller {name!r} is already registered")
        _REGISTRY[name] = factory
        return factory

    return deco


def controller_factory(name: str) -> ControllerFactory:
    try:
        return _REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(_REGISTRY)) or "(none)"
        raise KeyError(f"unknown controller {name!r}; registered: {known}") from None


def registered_controllers() -> list[str]:
    return sorted(_REGISTRY)
