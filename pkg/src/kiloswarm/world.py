"""World state and the tick loop.

One tick runs, in order: drain queued steering commands, call every
controller's loop once (ascending robot id unless shuffling is enabled),
deliver due messages, integrate motion, resolve collisions, advance the
clock.  Everything a tick does is a pure function of (config, seed,
controller code, command history), so runs replay bit for bit.

The world is single-threaded: exactly one thread may step it.  Other
threads interact only through :meth:`World.queue_command` (drained at tick
boundaries) and immutable snapshots.

Random draws come from one stream per world, consumed in a fixed order
per tick: loop-order shuffle (if enabled), then channel draws, then
collision tie-breaks.  Layout draws happen once, before the first tick.
"""
from __future__ import annotations

import logging
import math
import queue
from dataclasses import dataclass, field
from time import perf_counter, sleep
from typing import Callable, Optional

import numpy as np

from .api import Controller, RobotApi, controller_factory
from .comms import ChannelParams, ChannelStats, deliver_messages
from .config import SimConfig, generate_layout
from .geometry import Pose
from .neighbors import choose_strategy, make_backend
from .physics import (
    Environment,
    LegGeometry,
    MotionParams,
    MotorCommand,
    integrate_arrays,
    resolve_collisions,
)
from .snapshots import BotRecord, Snapshot

log = logging.getLogger(__name__)

COMMAND_KINDS = ("pause", "resume", "set_speed_factor", "move_robot")


class CommandError(ValueError):
    """A steering command was rejected; simulated state is untouched."""


class ControllerError(RuntimeError):
    """A controller callback failed; carries the offending robot id."""

    def __init__(self, robot_id: int, message: str):
        super().__init__(f"robot {robot_id}: {message}")
        self.robot_id = robot_id


@dataclass(frozen=True)
class SteeringCommand:
    """Operator action applied only at a tick boundary."""

    kind: str
    robot_id: Optional[int] = None
    target: Optional[tuple[float, float]] = None
    factor: Optional[float] = None


@dataclass
class RobotState:
    """Assembled per-robot view of the world arrays."""

    uid: int
    pose: Pose
    motors: MotorCommand
    led: tuple[int, int, int]
    kilo_ticks: int
    debug: str
    controller: Controller
    tx_message: Optional[bytes] = None


class World:
    """Owns all robot state and advances it one tick at a time."""

    def __init__(self, config: SimConfig, environment: Optional[Environment] = None,
                 factory: Optional[Callable] = None):
        self.config = config
        self.env = environment
        self.seed = config.rand_seed
        self.rng = np.random.default_rng(config.rand_seed)
        self.n = config.n_bots
        self.dt = config.time_step_s
        self.tick = 0
        self.paused = False
        self.speed_factor = 1.0

        self.motion = MotionParams(
            speed_mm_s=config.speed_mm_s,
            turn_rate_rad_s=config.turn_rate_rad_s,
            legs=LegGeometry(
                leg_angle_deg=config.leg_angle_deg,
                leg_radius_mm=config.leg_radius_mm,
                body_radius_mm=config.body_radius_mm,
            ),
        )
        self.channel = ChannelParams(
            comm_radius_mm=config.comm_radius_mm,
            msg_success_prob=config.msg_success_prob,
            distance_noise_std_mm=config.distance_noise_std_mm,
            tx_period_ticks=config.tx_period_ticks,
        )
        self.channel_stats = ChannelStats()

        self.xs, self.ys, self.thetas = generate_layout(config, self.rng)
        n = self.n
        self.motor_left = np.zeros(n, dtype=np.int16)
        self.motor_right = np.zeros(n, dtype=np.int16)
        self.spinup = np.zeros(n, dtype=np.float64)
        self.led = np.zeros((n, 3), dtype=np.uint8)

        self.strategy = choose_strategy(n, config.neighbor_strategy)
        self._cell_size = max(config.comm_radius_mm, 2.0 * config.body_radius_mm)
        self._backend = make_backend(self.strategy, n, self._cell_size)
        self._backend_tick = -1

        self._commands: queue.SimpleQueue = queue.SimpleQueue()
        self._id_order = list(range(n))
        self._budget_s = (
            config.loop_budget_ms / 1000.0 if config.enforce_loop_budget else None
        )

        make = factory if factory is not None else controller_factory(config.controller)
        self.controllers: list[Controller] = [make(config.controller_params) for _ in range(n)]
        self.apis: list[RobotApi] = [RobotApi(self, i) for i in range(n)]
        self._loops = [c.loop for c in self.controllers]
        for i in range(n):
            self.controllers[i].setup(self.apis[i])

    # ------------------------------------------------------------------ time

    @property
    def sim_time_s(self) -> float:
        return self.tick * self.dt

    def kilo_ticks_now(self) -> int:
        # epsilon guards exact tick boundaries against float rounding
        return int(self.tick * self.dt * 31.0 + 1e-9)

    # ------------------------------------------------------------- stepping

    def step(self) -> None:
        """Advance the world by one tick.  Must not be called while paused."""
        if self.paused:
            raise RuntimeError("step() called on a paused world")
        self.drain_commands()

        if self.config.shuffle_loop_order:
            order = self.rng.permutation(self.n).tolist()
        else:
            order = self._id_order

        kt = self.kilo_ticks_now()
        apis = self.apis
        loops = self._loops
        i = -1
        try:
            if self._budget_s is None:
                for i in order:
                    bot = apis[i]
                    bot.kilo_ticks = kt
                    loops[i](bot)
            else:
                budget = self._budget_s
                for i in order:
                    bot = apis[i]
                    bot.kilo_ticks = kt
                    t0 = perf_counter()
                    loops[i](bot)
                    if perf_counter() - t0 > budget:
                        raise ControllerError(
                            i, f"loop call exceeded the {budget * 1e3:.1f} ms wall budget"
                        )
        except ControllerError:
            raise
        except Exception as exc:
            raise ControllerError(i, f"loop raised {exc!r}") from exc

        deliver_messages(self)

        clipping = self.env is not None and self.env.is_blocked is not None
        if clipping:
            self._pre_move_x = self.xs.copy()
            self._pre_move_y = self.ys.copy()
        integrate_arrays(
            self.xs, self.ys, self.thetas,
            self.motor_left, self.motor_right,
            self.motion, self.dt,
        )
        np.subtract(self.spinup, self.dt, out=self.spinup)
        np.maximum(self.spinup, 0.0, out=self.spinup)
        if clipping:
            self._clip_blocked()

        self._resolve_world_collisions(self.config.collision_max_passes)
        self.tick += 1

    def _clip_blocked(self) -> None:
        # revert blocked translations; pure turns keep their heading change
        blocked = self.env.is_blocked
        xs, ys = self.xs, self.ys
        old_x, old_y = self._pre_move_x, self._pre_move_y
        for i in range(self.n):
            if blocked(float(xs[i]), float(ys[i])):
                xs[i] = old_x[i]
                ys[i] = old_y[i]

    def _resolve_world_collisions(self, max_passes: int) -> None:
        if self.n < 2 or max_passes < 1:
            return
        pos = np.column_stack((self.xs, self.ys))
        disp = resolve_collisions(
            pos,
            self.motion.legs.body_radius_mm,
            max_passes=max_passes,
            tolerance=self.config.collision_tolerance_mm,
            rng=self.rng,
            strategy=self.strategy,
        )
        if disp.any():
            self.xs += disp[:, 0]
            self.ys += disp[:, 1]

    # ------------------------------------------------------------- commands

    def queue_command(self, cmd: SteeringCommand) -> None:
        """Thread-safe enqueue; the command applies at the next tick boundary."""
        self._commands.put(cmd)

    def drain_commands(self) -> None:
        """Apply all queued commands.  Rejections are logged, never fatal."""
        while True:
            try:
                cmd = self._commands.get_nowait()
            except queue.Empty:
                return
            try:
                self.apply_command(cmd)
            except CommandError as exc:
                log.warning("steering command rejected: %s", exc)

    def apply_command(self, cmd: SteeringCommand) -> None:
        if cmd.kind == "pause":
            self.paused = True
        elif cmd.kind == "resume":
            self.paused = False
        elif cmd.kind == "set_speed_factor":
            if cmd.factor is None or not cmd.factor > 0:
                raise CommandError(f"set_speed_factor needs a positive factor, got {cmd.factor}")
            self.speed_factor = float(cmd.factor)
        elif cmd.kind == "move_robot":
            if cmd.robot_id is None or cmd.target is None:
                raise CommandError("move_robot needs both robot_id and target")
            if not 0 <= cmd.robot_id < self.n:
                raise CommandError(f"unknown robot id {cmd.robot_id}")
            x, y = cmd.target
            if not (math.isfinite(x) and math.isfinite(y)):
                raise CommandError(f"move_robot target must be finite, got {cmd.target}")
            self.xs[cmd.robot_id] = x
            self.ys[cmd.robot_id] = y
            self._resolve_world_collisions(max_passes=1)
        else:
            raise CommandError(f"unknown command kind {cmd.kind!r}")

    # ---------------------------------------------------------------- views

    def comms_backend(self):
        """Neighbor backend over this tick's pre-motion positions."""
        if self._backend_tick != self.tick:
            self._backend.rebuild(np.column_stack((self.xs, self.ys)))
            self._backend_tick = self.tick
        return self._backend

    def pose(self, robot_id: int) -> Pose:
        return Pose(float(self.xs[robot_id]), float(self.ys[robot_id]), float(self.thetas[robot_id]))

    def robot_state(self, robot_id: int) -> RobotState:
        if not 0 <= robot_id < self.n:
            raise KeyError(f"unknown robot id {robot_id}")
        bot = self.apis[robot_id]
        return RobotState(
            uid=robot_id,
            pose=self.pose(robot_id),
            motors=bot.motors,
            led=(int(self.led[robot_id, 0]), int(self.led[robot_id, 1]), int(self.led[robot_id, 2])),
            kilo_ticks=self.kilo_ticks_now(),
            debug=bot.debug,
            controller=self.controllers[robot_id],
        )

    @property
    def robots(self) -> list[RobotState]:
        return [self.robot_state(i) for i in range(self.n)]

    def snapshot(self) -> Snapshot:
        xs, ys, thetas = self.xs, self.ys, self.thetas
        ml, mr, led = self.motor_left, self.motor_right, self.led
        apis = self.apis
        bots = [
            BotRecord(
                id=i,
                x_mm=float(xs[i]),
                y_mm=float(ys[i]),
                theta_rad=float(thetas[i]),
                led=f"{led[i, 0]},{led[i, 1]},{led[i, 2]}",
                motors=(int(ml[i]), int(mr[i])),
                debug=apis[i].debug,
            )
            for i in range(self.n)
        ]
        return Snapshot(tick=self.tick, sim_time_s=self.sim_time_s, bots=bots)


@dataclass
class RunResult:
    """Outcome of a run: time bookkeeping plus any collected snapshots."""

    ticks: int
    wall_seconds: float
    realtime_factor: float
    snapshots: list[Snapshot] = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "ticks": self.ticks,
            "wall_seconds": self.wall_seconds,
            "realtime_factor": self.realtime_factor,
        }


def run(
    world: World,
    duration_s: float,
    snapshot_every_n_ticks: int = 0,
    sink: Optional[Callable[[Snapshot], None]] = None,
    pace: bool = False,
) -> RunResult:
    """Step the world for a simulated duration, emitting periodic snapshots.

    ``snapshot_every_n_ticks == 0`` emits nothing (summary only).  Snapshots
    go to ``sink`` when given, otherwise they are collected on the result.
    With ``pace`` the loop sleeps to hold a wall rate of
    ``speed_factor`` simulated seconds per wall second; pacing never
    changes what the ticks compute.
    """
    if duration_s <= 0:
        raise ValueError(f"duration_s must be positive, got {duration_s}")
    if snapshot_every_n_ticks < 0:
        raise ValueError("snapshot_every_n_ticks must be >= 0")
    # the epsilon keeps exact multiples of dt from rounding up an extra step
    n_steps = math.ceil(duration_s / world.dt - 1e-9)
    collected: list[Snapshot] = []
    every = snapshot_every_n_ticks

    start = perf_counter()
    deadline = start
    for _ in range(n_steps):
        world.drain_commands()
        while world.paused:
            sleep(0.001)
            world.drain_commands()
            deadline = perf_counter()
        world.step()
        if every and world.tick % every == 0:
            snap = world.snapshot()
            if sink is not None:
                sink(snap)
            else:
                collected.append(snap)
        if pace:
            deadline += world.dt / world.speed_factor
            now = perf_counter()
            if deadline > now:
                sleep(deadline - now)
            else:
                deadline = now
    wall = perf_counter() - start
    simulated = n_steps * world.dt
    return RunResult(
        ticks=n_steps,
        wall_seconds=wall,
        realtime_factor=simulated / wall if wall > 0 else float("inf"),
        snapshots=collected,
    )
