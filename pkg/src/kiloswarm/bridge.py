"""Live viewer bridge: snapshots out, steering commands in, over a websocket.

The simulation runs on its own thread and owns the world exclusively; this
module shares exactly two artifacts with it: the world's command queue
(multi-producer, drained at tick boundaries) and a latest-state slot the
broadcaster reads.  Serving therefore cannot perturb the simulation: a run
with idle clients is tick-for-tick identical to the same headless run.

Wire protocol (UTF-8 JSON text frames on /ws):

* server -> client: ``{"type": "snapshot", tick, sim_time_s, speed_factor,
  paused, comm_radius_mm, bots: [{id, x_mm, y_mm, theta_rad, led: "r,g,b",
  leg_points: [[x,y]*3]}]}`` — broadcast at a wall rate (default 30/s),
  decimated latest-wins from the tick stream.  ``leg_points`` are the
  front leg then the left and right rear legs.
* client -> server: ``{"type": "pause"|"resume"|"set_speed"|"move_bot"|
  "toggle_comms_overlay", ...}`` with an optional ``seq``; valid commands
  are queued for the next tick boundary and acknowledged with
  ``{"type": "ack", "seq"}``, invalid ones answered with
  ``{"type": "error", "reason", "seq"}`` and nothing queued.
"""
from __future__ import annotations

import asyncio
import json
import logging
import math
import os
import threading
from contextlib import asynccontextmanager
from pathlib import Path
from time import perf_counter, sleep
from typing import Optional

import uvicorn
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import FileResponse, HTMLResponse
from fastapi.staticfiles import StaticFiles

from .config import SimConfig
from .snapshots import SnapshotWriter
from .world import SteeringCommand, World

log = logging.getLogger(__name__)

DEFAULT_UI_RATE_HZ = 30.0

_PLACEHOLDER_PAGE = """<!doctype html>
<html><head><title>kiloswarm</title></head>
<body style="font-family: sans-serif">
<h1>kiloswarm bridge</h1>
<p>The simulation is being served on <code>/ws</code>.
Build the viewer (<code>cd frontend && npm install && npm run build</code>)
and restart, or point KILOSWARM_UI_DIR at a built UI, to get the
graphical interface here.</p>
</body></html>"""


def find_ui_dir() -> Optional[Path]:
    """Built frontend location: KILOSWARM_UI_DIR, else ./frontend/dist."""
    env = os.environ.get("KILOSWARM_UI_DIR")
    candidates = [Path(env)] if env else []
    candidates.append(Path.cwd() / "frontend" / "dist")
    for cand in candidates:
        if cand.is_dir() and (cand / "index.html").is_file():
            return cand
    return None


def validate_command(data, n_bots: int) -> tuple[Optional[SteeringCommand], Optional[int]]:
    """Translate one wire command into a SteeringCommand.

    Returns (command, seq); command is None for valid no-op commands
    (toggle_comms_overlay is client-side only).  Raises ValueError with a
    human-readable reason for anything malformed.
    """
    if not isinstance(data, dict):
        raise ValueError("command must be a JSON object")
    seq = data.get("seq")
    if seq is not None and not isinstance(seq, int):
        raise ValueError("seq must be an integer")
    kind = data.get("type")
    if kind == "pause":
        return SteeringCommand("pause"), seq
    if kind == "resume":
        return SteeringCommand("resume"), seq
    if kind == "toggle_comms_overlay":
        return None, seq
    if kind == "set_speed":
        factor = data.get("factor")
        if not isinstance(factor, (int, float)) or not factor > 0 or not math.isfinite(factor):
            raise ValueError(f"set_speed needs a positive finite factor, got {factor!r}")
        return SteeringCommand("set_speed_factor", factor=float(factor)), seq
    if kind == "move_bot":
        bot_id = data.get("id")
        if not isinstance(bot_id, int) or not 0 <= bot_id < n_bots:
            raise ValueError(f"move_bot: unknown robot id {bot_id!r}")
        x, y = data.get("x_mm"), data.get("y_mm")
        if not all(isinstance(v, (int, float)) and math.isfinite(v) for v in (x, y)):
            raise ValueError("move_bot needs finite x_mm and y_mm")
        return SteeringCommand("move_robot", robot_id=bot_id, target=(float(x), float(y))), seq
    raise ValueError(f"unknown command type {kind!r}")


class SimulationService:
    """Runs a world on a worker thread and publishes its latest state."""

    def __init__(self, world: World, export_path=None, speed_factor: Optional[float] = None):
        self.world = world
        if speed_factor is not None:
            world.speed_factor = speed_factor
        self._export_path = export_path
        self._latest_json: str = self._encode_wire()
        self._stop = threading.Event()
        self.finished = threading.Event()
        self._thread = threading.Thread(target=self._run, name="kiloswarm-sim", daemon=True)
        self.summary: Optional[dict] = None

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> None:
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        self._thread.join(timeout=10.0)

    # -- shared artifacts ---------------------------------------------------

    def queue_command(self, cmd: SteeringCommand) -> None:
        self.world.queue_command(cmd)

    def latest_json(self) -> str:
        return self._latest_json

    # -- internals ----------------------------------------------------------

    def _encode_wire(self) -> str:
        w = self.world
        legs = w.motion.legs
        r = legs.leg_radius_mm
        alpha = legs.leg_angle_rad
        xs, ys, thetas = w.xs, w.ys, w.thetas
        led = w.led
        bots = []
        for i in range(w.n):
            th = float(thetas[i])
            x = float(xs[i])
            y = float(ys[i])
            bots.append({
                "id": i,
                "x_mm": x,
                "y_mm": y,
                "theta_rad": th,
                "led": f"{led[i, 0]},{led[i, 1]},{led[i, 2]}",
                "leg_points": [
                    [x + r * math.cos(th), y + r * math.sin(th)],
                    [x + r * math.cos(th + alpha), y + r * math.sin(th + alpha)],
                    [x + r * math.cos(th - alpha), y + r * math.sin(th - alpha)],
                ],
            })
        return json.dumps({
            "type": "snapshot",
            "tick": w.tick,
            "sim_time_s": w.sim_time_s,
            "speed_factor": w.speed_factor,
            "paused": w.paused,
            "comm_radius_mm": w.channel.comm_radius_mm,
            "bots": bots,
        }, separators=(",", ":"))

    def _run(self) -> None:
        world = self.world
        cfg = world.config
        writer = SnapshotWriter(self._export_path) if self._export_path else None
        every = cfg.snapshot_every_n_ticks
        n_steps = math.ceil(cfg.duration_s / world.dt - 1e-9)
        start = perf_counter()
        deadline = start
        done = 0
        try:
            while done < n_steps and not self._stop.is_set():
                world.drain_commands()
                if world.paused:
                    # stay responsive: reflect steering done while frozen
                    self._latest_json = self._encode_wire()
                    sleep(0.02)
                    deadline = perf_counter()
                    continue
                world.step()
                done += 1
                self._latest_json = self._encode_wire()
                if writer and every and world.tick % every == 0:
                    writer.write(world.snapshot())
                deadline += world.dt / world.speed_factor
                now = perf_counter()
                if deadline > now:
                    sleep(deadline - now)
                else:
                    deadline = now
            wall = perf_counter() - start
            self.summary = {
                "ticks": done,
                "wall_seconds": wall,
                "realtime_factor": (done * world.dt) / wall if wall > 0 else float("inf"),
            }
        finally:
            if writer:
                writer.close()
            self.finished.set()


def create_app(service: SimulationService, ui_rate_hz: float = DEFAULT_UI_RATE_HZ,
               ui_dir: Optional[Path] = None) -> FastAPI:
    """FastAPI app: /ws for the protocol, / for the static viewer."""
    clients: set[WebSocket] = set()
    send_locks: dict[WebSocket, asyncio.Lock] = {}

    async def broadcaster() -> None:
        interval = 1.0 / ui_rate_hz
        while True:
            await asyncio.sleep(interval)
            payload = service.latest_json()
            for sock in list(clients):
                try:
                    async with send_locks[sock]:
                        await sock.send_text(payload)
                except Exception:
                    clients.discard(sock)
                    send_locks.pop(sock, None)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        task = asyncio.create_task(broadcaster())
        try:
            yield
        finally:
            task.cancel()

    app = FastAPI(lifespan=lifespan)

    @app.websocket("/ws")
    async def ws_endpoint(sock: WebSocket) -> None:
        await sock.accept()
        clients.add(sock)
        send_locks[sock] = asyncio.Lock()
        try:
            async with send_locks[sock]:
                await sock.send_text(service.latest_json())
            while True:
                text = await sock.receive_text()
                try:
                    data = json.loads(text)
                except json.JSONDecodeError as exc:
                    reply = {"type": "error", "reason": f"invalid JSON: {exc}"}
                else:
                    try:
                        cmd, seq = validate_command(data, service.world.n)
                    except ValueError as exc:
                        reply = {"type": "error", "reason": str(exc)}
                        if isinstance(data, dict) and isinstance(data.get("seq"), int):
                            reply["seq"] = data["seq"]
                    else:
                        if cmd is not None:
                            service.queue_command(cmd)
                        reply = {"type": "ack"}
                        if seq is not None:
                            reply["seq"] = seq
                async with send_locks[sock]:
                    await sock.send_text(json.dumps(reply))
        except WebSocketDisconnect:
            pass
        finally:
            clients.discard(sock)
            send_locks.pop(sock, None)

    resolved_ui = ui_dir if ui_dir is not None else find_ui_dir()
    if resolved_ui is not None:
        @app.get("/")
        async def index() -> FileResponse:
            return FileResponse(resolved_ui / "index.html")

        app.mount("/", StaticFiles(directory=resolved_ui), name="ui")
    else:
        @app.get("/")
        async def placeholder() -> HTMLResponse:
            return HTMLResponse(_PLACEHOLDER_PAGE)

    return app


class BridgeServer:
    """Uvicorn on a worker thread; port 0 picks a free port."""

    def __init__(self, app: FastAPI, host: str = "127.0.0.1", port: int = 0):
        self._config = uvicorn.Config(app, host=host, port=port, log_level="warning", ws="auto")
        self._server = uvicorn.Server(self._config)
        self._thread = threading.Thread(target=self._server.run, name="kiloswarm-bridge", daemon=True)

    def start(self, timeout: float = 10.0) -> None:
        self._thread.start()
        deadline = perf_counter() + timeout
        while not self._server.started:
            if perf_counter() > deadline:
                raise RuntimeError("bridge server failed to start")
            if not self._thread.is_alive():
                raise RuntimeError("bridge server exited during startup (port in use?)")
            sleep(0.01)

    @property
    def port(self) -> int:
        return self._server.servers[0].sockets[0].getsockname()[1]

    def stop(self) -> None:
        self._server.should_exit = True
        self._thread.join(timeout=10.0)


def serve_blocking(cfg: SimConfig, port: int, export_path=None,
                   speed_factor: Optional[float] = None) -> dict:
    """CLI entry: serve a run until its duration completes, then shut down."""
    world = World(cfg)
    service = SimulationService(world, export_path=export_path,
                                speed_factor=speed_factor if speed_factor else 1.0)
    server = BridgeServer(create_app(service), host="0.0.0.0", port=port)
    server.start()
    log.info("serving on port %d", server.port)
    service.start()
    try:
        while not service.finished.wait(timeout=0.5):
            pass
    except KeyboardInterrupt:
        service.stop()
    finally:
        server.stop()
    return service.summary or {}
