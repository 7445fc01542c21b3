"""Snapshot records and their JSON-lines export format.

One snapshot is the full observable swarm state at a tick: robots in
ascending id order, one record each.  Exports are one JSON document per
line, stable enough to diff byte-for-byte between runs; the schema is
published in ``docs/snapshot-schema.json``.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BotRecord:
    id: int
    x_mm: float
    y_mm: float
    theta_rad: float
    led: str                 # "r,g,b" with components in {0..3}
    motors: tuple[int, int]  # (left, right) duties
    debug: str = ""


@dataclass(frozen=True)
class Snapshot:
    tick: int
    sim_time_s: float
    bots: list[BotRecord]


def snapshot_to_dict(snap: Snapshot) -> dict:
    return {
        "tick": snap.tick,
        "sim_time_s": snap.sim_time_s,
        "bots": [
            {
                "id": b.id,
                "x_mm": b.x_mm,
                "y_mm": b.y_mm,
                "theta_rad": b.theta_rad,
                "led": b.led,
                "motors": list(b.motors),
                "debug": b.debug,
            }
            for b in snap.bots
        ],
    }


def snapshot_from_dict(data: dict) -> Snapshot:
    return Snapshot(
        tick=data["tick"],
        sim_time_s=data["sim_time_s"],
        bots=[
            BotRecord(
                id=b["id"],
                x_mm=b["x_mm"],
                y_mm=b["y_mm"],
                theta_rad=b["theta_rad"],
                led=b["led"],
                motors=(b["motors"][0], b["motors"][1]),
                debug=b.get("debug", ""),
            )
            for b in data["bots"]
        ],
    )


def encode_snapshot(snap: Snapshot) -> str:
    return json.dumps(snapshot_to_dict(snap), separators=(",", ":"))


class SnapshotWriter:
    """Streams snapshots to a JSON-lines file; usable as a context manager."""

    def __init__(self, path):
        self.path = Path(path)
        self._fh = self.path.open("w", encoding="utf-8")

    def write(self, snap: Snapshot) -> None:
        try:
            self._fh.write(encode_snapshot(snap))
            self._fh.write("\n")
        except OSError:
            log.warning("snapshot export to %s failed; file is incomplete", self.path)
            raise

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "SnapshotWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def write_snapshots(snapshots, path) -> None:
    """Write a snapshot stream to ``path``, one JSON document per line."""
    with SnapshotWriter(path) as writer:
        for snap in snapshots:
            writer.write(snap)


def read_snapshots(path) -> list[Snapshot]:
    """Parse a JSON-lines snapshot file back into records."""
    out = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(snapshot_from_dict(json.loads(line)))
    return out
