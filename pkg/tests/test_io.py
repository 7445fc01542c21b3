"""Snapshot export format, schema conformance, and the CLI."""
import json
import subprocess
import sys
from pathlib import Path

from kiloswarm.config import SimConfig
from kiloswarm.snapshots import (
    BotRecord,
    Snapshot,
    encode_snapshot,
    read_snapshots,
    write_snapshots,
)
from kiloswarm.world import World, run
from kiloswarm.cli import main as cli_main

CONFIG_DIR = Path(__file__).resolve().parents[1] / "src" / "kiloswarm" / "configs"
SCHEMA_PATH = Path(__file__).resolve().parents[1] / "docs" / "snapshot-schema.json"


def sample_snapshots(n=3):
    cfg = SimConfig(n_bots=2, controller="follow_the_leader",
                    initial_layout={"type": "explicit", "poses": [[0, 0], [60, 0]]})
    w = World(cfg)
    return run(w, n / 31.0, snapshot_every_n_ticks=1).snapshots


class TestSnapshotFormat:
    def test_empty_stream_empty_file(self, tmp_path):
        path = tmp_path / "out.jsonl"
        write_snapshots([], path)
        assert path.read_text() == ""

    def test_line_per_snapshot(self, tmp_path):
        snaps = sample_snapshots(3)
        path = tmp_path / "out.jsonl"
        write_snapshots(snaps, path)
        lines = path.read_text().splitlines()
        assert len(lines) == 3
        for line in lines:
            doc = json.loads(line)
            assert len(doc["bots"]) == 2

    def test_round_trip(self, tmp_path):
        snaps = sample_snapshots(5)
        path = tmp_path / "out.jsonl"
        write_snapshots(snaps, path)
        back = read_snapshots(path)
        assert back == snaps

    def test_robots_listed_ascending(self):
        for snap in sample_snapshots(2):
            assert [b.id for b in snap.bots] == sorted(b.id for b in snap.bots)

    def test_lines_validate_against_published_schema(self):
        import jsonschema

        schema = json.loads(SCHEMA_PATH.read_text())
        for snap in sample_snapshots(4):
            jsonschema.validate(json.loads(encode_snapshot(snap)), schema)

    def test_led_encoding(self):
        snap = Snapshot(tick=0, sim_time_s=0.0,
                        bots=[BotRecord(0, 1.0, 2.0, 0.5, "3,0,1", (255, 0))])
        doc = json.loads(encode_snapshot(snap))
        assert doc["bots"][0]["led"] == "3,0,1"


class TestCli:
    def run_cli(self, *args):
        return cli_main(list(args))

    def test_run_orbit_headless(self, tmp_path, capsys):
        code = self.run_cli("run", "--config", str(CONFIG_DIR / "orbit.json"),
                            "--duration", "10")
        assert code == 0
        summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert summary["ticks"] == 310
        assert summary["realtime_factor"] > 1.0

    def test_missing_config_exit_1(self, capsys):
        assert self.run_cli("run", "--config", "does-not-exist.json") == 1
        assert "config error" in capsys.readouterr().err

    def test_invalid_config_exit_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"msg_success_prob": 2.0}')
        assert self.run_cli("run", "--config", str(bad)) == 1

    def test_runtime_error_exit_2(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({
            "n_bots": 1, "controller": "orbit",
            "controller_params": {"bogus_key": 1},
        }))
        assert self.run_cli("run", "--config", str(cfg)) == 2

    def test_seed_override_deterministic_exports(self, tmp_path, capsys):
        out1 = tmp_path / "a.jsonl"
        out2 = tmp_path / "b.jsonl"
        for out in (out1, out2):
            code = self.run_cli("run", "--config", str(CONFIG_DIR / "gradient.json"),
                                "--duration", "5", "--seed", "7", "--export", str(out))
            assert code == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_bench_emits_table(self, capsys):
        code = self.run_cli("bench", "--bots", "8,16", "--duration", "2",
                            "--strategy", "auto", "--workload", "edge_follow")
        assert code == 0
        rows = [json.loads(line) for line in capsys.readouterr().out.strip().splitlines()]
        assert [r["bots"] for r in rows] == [8, 16]
        for row in rows:
            assert row["strategy"] == "brute"  # auto resolves below the crossover
            assert row["ticks"] == 62
            assert row["wall_s"] > 0

    def test_bench_rejects_bad_sizes(self, capsys):
        assert self.run_cli("bench", "--bots", "ten") == 1

    def test_console_script_installed(self):
        proc = subprocess.run([sys.executable, "-m", "kiloswarm.cli", "--help"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert "bench" in proc.stdout
