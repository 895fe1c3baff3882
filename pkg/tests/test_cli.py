"""Command-line behaviors: logs, exit codes, file outputs."""

import json

import pytest

from nav2d.cli import _parse_pairs, main
from nav2d.mapping import save_map
from nav2d.session import publish_live_map


class TestNavigate:
    def test_one_meter_goal_log_order_and_exit(self, capsys):
        rc = main(["navigate", "1", "1"])
        out = capsys.readouterr().out.splitlines()
        assert out[:4] == ["Set X = 1", "Set W = 1", "Waiting for server",
                           "Sending Goals"]
        assert out[-1].startswith("goal succeeded")
        assert rc == 0

    def test_zero_goal_succeeds_in_place(self, capsys):
        rc = main(["navigate", "0", "1"])
        assert rc == 0
        assert "goal succeeded" in capsys.readouterr().out

    def test_quat_w_out_of_range_exits_2(self, capsys):
        rc = main(["navigate", "1", "2"])
        assert rc == 2
        assert "quat_w" in capsys.readouterr().err

    def test_timeout_leaves_goal_unfinished(self, capsys):
        rc = main(["navigate", "3", "1", "--timeout", "0.5"])
        assert rc == 1
        out = capsys.readouterr().out
        assert "goal succeeded" not in out

    def test_world_from_saved_map(self, tmp_path, capsys, demo_grid):
        save_map(demo_grid, tmp_path / "world")
        rc = main(["navigate", "--map", str(tmp_path / "world"), "0", "1"])
        assert rc == 0
        assert "goal succeeded" in capsys.readouterr().out


class TestMapSaver:
    def test_missing_session_exits_2(self, tmp_path, capsys):
        rc = main(["map-saver", "-f", str(tmp_path / "out"),
                   "--session", str(tmp_path / "absent.npz")])
        assert rc == 2
        assert "no live mapping session" in capsys.readouterr().err

    def test_saves_published_map(self, tmp_path, capsys, demo_grid):
        session = str(tmp_path / "live.npz")
        publish_live_map(demo_grid, session)
        rc = main(["map-saver", "-f", str(tmp_path / "out"),
                   "--session", session])
        assert rc == 0
        assert (tmp_path / "out.pgm").exists()
        assert (tmp_path / "out.yaml").exists()
        assert capsys.readouterr().out.count("wrote") == 2


class TestSim:
    def test_short_headless_run_publishes(self, tmp_path, capsys):
        session = str(tmp_path / "live.npz")
        rc = main(["sim", "--duration", "1.0", "--cmd", "0.3", "0.2",
                   "--session", session])
        assert rc == 0
        assert (tmp_path / "live.npz").exists()
        out = capsys.readouterr().out
        assert "live map published" in out
        assert "pose=" in out  # per-second progress line

    def test_bad_config_exits_2(self, tmp_path, capsys):
        cfg = tmp_path / "run.yaml"
        cfg.write_text("planner:\n  max_velocity: 1.0\n")
        rc = main(["sim", "--duration", "0.2", "--config", str(cfg),
                   "--session", str(tmp_path / "live.npz")])
        assert rc == 2
        assert "max_velocity" in capsys.readouterr().err


class TestTeleop:
    def test_requires_tty(self, capsys):
        rc = main(["teleop"])
        assert rc == 2
        assert "interactive terminal" in capsys.readouterr().err


class TestBenchmarkCommand:
    def test_single_pair_quick_run(self, tmp_path, capsys):
        out_json = tmp_path / "rows.json"
        rc = main(["benchmark", "--pairs", "0.1:0.5", "--timeout", "2",
                   "--json", str(out_json)])
        assert rc == 0
        rows = json.loads(out_json.read_text())
        assert len(rows) == 1
        assert rows[0]["outcome"] == "timeout"
        out = capsys.readouterr().out
        assert "min_vel_x" in out
        assert "timeout" in out

    def test_parse_pairs(self):
        assert _parse_pairs("0.01:0.1,0.1:1.0") == [(0.01, 0.1), (0.1, 1.0)]

    def test_parse_pairs_rejects_garbage(self):
        import argparse
        with pytest.raises(argparse.ArgumentTypeError, match="min:max"):
            _parse_pairs("fast")
