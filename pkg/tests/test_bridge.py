"""Web bridge: RLE map encoding, command acks, snapshot schema, socket loop."""

import json
import os

import numpy as np
import pytest
from fastapi.testclient import TestClient

from nav2d.bridge import (MAX_PARTICLES, PROTOCOL_VERSION, Bridge, _rle,
                          build_app, encode_map)
from nav2d.core import OccupancyGrid, Pose2D
from nav2d.stack import RobotStack, tracking_config
from nav2d.teleop import load_keymap
from nav2d.worlds import DEMO_START, demo_room

SNAPSHOT_KEYS = {"version", "seq", "sim_time", "true_pose", "estimated_pose",
                 "collision", "map_version", "particles", "scan",
                 "global_path", "goal_status"}


@pytest.fixture
def bridge(demo_grid):
    stack = RobotStack(demo_grid, known_map=demo_grid,
                       config=tracking_config(), start=DEMO_START, seed=0)
    return Bridge(stack)


class TestRle:
    def test_pairs(self):
        assert _rle([0, 0, 1, 1, 1, -1]) == [[0, 2], [1, 3], [-1, 1]]

    def test_empty(self):
        assert _rle([]) == []

    def test_single_run(self):
        assert _rle(np.zeros(7, dtype=np.int8)) == [[0, 7]]

    def test_counts_cover_grid(self, demo_grid):
        payload = encode_map(demo_grid, 3)
        total = sum(count for _, count in payload["rle"])
        assert total == demo_grid.width * demo_grid.height

    def test_round_trip_against_classify(self, demo_grid):
        payload = encode_map(demo_grid, 0)
        flat = np.concatenate([np.full(c, v, dtype=np.int8)
                               for v, c in payload["rle"]])
        np.testing.assert_array_equal(
            flat.reshape(demo_grid.height, demo_grid.width),
            demo_grid.classify())

    def test_metadata(self, demo_grid):
        payload = encode_map(demo_grid, 5)
        assert payload["version"] == 5
        assert payload["width"] == demo_grid.width
        assert payload["height"] == demo_grid.height
        assert payload["resolution"] == demo_grid.resolution
        assert payload["origin"] == [demo_grid.origin.x, demo_grid.origin.y,
                                     demo_grid.origin.theta]


class TestCommands:
    def test_teleop_key_ack(self, bridge):
        ack = bridge.handle_command({"kind": "teleop_key",
                                     "payload": {"key": "i"}})
        assert ack["accepted"]
        assert ack["kind"] == "teleop_key"
        assert ack["twist"] == [5.0, 0.0]

    def test_teleop_key_drives_next_tick(self, bridge):
        bridge.handle_command({"kind": "teleop_key", "payload": {"key": "i"}})
        bridge.tick()
        # wheel limits cap the 5 m/s request at 1.2 m/s
        assert bridge.stack.sim.state.commanded.v == pytest.approx(1.2)

    def test_teleop_hold_expires(self, bridge):
        bridge.handle_command({"kind": "teleop_key", "payload": {"key": "i"}})
        for _ in range(12):  # one second of hold plus a tick to decay
            bridge.tick()
        assert bridge.stack.sim.state.commanded.v == 0.0

    def test_teleop_key_must_be_one_char(self, bridge):
        ack = bridge.handle_command({"kind": "teleop_key",
                                     "payload": {"key": "ii"}})
        assert not ack["accepted"]

    def test_set_goal_ack_and_status(self, bridge):
        ack = bridge.handle_command(
            {"kind": "set_goal", "payload": {"x": 0.5, "y": -2.0, "yaw": 0.0}})
        assert ack["accepted"]
        assert ack["goal_id"] == 1
        status = bridge.snapshot()["goal_status"]
        assert status["id"] == 1
        assert status["state"] == "pending"
        assert status["target"][0] == pytest.approx(0.5)

    def test_set_goal_requires_coordinates(self, bridge):
        ack = bridge.handle_command({"kind": "set_goal", "payload": {"y": 1.0}})
        assert not ack["accepted"]

    def test_set_goal_rejects_non_finite(self, bridge):
        ack = bridge.handle_command(
            {"kind": "set_goal", "payload": {"x": float("nan"), "y": 0.0}})
        assert not ack["accepted"]

    def test_cancel_goal(self, bridge):
        bridge.handle_command(
            {"kind": "set_goal", "payload": {"x": 0.5, "y": -2.0}})
        ack = bridge.handle_command({"kind": "cancel_goal", "payload": {}})
        assert ack["accepted"]
        assert ack["state"] == "preempted"

    def test_cancel_without_goal(self, bridge):
        ack = bridge.handle_command({"kind": "cancel_goal", "payload": {}})
        assert not ack["accepted"]
        assert "no goal" in ack["reason"]

    def test_cancel_unknown_id(self, bridge):
        ack = bridge.handle_command({"kind": "cancel_goal",
                                     "payload": {"id": 42}})
        assert not ack["accepted"]

    def test_set_param(self, bridge):
        ack = bridge.handle_command(
            {"kind": "set_param",
             "payload": {"name": "planner.max_vel_x", "value": 0.3}})
        assert ack["accepted"]
        assert bridge.stack.config.planner.max_vel_x == 0.3
        assert bridge.stack.controller.config.max_vel_x == 0.3

    def test_set_param_rejects_unknown_name(self, bridge):
        for name in ("planner.acc_lim_x", "amcl.beam_stride", "max_vel_x"):
            ack = bridge.handle_command(
                {"kind": "set_param", "payload": {"name": name, "value": 1.0}})
            assert not ack["accepted"], name

    def test_unknown_kind_rejected(self, bridge):
        ack = bridge.handle_command({"kind": "warp_robot", "payload": {}})
        assert not ack["accepted"]
        assert "warp_robot" in ack["reason"]

    def test_missing_kind_rejected(self, bridge):
        ack = bridge.handle_command({"payload": {}})
        assert not ack["accepted"]

    def test_non_dict_rejected(self, bridge):
        ack = bridge.handle_command("teleop_key")
        assert not ack["accepted"]


class TestSnapshot:
    def test_schema_keys(self, bridge):
        bridge.tick()
        snap = bridge.snapshot()
        assert SNAPSHOT_KEYS <= set(snap)
        assert snap["version"] == PROTOCOL_VERSION
        assert snap["seq"] == 1
        assert len(snap["true_pose"]) == 3
        assert snap["collision"] is False

    def test_particles_capped(self, bridge):
        bridge.tick()
        snap = bridge.snapshot()
        assert 0 < len(snap["particles"]) <= MAX_PARTICLES

    def test_scan_block_after_motion(self, bridge):
        # scans only flow once the robot moves enough for a filter update
        bridge.handle_command({"kind": "teleop_key", "payload": {"key": "i"}})
        for _ in range(3):
            bridge.tick()
        scan = bridge.snapshot()["scan"]
        assert scan is not None
        assert scan["range_max"] == 8.0
        assert len(scan["ranges"]) == 90  # 360 beams, stride 4

    def test_global_path_appears_with_goal(self, bridge):
        bridge.handle_command(
            {"kind": "set_goal", "payload": {"x": 0.9, "y": 2.5, "yaw": 1.57}})
        bridge.tick()
        snap = bridge.snapshot()
        assert snap["global_path"] is not None
        assert len(snap["global_path"]) > 2
        assert snap["goal_status"]["state"] == "active"


class TestSocketApp:
    @pytest.fixture
    def client(self, demo_grid):
        app = build_app(demo_grid, known_map=demo_grid, start=DEMO_START,
                        seed=0, static_dir="")
        with TestClient(app) as c:
            yield c

    @staticmethod
    def recv_snapshots(ws, n):
        out = []
        while len(out) < n:
            msg = json.loads(ws.receive_text())
            if "ack" not in msg:
                out.append(msg)
        return out

    def test_index_reports_protocol(self, client):
        body = client.get("/").json()
        assert body["protocol_version"] == PROTOCOL_VERSION
        assert body["websocket"] == "/ws"

    def test_keymap_served_verbatim(self, client):
        assert client.get("/keymap.json").json() == load_keymap()

    def test_first_message_carries_map(self, client):
        with client.websocket_connect("/ws") as ws:
            first = json.loads(ws.receive_text())
            assert "map" in first
            assert SNAPSHOT_KEYS <= set(first)
            total = sum(c for _, c in first["map"]["rle"])
            assert total == first["map"]["width"] * first["map"]["height"]

    def test_seq_strictly_increases(self, client):
        with client.websocket_connect("/ws") as ws:
            snaps = self.recv_snapshots(ws, 3)
            seqs = [s["seq"] for s in snaps]
            assert seqs[0] < seqs[1] < seqs[2]

    def test_command_ack_round_trip(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_text()
            ws.send_text(json.dumps({"kind": "teleop_key",
                                     "payload": {"key": "l"}}))
            while True:
                msg = json.loads(ws.receive_text())
                if "ack" in msg:
                    break
            assert msg["ack"]["accepted"]
            assert msg["ack"]["twist"] == [0.0, -5.0]

    def test_malformed_json_gets_nack(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_text()
            ws.send_text("{not json")
            while True:
                msg = json.loads(ws.receive_text())
                if "ack" in msg:
                    break
            assert not msg["ack"]["accepted"]
            assert msg["ack"]["reason"] == "malformed JSON"

    def test_built_ui_mounted_at_root(self, demo_grid):
        dist = os.path.join(os.path.dirname(__file__), "..",
                            "frontend", "dist")
        if not os.path.isdir(dist):
            pytest.skip("web UI not built")
        app = build_app(demo_grid, start=DEMO_START, static_dir=dist)
        with TestClient(app) as c:
            index = c.get("/")
            assert index.status_code == 200
            assert "text/html" in index.headers["content-type"]
            assert c.get("/keymap.json").json() == load_keymap()
            assert c.get("/js/main.js").status_code == 200
