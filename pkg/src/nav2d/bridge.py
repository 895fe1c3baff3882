"""WebSocket bridge: snapshots out at the tick rate, commands in.

One asyncio task owns the stack and ticks it at wall-clock rate; client
handlers only read immutable snapshot dicts and enqueue commands, so the
simulation never blocks on a slow consumer (per-client queue of one,
drop-oldest). The JSON schema is documented in docs/protocol.md and
carries a version field.
"""

import asyncio
import dataclasses
import json
import math
import os
from contextlib import asynccontextmanager

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .config import StackConfig
from .controller import NavGoal
from .core import OccupancyGrid, Pose2D
from .stack import RobotStack
from .teleop import TeleopState, load_keymap, teleop_key_to_command

PROTOCOL_VERSION = 1
MAX_PARTICLES = 200
SCAN_STRIDE = 4
TELEOP_HOLD_S = 1.0   # teleop overrides the controller this long per key
MAP_RESEND_MIN_S = 1.0

# parameters a client may change at runtime
SETTABLE_PARAMS = {"min_vel_x", "max_vel_x", "max_rot_vel", "sim_time",
                   "xy_goal_tolerance", "yaw_goal_tolerance"}


def _rle(values) -> list:
    """Run-length pairs [value, count] over a flat array."""
    values = np.asarray(values).ravel()
    if values.size == 0:
        return []
    edges = np.flatnonzero(np.diff(values)) + 1
    starts = np.concatenate(([0], edges))
    ends = np.concatenate((edges, [values.size]))
    return [[int(values[s]), int(e - s)] for s, e in zip(starts, ends)]


def encode_map(grid: OccupancyGrid, version: int) -> dict:
    """Trinary cells, row-major from the lowest-y row, run-length encoded."""
    return {"version": version, "width": grid.width, "height": grid.height,
            "resolution": grid.resolution,
            "origin": [grid.origin.x, grid.origin.y, grid.origin.theta],
            "rle": _rle(grid.classify())}


def _pose_list(p: Pose2D):
    return [round(p.x, 4), round(p.y, 4), round(p.theta, 4)]


class Bridge:
    """Stack owner plus everything the socket handlers share."""

    def __init__(self, stack: RobotStack):
        self.stack = stack
        self.seq = 0
        self.clients: set = set()
        self.teleop_state = TeleopState()
        self._teleop_twist = None
        self._teleop_until = -1.0
        self._map_payload = encode_map(stack.map, stack.map_version)
        self._map_sent_time = 0.0

    # -- commands ----------------------------------------------------

    def handle_command(self, msg) -> dict:
        if not isinstance(msg, dict) or "kind" not in msg:
            return {"accepted": False, "reason": "missing command kind"}
        kind = msg.get("kind")
        handler = getattr(self, "_cmd_" + str(kind), None)
        if handler is None:
            return {"kind": kind, "accepted": False,
                    "reason": f"unknown command kind '{kind}'"}
        try:
            ack = handler(msg.get("payload") or {})
        except (TypeError, ValueError, KeyError) as e:
            ack = {"accepted": False, "reason": str(e)}
        ack["kind"] = kind
        return ack

    def _cmd_teleop_key(self, payload) -> dict:
        key = payload.get("key")
        if not isinstance(key, str) or len(key) != 1:
            return {"accepted": False, "reason": "payload needs a 1-char 'key'"}
        twist, self.teleop_state = teleop_key_to_command(key, self.teleop_state)
        self._teleop_twist = twist
        self._teleop_until = self.stack.sim.state.time + TELEOP_HOLD_S
        return {"accepted": True, "twist": [twist.v, twist.w]}

    def _cmd_set_goal(self, payload) -> dict:
        x = float(payload["x"])
        y = float(payload["y"])
        yaw = float(payload.get("yaw", 0.0))
        if not all(math.isfinite(v) for v in (x, y, yaw)):
            return {"accepted": False, "reason": "goal must be finite"}
        goal = NavGoal.from_xy_yaw(x, y, yaw, frame="map")
        handle = self.stack.send_goal(goal)
        return {"accepted": True, "goal_id": handle.id}

    def _cmd_cancel_goal(self, payload) -> dict:
        handle = self.stack.controller.current
        if "id" in payload:
            try:
                handle = self.stack.controller.get_handle(int(payload["id"]))
            except KeyError:
                return {"accepted": False,
                        "reason": f"unknown goal id {payload['id']}"}
        if handle is None:
            return {"accepted": False, "reason": "no goal to cancel"}
        self.stack.cancel_goal(handle.id)
        return {"accepted": True, "goal_id": handle.id,
                "state": handle.state.value}

    def _cmd_set_param(self, payload) -> dict:
        name = payload.get("name", "")
        prefix, _, field = str(name).partition(".")
        if prefix != "planner" or field not in SETTABLE_PARAMS:
            return {"accepted": False,
                    "reason": f"parameter '{name}' is not settable"}
        value = float(payload["value"])
        new = dataclasses.replace(self.stack.config.planner, **{field: value})
        self.stack.config.planner = new
        self.stack.controller.config = new
        return {"accepted": True, "name": name, "value": value}

    # -- snapshots ---------------------------------------------------

    def tick(self):
        now = self.stack.sim.state.time
        teleop = None
        if self._teleop_twist is not None and now < self._teleop_until:
            teleop = self.teleop_state.twist()
        self.stack.tick(teleop=teleop)
        self.seq += 1
        if (self.stack.map_version != self._map_payload["version"]
                and now - self._map_sent_time >= MAP_RESEND_MIN_S):
            self._map_payload = encode_map(self.stack.map,
                                           self.stack.map_version)
            self._map_sent_time = now

    def snapshot(self) -> dict:
        stack = self.stack
        st = stack.sim.state
        snap = {"version": PROTOCOL_VERSION, "seq": self.seq,
                "sim_time": round(st.time, 3),
                "true_pose": _pose_list(st.true_pose),
                "estimated_pose": _pose_list(stack.estimated_pose),
                "collision": st.collision,
                "map_version": self._map_payload["version"],
                "particles": [], "scan": None,
                "global_path": None, "goal_status": None}
        loc = stack.localizer
        if loc is not None and loc.particles is not None:
            poses = loc.particles.poses
            stride = max(1, -(-len(poses) // MAX_PARTICLES))
            snap["particles"] = np.round(poses[::stride], 3).tolist()
        scan = stack.last_scan
        if scan is not None:
            cfg = scan.config
            snap["scan"] = {
                "angle_min": cfg.angle_min,
                "increment": cfg.increment * SCAN_STRIDE,
                "range_max": cfg.range_max, "stamp": round(scan.stamp, 3),
                "ranges": np.round(scan.ranges[::SCAN_STRIDE], 3).tolist()}
        path = stack.controller.path
        if path is not None:
            snap["global_path"] = [[round(p.x, 3), round(p.y, 3)]
                                   for p in path.poses]
        handle = stack.controller.current
        if handle is not None:
            snap["goal_status"] = {
                "id": handle.id, "state": handle.state.value,
                "target": _pose_list(handle.target),
                "elapsed": round(handle.elapsed, 3),
                "reason": handle.reason,
                "feedback": _pose_list(handle.feedback)
                if handle.feedback else None}
        return snap

    def map_payload(self) -> dict:
        return self._map_payload

    def broadcast(self, snap: dict):
        for q in self.clients:
            if q.full():
                try:
                    q.get_nowait()
                except asyncio.QueueEmpty:
                    pass
            q.put_nowait(snap)


async def _ticker(bridge: Bridge, dt: float):
    loop = asyncio.get_running_loop()
    next_tick = loop.time()
    while True:
        bridge.tick()
        bridge.broadcast(bridge.snapshot())
        next_tick += dt
        await asyncio.sleep(max(0.0, next_tick - loop.time()))


def _default_static_dir():
    env = os.environ.get("NAV2D_UI_DIR")
    if env:
        return env
    here = os.path.dirname(os.path.abspath(__file__))
    guess = os.path.normpath(os.path.join(here, "..", "..",
                                          "frontend", "dist"))
    return guess


def build_app(truth: OccupancyGrid, known_map: OccupancyGrid = None,
              config: StackConfig = None, start: Pose2D = None,
              seed: int = 0, static_dir: str = None) -> FastAPI:
    cfg = config if config is not None else StackConfig()
    stack = RobotStack(truth, known_map=known_map, config=cfg,
                       start=start, seed=seed)
    bridge = Bridge(stack)

    @asynccontextmanager
    async def lifespan(app):
        task = asyncio.create_task(_ticker(bridge, cfg.dt))
        try:
            yield
        finally:
            task.cancel()

    app = FastAPI(lifespan=lifespan)
    app.state.bridge = bridge

    @app.get("/keymap.json")
    async def keymap():
        return JSONResponse(load_keymap())

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        q: asyncio.Queue = asyncio.Queue(maxsize=1)
        bridge.clients.add(q)
        sent_map_version = None

        async def sender():
            nonlocal sent_map_version
            while True:
                snap = dict(await q.get())
                payload = bridge.map_payload()
                if payload["version"] != sent_map_version:
                    snap["map"] = payload
                    sent_map_version = payload["version"]
                    snap["map_version"] = payload["version"]
                await ws.send_text(json.dumps(snap))

        async def receiver():
            while True:
                text = await ws.receive_text()
                try:
                    msg = json.loads(text)
                except json.JSONDecodeError:
                    ack = {"accepted": False, "reason": "malformed JSON"}
                else:
                    ack = bridge.handle_command(msg)
                await ws.send_text(json.dumps({"ack": ack}))

        tasks = [asyncio.create_task(sender()), asyncio.create_task(receiver())]
        try:
            done, _ = await asyncio.wait(tasks,
                                         return_when=asyncio.FIRST_EXCEPTION)
            for t in done:
                exc = t.exception()
                if exc is not None and not isinstance(
                        exc, (WebSocketDisconnect, RuntimeError)):
                    raise exc
        finally:
            bridge.clients.discard(q)
            for t in tasks:
                t.cancel()

    static = static_dir if static_dir is not None else _default_static_dir()
    if static and os.path.isdir(static):
        app.mount("/", StaticFiles(directory=static, html=True), name="ui")
    else:
        @app.get("/")
        async def index():
            return JSONResponse({"service": "nav2d bridge",
                                 "protocol_version": PROTOCOL_VERSION,
                                 "websocket": "/ws"})

    return app
