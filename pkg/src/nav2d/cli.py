"""Command-line front end.

Subcommands: sim (headless run with live map publishing), teleop
(interactive keyboard driving), map-saver (snapshot the live map to
PGM+YAML), navigate (send one goal and wait), benchmark (velocity-window
timing table), serve (WebSocket bridge + web UI).
"""

import argparse
import queue
import sys
import threading
import time

from . import benchmark as bench
from .config import ConfigError, StackConfig, load_config
from .controller import GoalState, NavGoal
from .core import Twist2D
from .mapping import MapFormatError, load_map, save_map
from .session import default_session_path, publish_live_map, read_live_map
from .stack import RobotStack, tracking_config
from .teleop import TeleopState, teleop_key_to_command
from .worlds import (BENCHMARK_START, DEMO_START, benchmark_course, demo_room)

WORLDS = {"demo": (demo_room, DEMO_START),
          "benchmark": (benchmark_course, BENCHMARK_START)}


def _load_stack_config(args) -> StackConfig:
    if getattr(args, "config", None):
        cfg = load_config(args.config)
    else:
        cfg = tracking_config()
    if getattr(args, "rate", None):
        cfg.rate = args.rate
    return cfg


def _build_world(args):
    if getattr(args, "map", None):
        grid = load_map(args.map)
        return grid, DEMO_START
    builder, start = WORLDS[args.world]
    return builder(), start


def cmd_sim(args) -> int:
    cfg = _load_stack_config(args)
    truth, start = _build_world(args)
    stack = RobotStack(truth, config=cfg, start=start, seed=args.seed)
    cmd = Twist2D(args.cmd[0], args.cmd[1]) if args.cmd else None
    ticks = int(round(args.duration * cfg.rate))
    publish_every = max(1, int(cfg.rate))
    for i in range(ticks):
        stack.tick(teleop=cmd)
        if (i + 1) % publish_every == 0:
            publish_live_map(stack.map, args.session)
            st = stack.sim.state
            known = float((stack.map.cells != 0).mean())
            print(f"t={st.time:6.1f}s pose=({st.true_pose.x:+.2f}, "
                  f"{st.true_pose.y:+.2f}, {st.true_pose.theta:+.2f}) "
                  f"mapped={known:5.1%} collision={st.collision}")
    publish_live_map(stack.map, args.session)
    print(f"live map published to {args.session or default_session_path()}")
    return 0


def cmd_teleop(args) -> int:
    if not sys.stdin.isatty():
        print("teleop needs an interactive terminal", file=sys.stderr)
        return 2
    import termios
    import tty

    cfg = _load_stack_config(args)
    truth, start = _build_world(args)
    stack = RobotStack(truth, config=cfg, start=start, seed=args.seed)
    state = TeleopState()
    keys: queue.Queue = queue.Queue()
    stop = threading.Event()

    def reader():
        while not stop.is_set():
            ch = sys.stdin.read(1)
            if not ch or ch == "\x03":  # EOF / Ctrl-C
                stop.set()
                return
            keys.put(ch)

    from .teleop import __doc__ as key_help
    print(key_help)
    print("Ctrl-C to quit. Driving builds the live map for map-saver.")

    fd = sys.stdin.fileno()
    saved = termios.tcgetattr(fd)
    tty.setcbreak(fd)
    t = threading.Thread(target=reader, daemon=True)
    t.start()
    try:
        next_tick = time.monotonic()
        while not stop.is_set():
            twist = state.twist()
            changed = False
            while True:
                try:
                    key = keys.get_nowait()
                except queue.Empty:
                    break
                twist, state = teleop_key_to_command(key, state)
                changed = True
            if changed:
                print(f"\rcmd v={twist.v:+.2f} w={twist.w:+.2f} "
                      f"speeds=({state.linear_speed:.2f}, "
                      f"{state.angular_speed:.2f})   ", end="", flush=True)
            stack.tick(teleop=twist)
            if stack.ticks % int(cfg.rate) == 0:
                publish_live_map(stack.map, args.session)
            next_tick += cfg.dt
            delay = next_tick - time.monotonic()
            if delay > 0:
                time.sleep(delay)
    except KeyboardInterrupt:
        pass
    finally:
        stop.set()
        termios.tcsetattr(fd, termios.TCSADRAIN, saved)
    publish_live_map(stack.map, args.session)
    print(f"\nlive map published to {args.session or default_session_path()}")
    return 0


def cmd_map_saver(args) -> int:
    try:
        grid = read_live_map(args.session)
    except FileNotFoundError as e:
        print(str(e), file=sys.stderr)
        return 2
    try:
        pgm, yml = save_map(grid, args.file)
    except OSError as e:
        print(f"cannot write map '{args.file}': {e}", file=sys.stderr)
        return 2
    print(f"wrote {pgm}")
    print(f"wrote {yml}")
    return 0


def cmd_navigate(args) -> int:
    if not -1.0 <= args.w <= 1.0:
        print("quat_w must lie in [-1, 1]", file=sys.stderr)
        return 2
    print(f"Set X = {args.x:g}")
    print(f"Set W = {args.w:g}")
    print("Waiting for server")
    cfg = _load_stack_config(args)
    truth, start = _build_world(args)
    stack = RobotStack(truth, known_map=truth, config=cfg, start=start,
                       seed=args.seed)
    print("Sending Goals")
    handle = stack.send_goal(NavGoal(x=args.x, quat_w=args.w, frame="robot"))
    while not handle.terminal and stack.sim.state.time < args.timeout:
        stack.tick()
    state = handle.state.value
    print(f"goal {state}" + (f" ({handle.reason})" if handle.reason else ""))
    return 0 if handle.state is GoalState.SUCCEEDED else 1


def _parse_pairs(text: str):
    pairs = []
    for chunk in text.split(","):
        lo, _, hi = chunk.partition(":")
        try:
            pairs.append((float(lo), float(hi)))
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"bad pair '{chunk}', expected min:max") from None
    return pairs


def cmd_benchmark(args) -> int:
    cfg = _load_stack_config(args)
    rows = bench.run_table(args.pairs, seed=args.seed, timeout=args.timeout,
                           config=cfg,
                           progress=lambda r: print(
                               f"[{r.min_vel_x:g}, {r.max_vel_x:g}] "
                               f"{r.outcome}"
                               + (f" in {r.time_s:.1f}s" if r.time_s else "")))
    print()
    print(bench.format_table(rows))
    with open(args.json, "w") as f:
        f.write(bench.rows_to_json(rows) + "\n")
    print(f"\nmachine-readable rows written to {args.json}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .bridge import build_app

    cfg = _load_stack_config(args)
    truth, start = _build_world(args)
    known = load_map(args.localize_map) if args.localize_map else None
    app = build_app(truth, known_map=known, config=cfg, start=start,
                    seed=args.seed)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nav2d", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, world=True):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--config", help="YAML config file")
        sp.add_argument("--rate", type=float, help="tick rate override, Hz")
        if world:
            sp.add_argument("--world", choices=sorted(WORLDS), default="demo")
            sp.add_argument("--map", help="saved map basename to load as the world")

    sp = sub.add_parser("sim", help="headless simulation run")
    common(sp)
    sp.add_argument("--duration", type=float, default=10.0,
                    help="simulated seconds to run")
    sp.add_argument("--cmd", type=float, nargs=2, metavar=("V", "W"),
                    help="constant twist to drive")
    sp.add_argument("--session", help="live map path override")
    sp.set_defaults(func=cmd_sim)

    sp = sub.add_parser("teleop", help="drive with the keyboard")
    common(sp)
    sp.add_argument("--session", help="live map path override")
    sp.set_defaults(func=cmd_teleop)

    sp = sub.add_parser("map-saver", help="save the live map to PGM+YAML")
    sp.add_argument("-f", "--file", required=True, metavar="BASENAME")
    sp.add_argument("--session", help="live map path override")
    sp.set_defaults(func=cmd_map_saver)

    sp = sub.add_parser("navigate", help="send one goal and wait")
    common(sp)
    sp.add_argument("x", type=float, help="goal x in the robot frame, m")
    sp.add_argument("w", type=float, help="goal orientation quaternion w")
    sp.add_argument("--timeout", type=float, default=600.0)
    sp.set_defaults(func=cmd_navigate)

    sp = sub.add_parser("benchmark", help="velocity-window timing table")
    sp.add_argument("--pairs", type=_parse_pairs,
                    default=list(bench.STUDY_PAIRS),
                    help="comma list of min:max, e.g. 0.01:0.5,0.1:0.5")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--config", help="YAML config file")
    sp.add_argument("--timeout", type=float, default=bench.DEFAULT_TIMEOUT)
    sp.add_argument("--json", default="benchmark_results.json",
                    help="where to write machine-readable rows")
    sp.set_defaults(func=cmd_benchmark)

    sp = sub.add_parser("serve", help="WebSocket bridge + web UI")
    common(sp)
    sp.add_argument("--port", type=int, default=8000)
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--localize-map", help="saved map basename; enables "
                    "localization mode instead of live mapping")
    sp.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, MapFormatError) as e:
        print(str(e), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
