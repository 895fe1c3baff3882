"""Timing study for the local planner's velocity window.

Runs the full stack (noisy sim, particle-filter localization, global +
local planning) on the fixed winding-tube course for each
(min_vel_x, max_vel_x) pair and records simulated time to goal or the
failure mode. Simulated time keeps the study deterministic for a seed.
"""

import dataclasses
import json
from dataclasses import dataclass
from typing import Optional

from .config import StackConfig
from .controller import GoalState, NavGoal
from .stack import RobotStack, tracking_config
from .worlds import BENCHMARK_GOAL, BENCHMARK_START, benchmark_course

# the six pairs of the tuning study
STUDY_PAIRS = ((0.01, 0.1), (0.01, 0.5), (0.01, 1.0),
               (0.1, 0.1), (0.1, 0.5), (0.1, 1.0))

DEFAULT_TIMEOUT = 600.0  # simulated seconds


@dataclass
class BenchmarkRow:
    min_vel_x: float
    max_vel_x: float
    outcome: str  # reached | collision | aborted | timeout
    time_s: Optional[float]
    note: str

    def to_dict(self):
        return dataclasses.asdict(self)


def run_course(min_vel_x: float, max_vel_x: float, seed: int = 0,
               timeout: float = DEFAULT_TIMEOUT,
               config: StackConfig = None) -> BenchmarkRow:
    """One full navigation run; returns the outcome row."""
    cfg = config if config is not None else tracking_config()
    planner = dataclasses.replace(cfg.planner, min_vel_x=min_vel_x,
                                  max_vel_x=max_vel_x)
    cfg = dataclasses.replace(cfg, planner=planner)
    truth = benchmark_course()
    stack = RobotStack(truth, known_map=truth, config=cfg,
                       start=BENCHMARK_START, seed=seed)
    goal = NavGoal.from_xy_yaw(BENCHMARK_GOAL.x, BENCHMARK_GOAL.y,
                               BENCHMARK_GOAL.theta, frame="map")
    handle = stack.send_goal(goal)

    while stack.sim.state.time < timeout and not handle.terminal:
        stack.tick()

    t = stack.sim.state.time
    if handle.state is GoalState.SUCCEEDED:
        return BenchmarkRow(min_vel_x, max_vel_x, "reached", t, "goal reached")
    if stack.sim.state.collision:
        return BenchmarkRow(min_vel_x, max_vel_x, "collision", None,
                            "never reached, hit a wall")
    if handle.state is GoalState.ABORTED:
        return BenchmarkRow(min_vel_x, max_vel_x, "aborted", None,
                            "never reached: " + handle.reason)
    return BenchmarkRow(min_vel_x, max_vel_x, "timeout", None,
                        f"never reached within {timeout:.0f} s")


def run_table(pairs=STUDY_PAIRS, seed: int = 0,
              timeout: float = DEFAULT_TIMEOUT, config: StackConfig = None,
              progress=None) -> list:
    rows = []
    for min_v, max_v in pairs:
        row = run_course(min_v, max_v, seed=seed, timeout=timeout,
                         config=config)
        rows.append(row)
        if progress is not None:
            progress(row)
    return rows


def format_table(rows) -> str:
    header = ("min_vel_x", "max_vel_x", "time_s", "outcome", "note")
    body = [(f"{r.min_vel_x:g}", f"{r.max_vel_x:g}",
             "-" if r.time_s is None else f"{r.time_s:.1f}",
             r.outcome, r.note) for r in rows]
    widths = [max(len(h), *(len(b[i]) for b in body))
              for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for b in body:
        lines.append("  ".join(c.ljust(w) for c, w in zip(b, widths)))
    return "\n".join(lines)


def rows_to_json(rows) -> str:
    return json.dumps([r.to_dict() for r in rows], indent=2)
