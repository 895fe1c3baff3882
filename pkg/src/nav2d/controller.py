"""Goal lifecycle management on top of the planners.

A goal moves Pending -> Active -> {Succeeded, Aborted, Preempted}.
Sending a new goal preempts the current one; a local planning failure
earns exactly one global replan before the goal aborts. Terminal states
always command zero velocity.
"""

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

from .core import Pose2D, Twist2D, normalize_angle, pose_compose
from .navigation import (Costmap, Path, PlannerConfig, PlanningError,
                         goal_reached, plan_global, plan_local)


class GoalState(enum.Enum):
    PENDING = "pending"
    ACTIVE = "active"
    SUCCEEDED = "succeeded"
    ABORTED = "aborted"
    PREEMPTED = "preempted"

    @property
    def terminal(self) -> bool:
        return self in (GoalState.SUCCEEDED, GoalState.ABORTED,
                        GoalState.PREEMPTED)


@dataclass
class NavGoal:
    """Target pose request. frame is 'robot' (relative to the robot at
    send time, the default) or 'map'. Orientation arrives as a planar
    quaternion; quat_z disambiguates turn direction and defaults to the
    +z branch."""

    x: float
    y: float = 0.0
    quat_w: float = 1.0
    quat_z: Optional[float] = None
    frame: str = "robot"

    def __post_init__(self):
        if self.frame not in ("map", "robot"):
            raise ValueError("frame must be 'map' or 'robot'")
        if not -1.0 <= self.quat_w <= 1.0:
            raise ValueError("quat_w must lie in [-1, 1]")

    @classmethod
    def from_xy_yaw(cls, x: float, y: float, yaw: float, frame: str = "map"):
        return cls(x, y, quat_w=math.cos(yaw / 2.0),
                   quat_z=math.sin(yaw / 2.0), frame=frame)

    def yaw(self) -> float:
        if self.quat_z is not None:
            return normalize_angle(2.0 * math.atan2(self.quat_z, self.quat_w))
        half = math.atan2(math.sqrt(max(0.0, 1.0 - self.quat_w ** 2)),
                          self.quat_w)
        return normalize_angle(2.0 * half)

    def target_pose(self, robot_pose: Pose2D) -> Pose2D:
        rel = Pose2D(self.x, self.y, self.yaw())
        if self.frame == "robot":
            return pose_compose(robot_pose, rel)
        return rel


@dataclass
class GoalStatus:
    state: GoalState
    feedback: Optional[Pose2D]
    elapsed: float
    reason: str = ""


@dataclass
class GoalHandle:
    id: int
    target: Pose2D
    state: GoalState = GoalState.PENDING
    reason: str = ""
    feedback: Optional[Pose2D] = None
    elapsed: float = 0.0

    @property
    def terminal(self) -> bool:
        return self.state.terminal

    @property
    def status(self) -> GoalStatus:
        return GoalStatus(self.state, self.feedback, self.elapsed, self.reason)


class NavController:
    """Drives one goal at a time: plans globally on acceptance, rolls out
    locally every tick, replans once on local failure, then gives up."""

    def __init__(self, costmap: Costmap, config: PlannerConfig = None):
        self.costmap = costmap
        self.config = config or PlannerConfig()
        self._ids = itertools.count(1)
        self._handles: dict = {}
        self.current: Optional[GoalHandle] = None
        self.path: Optional[Path] = None
        self._replanned = False
        self._cmd = Twist2D(0.0, 0.0)

    def send_goal(self, goal: NavGoal, robot_pose: Pose2D) -> GoalHandle:
        if self.current is not None and not self.current.terminal:
            self._finish(self.current, GoalState.PREEMPTED,
                         "preempted by a newer goal")
        handle = GoalHandle(next(self._ids), goal.target_pose(robot_pose))
        self._handles[handle.id] = handle
        self.current = handle
        self.path = None
        self._replanned = False
        return handle

    def cancel_goal(self, handle_id: int) -> GoalHandle:
        handle = self._handles[handle_id]
        if not handle.terminal:
            self._finish(handle, GoalState.PREEMPTED, "canceled")
        return handle

    def get_handle(self, handle_id: int) -> GoalHandle:
        return self._handles[handle_id]

    def update_costmap(self, costmap: Costmap):
        self.costmap = costmap

    def _finish(self, handle: GoalHandle, state: GoalState, reason: str):
        handle.state = state
        handle.reason = reason
        if handle is self.current:
            self._cmd = Twist2D(0.0, 0.0)

    def _brake(self, dt: float) -> Twist2D:
        v = max(0.0, self._cmd.v - self.config.acc_lim_x * dt)
        w = self._cmd.w - math.copysign(
            min(abs(self._cmd.w), self.config.acc_lim_theta * dt), self._cmd.w)
        return Twist2D(v, w)

    def tick(self, pose: Pose2D, dt: float, collision: bool = False) -> Twist2D:
        """Advance the active goal one control period and return the
        velocity command. Safe to call with no goal pending."""
        handle = self.current
        if handle is None or handle.terminal:
            self._cmd = Twist2D(0.0, 0.0)
            return self._cmd
        handle.feedback = pose.copy()
        handle.elapsed += dt

        if collision:
            self._finish(handle, GoalState.ABORTED, "collision reported")
            return self._cmd

        if handle.state is GoalState.PENDING:
            try:
                self.path = plan_global(self.costmap, pose, handle.target)
            except PlanningError as e:
                self._finish(handle, GoalState.ABORTED, str(e))
                return self._cmd
            handle.state = GoalState.ACTIVE

        if goal_reached(pose, handle.target, self.config):
            self._finish(handle, GoalState.SUCCEEDED, "goal reached")
            return self._cmd

        try:
            self._cmd = plan_local(self.costmap, pose, self._cmd,
                                   self.path, self.config)
        except PlanningError as e:
            if self._replanned:
                self._finish(handle, GoalState.ABORTED,
                             "no local plan after replanning: " + str(e))
                return self._cmd
            self._replanned = True
            try:
                self.path = plan_global(self.costmap, pose, handle.target)
            except PlanningError as e2:
                self._finish(handle, GoalState.ABORTED, str(e2))
                return self._cmd
            self._cmd = self._brake(dt)
        return self._cmd
