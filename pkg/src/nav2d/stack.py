"""Full-stack orchestration: one object owning the simulator, the map
(building it or localizing against it), and the goal controller, advanced
by a single tick() call.

Two modes:
  mapping   - no prior map; scans are integrated at the known sim pose
              (known-pose mapping) into a growing occupancy grid.
  localize  - a prior map is given; a particle filter tracks the pose
              from noisy odometry and gated scans.

Teleop twists, when supplied, preempt the controller for that tick, so an
operator can always grab the wheel mid-goal.
"""

import dataclasses
from typing import Optional

from .config import StackConfig
from .controller import NavController, NavGoal
from .core import LaserScan, OccupancyGrid, Pose2D, Twist2D
from .localization import ALPHAS_NOISY_ODOM, MonteCarloLocalizer
from .mapping import integrate_scan
from .navigation import inflate
from .simulator import Simulator

# default spread of the initial particle cloud around the start pose
INIT_STD = (0.1, 0.1, 0.05)

COSTMAP_REFRESH_TICKS = 10  # mapping mode: rebuild costs at ~1 Hz


def tracking_config() -> StackConfig:
    """Defaults for full-stack runs: the filter's motion-model alphas are
    matched to the simulator's default odometry noise (see
    localization.ALPHAS_NOISY_ODOM), everything else stock."""
    cfg = StackConfig()
    cfg.amcl = dataclasses.replace(cfg.amcl, alphas=ALPHAS_NOISY_ODOM)
    return cfg


class RobotStack:
    """Simulator + mapping/localization + navigation in lockstep."""

    def __init__(self, truth: OccupancyGrid, known_map: OccupancyGrid = None,
                 config: StackConfig = None, start: Pose2D = None, seed: int = 0):
        self.config = config if config is not None else StackConfig()
        self.start = start if start is not None else Pose2D()
        self.sim = Simulator(truth, self.config.robot, self.config.odom_noise,
                             start=self.start, seed=seed, dt=self.config.dt)
        self.mapping = known_map is None
        if self.mapping:
            self.map = OccupancyGrid(truth.width, truth.height,
                                     truth.resolution, truth.origin.copy())
            self.localizer = None
        else:
            self.map = known_map
            self.localizer = MonteCarloLocalizer(known_map, self.config.amcl,
                                                 seed=seed + 1)
            self.localizer.on_odometry(self.sim.state.odom_pose)
            self.localizer.initialize(self.start, INIT_STD)
        self.map_version = 0
        self._costmap_version = -1
        self.costmap = None
        self._refresh_costmap()
        self.controller = NavController(self.costmap, self.config.planner)
        self.last_scan: Optional[LaserScan] = None
        self.ticks = 0

    def _refresh_costmap(self):
        if self._costmap_version != self.map_version:
            self.costmap = inflate(self.map)
            self._costmap_version = self.map_version
            if getattr(self, "controller", None) is not None:
                self.controller.update_costmap(self.costmap)

    @property
    def estimated_pose(self) -> Pose2D:
        """Known-pose mapping exposes truth; localize mode the filter."""
        if self.localizer is not None:
            return self.localizer.estimate()
        return self.sim.state.true_pose.copy()

    def send_goal(self, goal: NavGoal):
        return self.controller.send_goal(goal, self.estimated_pose)

    def cancel_goal(self, handle_id: int):
        return self.controller.cancel_goal(handle_id)

    def tick(self, teleop: Twist2D = None) -> Twist2D:
        """Advance one period; teleop (if any) overrides the controller."""
        pose = self.estimated_pose
        if teleop is not None:
            cmd = teleop
        else:
            if self.mapping:
                self._refresh_costmap()
            cmd = self.controller.tick(pose, self.config.dt,
                                       collision=self.sim.state.collision)
        state = self.sim.tick(cmd)

        if self.mapping:
            self.last_scan = self.sim.scan()
            integrate_scan(self.map, state.true_pose, self.last_scan)
            self.map_version += 1
            if self.ticks % COSTMAP_REFRESH_TICKS == 0:
                self._refresh_costmap()
        else:
            self.localizer.on_odometry(state.odom_pose)
            if self.localizer.update_due:
                self.last_scan = self.sim.scan()
                self.localizer.on_scan(self.last_scan)
        self.ticks += 1
        return cmd
