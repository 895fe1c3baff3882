"""2D differential-drive robot simulator and navigation stack.

Everything runs on one occupancy-grid world: a kinematic simulator with
noisy odometry and a raycast lidar, log-odds mapping, particle-filter
localization, A* + trajectory-rollout navigation with a goal state
machine, and a WebSocket bridge for the browser console.
"""

from .controller import (GoalHandle, GoalState, GoalStatus, NavController,
                         NavGoal)
from .core import (LaserScan, OccupancyGrid, Pose2D, RobotParams, ScanConfig,
                   Twist2D, WheelSpeeds, normalize_angle)
from .localization import AmclConfig, LikelihoodConfig, MonteCarloLocalizer
from .mapping import integrate_scan, load_map, save_map, scan_match
from .navigation import (Costmap, Path, PlannerConfig, PlanningError,
                         goal_reached, inflate, plan_global, plan_local)
from .simulator import (OdomNoise, SimState, Simulator, simulate_lidar,
                        step_kinematics, step_odometry, twist_to_wheels,
                        wheels_to_twist)
from .stack import RobotStack

__version__ = "0.1.0"

__all__ = [
    "AmclConfig", "Costmap", "GoalHandle", "GoalState", "GoalStatus",
    "LaserScan", "LikelihoodConfig", "MonteCarloLocalizer", "NavController",
    "NavGoal", "OccupancyGrid", "OdomNoise", "Path", "PlannerConfig",
    "PlanningError", "Pose2D", "RobotParams", "RobotStack", "ScanConfig",
    "SimState", "Simulator", "Twist2D", "WheelSpeeds", "goal_reached",
    "inflate", "integrate_scan", "load_map", "normalize_angle", "plan_global",
    "plan_local", "save_map", "scan_match", "simulate_lidar",
    "step_kinematics", "step_odometry", "twist_to_wheels", "wheels_to_twist",
]
