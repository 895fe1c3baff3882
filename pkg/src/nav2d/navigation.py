"""Grid navigation: costmap inflation, A* global planning, trajectory
rollout local planning.

Cost convention: 254 lethal (occupied), 253 inscribed (within the robot
radius of an obstacle), 255 unknown, 1..252 inflation decay, 0 free.
The global planner treats unknown as traversable at a stiff penalty; the
local planner refuses to roll through anything >= 253.
"""

import heapq
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import distance_transform_edt

from .core import OccupancyGrid, Pose2D, Twist2D, normalize_angle

COST_LETHAL = 254
COST_INSCRIBED = 253
COST_UNKNOWN = 255

DEFAULT_ROBOT_RADIUS = 0.06
DEFAULT_INFLATION_RADIUS = 0.25
INFLATION_DECAY = 10.0  # 1/m, exponential falloff rate past the robot radius

_SQRT2 = math.sqrt(2.0)
_NEIGHBORS = ((1, 0, 1.0), (-1, 0, 1.0), (0, 1, 1.0), (0, -1, 1.0),
              (1, 1, _SQRT2), (1, -1, _SQRT2), (-1, 1, _SQRT2), (-1, -1, _SQRT2))


class PlanningError(RuntimeError):
    """No feasible plan exists for the requested motion."""


@dataclass
class Costmap:
    """Traversal costs derived from an occupancy grid (same geometry)."""

    width: int
    height: int
    resolution: float
    origin: Pose2D
    cost: np.ndarray

    def __post_init__(self):
        self.cost = np.asarray(self.cost, dtype=np.uint8)
        if self.cost.shape != (self.height, self.width):
            raise ValueError("cost array shape mismatch")

    def world_to_cell(self, x, y):
        ix = math.floor((x - self.origin.x) / self.resolution)
        iy = math.floor((y - self.origin.y) / self.resolution)
        if 0 <= ix < self.width and 0 <= iy < self.height:
            return ix, iy
        return None

    def cell_to_world(self, ix, iy):
        return (self.origin.x + (ix + 0.5) * self.resolution,
                self.origin.y + (iy + 0.5) * self.resolution)


@dataclass
class PlannerConfig:
    """Velocity limits, rollout shape, goal tolerances and scoring weights."""

    min_vel_x: float = 0.1
    max_vel_x: float = 0.5
    max_rot_vel: float = 1.0
    acc_lim_x: float = 1.0
    acc_lim_theta: float = 2.0
    sim_time: float = 1.7
    vx_samples: int = 6
    vtheta_samples: int = 20
    xy_goal_tolerance: float = 1.0
    yaw_goal_tolerance: float = 1.0
    path_distance_weight: float = 0.6
    goal_distance_weight: float = 0.8
    obstacle_weight: float = 0.01
    control_dt: float = 0.1  # control period bounding per-tick accelerations

    def __post_init__(self):
        if not 0 <= self.min_vel_x <= self.max_vel_x:
            raise ValueError("need 0 <= min_vel_x <= max_vel_x")
        if self.xy_goal_tolerance <= 0 or self.yaw_goal_tolerance <= 0:
            raise ValueError("goal tolerances must be > 0")
        if self.vx_samples < 1 or self.vtheta_samples < 1:
            raise ValueError("sample counts must be >= 1")


@dataclass
class Path:
    """Global plan: cell-resolution poses and the planner's cost."""

    poses: list
    cost: float = 0.0
    cells: list = field(default_factory=list)

    def __len__(self):
        return len(self.poses)

    def points(self) -> np.ndarray:
        return np.array([[p.x, p.y] for p in self.poses])


def inflate(grid: OccupancyGrid, robot_radius: float = DEFAULT_ROBOT_RADIUS,
            inflation_radius: float = DEFAULT_INFLATION_RADIUS) -> Costmap:
    """Build a costmap: lethal obstacles, an inscribed band the robot
    center may never enter, and an exponential decay that reaches 0 at
    inflation_radius. Unknown cells cost 255 unless the band claims them."""
    if inflation_radius < robot_radius:
        raise ValueError("inflation_radius must be >= robot_radius")
    classes = grid.classify()
    occupied = classes == 1
    if occupied.any():
        dist = distance_transform_edt(~occupied) * grid.resolution
    else:
        dist = np.full(classes.shape, np.inf)

    decay = 252.0 * np.exp(-INFLATION_DECAY * (dist - robot_radius))
    cost = np.rint(decay).astype(np.int32)
    cost[dist >= inflation_radius] = 0
    cost[classes == -1] = COST_UNKNOWN
    cost[dist <= robot_radius] = COST_INSCRIBED
    cost[occupied] = COST_LETHAL
    return Costmap(grid.width, grid.height, grid.resolution,
                   grid.origin.copy(), cost.astype(np.uint8))


def _edge_factor(cost_value: int) -> float:
    return 1.0 + cost_value / 64.0


def plan_global(cm: Costmap, start: Pose2D, goal: Pose2D) -> Path:
    """8-connected A* from start to goal over the costmap.

    Edge cost is step length (meters) times (1 + entered-cell cost / 64);
    the Euclidean heuristic is admissible under that model, so the result
    is optimal. Raises PlanningError when the goal cell is lethal,
    outside the map, or unreachable.
    """
    s = cm.world_to_cell(start.x, start.y)
    if s is None:
        raise ValueError("start pose outside the costmap")
    g = cm.world_to_cell(goal.x, goal.y)
    if g is None:
        raise PlanningError("goal outside the costmap")
    gc = int(cm.cost[g[1], g[0]])
    if gc in (COST_LETHAL, COST_INSCRIBED):
        raise PlanningError("goal lies in a lethal cell")
    if s == g:
        return Path([Pose2D(goal.x, goal.y, goal.theta)], 0.0, [s])

    res = cm.resolution
    w, h = cm.width, cm.height
    cost = cm.cost
    g_score = np.full((h, w), np.inf)
    parent = np.full((h, w), -1, dtype=np.int64)
    g_score[s[1], s[0]] = 0.0

    def heuristic(ix, iy):
        return math.hypot(ix - g[0], iy - g[1]) * res

    open_heap = [(heuristic(*s), s)]
    while open_heap:
        f, (cx, cy) = heapq.heappop(open_heap)
        gc_cur = g_score[cy, cx]
        if (cx, cy) == g:
            break
        if f > gc_cur + heuristic(cx, cy) + 1e-12:
            continue  # stale heap entry
        for dx, dy, step in _NEIGHBORS:
            nx, ny = cx + dx, cy + dy
            if not (0 <= nx < w and 0 <= ny < h):
                continue
            c = int(cost[ny, nx])
            if c in (COST_LETHAL, COST_INSCRIBED):
                continue
            tentative = gc_cur + step * res * _edge_factor(c)
            if tentative < g_score[ny, nx]:
                g_score[ny, nx] = tentative
                parent[ny, nx] = cy * w + cx
                heapq.heappush(open_heap, (tentative + heuristic(nx, ny), (nx, ny)))
    else:
        raise PlanningError("goal unreachable from start")

    cells = [g]
    while cells[-1] != s:
        p = parent[cells[-1][1], cells[-1][0]]
        if p < 0:
            raise PlanningError("goal unreachable from start")
        cells.append((int(p % w), int(p // w)))
    cells.reverse()

    poses = [Pose2D(start.x, start.y, start.theta)]
    for i in range(1, len(cells) - 1):
        x, y = cm.cell_to_world(*cells[i])
        nx, ny = cm.cell_to_world(*cells[i + 1])
        poses.append(Pose2D(x, y, math.atan2(ny - y, nx - x)))
    poses.append(Pose2D(goal.x, goal.y, goal.theta))
    return Path(poses, float(g_score[g[1], g[0]]), cells)


def _rollout_arc(x, y, th, v, w, dt):
    """One exact-arc step for arrays of states (v, w constant per sample)."""
    straight = np.abs(w) < 1e-9
    th1 = th + w * dt
    with np.errstate(divide="ignore", invalid="ignore"):
        radius = np.where(straight, 0.0, v / np.where(straight, 1.0, w))
    nx = np.where(straight, x + v * dt * np.cos(th),
                  x + radius * (np.sin(th1) - np.sin(th)))
    ny = np.where(straight, y + v * dt * np.sin(th),
                  y - radius * (np.cos(th1) - np.cos(th)))
    return nx, ny, th1


def _local_goal(path: Path, pose: Pose2D, lookahead: float):
    pts = path.points()
    d = np.hypot(pts[:, 0] - pose.x, pts[:, 1] - pose.y)
    i = int(np.argmin(d))
    remaining = 0.0
    while i + 1 < len(pts) and remaining < lookahead:
        remaining += float(np.hypot(*(pts[i + 1] - pts[i])))
        i += 1
    return pts[i], pts


def plan_local(cm: Costmap, pose: Pose2D, current: Twist2D, path: Path,
               cfg: PlannerConfig) -> Twist2D:
    """Pick the best admissible (v, w) by forward-simulating rollouts.

    Samples the acceleration-reachable velocity window, discards any
    trajectory that touches cost >= 253 (or leaves the map), and scores
    survivors by distance to the global path, distance to a lookahead
    point on it, and the worst cost touched; lowest score wins.
    Raises PlanningError when every sample collides.
    """
    if path is None or len(path) == 0:
        raise PlanningError("local planner needs a non-empty global path")

    dt = cfg.control_dt
    lo_v = max(cfg.min_vel_x, current.v - cfg.acc_lim_x * dt)
    hi_v = min(cfg.max_vel_x, current.v + cfg.acc_lim_x * dt)
    lo_v = min(lo_v, hi_v)
    lo_w = max(-cfg.max_rot_vel, current.w - cfg.acc_lim_theta * dt)
    hi_w = min(cfg.max_rot_vel, current.w + cfg.acc_lim_theta * dt)
    vs = np.linspace(lo_v, hi_v, cfg.vx_samples)
    ws = np.linspace(lo_w, hi_w, cfg.vtheta_samples)
    v_grid, w_grid = np.meshgrid(vs, ws, indexing="ij")
    v_flat, w_flat = v_grid.ravel(), w_grid.ravel()

    n = len(v_flat)
    x = np.full(n, pose.x)
    y = np.full(n, pose.y)
    th = np.full(n, pose.theta)
    alive = np.ones(n, dtype=bool)
    max_cost = np.zeros(n)

    steps = max(1, int(round(cfg.sim_time / dt)))
    for _ in range(steps):
        x, y, th = _rollout_arc(x, y, th, v_flat, w_flat, dt)
        ix = np.floor((x - cm.origin.x) / cm.resolution).astype(np.int64)
        iy = np.floor((y - cm.origin.y) / cm.resolution).astype(np.int64)
        inside = (ix >= 0) & (ix < cm.width) & (iy >= 0) & (iy < cm.height)
        c = np.where(inside, cm.cost[np.clip(iy, 0, cm.height - 1),
                                     np.clip(ix, 0, cm.width - 1)], COST_LETHAL)
        alive &= inside & (c < COST_INSCRIBED)
        max_cost = np.maximum(max_cost, np.where(alive, c, max_cost))

    if not alive.any():
        raise PlanningError("all rollout trajectories are in collision")

    carrot, pts = _local_goal(path, pose, cfg.sim_time * cfg.max_vel_x)
    path_dist = np.min(np.hypot(x[:, None] - pts[None, :, 0],
                                y[:, None] - pts[None, :, 1]), axis=1)
    goal_dist = np.hypot(x - carrot[0], y - carrot[1])
    score = (cfg.path_distance_weight * path_dist
             + cfg.goal_distance_weight * goal_dist
             + cfg.obstacle_weight * max_cost)
    score[~alive] = np.inf
    best = int(np.argmin(score))
    return Twist2D(float(v_flat[best]), float(w_flat[best]))


def goal_reached(pose: Pose2D, goal: Pose2D, cfg: PlannerConfig) -> bool:
    """Inside both the planar and yaw goal tolerances."""
    if math.hypot(goal.x - pose.x, goal.y - pose.y) > cfg.xy_goal_tolerance:
        return False
    return abs(normalize_angle(goal.theta - pose.theta)) <= cfg.yaw_goal_tolerance
