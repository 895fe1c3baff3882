"""Deterministic kinematic simulation of a differential-drive robot.

The robot follows exact circular arcs between ticks (no Euler drift), so
the no-side-slip constraint x' sin(theta) - y' cos(theta) = 0 holds to
machine precision and closed trajectories close exactly. Odometry is the
true per-tick motion corrupted by zero-mean Gaussian noise; ground truth
is advanced without noise.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.ndimage import distance_transform_edt

from .core import (LaserScan, OccupancyGrid, Pose2D, RobotParams, ScanConfig,
                   Twist2D, WheelSpeeds, normalize_angle, pose_between,
                   pose_compose)
from .raycast import first_hit_distances

# below this yaw rate a tick is integrated as a straight segment
STRAIGHT_OMEGA_EPS = 1e-9

DEFAULT_TICK_RATE = 10.0  # Hz
DEFAULT_ROBOT_RADIUS = 0.06  # m, collision disc around the robot center


@dataclass
class OdomNoise:
    """Per-update odometry noise variances (x/y in m^2, yaw in rad^2)."""

    var_x: float = 1e-4
    var_y: float = 1e-4
    var_yaw: float = 1e-2

    def __post_init__(self):
        if self.var_x < 0 or self.var_y < 0 or self.var_yaw < 0:
            raise ValueError("noise variances must be >= 0")

    def stds(self):
        return math.sqrt(self.var_x), math.sqrt(self.var_y), math.sqrt(self.var_yaw)


@dataclass
class SimState:
    """Ground truth plus the dead-reckoned odometry estimate."""

    true_pose: Pose2D = field(default_factory=Pose2D)
    odom_pose: Pose2D = field(default_factory=Pose2D)
    commanded: Twist2D = field(default_factory=Twist2D)
    time: float = 0.0
    rng_seed: int = 0
    collision: bool = False

    def copy(self) -> "SimState":
        return SimState(self.true_pose.copy(), self.odom_pose.copy(),
                        self.commanded.copy(), self.time, self.rng_seed,
                        self.collision)


def wheels_to_twist(ws: WheelSpeeds, params: RobotParams) -> Twist2D:
    """Body velocity from wheel rates: v = r(wr+wl)/2, w = r(wr-wl)/d."""
    r, d = params.wheel_radius, params.wheel_separation
    return Twist2D(r * (ws.w_right + ws.w_left) / 2.0,
                   r * (ws.w_right - ws.w_left) / d)


def twist_to_wheels(t: Twist2D, params: RobotParams) -> WheelSpeeds:
    """Wheel rates realizing a body velocity, scaled down uniformly if either
    wheel would exceed max_wheel_speed (preserves the v/w ratio)."""
    r, d = params.wheel_radius, params.wheel_separation
    w_right = t.v / r + t.w * d / (2.0 * r)
    w_left = t.v / r - t.w * d / (2.0 * r)
    peak = max(abs(w_right), abs(w_left))
    if peak > params.max_wheel_speed:
        scale = params.max_wheel_speed / peak
        w_right *= scale
        w_left *= scale
    return WheelSpeeds(w_right, w_left)


def step_kinematics(pose: Pose2D, t: Twist2D, dt: float) -> Pose2D:
    """Advance a pose along the exact arc of constant (v, w) for dt seconds."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if abs(t.w) < STRAIGHT_OMEGA_EPS:
        return Pose2D(pose.x + t.v * dt * math.cos(pose.theta),
                      pose.y + t.v * dt * math.sin(pose.theta),
                      pose.theta)
    # chord form of the arc: numerically stable for tiny w, where the
    # naive radius * (sin(theta1) - sin(theta0)) difference cancels badly
    half = 0.5 * t.w * dt
    chord = 2.0 * (t.v / t.w) * math.sin(half)
    mid = pose.theta + half
    return Pose2D(pose.x + chord * math.cos(mid),
                  pose.y + chord * math.sin(mid),
                  pose.theta + t.w * dt)


def _corrupt_delta(delta: Pose2D, noise: OdomNoise, rng) -> Pose2D:
    sx, sy, syaw = noise.stds()
    return Pose2D(delta.x + (rng.normal(0.0, sx) if sx > 0 else 0.0),
                  delta.y + (rng.normal(0.0, sy) if sy > 0 else 0.0),
                  delta.theta + (rng.normal(0.0, syaw) if syaw > 0 else 0.0))


def step_odometry(state: SimState, noise: OdomNoise, dt: float,
                  rng=None) -> SimState:
    """Advance ground truth exactly and odometry with per-tick noise.

    The noisy increment is applied in the body frame of the odometry pose,
    so odometry drift composes the way real dead reckoning does.
    """
    rng = np.random.default_rng(rng)
    new_true = step_kinematics(state.true_pose, state.commanded, dt)
    delta = pose_between(state.true_pose, new_true)
    new_odom = pose_compose(state.odom_pose, _corrupt_delta(delta, noise, rng))
    return replace(state.copy(), true_pose=new_true, odom_pose=new_odom,
                   time=state.time + dt)


def simulate_lidar(pose: Pose2D, truth: OccupancyGrid, cfg: ScanConfig,
                   seed=None, stamp: float = 0.0) -> LaserScan:
    """Raycast a scan against the ground-truth grid.

    Each beam marches cell-by-cell from the pose; the first occupied cell
    (per the grid's trinary classification, unknown cells are transparent)
    returns its entry distance plus Gaussian noise, clamped to
    [range_min, range_max]. Beams that hit nothing, or leave the grid,
    return the range_max sentinel.
    """
    if not truth.in_bounds(pose.x, pose.y):
        raise ValueError(f"scan pose ({pose.x:.3f}, {pose.y:.3f}) outside grid")
    rng = np.random.default_rng(seed)
    bearings = pose.theta + cfg.bearings()
    dists = first_hit_distances(truth.occupied_mask(),
                                truth.origin.x, truth.origin.y,
                                truth.resolution, pose.x, pose.y, bearings,
                                cfg.range_min, cfg.range_max)
    hits = np.isfinite(dists)
    ranges = np.full(cfg.beam_count, cfg.range_max)
    if cfg.noise_sigma > 0:
        dists = dists + rng.normal(0.0, cfg.noise_sigma, cfg.beam_count)
    ranges[hits] = np.clip(dists[hits], cfg.range_min, cfg.range_max)
    return LaserScan(cfg, ranges, stamp)


class Simulator:
    """Owns a SimState and ticks it against a ground-truth world.

    Commands are saturated through the wheel-speed limit before they are
    applied, so the simulated robot can never out-drive its wheels. Each
    tick sweeps the motion arc at half-cell increments; the first sample
    that would push the robot center within robot_radius of an occupied
    cell is refined by bisection to the contact point, and the collision
    flag latches. Thin walls cannot be tunneled through regardless of
    speed.
    """

    def __init__(self, truth: OccupancyGrid, params: RobotParams = None,
                 noise: OdomNoise = None, start: Pose2D = None,
                 seed: int = 0, dt: float = 1.0 / DEFAULT_TICK_RATE,
                 robot_radius: float = DEFAULT_ROBOT_RADIUS):
        self.truth = truth
        self.params = params if params is not None else RobotParams()
        self.noise = noise if noise is not None else OdomNoise()
        self.dt = dt
        self.robot_radius = robot_radius
        self.rng = np.random.default_rng(seed)
        start = start if start is not None else Pose2D()
        self.state = SimState(true_pose=start.copy(), odom_pose=start.copy(),
                              rng_seed=seed)
        occ = truth.occupied_mask()
        clearance = distance_transform_edt(~occ) * truth.resolution
        self._blocked = occ | (clearance <= robot_radius)
        self._scan_count = 0

    def _pose_blocked(self, pose: Pose2D) -> bool:
        cell = self.truth.world_to_cell(pose.x, pose.y)
        if cell is None:
            return True
        ix, iy = cell
        return bool(self._blocked[iy, ix])

    def _sweep_blocked(self, start: Pose2D, cmd: Twist2D):
        """Sample the tick arc at <= half-cell spacing; return the first
        blocked interval (prev_frac, frac) or None if the arc is clear."""
        arc_len = abs(cmd.v) * self.dt
        n = max(1, math.ceil(arc_len / (0.5 * self.truth.resolution)))
        prev = 0.0
        for k in range(1, n + 1):
            frac = k / n
            probe = step_kinematics(start, cmd, frac * self.dt)
            if self._pose_blocked(probe):
                return prev, frac
            prev = frac
        return None

    def tick(self, cmd: Twist2D = None) -> SimState:
        """Advance one tick under cmd (or the previous command)."""
        st = self.state
        if cmd is not None:
            st.commanded = wheels_to_twist(twist_to_wheels(cmd, self.params),
                                           self.params)
        start = st.true_pose
        target = step_kinematics(start, st.commanded, self.dt)
        collided = st.collision
        hit = self._sweep_blocked(start, st.commanded)
        if hit is not None:
            collided = True
            lo, hi = hit
            for _ in range(16):
                mid = 0.5 * (lo + hi)
                probe = step_kinematics(start, st.commanded, mid * self.dt) \
                    if mid > 0 else start
                if self._pose_blocked(probe):
                    hi = mid
                else:
                    lo = mid
            target = step_kinematics(start, st.commanded, lo * self.dt) \
                if lo > 0 else start.copy()
        delta = pose_between(start, target)
        odom = pose_compose(st.odom_pose, _corrupt_delta(delta, self.noise, self.rng))
        self.state = SimState(true_pose=target, odom_pose=odom,
                              commanded=st.commanded, time=st.time + self.dt,
                              rng_seed=st.rng_seed, collision=collided)
        return self.state

    def scan(self) -> LaserScan:
        """Lidar scan from the current true pose, noise fed by the sim rng."""
        self._scan_count += 1
        return simulate_lidar(self.state.true_pose, self.truth,
                              self.params.lidar, seed=self.rng,
                              stamp=self.state.time)
