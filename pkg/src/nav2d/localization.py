"""Monte Carlo localization on a static occupancy grid.

A fixed-size particle set is advanced with a rotate-translate-rotate
odometry model, weighted with a likelihood-field sensor model against a
precomputed distance-to-obstacle grid, and renewed by low-variance
(systematic) resampling. Filter updates are gated on accumulated motion.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import distance_transform_edt

from .core import (LaserScan, OccupancyGrid, Pose2D, normalize_angle,
                   pose_between, pose_compose)

DEFAULT_PARTICLES = 500
_MIN_TRANS = 1e-9  # below this a delta is treated as pure rotation

# Alphas sized for the simulator's default odometry noise: with additive
# per-tick variances (1e-4, 1e-4, 1e-2) the dead-reckoned yaw error per
# gated update rivals the motion itself, so the filter's process noise
# must be of the same order or the cloud can never straddle the error.
# The conservative AmclConfig defaults below suit near-perfect odometry.
ALPHAS_NOISY_ODOM = (0.5, 0.2, 0.2, 0.2)


def _wrap_angles(a: np.ndarray) -> np.ndarray:
    """Vectorized normalize_angle: wrap into (-pi, pi], identity inside it."""
    r = np.remainder(a + math.pi, 2.0 * math.pi)
    r = np.where(r <= 0.0, r + 2.0 * math.pi, r)
    return r - math.pi


@dataclass
class Particle:
    pose: Pose2D
    weight: float

    def __post_init__(self):
        if not (math.isfinite(self.weight) and self.weight >= 0):
            raise ValueError(f"particle weight must be finite and >= 0, got {self.weight}")


@dataclass
class ParticleSet:
    """Pose hypotheses as (N, 3) pose rows plus matching weights."""

    poses: np.ndarray
    weights: np.ndarray
    diverged: bool = False

    def __post_init__(self):
        self.poses = np.asarray(self.poses, dtype=float).reshape(-1, 3)
        self.weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if len(self.weights) != len(self.poses):
            raise ValueError("pose/weight count mismatch")
        if np.any(self.weights < 0) or not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite and >= 0")

    @property
    def count(self) -> int:
        return len(self.poses)

    @property
    def particles(self):
        return [Particle(Pose2D(x, y, th), w)
                for (x, y, th), w in zip(self.poses, self.weights)]

    def copy(self) -> "ParticleSet":
        return ParticleSet(self.poses.copy(), self.weights.copy(), self.diverged)


@dataclass
class LikelihoodConfig:
    """Likelihood-field sensor model mixture (z_hit + z_rand must be 1)."""

    z_hit: float = 0.95
    z_rand: float = 0.05
    sigma_hit: float = 0.2
    max_obstacle_dist: float = 2.0

    def __post_init__(self):
        if abs(self.z_hit + self.z_rand - 1.0) > 1e-9:
            raise ValueError("z_hit + z_rand must equal 1")
        if self.sigma_hit <= 0 or self.max_obstacle_dist <= 0:
            raise ValueError("sigma_hit and max_obstacle_dist must be > 0")


@dataclass
class AmclConfig:
    """Filter parameters; particle count is fixed at min_particles."""

    min_particles: int = DEFAULT_PARTICLES
    update_min_d: float = 0.1
    update_min_a: float = 0.2
    alphas: tuple = (0.005, 0.005, 0.010, 0.005)
    likelihood: LikelihoodConfig = field(default_factory=LikelihoodConfig)
    beam_stride: int = 8
    resample_interval: int = 1  # resample every n-th sensor update

    def __post_init__(self):
        if self.min_particles < 1:
            raise ValueError("min_particles must be >= 1")
        if len(self.alphas) != 4 or any(a < 0 for a in self.alphas):
            raise ValueError("alphas must be four non-negative coefficients")
        if self.beam_stride < 1:
            raise ValueError("beam_stride must be >= 1")


def init_gaussian(grid: OccupancyGrid, mean: Pose2D, std, cfg: AmclConfig,
                  seed=None) -> ParticleSet:
    """Gaussian initial particle cloud around mean with std (sx, sy, stheta).

    Particles landing on occupied cells are redrawn a bounded number of
    times, then accepted as-is; weights are uniform.
    """
    if grid.world_to_cell(mean.x, mean.y) is None:
        raise ValueError("initial mean pose outside the map")
    rng = np.random.default_rng(seed)
    sx, sy, sth = std
    n = cfg.min_particles
    occupied = grid.occupied_mask()

    poses = np.empty((n, 3))
    poses[:, 0] = mean.x + (rng.normal(0, sx, n) if sx > 0 else 0.0)
    poses[:, 1] = mean.y + (rng.normal(0, sy, n) if sy > 0 else 0.0)
    poses[:, 2] = mean.theta + (rng.normal(0, sth, n) if sth > 0 else 0.0)

    for _ in range(20):  # retry cap, then accept whatever is left
        ix, iy, valid = grid.world_to_cell_array(poses[:, 0], poses[:, 1])
        bad = ~valid | occupied[iy, ix]
        if not bad.any() or (sx == 0 and sy == 0):
            break
        k = int(bad.sum())
        poses[bad, 0] = mean.x + (rng.normal(0, sx, k) if sx > 0 else 0.0)
        poses[bad, 1] = mean.y + (rng.normal(0, sy, k) if sy > 0 else 0.0)
    poses[:, 2] = _wrap_angles(poses[:, 2])
    return ParticleSet(poses, np.full(n, 1.0 / n))


def should_update(accumulated, cfg: AmclConfig) -> bool:
    """Gate: update once accumulated translation or rotation crosses a threshold."""
    d, a = accumulated
    if d < 0 or a < 0:
        raise ValueError("accumulated motion must be non-negative")
    return d >= cfg.update_min_d or a >= cfg.update_min_a


def decompose_delta(delta: Pose2D):
    """Split a body-frame odometry increment into (trans, rot1, rot2).

    Increments that point mostly backwards are treated as reverse driving
    (negative translation) so the heading hypothesis is not flipped.
    """
    trans = math.hypot(delta.x, delta.y)
    if trans < _MIN_TRANS:
        return 0.0, 0.0, normalize_angle(delta.theta)
    rot1 = math.atan2(delta.y, delta.x)
    if abs(rot1) > math.pi / 2:
        rot1 = normalize_angle(rot1 - math.pi)
        trans = -trans
    rot2 = normalize_angle(delta.theta - rot1)
    return trans, rot1, rot2


def motion_update(ps: ParticleSet, odom_delta, cfg: AmclConfig,
                  seed=None) -> ParticleSet:
    """Advance every particle by the decomposed odometry increment plus
    alpha-scaled noise (diff-corrected model); weights are untouched.

    Args:
        odom_delta: (trans, rot1, rot2) from decompose_delta.
    """
    trans, rot1, rot2 = odom_delta
    a1, a2, a3, a4 = cfg.alphas
    rng = np.random.default_rng(seed)
    n = ps.count

    std_rot1 = math.sqrt(a1 * rot1 * rot1 + a2 * trans * trans)
    std_trans = math.sqrt(a3 * trans * trans + a4 * (rot1 * rot1 + rot2 * rot2))
    std_rot2 = math.sqrt(a1 * rot2 * rot2 + a2 * trans * trans)

    r1 = rot1 + (rng.normal(0, std_rot1, n) if std_rot1 > 0 else 0.0)
    tr = trans + (rng.normal(0, std_trans, n) if std_trans > 0 else 0.0)
    r2 = rot2 + (rng.normal(0, std_rot2, n) if std_rot2 > 0 else 0.0)

    poses = ps.poses.copy()
    heading = poses[:, 2] + r1
    poses[:, 0] += tr * np.cos(heading)
    poses[:, 1] += tr * np.sin(heading)
    poses[:, 2] = _wrap_angles(heading + r2)
    return ParticleSet(poses, ps.weights.copy(), ps.diverged)


def precompute_distance_field(grid: OccupancyGrid,
                              max_obstacle_dist: float) -> np.ndarray:
    """Per-cell Euclidean distance (meters) to the nearest occupied cell,
    capped at max_obstacle_dist; the cap everywhere if nothing is occupied."""
    occupied = grid.occupied_mask()
    if not occupied.any():
        return np.full((grid.height, grid.width), max_obstacle_dist)
    dist = distance_transform_edt(~occupied) * grid.resolution
    return np.minimum(dist, max_obstacle_dist)


def sensor_update(ps: ParticleSet, scan: LaserScan, grid: OccupancyGrid,
                  cfg: AmclConfig, distance_field: np.ndarray) -> ParticleSet:
    """Reweight particles with the likelihood-field model and renormalize.

    Every beam_stride-th non-sentinel beam contributes
    z_hit * N(d; 0, sigma_hit) + z_rand / range_max, where d is the
    distance from the beam endpoint to the nearest occupied cell.
    If every weight underflows the set resets to uniform with the
    diverged flag raised.
    """
    lf = cfg.likelihood
    idx = np.arange(0, scan.config.beam_count, cfg.beam_stride)
    idx = idx[scan.ranges[idx] < scan.config.range_max]  # sentinels carry no info
    if idx.size == 0:
        w = ps.weights / ps.weights.sum()
        return ParticleSet(ps.poses.copy(), w, ps.diverged)

    bearings = scan.config.bearings()[idx]
    ranges = scan.ranges[idx]
    theta = ps.poses[:, 2:3] + bearings[None, :]
    ex = ps.poses[:, 0:1] + ranges[None, :] * np.cos(theta)
    ey = ps.poses[:, 1:2] + ranges[None, :] * np.sin(theta)
    ix, iy, valid = grid.world_to_cell_array(ex.ravel(), ey.ravel())
    d = np.where(valid, distance_field[iy, ix], lf.max_obstacle_dist)
    d = d.reshape(ps.count, idx.size)

    gauss = math.sqrt(1.0 / (2.0 * math.pi)) / lf.sigma_hit \
        * np.exp(-0.5 * (d / lf.sigma_hit) ** 2)
    beam_p = lf.z_hit * gauss + lf.z_rand / scan.config.range_max
    log_w = np.sum(np.log(beam_p), axis=1)

    log_w = log_w - log_w.max()
    w = ps.weights * np.exp(log_w)
    total = w.sum()
    if total <= 0 or not math.isfinite(total):
        n = ps.count
        return ParticleSet(ps.poses.copy(), np.full(n, 1.0 / n), True)
    return ParticleSet(ps.poses.copy(), w / total, ps.diverged)


def resample(ps: ParticleSet, seed=None) -> ParticleSet:
    """Low-variance (systematic) resampling; output weights are uniform."""
    total = ps.weights.sum()
    if total <= 0:
        raise ValueError("cannot resample an all-zero weight set")
    rng = np.random.default_rng(seed)
    n = ps.count
    positions = (rng.random() + np.arange(n)) / n
    cumulative = np.cumsum(ps.weights / total)
    cumulative[-1] = 1.0  # guard against round-off at the top
    chosen = np.searchsorted(cumulative, positions)
    return ParticleSet(ps.poses[chosen].copy(), np.full(n, 1.0 / n), ps.diverged)


def estimate_pose(ps: ParticleSet):
    """Weighted mean pose (circular mean for theta) and a 3x3 covariance.

    Theta deviations are wrapped before the covariance is accumulated, so
    a tight cloud straddling +-pi still reports a small spread.
    """
    w = ps.weights / ps.weights.sum()
    mx = float(np.dot(w, ps.poses[:, 0]))
    my = float(np.dot(w, ps.poses[:, 1]))
    mth = math.atan2(float(np.dot(w, np.sin(ps.poses[:, 2]))),
                     float(np.dot(w, np.cos(ps.poses[:, 2]))))
    dev = np.empty_like(ps.poses)
    dev[:, 0] = ps.poses[:, 0] - mx
    dev[:, 1] = ps.poses[:, 1] - my
    dth = np.remainder(ps.poses[:, 2] - mth + math.pi, 2 * math.pi) - math.pi
    dev[:, 2] = dth
    cov = (w[:, None] * dev).T @ dev
    return Pose2D(mx, my, mth), cov


class MonteCarloLocalizer:
    """Gated filter loop: feed odometry every tick and scans when available.

    Between filter updates the map-frame estimate is the last filter
    output composed with the odometry accumulated since, so consumers
    always see a smooth full-rate pose.
    """

    def __init__(self, grid: OccupancyGrid, cfg: AmclConfig = None, seed=0):
        self.grid = grid
        self.cfg = cfg if cfg is not None else AmclConfig()
        self.distance_field = precompute_distance_field(
            grid, self.cfg.likelihood.max_obstacle_dist)
        self.rng = np.random.default_rng(seed)
        self.particles = None
        self._prev_odom = None
        self._ref_odom = None    # odometry pose at the last filter update
        self._ref_map = None     # map-frame estimate at the last filter update
        self._acc_d = 0.0
        self._acc_a = 0.0
        self._updates = 0
        self.diverged = False

    def initialize(self, mean: Pose2D, std=(0.0, 0.0, 0.0)):
        self.particles = init_gaussian(self.grid, mean, std, self.cfg, self.rng)
        self._ref_map, _ = estimate_pose(self.particles)
        self._ref_odom = self._prev_odom
        self._acc_d = 0.0
        self._acc_a = 0.0

    def on_odometry(self, odom_pose: Pose2D):
        if self._prev_odom is not None:
            step = pose_between(self._prev_odom, odom_pose)
            self._acc_d += math.hypot(step.x, step.y)
            self._acc_a += abs(step.theta)
        self._prev_odom = odom_pose.copy()
        if self._ref_odom is None:
            self._ref_odom = odom_pose.copy()

    @property
    def update_due(self) -> bool:
        """True when enough motion accumulated that a scan would be used."""
        return (self.particles is not None and self._prev_odom is not None
                and should_update((self._acc_d, self._acc_a), self.cfg))

    def on_scan(self, scan: LaserScan) -> bool:
        """Run a gated filter update; returns True when one actually ran."""
        if self.particles is None:
            raise RuntimeError("localizer not initialized")
        if self._prev_odom is None:
            raise RuntimeError("no odometry received before scan")
        if not should_update((self._acc_d, self._acc_a), self.cfg):
            return False

        delta = pose_between(self._ref_odom, self._prev_odom)
        self.particles = motion_update(self.particles, decompose_delta(delta),
                                       self.cfg, self.rng)
        self.particles = sensor_update(self.particles, scan, self.grid,
                                       self.cfg, self.distance_field)
        if self.particles.diverged:
            self.diverged = True
        self._updates += 1
        if self._updates % self.cfg.resample_interval == 0:
            self.particles = resample(self.particles, self.rng)

        self._ref_map, _ = estimate_pose(self.particles)
        self._ref_odom = self._prev_odom.copy()
        self._acc_d = 0.0
        self._acc_a = 0.0
        return True

    def estimate(self) -> Pose2D:
        """Current map-frame pose estimate at full odometry rate."""
        if self._ref_map is None:
            raise RuntimeError("localizer not initialized")
        if self._prev_odom is None or self._ref_odom is None:
            return self._ref_map.copy()
        return pose_compose(self._ref_map,
                            pose_between(self._ref_odom, self._prev_odom))
