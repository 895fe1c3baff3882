"""Shared domain types and grid/angle utilities for the 2D nav stack.

World frame is right-handed: x forward, y left, theta counter-clockwise
from +x. Grids are stored row-major with row 0 at the lowest y; the PGM
image convention (row 0 = top) is handled at save/load time only.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

TWO_PI = 2.0 * math.pi

# log-odds clamp; p ~ 0.0025 / 0.9975 at the rails
LOG_ODDS_MIN = -6.0
LOG_ODDS_MAX = 6.0

# trinary cell classification
CELL_FREE = 0
CELL_OCCUPIED = 1
CELL_UNKNOWN = -1

DEFAULT_OCCUPIED_THRESH = 0.65
DEFAULT_FREE_THRESH = 0.196


def normalize_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi].

    Args:
        a: angle in radians, must be finite.

    Returns:
        Equivalent angle in (-pi, pi].
    """
    if not math.isfinite(a):
        raise ValueError(f"cannot normalize non-finite angle {a!r}")
    r = math.fmod(a + math.pi, TWO_PI)
    if r <= 0.0:
        r += TWO_PI
    return r - math.pi


@dataclass
class Pose2D:
    """Planar pose: position in meters, heading in radians (CCW from +x)."""

    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite pose position ({self.x}, {self.y})")
        self.theta = normalize_angle(self.theta)

    def copy(self) -> "Pose2D":
        return replace(self)


def pose_compose(a: Pose2D, b: Pose2D) -> Pose2D:
    """Compose two poses: return b (expressed in a's frame) in the world frame."""
    c, s = math.cos(a.theta), math.sin(a.theta)
    return Pose2D(
        a.x + c * b.x - s * b.y,
        a.y + s * b.x + c * b.y,
        a.theta + b.theta,
    )


def pose_between(a: Pose2D, b: Pose2D) -> Pose2D:
    """Express pose b in a's frame (inverse of pose_compose)."""
    c, s = math.cos(a.theta), math.sin(a.theta)
    dx, dy = b.x - a.x, b.y - a.y
    return Pose2D(c * dx + s * dy, -s * dx + c * dy, b.theta - a.theta)


@dataclass
class Twist2D:
    """Body-frame velocity command: forward speed v and yaw rate w.

    Lateral velocity is not representable; a differential drive cannot
    slip sideways.
    """

    v: float = 0.0  # m/s, body-frame forward
    w: float = 0.0  # rad/s, CCW positive

    def copy(self) -> "Twist2D":
        return replace(self)


@dataclass
class WheelSpeeds:
    """Angular rates of the right and left drive wheels in rad/s."""

    w_right: float = 0.0
    w_left: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.w_right) and math.isfinite(self.w_left)):
            raise ValueError("non-finite wheel speed")


@dataclass
class ScanConfig:
    """Lidar beam geometry and noise.

    Beam i points at bearing angle_min + i * increment where
    increment = (angle_max - angle_min) / beam_count, i.e. the angular
    span is half-open so a full 360-degree scan has no duplicate beam.
    """

    beam_count: int = 360
    angle_min: float = -math.pi
    angle_max: float = math.pi
    range_min: float = 0.15
    range_max: float = 8.0
    noise_sigma: float = 0.01

    def __post_init__(self):
        if self.beam_count < 1:
            raise ValueError(f"beam_count must be >= 1, got {self.beam_count}")
        if not self.range_min < self.range_max:
            raise ValueError("range_min must be < range_max")
        if not self.angle_min < self.angle_max:
            raise ValueError("angle_min must be < angle_max")

    @property
    def increment(self) -> float:
        return (self.angle_max - self.angle_min) / self.beam_count

    def bearings(self) -> np.ndarray:
        return self.angle_min + self.increment * np.arange(self.beam_count)


@dataclass
class LaserScan:
    """One revolution of range readings; range_max is the no-return sentinel."""

    config: ScanConfig
    ranges: np.ndarray
    stamp: float = 0.0

    def __post_init__(self):
        self.ranges = np.asarray(self.ranges, dtype=float)
        if self.ranges.shape != (self.config.beam_count,):
            raise ValueError(
                f"expected {self.config.beam_count} ranges, got {self.ranges.shape}"
            )

    def hits(self) -> np.ndarray:
        """Boolean mask of beams that actually hit something."""
        return self.ranges < self.config.range_max


@dataclass
class RobotParams:
    """Physical robot parameters: 0.1 m wheel separation, 0.08 m wheel diameter."""

    wheel_radius: float = 0.04
    wheel_separation: float = 0.1
    max_wheel_speed: float = 30.0
    lidar: ScanConfig = field(default_factory=ScanConfig)

    def __post_init__(self):
        if self.wheel_radius <= 0:
            raise ValueError("wheel_radius must be > 0")
        if self.wheel_separation <= 0:
            raise ValueError("wheel_separation must be > 0")
        if self.max_wheel_speed <= 0:
            raise ValueError("max_wheel_speed must be > 0")


@dataclass
class InertiaDiag:
    """Diagonal of an inertia tensor, kg m^2."""

    ixx: float
    iyy: float
    izz: float

    def __post_init__(self):
        if self.ixx < 0 or self.iyy < 0 or self.izz < 0:
            raise ValueError("inertia components must be non-negative")


def cylinder_inertia(m: float, r: float, h: float) -> InertiaDiag:
    """Diagonal inertia of a solid cylinder about its center.

    ixx = iyy = m (3 r^2 + h^2) / 12, izz = m r^2 / 2.
    """
    if m < 0 or r < 0 or h < 0:
        raise ValueError("mass and dimensions must be non-negative")
    lateral = m * (3.0 * r * r + h * h) / 12.0
    return InertiaDiag(lateral, lateral, m * r * r / 2.0)


class OccupancyGrid:
    """Log-odds occupancy grid with world-frame metadata.

    cells is a (height, width) float array of log-odds values, clamped to
    [LOG_ODDS_MIN, LOG_ODDS_MAX]; row iy = 0 sits at the origin corner
    (lowest y). origin is the world pose of the corner of cell (0, 0).
    """

    def __init__(self, width, height, resolution, origin=None, cells=None,
                 occupied_thresh=DEFAULT_OCCUPIED_THRESH,
                 free_thresh=DEFAULT_FREE_THRESH):
        if resolution <= 0:
            raise ValueError("resolution must be > 0")
        if width < 1 or height < 1:
            raise ValueError("grid must have at least one cell per axis")
        if not free_thresh < occupied_thresh:
            raise ValueError("free_thresh must be < occupied_thresh")
        self.width = int(width)
        self.height = int(height)
        self.resolution = float(resolution)
        self.origin = origin.copy() if origin is not None else Pose2D()
        if cells is None:
            self.cells = np.zeros((self.height, self.width))
        else:
            cells = np.asarray(cells, dtype=float)
            if cells.size != self.width * self.height:
                raise ValueError(
                    f"cells size {cells.size} != width*height {self.width * self.height}"
                )
            self.cells = cells.reshape(self.height, self.width).copy()
        self.occupied_thresh = float(occupied_thresh)
        self.free_thresh = float(free_thresh)

    def copy(self) -> "OccupancyGrid":
        return OccupancyGrid(self.width, self.height, self.resolution,
                             self.origin, self.cells,
                             self.occupied_thresh, self.free_thresh)

    # -- coordinate transforms ------------------------------------------

    def world_to_cell(self, x: float, y: float):
        """Cell index (ix, iy) containing world point (x, y), or None if outside."""
        dx, dy = x - self.origin.x, y - self.origin.y
        if self.origin.theta != 0.0:
            c, s = math.cos(self.origin.theta), math.sin(self.origin.theta)
            dx, dy = c * dx + s * dy, -s * dx + c * dy
        ix = math.floor(dx / self.resolution)
        iy = math.floor(dy / self.resolution)
        if 0 <= ix < self.width and 0 <= iy < self.height:
            return ix, iy
        return None

    def world_to_cell_array(self, xs, ys):
        """Vectorized world_to_cell.

        Returns (ix, iy, valid) int/bool arrays; indices of out-of-bounds
        points are clipped into range and flagged invalid.
        """
        dx = np.asarray(xs, dtype=float) - self.origin.x
        dy = np.asarray(ys, dtype=float) - self.origin.y
        if self.origin.theta != 0.0:
            c, s = math.cos(self.origin.theta), math.sin(self.origin.theta)
            dx, dy = c * dx + s * dy, -s * dx + c * dy
        ix = np.floor(dx / self.resolution).astype(np.int64)
        iy = np.floor(dy / self.resolution).astype(np.int64)
        valid = (ix >= 0) & (ix < self.width) & (iy >= 0) & (iy < self.height)
        return np.clip(ix, 0, self.width - 1), np.clip(iy, 0, self.height - 1), valid

    def cell_to_world(self, ix: int, iy: int):
        """World coordinates of the center of cell (ix, iy)."""
        dx = (ix + 0.5) * self.resolution
        dy = (iy + 0.5) * self.resolution
        if self.origin.theta != 0.0:
            c, s = math.cos(self.origin.theta), math.sin(self.origin.theta)
            dx, dy = c * dx - s * dy, s * dx + c * dy
        return self.origin.x + dx, self.origin.y + dy

    def in_bounds(self, x: float, y: float) -> bool:
        return self.world_to_cell(x, y) is not None

    # -- cell values ----------------------------------------------------

    def clamp(self):
        np.clip(self.cells, LOG_ODDS_MIN, LOG_ODDS_MAX, out=self.cells)

    def probabilities(self) -> np.ndarray:
        return 1.0 / (1.0 + np.exp(-self.cells))

    def classify(self) -> np.ndarray:
        """Trinary classification per cell: CELL_OCCUPIED / CELL_FREE / CELL_UNKNOWN."""
        p = self.probabilities()
        out = np.full((self.height, self.width), CELL_UNKNOWN, dtype=np.int8)
        out[p > self.occupied_thresh] = CELL_OCCUPIED
        out[p < self.free_thresh] = CELL_FREE
        return out

    def occupied_mask(self) -> np.ndarray:
        return self.probabilities() > self.occupied_thresh

    def set_classified(self, classes: np.ndarray):
        """Overwrite cells from a trinary class array (occupied/free -> rails)."""
        classes = np.asarray(classes)
        if classes.shape != (self.height, self.width):
            raise ValueError("class array shape mismatch")
        self.cells = np.zeros((self.height, self.width))
        self.cells[classes == CELL_OCCUPIED] = LOG_ODDS_MAX
        self.cells[classes == CELL_FREE] = LOG_ODDS_MIN
