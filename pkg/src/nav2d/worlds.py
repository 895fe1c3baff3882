"""Built-in ground-truth worlds.

Truth grids are fully known: every cell is saturated free or saturated
occupied so classify() never reports unknown. Walls are drawn 0.1 m
thick, matching two cells at the default 0.05 m resolution.
"""

import math

import numpy as np

from .core import LOG_ODDS_MAX, LOG_ODDS_MIN, OccupancyGrid, Pose2D

DEFAULT_RESOLUTION = 0.05
WALL = 0.1  # wall thickness in meters


def _empty_truth(width_m: float, height_m: float, resolution: float,
                 origin: Pose2D) -> OccupancyGrid:
    grid = OccupancyGrid(int(round(width_m / resolution)),
                         int(round(height_m / resolution)),
                         resolution, origin)
    grid.cells[:] = LOG_ODDS_MIN
    return grid


def fill_rect(grid: OccupancyGrid, x0: float, y0: float, x1: float, y1: float,
              occupied: bool = True):
    """Saturate all cells whose center falls inside the rectangle."""
    res = grid.resolution
    ix0 = max(0, int(math.floor((min(x0, x1) - grid.origin.x) / res + 0.5)))
    iy0 = max(0, int(math.floor((min(y0, y1) - grid.origin.y) / res + 0.5)))
    ix1 = min(grid.width, int(math.floor((max(x0, x1) - grid.origin.x) / res - 0.5)) + 1)
    iy1 = min(grid.height, int(math.floor((max(y0, y1) - grid.origin.y) / res - 0.5)) + 1)
    grid.cells[iy0:iy1, ix0:ix1] = LOG_ODDS_MAX if occupied else LOG_ODDS_MIN


def _outer_walls(grid: OccupancyGrid, x0, y0, x1, y1):
    fill_rect(grid, x0, y0, x1, y0 + WALL)
    fill_rect(grid, x0, y1 - WALL, x1, y1)
    fill_rect(grid, x0, y0, x0 + WALL, y1)
    fill_rect(grid, x1 - WALL, y0, x1, y1)


def demo_room(resolution: float = DEFAULT_RESOLUTION) -> OccupancyGrid:
    """10 x 10 m room split by an interior wall with a 0.6 m doorway,
    plus a few free-standing boxes. Start teleop runs at (0, -2)."""
    grid = _empty_truth(10.0, 10.0, resolution, Pose2D(-5.0, -5.0, 0.0))
    _outer_walls(grid, -5.0, -5.0, 5.0, 5.0)
    # interior wall at y = 1.0 with a doorway at x in [0.6, 1.2]
    fill_rect(grid, -5.0, 1.0 - WALL / 2, 0.6, 1.0 + WALL / 2)
    fill_rect(grid, 1.2, 1.0 - WALL / 2, 5.0, 1.0 + WALL / 2)
    fill_rect(grid, -2.8, -2.8, -2.2, -2.2)   # box
    fill_rect(grid, 2.3, -1.7, 2.7, -1.3)     # pillar
    fill_rect(grid, -2.2, 2.8, -1.6, 3.4)     # box in the north room
    return grid


DEMO_START = Pose2D(0.0, -2.0, 0.0)

# Timing course tube geometry. Each turn is a wide entry arc that tightens
# to TIGHT_RADIUS; a robot that carries more than max_rot_vel * TIGHT_RADIUS
# of forward speed into the tight section has no constant-twist arc left
# that stays inside the tube.
COURSE_WIDTH = 0.7
ENTRY_RADIUS = 1.2
TIGHT_RADIUS = 0.7


def _centerline_distance(grid: OccupancyGrid):
    """World coordinates of every cell center plus an all-inf distance field."""
    ys, xs = np.indices(grid.cells.shape)
    cx = grid.origin.x + (xs + 0.5) * grid.resolution
    cy = grid.origin.y + (ys + 0.5) * grid.resolution
    return cx, cy, np.full(grid.cells.shape, np.inf)


def _segment(dist, cx, cy, ax, ay, bx, by):
    vx, vy = bx - ax, by - ay
    t = np.clip(((cx - ax) * vx + (cy - ay) * vy) / (vx * vx + vy * vy), 0.0, 1.0)
    np.minimum(dist, np.hypot(cx - (ax + t * vx), cy - (ay + t * vy)), out=dist)


def _arc(dist, cx, cy, ox, oy, radius, a0, a1):
    d = np.hypot(cx - ox, cy - oy)
    ang = np.arctan2(cy - oy, cx - ox)
    in_sector = (ang >= min(a0, a1)) & (ang <= max(a0, a1))
    np.minimum(dist, np.where(in_sector, np.abs(d - radius), np.inf), out=dist)


def benchmark_course(resolution: float = DEFAULT_RESOLUTION) -> OccupancyGrid:
    """Timing course: a snaking 0.7 m wide tube whose four turns each open
    at ENTRY_RADIUS and tighten to TIGHT_RADIUS mid-turn. Straight legs
    between turns are long enough to reach full speed again.

    Walls are the band 0.35..0.45 m from the tube centerline, so the tube
    reads as a thin-walled track inside an otherwise open map. Pieces that
    are not joined end to end keep their centerlines at least 0.9 m apart,
    which keeps the wall bands of neighboring legs from merging.
    """
    grid = _empty_truth(10.0, 10.0, resolution, Pose2D(-5.0, -5.0, 0.0))
    cx, cy, dist = _centerline_distance(grid)
    pi = math.pi
    r1, r2 = ENTRY_RADIUS, TIGHT_RADIUS
    _segment(dist, cx, cy, -4.2, -4.2, 0.5, -4.2)           # east
    _arc(dist, cx, cy, 0.5, -3.0, r1, -pi / 2, 0.0)         # left, opens
    _arc(dist, cx, cy, 1.0, -3.0, r2, 0.0, pi / 2)          # left, tightens
    _segment(dist, cx, cy, 1.0, -2.3, -2.2, -2.3)           # west
    _arc(dist, cx, cy, -2.2, -1.1, r1, -pi, -pi / 2)        # right, opens
    _arc(dist, cx, cy, -2.7, -1.1, r2, pi / 2, pi)          # right, tightens
    _segment(dist, cx, cy, -2.7, -0.4, 1.3, -0.4)           # east
    _arc(dist, cx, cy, 1.3, 0.8, r1, -pi / 2, 0.0)          # left, opens
    _arc(dist, cx, cy, 1.8, 0.8, r2, 0.0, pi / 2)           # left, tightens
    _segment(dist, cx, cy, 1.8, 1.5, -2.0, 1.5)             # west
    _arc(dist, cx, cy, -2.0, 2.7, r1, -pi, -pi / 2)         # right, opens
    _arc(dist, cx, cy, -2.5, 2.7, r2, pi / 2, pi)           # right, tightens
    _segment(dist, cx, cy, -2.5, 3.4, 1.5, 3.4)             # east, goal leg
    half = COURSE_WIDTH / 2
    wall = (dist >= half) & (dist <= half + WALL)
    grid.cells[:] = np.where(wall, LOG_ODDS_MAX, LOG_ODDS_MIN)
    grid.cells[0, :] = LOG_ODDS_MAX
    grid.cells[-1, :] = LOG_ODDS_MAX
    grid.cells[:, 0] = LOG_ODDS_MAX
    grid.cells[:, -1] = LOG_ODDS_MAX
    return grid


BENCHMARK_START = Pose2D(-4.2, -4.2, 0.0)
BENCHMARK_GOAL = Pose2D(1.5, 3.4, 0.0)
