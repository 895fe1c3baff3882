import numpy as np
import pytest

from nav2d.core import LOG_ODDS_MAX, LOG_ODDS_MIN, OccupancyGrid, Pose2D


@pytest.fixture(scope="session")
def demo_grid():
    from nav2d.worlds import demo_room
    return demo_room()


def make_grid(width, height, resolution=0.05, origin=(0.0, 0.0)):
    """Fully-free grid (all cells at the free rail)."""
    g = OccupancyGrid(width, height, resolution, Pose2D(origin[0], origin[1], 0.0))
    g.cells[:] = LOG_ODDS_MIN
    return g


def occupy(grid, ix, iy):
    grid.cells[iy, ix] = LOG_ODDS_MAX


def occupy_column(grid, x_world):
    """Saturate the full column of cells containing world x."""
    ix = int(np.floor((x_world - grid.origin.x) / grid.resolution))
    grid.cells[:, ix] = LOG_ODDS_MAX
    return ix
