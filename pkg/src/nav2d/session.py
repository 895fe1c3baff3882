"""Live-map handoff between a running mapping session and map-saver.

The mapping process snapshots its grid to a well-known npz path about
once a second; map-saver reads the latest snapshot. Writes go through a
temp file + rename so readers never see a torn file.
"""

import os
import tempfile
import time

import numpy as np

from .core import OccupancyGrid, Pose2D


def default_session_path() -> str:
    return os.path.join(tempfile.gettempdir(), "nav2d-live-map.npz")


def publish_live_map(grid: OccupancyGrid, path: str = None):
    path = path or default_session_path()
    tmp = path + ".tmp"
    np.savez(tmp, cells=grid.cells, resolution=grid.resolution,
             origin=np.array([grid.origin.x, grid.origin.y, grid.origin.theta]),
             stamp=time.time())
    # np.savez appends .npz if missing
    if not os.path.exists(tmp):
        tmp = tmp + ".npz"
    os.replace(tmp, path)
    return path


def read_live_map(path: str = None) -> OccupancyGrid:
    path = path or default_session_path()
    if not os.path.exists(path):
        raise FileNotFoundError(
            f"no live mapping session at {path} (start one with "
            f"'nav2d sim' or 'nav2d teleop')")
    with np.load(path) as data:
        cells = data["cells"]
        res = float(data["resolution"])
        ox, oy, oth = (float(v) for v in data["origin"])
    grid = OccupancyGrid(cells.shape[1], cells.shape[0], res,
                         Pose2D(ox, oy, oth))
    grid.cells[:] = cells
    return grid
