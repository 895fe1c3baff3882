"""Grid ray traversal for lidar simulation and scan integration.

All beams of a scan are marched in lockstep through the grid, visiting
every cell a ray crosses (Amanatides & Woo style integer traversal), so
grazing rays cannot skip over thin walls the way fixed-step sampling can.
Distances are arc lengths in meters along each ray; grids are assumed
axis-aligned (origin.theta == 0).
"""

import numpy as np

_EPS = 1e-12


def _setup(ox, oy, angles, origin_x, origin_y, resolution):
    """Per-beam traversal state: start cell, step direction, boundary distances."""
    n = len(angles)
    cx = (ox - origin_x) / resolution
    cy = (oy - origin_y) / resolution
    dx = np.cos(angles)
    dy = np.sin(angles)

    ix = np.full(n, np.floor(cx), dtype=np.int64)
    iy = np.full(n, np.floor(cy), dtype=np.int64)
    step_x = np.where(dx > 0, 1, np.where(dx < 0, -1, 0)).astype(np.int64)
    step_y = np.where(dy > 0, 1, np.where(dy < 0, -1, 0)).astype(np.int64)

    # distance in meters to the first boundary crossing per axis
    with np.errstate(divide="ignore", invalid="ignore"):
        tmax_x = np.where(
            step_x != 0,
            (ix + (step_x > 0) - cx) * resolution / dx,
            np.inf,
        )
        tmax_y = np.where(
            step_y != 0,
            (iy + (step_y > 0) - cy) * resolution / dy,
            np.inf,
        )
        tdelta_x = np.where(step_x != 0, resolution / np.abs(dx), np.inf)
        tdelta_y = np.where(step_y != 0, resolution / np.abs(dy), np.inf)
    return ix, iy, step_x, step_y, tmax_x, tmax_y, tdelta_x, tdelta_y


def first_hit_distances(occupied, origin_x, origin_y, resolution,
                        ox, oy, angles, range_min, range_max):
    """Entry distance of the first occupied cell along each ray.

    Args:
        occupied: (height, width) boolean grid.
        ox, oy: ray origin in world coordinates (must lie inside the grid).
        angles: world-frame bearings, one per ray.
        range_min: occupied cells ending before this distance are invisible.
        range_max: rays give up beyond this distance.

    Returns:
        Array of hit entry distances, np.inf for rays that hit nothing
        within range_max or left the grid first.
    """
    height, width = occupied.shape
    angles = np.asarray(angles, dtype=float)
    ix, iy, step_x, step_y, tmax_x, tmax_y, tdelta_x, tdelta_y = _setup(
        ox, oy, angles, origin_x, origin_y, resolution)

    n = len(angles)
    result = np.full(n, np.inf)
    t_entry = np.zeros(n)
    active = np.ones(n, dtype=bool)
    active &= (ix >= 0) & (ix < width) & (iy >= 0) & (iy < height)

    while np.any(active):
        idx = np.nonzero(active)[0]
        t_exit = np.minimum(tmax_x[idx], tmax_y[idx])
        occ = occupied[iy[idx], ix[idx]]
        hit = occ & (t_exit > range_min)
        hit_idx = idx[hit]
        result[hit_idx] = t_entry[hit_idx]
        active[hit_idx] = False

        mov = idx[~hit]
        if mov.size == 0:
            break
        go_x = tmax_x[mov] < tmax_y[mov]
        t_entry[mov] = np.where(go_x, tmax_x[mov], tmax_y[mov])
        ix[mov] += np.where(go_x, step_x[mov], 0)
        iy[mov] += np.where(go_x, 0, step_y[mov])
        tmax_x[mov] += np.where(go_x, tdelta_x[mov], 0.0)
        tmax_y[mov] += np.where(go_x, 0.0, tdelta_y[mov])

        dead = (t_entry[mov] >= range_max) \
            | (ix[mov] < 0) | (ix[mov] >= width) \
            | (iy[mov] < 0) | (iy[mov] >= height)
        active[mov[dead]] = False

    return result


def visited_cells(width, height, origin_x, origin_y, resolution,
                  ox, oy, angles, lengths):
    """Cells crossed by each ray out to a per-ray stop distance.

    Rays are truncated at the grid border. The cell containing the stop
    point is flagged as the endpoint cell; rays whose stop point lies
    exactly on a cell boundary end in the cell being entered.

    Returns:
        (beam, ix, iy, endpoint) flat int/bool arrays, one row per visited
        cell, in traversal order within each lockstep round.
    """
    angles = np.asarray(angles, dtype=float)
    lengths = np.asarray(lengths, dtype=float)
    ix, iy, step_x, step_y, tmax_x, tmax_y, tdelta_x, tdelta_y = _setup(
        ox, oy, angles, origin_x, origin_y, resolution)

    n = len(angles)
    t_entry = np.zeros(n)
    active = (ix >= 0) & (ix < width) & (iy >= 0) & (iy < height) & (lengths > 0)

    out_beam, out_ix, out_iy, out_end = [], [], [], []
    while np.any(active):
        idx = np.nonzero(active)[0]
        t_exit = np.minimum(tmax_x[idx], tmax_y[idx])
        # endpoint cell: entry <= length < exit (within a tolerance so a
        # measured range equal to a boundary crossing counts as the next cell)
        is_end = lengths[idx] < t_exit - _EPS

        out_beam.append(idx)
        out_ix.append(ix[idx].copy())
        out_iy.append(iy[idx].copy())
        out_end.append(is_end)

        active[idx[is_end]] = False
        mov = idx[~is_end]
        if mov.size == 0:
            break
        go_x = tmax_x[mov] < tmax_y[mov]
        t_entry[mov] = np.where(go_x, tmax_x[mov], tmax_y[mov])
        ix[mov] += np.where(go_x, step_x[mov], 0)
        iy[mov] += np.where(go_x, 0, step_y[mov])
        tmax_x[mov] += np.where(go_x, tdelta_x[mov], 0.0)
        tmax_y[mov] += np.where(go_x, 0.0, tdelta_y[mov])

        # strict-with-tolerance: a stop point on the boundary just crossed
        # still belongs to the cell being entered
        dead = (t_entry[mov] >= lengths[mov] + _EPS) \
            | (ix[mov] < 0) | (ix[mov] >= width) \
            | (iy[mov] < 0) | (iy[mov] >= height)
        active[mov[dead]] = False

    if not out_beam:
        empty_i = np.empty(0, dtype=np.int64)
        return empty_i, empty_i.copy(), empty_i.copy(), np.empty(0, dtype=bool)
    return (np.concatenate(out_beam), np.concatenate(out_ix),
            np.concatenate(out_iy), np.concatenate(out_end))
