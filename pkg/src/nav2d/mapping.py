"""Occupancy-grid mapping from (pose, scan) pairs and map file I/O.

Integration is the standard log-odds inverse sensor model: cells a beam
passes through lose occupancy mass, the cell containing the beam endpoint
gains it. Maps serialize to the classic two-file format, a binary P5 PGM
(0 occupied / 254 free / 205 unknown, row 0 at the top of the map) plus a
YAML metadata file.
"""

import math
from pathlib import Path

import numpy as np
import yaml

from .core import (CELL_FREE, CELL_OCCUPIED, CELL_UNKNOWN, LOG_ODDS_MAX,
                   LOG_ODDS_MIN, LaserScan, OccupancyGrid, Pose2D,
                   normalize_angle)
from .raycast import visited_cells

# inverse sensor model increments, p_hit ~ 0.7 / p_miss ~ 0.4
L_OCC = 0.85
L_FREE = -0.4

PIXEL_OCCUPIED = 0
PIXEL_FREE = 254
PIXEL_UNKNOWN = 205

_YAML_KEYS = ("image", "resolution", "origin", "negate",
              "occupied_thresh", "free_thresh")


class MapFormatError(ValueError):
    """A map file exists but does not parse as a valid map."""


def integrate_scan(grid: OccupancyGrid, pose: Pose2D, scan: LaserScan) -> OccupancyGrid:
    """Fold one scan taken at a known pose into the grid (in place).

    Every cell a beam crosses before its endpoint gets L_FREE, the
    endpoint cell of a hit beam gets L_OCC; max-range (sentinel) beams
    mark free cells only. Beams leaving the grid are truncated at the
    border. Cells are clamped after the update.
    """
    if not grid.in_bounds(pose.x, pose.y):
        raise ValueError(f"mapping pose ({pose.x:.3f}, {pose.y:.3f}) outside grid")
    cfg = scan.config
    bearings = pose.theta + cfg.bearings()
    beam, ix, iy, endpoint = visited_cells(
        grid.width, grid.height, grid.origin.x, grid.origin.y,
        grid.resolution, pose.x, pose.y, bearings, scan.ranges)
    if beam.size == 0:
        return grid
    hit_beam = scan.hits()
    occ_rows = endpoint & hit_beam[beam]
    flat = grid.cells.reshape(-1)
    np.add.at(flat, iy[~occ_rows] * grid.width + ix[~occ_rows], L_FREE)
    np.add.at(flat, iy[occ_rows] * grid.width + ix[occ_rows], L_OCC)
    grid.clamp()
    return grid


def _match_score(occupied, grid, pose, bearings, probe_ranges):
    ex = pose.x + probe_ranges * np.cos(pose.theta + bearings)
    ey = pose.y + probe_ranges * np.sin(pose.theta + bearings)
    ix, iy, valid = grid.world_to_cell_array(ex, ey)
    return float(np.mean(occupied[iy, ix] & valid))


def scan_match(grid: OccupancyGrid, initial: Pose2D, scan: LaserScan):
    """Refine a pose by hill-climbing the fraction of beam endpoints that
    land on occupied map cells.

    Searches +-3 cells of translation and +-0.05 rad of rotation around
    the initial pose in three step-halving passes, accepting only strict
    improvements, so the result never scores below the initial pose.

    Returns:
        (refined_pose, score) with score in [0, 1]; degenerate inputs
        (empty map or a scan with no hits) return (initial, 0.0).
    """
    occupied = grid.occupied_mask()
    hit = scan.hits()
    if not occupied.any() or not hit.any():
        return initial.copy(), 0.0
    cfg = scan.config
    bearings = cfg.bearings()[hit]
    # ranges are cell entry distances; probe half a cell deeper so the
    # evaluation point sits mid-cell instead of on the boundary
    probe = scan.ranges[hit] + 0.5 * grid.resolution

    res = grid.resolution
    t_window = 3.0 * res
    a_window = 0.05
    best = Pose2D(initial.x, initial.y, initial.theta)
    best_score = _match_score(occupied, grid, best, bearings, probe)

    for t_step, a_step in ((2.0 * res, 0.04), (1.0 * res, 0.02), (0.5 * res, 0.01)):
        improved = True
        while improved:
            improved = False
            for dx, dy, da in ((t_step, 0, 0), (-t_step, 0, 0),
                               (0, t_step, 0), (0, -t_step, 0),
                               (0, 0, a_step), (0, 0, -a_step)):
                cand = Pose2D(best.x + dx, best.y + dy, best.theta + da)
                if (abs(cand.x - initial.x) > t_window + 1e-12
                        or abs(cand.y - initial.y) > t_window + 1e-12
                        or abs(normalize_angle(cand.theta - initial.theta)) > a_window + 1e-12):
                    continue
                score = _match_score(occupied, grid, cand, bearings, probe)
                if score > best_score:
                    best, best_score = cand, score
                    improved = True
    return best, best_score


# -- map files -----------------------------------------------------------


def save_map(grid: OccupancyGrid, basename) -> tuple:
    """Write <basename>.pgm and <basename>.yaml.

    The PGM is binary P5 with maxval 255; row 0 of the image is the
    highest-y row of the map. The YAML carries exactly the keys image,
    resolution, origin, negate, occupied_thresh, free_thresh, with
    resolution and origin in fixed 6-decimal format.

    Returns:
        (pgm_path, yaml_path)
    """
    base = Path(basename)
    pgm_path = base.with_name(base.name + ".pgm")
    yaml_path = base.with_name(base.name + ".yaml")

    classes = grid.classify()
    pixels = np.full(classes.shape, PIXEL_UNKNOWN, dtype=np.uint8)
    pixels[classes == CELL_OCCUPIED] = PIXEL_OCCUPIED
    pixels[classes == CELL_FREE] = PIXEL_FREE
    pixels = np.flipud(pixels)  # map max-y row -> image row 0

    header = f"P5\n{grid.width} {grid.height}\n255\n".encode("ascii")
    pgm_path.write_bytes(header + pixels.tobytes())

    o = grid.origin
    yaml_path.write_text(
        f"image: {pgm_path.name}\n"
        f"resolution: {grid.resolution:.6f}\n"
        f"origin: [{o.x:.6f}, {o.y:.6f}, {o.theta:.6f}]\n"
        "negate: 0\n"
        f"occupied_thresh: {grid.occupied_thresh}\n"
        f"free_thresh: {grid.free_thresh}\n")
    return pgm_path, yaml_path


def _read_pgm(path: Path) -> np.ndarray:
    data = path.read_bytes()
    pos = 0

    def next_token():
        nonlocal pos
        while pos < len(data):
            if data[pos:pos + 1].isspace():
                pos += 1
            elif data[pos:pos + 1] == b"#":
                while pos < len(data) and data[pos] not in b"\r\n":
                    pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise MapFormatError(f"{path}: truncated PGM header")
        return data[start:pos]

    magic = next_token()
    if magic != b"P5":
        raise MapFormatError(f"{path}: not a binary PGM (magic {magic!r}, expected P5)")
    try:
        width = int(next_token())
        height = int(next_token())
        maxval = int(next_token())
    except ValueError as e:
        raise MapFormatError(f"{path}: malformed PGM header: {e}") from None
    if maxval != 255:
        raise MapFormatError(f"{path}: unsupported PGM maxval {maxval}, expected 255")
    pos += 1  # single whitespace byte after maxval
    raster = data[pos:pos + width * height]
    if len(raster) < width * height:
        raise MapFormatError(f"{path}: PGM raster truncated "
                             f"({len(raster)} of {width * height} bytes)")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width)


def load_map(basename) -> OccupancyGrid:
    """Load a PGM+YAML map pair saved by save_map (or the classic tooling).

    Pixels map to occupancy probability p = (255 - pixel) / 255 when
    negate is 0, p = pixel / 255 when negate is 1, then classify through
    the thresholds: occupied cells load at the positive log-odds rail,
    free at the negative rail, unknown at 0.
    """
    base = Path(basename)
    yaml_path = base if base.suffix == ".yaml" \
        else base.with_name(base.name + ".yaml")
    if not yaml_path.exists():
        raise FileNotFoundError(f"map metadata file not found: {yaml_path}")
    try:
        meta = yaml.safe_load(yaml_path.read_text())
    except yaml.YAMLError as e:
        raise MapFormatError(f"{yaml_path}: invalid YAML: {e}") from None
    if not isinstance(meta, dict):
        raise MapFormatError(f"{yaml_path}: map YAML must be a mapping")
    unknown = set(meta) - set(_YAML_KEYS)
    if unknown:
        raise MapFormatError(f"{yaml_path}: unknown map YAML key(s): "
                             + ", ".join(sorted(unknown)))
    missing = set(_YAML_KEYS) - set(meta)
    if missing:
        raise MapFormatError(f"{yaml_path}: missing map YAML key(s): "
                             + ", ".join(sorted(missing)))

    resolution = float(meta["resolution"])
    origin = meta["origin"]
    if not isinstance(origin, (list, tuple)) or len(origin) != 3:
        raise MapFormatError(f"{yaml_path}: origin must be a 3-element list")
    if float(origin[2]) != 0.0:
        raise MapFormatError(f"{yaml_path}: rotated map origins are not "
                             f"supported (origin yaw {origin[2]})")
    negate = meta["negate"]
    if negate not in (0, 1):
        raise MapFormatError(f"{yaml_path}: negate must be 0 or 1, got {negate!r}")
    occupied_thresh = float(meta["occupied_thresh"])
    free_thresh = float(meta["free_thresh"])

    image = Path(str(meta["image"]))
    pgm_path = image if image.is_absolute() else yaml_path.parent / image
    if not pgm_path.exists():
        raise FileNotFoundError(f"map image file not found: {pgm_path}")
    pixels = _read_pgm(pgm_path)

    pixels = np.flipud(pixels).astype(float)  # image row 0 -> map max-y row
    p = pixels / 255.0 if negate else (255.0 - pixels) / 255.0
    classes = np.full(pixels.shape, CELL_UNKNOWN, dtype=np.int8)
    classes[p > occupied_thresh] = CELL_OCCUPIED
    classes[p < free_thresh] = CELL_FREE

    height, width = pixels.shape
    grid = OccupancyGrid(width, height, resolution,
                         Pose2D(float(origin[0]), float(origin[1]), 0.0),
                         occupied_thresh=occupied_thresh,
                         free_thresh=free_thresh)
    grid.set_classified(classes)
    return grid
