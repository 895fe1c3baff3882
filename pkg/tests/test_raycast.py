"""Grid ray traversal: hit distances and visited-cell enumeration."""

import math

import numpy as np
import pytest

from nav2d.raycast import first_hit_distances, visited_cells


def grid_with(shape, occupied_cells):
    occ = np.zeros(shape, dtype=bool)
    for ix, iy in occupied_cells:
        occ[iy, ix] = True
    return occ


class TestFirstHit:
    def test_axis_aligned_hit(self):
        occ = grid_with((20, 20), [(10, 5)])
        # origin of cell grid at (0,0), res 0.1; ray from (0.05,0.55) along +x
        d = first_hit_distances(occ, 0.0, 0.0, 0.1, 0.05, 0.55,
                                np.array([0.0]), 0.0, 10.0)
        # entry face of cell ix=10 is at x=1.0
        assert d[0] == pytest.approx(0.95, abs=1e-12)

    def test_diagonal_hit(self):
        occ = grid_with((30, 30), [(10, 10)])
        d = first_hit_distances(occ, 0.0, 0.0, 1.0, 0.5, 0.5,
                                np.array([math.pi / 4]), 0.0, 100.0)
        # cell (10,10) corner at (10,10); entry at sqrt(2)*9.5 along the ray
        assert d[0] == pytest.approx(math.sqrt(2) * 9.5, abs=1e-9)

    def test_miss_returns_inf(self):
        occ = np.zeros((10, 10), dtype=bool)
        d = first_hit_distances(occ, 0.0, 0.0, 1.0, 5.0, 5.0,
                                np.array([0.3]), 0.0, 100.0)
        assert np.isinf(d[0])

    def test_range_max_stops_march(self):
        occ = grid_with((10, 100), [(90, 5)])
        d = first_hit_distances(occ, 0.0, 0.0, 1.0, 0.5, 5.5,
                                np.array([0.0]), 0.0, 20.0)
        assert np.isinf(d[0])  # wall at 89.5 is beyond range 20

    def test_grazing_thin_wall_never_skipped(self):
        # single-cell-thick wall must stop rays at any angle
        occ = np.zeros((200, 200), dtype=bool)
        occ[:, 100] = True
        angles = np.linspace(-1.0, 1.0, 401)
        d = first_hit_distances(occ, 0.0, 0.0, 0.05, 2.5, 5.0,
                                angles, 0.0, 50.0)
        assert np.all(np.isfinite(d))
        # every reported hit lies on the wall plane x = 5.0
        x_hit = 2.5 + d * np.cos(angles)
        assert np.all(x_hit >= 5.0 - 1e-9)
        assert np.all(x_hit <= 5.05 + 1e-9)

    def test_ray_starting_inside_occupied_cell(self):
        occ = grid_with((10, 10), [(5, 5)])
        d = first_hit_distances(occ, 0.0, 0.0, 1.0, 5.5, 5.5,
                                np.array([0.0]), 0.1, 100.0)
        # start cell is occupied and its exit is beyond range_min
        assert d[0] == 0.0


class TestVisitedCells:
    def test_straight_ray_visits_every_column(self):
        beam, ix, iy, end = visited_cells(20, 20, 0.0, 0.0, 1.0,
                                          0.5, 3.5, np.array([0.0]),
                                          np.array([10.0]))
        assert ix.tolist() == list(range(11))
        assert np.all(iy == 3)
        assert end.sum() == 1 and end[-1]
        assert ix[end][0] == 10  # endpoint cell contains x = 10.0

    def test_truncated_at_border(self):
        beam, ix, iy, end = visited_cells(5, 5, 0.0, 0.0, 1.0,
                                          0.5, 0.5, np.array([0.0]),
                                          np.array([100.0]))
        assert ix.max() == 4
        assert not end.any()  # left the grid before reaching the length

    def test_zero_length_ray_visits_nothing(self):
        beam, ix, iy, end = visited_cells(5, 5, 0.0, 0.0, 1.0,
                                          2.5, 2.5, np.array([0.0]),
                                          np.array([0.0]))
        assert beam.size == 0

    def test_cells_are_connected_path(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            ang = rng.uniform(-math.pi, math.pi)
            length = rng.uniform(0.5, 12.0)
            beam, ix, iy, end = visited_cells(40, 40, 0.0, 0.0, 0.5,
                                              10.0, 10.0, np.array([ang]),
                                              np.array([length]))
            steps = np.abs(np.diff(ix)) + np.abs(np.diff(iy))
            assert np.all(steps == 1)  # 4-connected traversal, no jumps

    def test_multi_beam_rows_tagged_by_beam(self):
        angles = np.array([0.0, math.pi / 2, math.pi])
        beam, ix, iy, end = visited_cells(30, 30, 0.0, 0.0, 1.0,
                                          15.5, 15.5, angles,
                                          np.array([3.0, 3.0, 3.0]))
        assert set(beam.tolist()) == {0, 1, 2}
        for b in range(3):
            assert end[beam == b].sum() == 1
