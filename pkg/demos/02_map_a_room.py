#!/usr/bin/env python3
"""Build a map of the demo room from a scripted drive.

Replays the kind of sweep an operator would do with teleop: spins to
paint the surroundings, straight legs along the south room, then through
the doorway into the north room. Scans are integrated at the true pose
(the mapping layer trusts whatever pose it is given), the result is
compared cell-by-cell against the ground-truth world and saved as
PGM+YAML next to this script's working directory.
"""

import math

import numpy as np

from nav2d import Simulator, Twist2D, integrate_scan, save_map
from nav2d.core import CELL_UNKNOWN
from nav2d.worlds import DEMO_START, demo_room

# (v m/s, w rad/s, seconds); exact arcs keep open-loop headings exact
ROUTE = [
    (0.0, math.pi / 4, 8.0),    # full spin at the start pose
    (0.4, 0.0, 5.0),            # east to (2, -2)
    (0.0, math.pi / 4, 4.0),    # about-face
    (0.4, 0.0, 10.0),           # west to (-2, -2), past the box
    (0.0, -math.pi / 4, 2.0),   # face north
    (0.4, 0.0, 2.5),            # up to (-2, -1)
    (0.0, -math.pi / 4, 2.0),   # face east
    (0.4, 0.0, 7.25),           # to (0.9, -1), under the doorway
    (0.0, math.pi / 4, 2.0),    # face the doorway
    (0.4, 0.0, 7.5),            # through it, into the north room
    (0.0, math.pi / 4, 8.0),    # full spin to paint the north room
]


def ascii_map(classes: np.ndarray, every: int = 4) -> str:
    """Coarse character rendering, highest-y row first."""
    glyphs = {0: ".", 1: "#", -1: " "}
    rows = []
    for iy in range(classes.shape[0] - 1, -1, -every):
        rows.append("".join(glyphs[int(c)] for c in classes[iy, ::every]))
    return "\n".join(rows)


def main():
    truth = demo_room()
    sim = Simulator(truth, start=DEMO_START, seed=0)
    grid = demo_room()
    grid.cells[:] = 0.0  # start from an all-unknown map of the same shape

    for v, w, seconds in ROUTE:
        cmd = Twist2D(v, w)
        for _ in range(round(seconds / sim.dt)):
            sim.tick(cmd)
            integrate_scan(grid, sim.state.true_pose, sim.scan())
        p = sim.state.true_pose
        print(f"t={sim.state.time:6.2f}s  pose ({p.x:5.2f}, {p.y:5.2f}, "
              f"{p.theta:5.2f})  collision={sim.state.collision}")

    built = grid.classify()
    actual = truth.classify()
    observed = built != CELL_UNKNOWN
    correct = (built == actual) & observed
    acc = correct.sum() / observed.sum()
    print(f"\nobserved {observed.sum()} of {built.size} cells, "
          f"{100 * acc:.1f}% classified correctly")

    print(ascii_map(built))

    pgm, yml = save_map(grid, "demo_map")
    print(f"\nwrote {pgm} and {yml}")
    print("inspect them with any PGM viewer, or reuse with "
          "'nav2d serve --localize-map demo_map'")


if __name__ == "__main__":
    main()
