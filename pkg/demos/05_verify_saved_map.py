#!/usr/bin/env python3
"""Score a saved map of the demo room against the ground-truth world.

Usage: python3 demos/05_verify_saved_map.py BASENAME

Loads BASENAME.pgm/.yaml (as written by 'nav2d map-saver'), compares
every observed (non-unknown) cell against the built-in demo room, and
exits 0 when at least 95% of them classify correctly. This is the
scoring half of the browser-teleop checklist in frontend/e2e-checklist.md.
"""

import sys

from nav2d import load_map
from nav2d.core import CELL_UNKNOWN
from nav2d.worlds import demo_room


def main(argv) -> int:
    if len(argv) != 2:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    saved = load_map(argv[1])
    truth = demo_room()
    if (saved.width, saved.height) != (truth.width, truth.height):
        print(f"map is {saved.width}x{saved.height} cells, the demo room "
              f"is {truth.width}x{truth.height}; was this mapped in the "
              "demo world?", file=sys.stderr)
        return 2

    built = saved.classify()
    actual = truth.classify()
    observed = built != CELL_UNKNOWN
    seen = int(observed.sum())
    if seen == 0:
        print("no observed cells at all", file=sys.stderr)
        return 1
    acc = int(((built == actual) & observed).sum()) / seen

    coverage = seen / built.size
    print(f"observed {seen} cells ({100 * coverage:.1f}% of the grid)")
    print(f"classification accuracy on observed cells: {100 * acc:.1f}%")
    if acc >= 0.95:
        print("PASS (>= 95%)")
        return 0
    print("FAIL (< 95%)")
    return 1


if __name__ == "__main__":
    sys.exit(main(sys.argv))
