#!/usr/bin/env python3
"""Sweep the local planner's velocity window on the timing course.

The course is a narrowing corridor gauntlet: each bend starts wide and
tightens, so a planner that carries too much forward speed into a bend
runs out of admissible constant-twist arcs and clips the wall. Raising
max_vel_x therefore first buys time, then buys collisions. The three
rows take around ten seconds of wall clock together.
"""

from nav2d.benchmark import format_table, run_table

PAIRS = [(0.1, 0.1), (0.1, 0.5), (0.1, 1.0)]


def main():
    print("running the course once per (min_vel_x, max_vel_x) window\n")
    rows = run_table(PAIRS, seed=0,
                     progress=lambda r: print(
                         f"  [{r.min_vel_x:g}, {r.max_vel_x:g}] {r.outcome}"
                         + (f" in {r.time_s:.1f} s" if r.time_s else "")))
    print()
    print(format_table(rows))
    print("\nsame map, same goal, same seed: only the velocity window "
          "changed")


if __name__ == "__main__":
    main()
