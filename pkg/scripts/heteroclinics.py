"""Shoot every documented front and print endpoint quality and intermediate visits."""

import time

from shfront.amplitude import ModelParams, slow_system
from shfront.connect import shoot, shoot_branches, slow_subsystem_check
from shfront.equilibria import catalogue, find
from shfront.lattice import AXIS_X, AngleSpec, make_direction, parse_angle


def row(name, tr, dt):
    visits = ",".join(tr.visits) or "-"
    print(f"{name:42s} dist={tr.final_distance:.1e} res={tr.endpoint_residual:.1e} "
          f"visits={visits:12s} {tr.persistence:15s} {dt:.2f}s")


def main():
    base = ModelParams(1.0, 2.0, 1.0, -3.0, -6.0)
    hex0 = make_direction("hex", AXIS_X)
    hex30 = make_direction("hex", parse_angle("pi/6", "hex"))
    cases = [
        ("hex_down -> trivial, theta 0", base, hex0, "hex_down", "trivial"),
        ("hex_down -> trivial, cot=3", base, make_direction("hex", AngleSpec(3, 1)), "hex_down", "trivial"),
        ("rolls -> trivial, mu0 = 5", ModelParams(5.0, 2.0, 1.0, -1.2, -0.6), hex0, "rolls", "trivial"),
        ("squares -> trivial", ModelParams(1.0, 2.0, 0.0, -3.0, K1=-6.0, kind="square"),
         make_direction("square", AngleSpec(2, 1)), "squares", "trivial"),
    ]
    for name, p, d, s, t in cases:
        t0 = time.perf_counter()
        tr = shoot_branches(p, d, s, t)
        row(name, tr, time.perf_counter() - t0)
    recs = catalogue(base)
    t0 = time.perf_counter()
    tr = shoot(find(recs, "hex_down"), find(recs, "trivial"), base, hex30, system=slow_system(base, hex30),
               records=recs)
    row("hex_down -> trivial, pi/6 slow subsystem", tr, time.perf_counter() - t0)
    res = slow_subsystem_check(base)
    print("slow-subsystem deviation:", ", ".join(f"{d:.3g}: {v:.3e}" for d, v in zip(res.deltas, res.deviations)),
          "monotone" if res.monotone else "NOT monotone")


if __name__ == "__main__":
    main()
