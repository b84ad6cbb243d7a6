"""Log-log slopes of spatial-eigenvalue displacements against eps."""

from shfront.lattice import AXIS_X, LatticeVector, generators, make_direction
from shfront.spectrum import scaling_probe


def main():
    sweep = [1e-2 * 10 ** (-3 * k / 10) for k in range(11)]
    hex0 = make_direction("hex", AXIS_X)
    sq0 = make_direction("square", AXIS_X)
    probes = [
        ("more-central expansion error", generators("hex")[0], hex0, "mc_error", 1, 2.0),
        ("more-central displacement", generators("hex")[0], hex0, "more_central", None, 1.0),
        ("less-central real part", LatticeVector(2, 1, "hex"), hex0, "less_central", None, 0.5),
        ("quadruple root, fast pair", LatticeVector(0, 1, "square"), sq0, "jordan4_fast", None, 1 / 3),
        ("tangential hyperbolic", LatticeVector(1, 1, "square"), sq0, "tangential", None, 0.25),
    ]
    for name, g, d, branch, j, expected in probes:
        s = scaling_probe(g, 1.0, 2.0 if j is None else 1.5, d, sweep, branch, j)
        print(f"{name:32s} slope={s:.4f} expected={expected:.4f}")


if __name__ == "__main__":
    main()
