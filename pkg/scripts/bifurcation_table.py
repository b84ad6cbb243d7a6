"""Equilibrium branches and energy ordering over mu0 for the two coupling pairs."""

import argparse
from pathlib import Path

import numpy as np

from shfront.amplitude import ModelParams
from shfront.equilibria import energy_ranking, equilibria_csv
from shfront.lattice import AXIS_X, make_direction

PAIRS = {"hex-dominant": (-0.3, -0.6), "roll-crossing": (-1.2, -0.6)}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/bifurcation")
    ap.add_argument("--mu-max", type=float, default=8.0)
    ap.add_argument("--steps", type=int, default=161)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    d = make_direction("hex", AXIS_X)
    mus = np.linspace(args.mu_max / args.steps, args.mu_max, args.steps)
    for name, (K0, K2) in PAIRS.items():
        p = ModelParams(1.0, 2.0, 1.0, K0, K2)
        (out / f"{name}.csv").write_text(equilibria_csv(p, d, mus))
        rank = energy_ranking(p)
        mu1 = "none" if rank.mu1 is None else f"{rank.mu1:.10f}"
        print(f"{name}: K0={K0} K2={K2} mu1={mu1} hexagon_gap(mu0=1)={rank.hexagon_gap:.6g}")
        for mu0 in (0.5, 2.0, 6.0):
            r = energy_ranking(p.replace(mu0=mu0))
            print(f"  mu0={mu0}: lowest nontrivial {r.lowest_nontrivial}")


if __name__ == "__main__":
    main()
