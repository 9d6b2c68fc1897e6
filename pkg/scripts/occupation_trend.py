"""Share of time (Z_C, Z_V) spends near the stable equilibrium curve, across n.

    python scripts/occupation_trend.py --n 100,1000,10000 --eps 0.05
"""

import argparse
from pathlib import Path

from mmtqssa import experiments, io
from mmtqssa.core import fig1_config

ap = argparse.ArgumentParser()
ap.add_argument("--n", default="100,1000,10000")
ap.add_argument("--eps", default="0.01,0.02,0.05")
ap.add_argument("--burn-in", type=float, default=0.1)
ap.add_argument("--out", type=Path, default=Path("results/occupation"))
args = ap.parse_args()

rows = []
for n in map(int, args.n.split(",")):
    for eps in map(float, args.eps.split(",")):
        frac = experiments.occupation_fraction(fig1_config(n=n), eps=eps, t_burn=args.burn_in)
        rows.append((n, eps, args.burn_in, frac))
        print(f"n={n:<6d} eps={eps:<5g} fraction={frac:.5f}")
io.write_csv(args.out / "concentration.csv", ("n", "eps", "burn_in", "fraction"), rows)
