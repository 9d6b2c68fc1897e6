"""Limit ODE against the deterministic tQSSA and sQSSA reductions over a range of k2.

    python scripts/reduced_models.py
"""

import argparse
from pathlib import Path

import numpy as np

from mmtqssa import io, tqssa
from mmtqssa.core import RateConstants

ap = argparse.ArgumentParser()
ap.add_argument("--k2", default="0.01,0.1,0.75,2,5")
ap.add_argument("--out", type=Path, default=Path("results/reduced"))
args = ap.parse_args()

grid = np.linspace(0, 10, 1001)
rows = []
for k2 in map(float, args.k2.split(",")):
    r = RateConstants(1.0, 1.0, k2)
    flln = tqssa.solve_flln_ode(1.0, 0.1, r, grid).values
    det_t = tqssa.solve_det_tqssa(1.0, 0.1, r, grid).values
    det_s = tqssa.solve_det_sqssa(1.0, 0.1, r, grid).values
    rows.append((k2, float(np.abs(det_t - flln).max()), float(np.abs(det_s - flln).max())))
    print(f"k2={k2:<5g} max|detT - limit|={rows[-1][1]:.5f}  max|S_sQSSA - limit|={rows[-1][2]:.5f}")
io.write_csv(args.out / "reduced_gaps.csv", ("k2", "gap_det_tqssa", "gap_det_sqssa"), rows)
