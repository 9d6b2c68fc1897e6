"""Sup-norm distance to the limit ODE as n grows; fitted log-log slope.

    python scripts/convergence_study.py --n 100,400,1600,6400 --replicas 50
"""

import argparse
import math
from pathlib import Path

from mmtqssa import experiments, io, stats
from mmtqssa.core import fig1_config

ap = argparse.ArgumentParser()
ap.add_argument("--n", default="100,400,1600,6400")
ap.add_argument("--replicas", type=int, default=50)
ap.add_argument("--t-end", type=float, default=10.0)
ap.add_argument("--out", type=Path, default=Path("results/convergence"))
args = ap.parse_args()

ns = [int(v) for v in args.n.split(",")]
rep = experiments.convergence_study(fig1_config(t_end=args.t_end), ns, replicas=args.replicas)
io.write_csv(args.out / "convergence.csv", stats.REPORT_HEADER, rep.rows())
io.atomic_write_text(args.out / "convergence.txt", rep.summary())
io.write_svg(args.out / "convergence.svg", io.line_plot_svg(
    [("log mean sup error", [math.log(n) for n in ns], [math.log(e) for e in rep.mean_sup_errors])],
    title="sup-norm error vs n", xlabel="log n", ylabel="log error"))
print(rep.summary(), end="")
