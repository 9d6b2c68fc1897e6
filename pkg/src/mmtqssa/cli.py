"""Command-line front end: ``mmtqssa <command> [flags]``."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .core import ConfigError, ExperimentConfig, build_config, config_to_text, load_config
from . import experiments, fclt, io, occupation, ssa, stats, tqssa, verify

COMMANDS = ("simulate", "limit", "fluctuate", "occupation", "convergence", "verify", "reproduce-fig1")


def _n_list(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--n expects integers separated by commas, got {text!r}") from None
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("--n values must be positive")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat key = value config file")
    common.add_argument("--out", type=Path, help="output directory (fallback: $MM_OUT_DIR, then ./out)")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--n", type=_n_list, help="system size, or a comma list for sweeps")
    common.add_argument("--replicas", type=int)
    common.add_argument("--t-end", type=float, dest="t_end")
    common.add_argument("--threads", type=int, help="worker processes (default: available cores)")

    p = argparse.ArgumentParser(prog="mmtqssa", description="Stochastic Michaelis-Menten tQSSA experiments.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("simulate", parents=[common], help="exact SSA paths to CSV")
    s.add_argument("--full-jumps", action="store_true", help="one row per jump instead of per grid point")
    sub.add_parser("limit", parents=[common], help="limit ODE and classical reductions")
    f = sub.add_parser("fluctuate", parents=[common], help="empirical fluctuations against the limit SDE")
    f.add_argument("--points", type=int, default=11, help="output times on [0, t_end]")
    o = sub.add_parser("occupation", parents=[common], help="occupation measure and concentration")
    o.add_argument("--eps", type=float, default=0.05)
    o.add_argument("--burn-in", type=float, default=0.1, dest="burn_in")
    sub.add_parser("convergence", parents=[common], help="sup-norm error against n")
    sub.add_parser("verify", parents=[common], help="run the invariant suites")
    sub.add_parser("reproduce-fig1", parents=[common], help="mean SSA path against the limit ODE")
    return p


def resolve_config(args) -> ExperimentConfig:
    overrides: dict[str, object] = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.n is not None:
        overrides["n"] = args.n[0]
    if args.replicas is not None:
        overrides["replicas"] = args.replicas
    if args.t_end is not None:
        overrides["t_end"] = args.t_end
    if args.threads is not None:
        overrides["threads"] = args.threads
    if args.config is not None:
        return load_config(args.config, overrides)
    return build_config(overrides)


def out_dir(args) -> Path:
    d = args.out or Path(os.environ.get("MM_OUT_DIR") or "out")
    d.mkdir(parents=True, exist_ok=True)
    return d


def _single_n(args, command):
    if args.n is not None and len(args.n) > 1:
        raise ConfigError(f"{command} takes a single --n value")


def cmd_simulate(cfg, args, out):
    _single_n(args, "simulate")
    grid = cfg.time_grid()
    for r in range(cfg.replicas):
        if args.full_jumps:
            rows = ssa.trajectory_rows(ssa.simulate(cfg, r), full=True)
        else:
            rows = ssa.trajectory_rows(ssa.simulate_zv(cfg, r, grid))
        path = io.write_csv(out / f"trajectory_{r:04d}.csv", ssa.TRAJECTORY_HEADER, rows)
    print(f"wrote {cfg.replicas} trajectories to {out} (last: {path.name})")
    return 0


def cmd_limit(cfg, args, out):
    _single_n(args, "limit")
    grid = cfg.time_grid()
    z0 = cfg.z0
    paths = [
        experiments.flln_limit(cfg, grid),
        tqssa.solve_det_tqssa(z0.zv, cfg.k2_tot, cfg.rates, grid),
        tqssa.solve_det_sqssa(z0.zs, cfg.k2_tot, cfg.rates, grid),
    ]
    rows = [row for p in paths for row in p.rows()]
    io.write_csv(out / "limit.csv", tqssa.ODE_HEADER, rows)
    svg = io.line_plot_svg([(p.model, p.times, p.values) for p in paths],
                           title="Reduced models", xlabel="t", ylabel="value")
    io.write_svg(out / "limit.svg", svg)
    gap = float(np.max(np.abs(paths[0].values - paths[1].values)))
    print(f"max |DET_TQSSA - FLLN_TQSSA| = {gap:.6g}")
    return 0


def _sde_grid(t_end, dt, points):
    steps = int(round(t_end / dt))
    idx = np.unique(np.rint(np.linspace(0, steps, max(2, points))).astype(int))
    return idx * (t_end / steps)


def cmd_fluctuate(cfg, args, out):
    _single_n(args, "fluctuate")
    params = experiments.fclt_params(cfg)
    grid = _sde_grid(cfg.t_end, cfg.sde_dt, args.points)
    zv = experiments.zv_on_grid(cfg, grid, threads=cfg.threads or None)
    u_ssa = np.sqrt(cfg.n) * (zv - params.zv_path(grid)[None, :])
    emp = fclt.FluctuationEnsemble(grid, u_ssa, np.arange(cfg.replicas))
    sde = fclt.simulate_fclt_sde(params, cfg.replicas, grid)
    io.write_csv(out / "fluct_ssa.csv", fclt.FLUCT_HEADER, emp.rows())
    io.write_csv(out / "fluct_sde.csv", fclt.FLUCT_HEADER, sde.rows())
    io.write_csv(out / "fluct_ssa_summary.csv", fclt.SUMMARY_HEADER, emp.summary_rows())
    io.write_csv(out / "fluct_sde_summary.csv", fclt.SUMMARY_HEADER, sde.summary_rows())
    ks = stats.ks_distance(emp.u[:, -1], sde.u[:, -1])
    ratio = float(emp.var()[-1] / sde.var()[-1]) if cfg.replicas > 1 else float("nan")
    print(f"t={grid[-1]:g}: KS={ks:.4f} variance ratio={ratio:.4f} ({cfg.replicas} replicas each)")
    return 0


def cmd_occupation(cfg, args, out):
    ns = args.n or [cfg.n]
    rows = []
    for n in ns:
        c = cfg.with_(n=n)
        bins = occupation.Bins.uniform(c.k1_tot, c.t_end)
        occ = occupation.simulate_occupation(c, 0, bins)
        io.write_csv(out / f"occupation_n{n}.csv", occupation.OCCUPATION_HEADER, occ.rows())
        frac = occupation.concentration_fraction(occ, experiments.flln_limit(c), c.k2_tot, c.rates, args.eps, args.burn_in)
        rows.append((n, args.eps, args.burn_in, frac))
        print(f"n={n}: concentration fraction {frac:.6f}")
    io.write_csv(out / "concentration.csv", ("n", "eps", "burn_in", "fraction"), rows)
    return 0


def cmd_convergence(cfg, args, out):
    ns = args.n or [100, 400, 1600, 6400]
    report = experiments.convergence_study(cfg, ns, threads=cfg.threads or None)
    io.write_csv(out / "convergence.csv", stats.REPORT_HEADER, report.rows())
    io.atomic_write_text(out / "convergence.txt", report.summary())
    print(report.summary(), end="")
    return 0


def cmd_verify(cfg, args, out):
    results = verify.run_all(cfg)
    text = "".join(r.line() + "\n" for r in results)
    failed = [r for r in results if not r.ok]
    text += f"{len(results) - len(failed)}/{len(results)} suites passed\n"
    io.atomic_write_text(out / "verify.txt", text)
    print(text, end="")
    return 1 if failed else 0


def cmd_fig1(cfg, args, out):
    _single_n(args, "reproduce-fig1")
    res = experiments.reproduce_fig1(cfg, threads=cfg.threads or None)
    io.write_csv(out / "fig1.csv", experiments.FIG1_HEADER, res.rows())
    svg = io.line_plot_svg(
        [("SSA mean Z_V", res.times, res.zv_ssa_mean), ("limit ODE Z_V", res.times, res.zv_flln)],
        title=f"Z_V: exact simulation (n={cfg.n}, {cfg.replicas} replicas) vs limit", xlabel="t", ylabel="Z_V",
    )
    io.write_svg(out / "fig1.svg", svg)
    print(f"mean sup-norm gap {res.mean_sup_error:.5f} over {cfg.replicas} replicas")
    return 0


HANDLERS = {
    "simulate": cmd_simulate,
    "limit": cmd_limit,
    "fluctuate": cmd_fluctuate,
    "occupation": cmd_occupation,
    "convergence": cmd_convergence,
    "verify": cmd_verify,
    "reproduce-fig1": cmd_fig1,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        out = out_dir(args)
        io.atomic_write_text(out / "config_used.txt", config_to_text(cfg))
        return HANDLERS[args.command](cfg, args, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    except ssa.JumpCapExceeded as exc:
        print(f"simulation aborted: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
