"""Experiment drivers shared by the CLI, scripts and the acceptance suite."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ExperimentConfig
from . import fclt, occupation, ssa, stats, tqssa


def flln_limit(config: ExperimentConfig, grid=None) -> tqssa.OdePath:
    grid = config.time_grid() if grid is None else grid
    return tqssa.solve_flln_ode(config.z0.zv, config.k2_tot, config.rates, grid)


def _zv_at_worker(t_grid, config, r):
    return ssa.simulate_zv(config, r, grid=t_grid).zv_at(t_grid)


def zv_on_grid(config: ExperimentConfig, grid, replicas=None, threads=None) -> np.ndarray:
    """Z_V of every replica on ``grid``; shape (replicas, len(grid))."""
    from functools import partial

    grid = np.asarray(grid, dtype=float)
    out = ssa.run_replicas(partial(_zv_at_worker, grid), config, replicas, threads)
    return np.vstack(out)


def zv_at_time(config: ExperimentConfig, t: float, replicas=None, threads=None) -> np.ndarray:
    return zv_on_grid(config, [t], replicas, threads)[:, 0]


def _sup_worker(limit, config, r):
    path = ssa.simulate_zv(config, r)
    return stats.sup_norm_error(path, limit, path.grid), path.zv_at(path.grid)


def sup_errors(config: ExperimentConfig, limit=None, replicas=None, threads=None):
    """Per-replica sup-norm gaps to the limit ODE and the Z_V grid samples."""
    from functools import partial

    limit = limit or flln_limit(config)
    res = ssa.run_replicas(partial(_sup_worker, limit), config, replicas, threads)
    return np.array([e for e, _ in res]), np.vstack([z for _, z in res])


@dataclass
class Fig1Result:
    times: np.ndarray
    zv_ssa_mean: np.ndarray
    zv_flln: np.ndarray
    sup_errors: np.ndarray
    det_tqssa: np.ndarray

    @property
    def mean_sup_error(self) -> float:
        return float(self.sup_errors.mean())

    def rows(self):
        for t, a, b in zip(self.times, self.zv_ssa_mean, self.zv_flln):
            yield float(t), float(a), float(b)


FIG1_HEADER = ("t", "zv_ssa_mean", "zv_flln")


def reproduce_fig1(config: ExperimentConfig, threads=None) -> Fig1Result:
    limit = flln_limit(config)
    errs, zv = sup_errors(config, limit, threads=threads)
    det = tqssa.solve_det_tqssa(config.z0.zv, config.k2_tot, config.rates, limit.times)
    return Fig1Result(limit.times, zv.mean(axis=0), limit.values, errs, det.values)


def convergence_study(config: ExperimentConfig, n_values, replicas=None, threads=None, seed: int = 0) -> stats.ConvergenceReport:
    replicas = replicas or config.replicas
    limit = flln_limit(config)
    means, ses = [], []
    for n in n_values:
        errs, _ = sup_errors(config.with_(n=int(n)), limit, replicas, threads)
        means.append(float(errs.mean()))
        ses.append(float(errs.std(ddof=1) / np.sqrt(errs.size)) if errs.size > 1 else float("nan"))
    slope, ci = stats.fit_rate(n_values, means, seed=seed)
    return stats.ConvergenceReport([int(n) for n in n_values], means, slope, ci, replicas, ses)


@dataclass
class FcltCheck:
    t: float
    ssa_samples: np.ndarray
    sde_samples: np.ndarray

    @property
    def ks(self) -> float:
        return stats.ks_distance(self.ssa_samples, self.sde_samples)

    @property
    def var_ratio(self) -> float:
        return float(np.var(self.ssa_samples, ddof=1) / np.var(self.sde_samples, ddof=1))


def fclt_params(config: ExperimentConfig, t_end: float | None = None, **kw) -> fclt.FcltParams:
    t_end = config.t_end if t_end is None else t_end
    grid = np.linspace(0.0, t_end, max(11, int(round(t_end / 0.01)) + 1))
    limit = tqssa.solve_flln_ode(config.z0.zv, config.k2_tot, config.rates, grid)
    kw.setdefault("dt", config.sde_dt)
    kw.setdefault("k2_tilde", config.k2_tilde)
    kw.setdefault("seed", config.master_seed + 1)
    return fclt.FcltParams(config.k2_tot, config.rates, limit, t_end=t_end, **kw)


def fclt_check(config: ExperimentConfig, t: float = 1.0, ssa_replicas: int = 2000, sde_replicas: int = 2000,
               dt: float = 1e-3, threads=None) -> FcltCheck:
    """U_n(t) from exact paths against Euler-Maruyama samples of the limit SDE.

    U_n(0) is the initial rounding gap; the limit is started from it too.
    """
    params = fclt_params(config.with_(t_end=t), dt=dt)
    u_ssa = fclt.ssa_fluctuation_samples(config.with_(t_end=t), params.zv_path, t, ssa_replicas, threads)
    u0 = float(np.sqrt(config.n) * (config.x0.xs / config.n + config.x0.xc / config.n - config.z0.zv))
    params = fclt.FcltParams(params.k2_tot, params.rates, params.zv_path, dt=dt, u0=u0,
                             k2_tilde=config.k2_tilde, seed=params.seed, t_end=t)
    ens = fclt.simulate_fclt_sde(params, sde_replicas, grid=[0.0, t])
    return FcltCheck(t, u_ssa, ens.at(t))


def occupation_fraction(config: ExperimentConfig, replica: int = 0, eps: float = 0.05, t_burn: float = 0.1,
                        bins: occupation.Bins | None = None) -> float:
    occ = occupation.simulate_occupation(config, replica, bins)
    limit = flln_limit(config)
    return occupation.concentration_fraction(occ, limit, config.k2_tot, config.rates, eps, t_burn)
