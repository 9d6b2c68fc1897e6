"""Fluctuations of Z_V around its deterministic limit.

Empirical side: U_n(t) = sqrt(n) (Z_V^n(t) - Z_V(t)) from exact paths.
Limit side: the linear SDE

    dU = [-k2 K2~ (Z_V - z_minus)/sqrt(D) - k2 z_minus'(Z_V) U] dt
         + sqrt(k2 z_minus(Z_V)) dW,

with every coefficient read off the precomputed limit path Z_V(t).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import RateConstants, derive_seed, make_rng
from . import tqssa
from .tqssa import OdePath


@dataclass(frozen=True)
class FcltParams:
    k2_tot: float
    rates: RateConstants
    zv_path: OdePath
    dt: float = 1e-3
    u0: float = 0.0
    k2_tilde: float = 0.0
    seed: int = 0
    t_end: float | None = None
    diffusion: bool = True

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.t_end is not None and self.t_end > self.zv_path.t_end + 1e-12:
            raise ValueError("zv_path does not cover the SDE horizon")

    @property
    def horizon(self) -> float:
        return self.zv_path.t_end if self.t_end is None else self.t_end


@dataclass(frozen=True)
class FluctuationPath:
    times: np.ndarray
    u_values: np.ndarray


@dataclass(frozen=True)
class FluctuationEnsemble:
    """Replica paths stacked row-wise: ``u[r, j]`` is replica r at ``times[j]``."""

    times: np.ndarray
    u: np.ndarray
    replica_ids: np.ndarray = field(default=None)

    def __len__(self):
        return self.u.shape[0]

    def path(self, r: int) -> FluctuationPath:
        return FluctuationPath(self.times, self.u[r])

    def at(self, t: float) -> np.ndarray:
        j = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[j] - t) > 1e-9 * max(1.0, abs(t)):
            raise ValueError(f"time {t} is not a recorded output time")
        return self.u[:, j]

    def mean(self) -> np.ndarray:
        return self.u.mean(axis=0)

    def var(self) -> np.ndarray:
        return self.u.var(axis=0, ddof=1) if len(self) > 1 else np.zeros(self.times.size)

    def rows(self):
        ids = self.replica_ids if self.replica_ids is not None else np.arange(len(self))
        for r, row in zip(ids, self.u):
            for t, v in zip(self.times, row):
                yield float(t), float(v), int(r)

    def summary_rows(self):
        m, v = self.mean(), self.var()
        for t, a, b in zip(self.times, m, v):
            yield float(t), float(a), float(b), len(self)


def empirical_fluctuation(traj, zv_limit: OdePath, grid, n: int | None = None) -> FluctuationPath:
    """sqrt(n) * (Z_V^n - Z_V) on ``grid``; ``traj`` is a Trajectory or SlowPath."""
    grid = np.asarray(grid, dtype=float)
    if grid.size and (grid.max() > traj.t_end + 1e-12 or grid.max() > zv_limit.t_end + 1e-12):
        raise ValueError("grid exceeds the horizon of the path or of the limit")
    n = traj.n if n is None else n
    return FluctuationPath(grid, np.sqrt(n) * (traj.zv_at(grid) - zv_limit(grid)))


def coefficients(t, params: FcltParams):
    """(constant drift, linear drift slope, diffusion) at times ``t``."""
    zv = np.maximum(params.zv_path(t), 0.0)
    zm, _, d = tqssa.roots(params.k2_tot, zv, params.rates)
    k2 = params.rates.k2
    const = -k2 * params.k2_tilde * (zv - zm) / np.sqrt(d)
    slope = -k2 * tqssa.dz_minus_dzv(params.k2_tot, zv, params.rates)
    sigma = np.sqrt(k2 * zm) if params.diffusion else np.zeros_like(zv)
    return const, slope, sigma


def fclt_drift(u, t, params: FcltParams):
    const, slope, _ = coefficients(t, params)
    out = const + slope * u
    return float(out) if np.ndim(out) == 0 else out


def fclt_diffusion(t, params: FcltParams):
    out = coefficients(t, params)[2]
    return float(out) if np.ndim(out) == 0 else out


def _steps(params: FcltParams) -> tuple[int, float]:
    n_steps = max(1, int(round(params.horizon / params.dt)))
    return n_steps, params.horizon / n_steps


def _output_index(grid, n_steps, h) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    idx = np.rint(grid / h).astype(int)
    if np.any(np.abs(idx * h - grid) > 1e-9 * np.maximum(1.0, grid)) or np.any(idx < 0) or np.any(idx > n_steps):
        raise ValueError("output times must be multiples of dt inside the horizon")
    return idx


def simulate_fclt_sde(
    params: FcltParams,
    replicas: int,
    grid=None,
    *,
    first_replica: int = 0,
    batch: int = 512,
) -> FluctuationEnsemble:
    """Euler-Maruyama paths of the limit SDE, one normal stream per replica.

    Replica r draws its increments from ``derive_seed(params.seed, r)``, so
    any subset of replicas reproduces bit-for-bit.
    """
    n_steps, h = _steps(params)
    if grid is None:
        grid = np.linspace(0.0, n_steps * h, min(n_steps, 100) + 1)
    grid = np.asarray(grid, dtype=float)
    out_idx = _output_index(grid, n_steps, h)
    t_nodes = np.arange(n_steps) * h
    const, slope, sigma = coefficients(t_nodes, params)
    sqh = np.sqrt(h)
    ids = np.arange(first_replica, first_replica + replicas)
    u_out = np.empty((replicas, grid.size))
    want = np.zeros(n_steps + 1, dtype=bool)
    want[out_idx] = True
    col = {k: np.flatnonzero(out_idx == k) for k in np.unique(out_idx)}
    for lo in range(0, replicas, batch):
        chunk = ids[lo:lo + batch]
        if params.diffusion:
            dw = np.stack([make_rng(derive_seed(params.seed, int(r))).standard_normal(n_steps) for r in chunk])
        else:
            dw = np.zeros((chunk.size, n_steps))
        u = np.full(chunk.size, float(params.u0))
        if want[0]:
            u_out[lo:lo + chunk.size][:, col[0]] = u[:, None]
        for k in range(n_steps):
            u = u + (const[k] + slope[k] * u) * h + sigma[k] * sqh * dw[:, k]
            if want[k + 1]:
                u_out[lo:lo + chunk.size][:, col[k + 1]] = u[:, None]
    return FluctuationEnsemble(grid, u_out, ids)


def em_moments(params: FcltParams, grid=None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exact mean and variance of the Euler-Maruyama chain (not of the SDE).

    The scheme is affine in U with Gaussian increments, so its first two
    moments follow a deterministic recursion.  Returns (times, mean, var).
    """
    n_steps, h = _steps(params)
    if grid is None:
        grid = np.arange(n_steps + 1) * h
    out_idx = _output_index(grid, n_steps, h)
    t_nodes = np.arange(n_steps) * h
    const, slope, sigma = coefficients(t_nodes, params)
    m = np.empty(n_steps + 1)
    v = np.empty(n_steps + 1)
    m[0], v[0] = params.u0, 0.0
    for k in range(n_steps):
        a = 1.0 + slope[k] * h
        m[k + 1] = a * m[k] + const[k] * h
        v[k + 1] = a * a * v[k] + sigma[k] ** 2 * h
    return np.asarray(grid, dtype=float), m[out_idx], v[out_idx]


def ssa_fluctuation_samples(config, zv_limit: OdePath, t: float, replicas: int | None = None, threads: int | None = None) -> np.ndarray:
    """U_n(t) across SSA replicas of ``config`` (Z_V tracked exactly)."""
    from .experiments import zv_at_time

    vals = zv_at_time(config, t, replicas=replicas, threads=threads)
    return np.sqrt(config.n) * (vals - float(zv_limit(t)))


FLUCT_HEADER = ("t", "u", "replica")
SUMMARY_HEADER = ("t", "mean", "var", "n_replicas")
