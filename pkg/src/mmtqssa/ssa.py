"""Exact simulation of the scaled Michaelis-Menten jump process.

The direct (Doob-Gillespie) method: exponential holding time at the total
propensity, reaction chosen with probability proportional to its propensity.
Every run consumes exactly one exponential and one uniform variate per jump,
in that order, so the same seed gives the same path whatever is recorded.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Callable, Sequence

import numpy as np
from numba import njit

from .core import (
    CopyState,
    ExperimentConfig,
    RateConstants,
    ScalingRegime,
    TQSSA,
    Trajectory,
    derive_seed,
    make_rng,
    zv_from_counts,
)

T_END, ABSORBED, BUFFER_FULL, CAP_REACHED = 0, 1, 2, 3
RECORD_NONE, RECORD_PRODUCT, RECORD_ALL = 0, 1, 2

# stoichiometric jumps of (xs, xe, xc, xp) for binding, unbinding, product formation
JUMPS = np.array([[-1, -1, 1, 0], [1, 1, -1, 0], [0, 1, -1, 1]], dtype=np.int64)


class JumpCapExceeded(RuntimeError):
    """A path needed more jumps than ``max_jumps`` allows."""


@dataclass(frozen=True)
class PropensityVector:
    a1: float
    am1: float
    a2: float

    @property
    def total(self) -> float:
        return self.a1 + self.am1 + self.a2


def propensity_coefficients(rates: RateConstants, regime: ScalingRegime, n: int) -> tuple[float, float, float]:
    m1, mm1, m2 = regime.rate_multipliers(n)
    c = (rates.k1 * m1, rates.km1 * mm1, rates.k2 * m2)
    if not all(math.isfinite(v) for v in c):
        raise OverflowError(f"propensity coefficients overflow for n={n}")
    return c


def propensities(x: CopyState, rates: RateConstants, regime: ScalingRegime = TQSSA, n: int = 1) -> PropensityVector:
    """Mass-action propensities on the rescaled clock n**gamma * t."""
    c1, cm1, c2 = propensity_coefficients(rates, regime, n)
    a = PropensityVector(c1 * float(x.xs) * float(x.xe), cm1 * float(x.xc), c2 * float(x.xc))
    if not all(math.isfinite(v) for v in (a.a1, a.am1, a.a2)):
        raise OverflowError(f"non-finite propensity at state {x}")
    return a


@njit(cache=True, error_model="numpy")
def _bin_index(edges, v):
    k = np.searchsorted(edges, v, side="right") - 1
    if k == edges.shape[0] - 1:
        k -= 1
    return k


@njit(cache=True, error_model="numpy")
def _zv(xs, xc, scale_s, scale_c):
    if scale_s == scale_c:
        return (xs + xc) / scale_s
    return xs / scale_s + xc / scale_c


@njit(cache=True, error_model="numpy")
def _deposit(mass, ic, iv, t0, t1, t_edges, kt):
    # spread the sojourn [t0, t1) over time bins; kt is a monotone cursor
    nt = t_edges.shape[0] - 1
    while kt < nt - 1 and t_edges[kt + 1] <= t0:
        kt += 1
    while t0 < t1:
        hi = t_edges[kt + 1]
        if hi > t1 or kt == nt - 1:
            hi = t1
        mass[ic, iv, kt] += hi - t0
        t0 = hi
        if t0 < t1:
            kt += 1
    return kt


@njit(cache=True, error_model="numpy")
def _direct_method(
    x, t, t_end, c1, cm1, c2, rng, mode, rec_t, rec_x,
    grid, g, grid_out, jumps, max_jumps,
    occ, zc_edges, zv_edges, t_edges, scale_s, scale_c,
):
    """Advance ``x`` (in place) from time ``t``.

    Returns (t, g, n_recorded, jumps, status).  Stops at t_end,
    absorption, a full record buffer, or the jump cap.
    """
    xs, xe, xc, xp = x[0], x[1], x[2], x[3]
    ng = grid.shape[0]
    cap = rec_t.shape[0]
    use_occ = occ.shape[0] > 0
    n_rec = 0
    kt = 0
    ic = 0
    iv = 0
    if use_occ:
        ic = _bin_index(zc_edges, xc / scale_c)
        iv = _bin_index(zv_edges, _zv(xs, xc, scale_s, scale_c))
    status = T_END
    while True:
        a1 = c1 * xs * xe
        am1 = cm1 * xc
        a0 = a1 + am1 + c2 * xc
        if a0 <= 0.0:
            status = ABSORBED
            break
        if mode > 0 and n_rec >= cap:
            status = BUFFER_FULL
            break
        if jumps >= max_jumps:
            status = CAP_REACHED
            break
        tn = t + rng.standard_exponential() / a0
        if tn > t_end:
            status = T_END
            break
        while g < ng and grid[g] < tn:
            grid_out[g, 0] = xs
            grid_out[g, 1] = xe
            grid_out[g, 2] = xc
            grid_out[g, 3] = xp
            g += 1
        if use_occ:
            kt = _deposit(occ, ic, iv, t, tn, t_edges, kt)
        r = rng.random() * a0
        b = np.int64(r < a1)
        p = np.int64(r >= a1 + am1)
        d = 2 * b - 1
        xc += d
        xe -= d
        xs -= d * (1 - p)
        xp += p
        t = tn
        jumps += 1
        if mode == RECORD_ALL or (mode == RECORD_PRODUCT and p == 1):
            rec_t[n_rec] = t
            rec_x[n_rec, 0] = xs
            rec_x[n_rec, 1] = xe
            rec_x[n_rec, 2] = xc
            rec_x[n_rec, 3] = xp
            n_rec += 1
        if use_occ:
            ic = _bin_index(zc_edges, xc / scale_c)
            iv = _bin_index(zv_edges, _zv(xs, xc, scale_s, scale_c))
    if status == T_END or status == ABSORBED:
        while g < ng:
            grid_out[g, 0] = xs
            grid_out[g, 1] = xe
            grid_out[g, 2] = xc
            grid_out[g, 3] = xp
            g += 1
        if use_occ and t < t_end:
            kt = _deposit(occ, ic, iv, t, t_end, t_edges, kt)
    x[0] = xs
    x[1] = xe
    x[2] = xc
    x[3] = xp
    return t, g, n_rec, jumps, status


_EMPTY_F = np.zeros(0)
_EMPTY_OCC = np.zeros((0, 0, 0))


@dataclass
class RawRun:
    rec_times: np.ndarray
    rec_counts: np.ndarray
    grid_counts: np.ndarray
    jumps: int
    absorbed: bool
    occupation: np.ndarray | None


def run_kernel(
    x0: CopyState,
    coeffs: tuple[float, float, float],
    t_end: float,
    seed: int,
    *,
    mode: int = RECORD_ALL,
    grid: np.ndarray | None = None,
    max_jumps: int = 10**9,
    occupation: tuple[np.ndarray, np.ndarray, np.ndarray, float, float] | None = None,
    chunk: int = 1 << 16,
) -> RawRun:
    """Drive the jitted kernel to completion, growing record buffers as needed.

    ``occupation`` is ``(zc_edges, zv_edges, t_edges, scale_s, scale_c)``.
    """
    rng = make_rng(seed)
    x = x0.as_array()
    grid = _EMPTY_F if grid is None else np.ascontiguousarray(grid, dtype=float)
    if grid.size and (grid[-1] > t_end or np.any(np.diff(grid) < 0) or grid[0] < 0):
        raise ValueError("grid must be non-decreasing within [0, t_end]")
    grid_out = np.zeros((grid.size, 4), dtype=np.int64)
    if occupation is not None:
        zc_e, zv_e, t_e, s_s, s_c = occupation
        occ = np.zeros((zc_e.size - 1, zv_e.size - 1, t_e.size - 1))
    else:
        zc_e = zv_e = t_e = _EMPTY_F
        s_s = s_c = 1.0
        occ = _EMPTY_OCC
    size = chunk if mode != RECORD_NONE else 0
    t_parts, x_parts = [], []
    t, g, jumps = 0.0, 0, 0
    c1, cm1, c2 = (float(c) for c in coeffs)
    while True:
        rec_t = np.empty(size)
        rec_x = np.empty((size, 4), dtype=np.int64)
        t, g, k, jumps, status = _direct_method(
            x, t, float(t_end), c1, cm1, c2, rng, mode, rec_t, rec_x,
            grid, g, grid_out, jumps, int(max_jumps),
            occ, zc_e, zv_e, t_e, float(s_s), float(s_c),
        )
        if k:
            t_parts.append(rec_t[:k])
            x_parts.append(rec_x[:k])
        if status == BUFFER_FULL:
            size = min(2 * size, 1 << 24)
            continue
        if status == CAP_REACHED:
            raise JumpCapExceeded(f"path exceeded max_jumps={max_jumps} before t={t_end} (stopped at t={t:.6g})")
        break
    rec_times = np.concatenate(t_parts) if t_parts else np.empty(0)
    rec_counts = np.concatenate(x_parts) if x_parts else np.empty((0, 4), dtype=np.int64)
    return RawRun(rec_times, rec_counts, grid_out, jumps, status == ABSORBED, occ if occupation is not None else None)


def _seed_for(config: ExperimentConfig, replica: int) -> int:
    return derive_seed(config.master_seed, replica)


def simulate(config: ExperimentConfig, replica: int = 0) -> Trajectory:
    """One exact sample path on [0, t_end], recorded at every jump."""
    seed = _seed_for(config, replica)
    coeffs = propensity_coefficients(config.rates, config.regime, config.n)
    x0 = config.x0
    raw = run_kernel(x0, coeffs, config.t_end, seed, mode=RECORD_ALL, max_jumps=config.max_jumps)
    times = np.concatenate([[0.0], raw.rec_times])
    counts = np.vstack([x0.as_array()[None, :], raw.rec_counts])
    return Trajectory(times, counts, config.n, seed, config.t_end, config.regime)


@dataclass(frozen=True)
class SlowPath:
    """Z_V recorded only where it changes (product formation events).

    Exact for Z_V, which moves only when product forms; the fast species are
    available on ``grid`` only.
    """

    times: np.ndarray
    zv: np.ndarray
    n: int
    seed: int
    t_end: float
    grid: np.ndarray
    grid_states: np.ndarray
    jumps: int

    def zv_at(self, grid) -> np.ndarray:
        grid = np.asarray(grid, dtype=float)
        if grid.size and grid.max() > self.t_end:
            raise ValueError("grid point beyond t_end")
        idx = np.searchsorted(self.times, grid, side="right") - 1
        return self.zv[idx]


def simulate_zv(config: ExperimentConfig, replica: int = 0, grid: np.ndarray | None = None) -> SlowPath:
    """Exact Z_V path plus full scaled state on ``grid`` (default: config grid)."""
    seed = _seed_for(config, replica)
    grid = config.time_grid() if grid is None else np.asarray(grid, dtype=float)
    coeffs = propensity_coefficients(config.rates, config.regime, config.n)
    x0 = config.x0
    raw = run_kernel(x0, coeffs, config.t_end, seed, mode=RECORD_PRODUCT, grid=grid, max_jumps=config.max_jumps)
    scales = config.regime.species_scales(config.n)
    counts = np.vstack([x0.as_array()[None, :], raw.rec_counts])
    zv = zv_from_counts(counts, scales)
    times = np.concatenate([[0.0], raw.rec_times])
    return SlowPath(times, zv, config.n, seed, config.t_end, grid, raw.grid_counts / scales, raw.jumps)


def sample_on_grid(traj: Trajectory, grid) -> np.ndarray:
    """Scaled states (rows zs, ze, zc, zp) at ``grid``; a grid point on a
    jump time sees the post-jump state."""
    grid = np.asarray(grid, dtype=float)
    if grid.size and (grid.max() > traj.t_end or grid.min() < 0):
        raise ValueError("grid point outside [0, t_end]")
    idx = np.searchsorted(traj.times, grid, side="right") - 1
    return traj.scaled[idx]


def qv_martingale_mv(traj: Trajectory, rates: RateConstants) -> float:
    """Predictable quadratic variation k2/n * int_0^T Z_C ds of the slow
    martingale, integrated exactly along the piecewise-constant path."""
    dur = np.diff(np.append(traj.times, traj.t_end))
    return float(rates.k2 * np.dot(traj.zc, dur) / traj.n)


def default_threads() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def run_replicas(
    fn: Callable[[ExperimentConfig, int], object],
    config: ExperimentConfig,
    replicas: Sequence[int] | int | None = None,
    threads: int | None = None,
) -> list:
    """Map ``fn(config, r)`` over replica indices, in index order.

    Results depend only on (config, r), never on the worker count.
    """
    if replicas is None:
        replicas = config.replicas
    idx = list(range(replicas)) if isinstance(replicas, int) else list(replicas)
    threads = threads or config.threads or default_threads()
    threads = max(1, min(threads, len(idx)))
    if threads == 1:
        return [fn(config, r) for r in idx]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(partial(fn, config), idx, chunksize=max(1, len(idx) // (4 * threads))))


def trajectory_rows(traj: Trajectory | SlowPath, grid=None, full: bool = False):
    """Rows ``t,zs,ze,zc,zp,zv`` on ``grid`` or at every jump (``full``)."""
    if full:
        if not isinstance(traj, Trajectory):
            raise TypeError("full-jump export needs a jump-resolved Trajectory")
        t, z = traj.times, traj.scaled
    elif isinstance(traj, SlowPath) and grid is None:
        t, z = traj.grid, traj.grid_states
    else:
        t = np.asarray(grid, dtype=float)
        z = sample_on_grid(traj, t)
    for ti, zi in zip(t, z):
        yield (float(ti), *map(float, zi), float(zi[0] + zi[2]))


TRAJECTORY_HEADER = ("t", "zs", "ze", "zc", "zp", "zv")
