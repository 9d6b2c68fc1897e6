"""Verification kernels: sup-norm error, rate fits and two-sample KS."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tqssa import OdePath


@dataclass(frozen=True)
class ConvergenceReport:
    n_values: list[int]
    mean_sup_errors: list[float]
    fitted_slope: float
    slope_ci: tuple[float, float]
    replicas: int = 0
    std_errors: list[float] | None = None

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise ValueError("n_values must be strictly increasing")
        if any(not e > 0 for e in self.mean_sup_errors):
            raise ValueError("errors must be positive")

    @property
    def strictly_decreasing(self) -> bool:
        e = self.mean_sup_errors
        return all(b < a for a, b in zip(e, e[1:]))

    def rows(self):
        se = self.std_errors or [float("nan")] * len(self.n_values)
        for n, e, s in zip(self.n_values, self.mean_sup_errors, se):
            yield n, e, s, self.fitted_slope, self.slope_ci[0], self.slope_ci[1]

    def summary(self) -> str:
        lines = ["n         mean sup|Z_V^n - Z_V|"]
        for n, e in zip(self.n_values, self.mean_sup_errors):
            lines.append(f"{n:<9d} {e:.6g}")
        lines.append(f"fitted log-log slope {self.fitted_slope:.4f}  90% bootstrap CI [{self.slope_ci[0]:.4f}, {self.slope_ci[1]:.4f}]")
        if self.replicas:
            lines.append(f"replicas per n: {self.replicas}")
        return "\n".join(lines) + "\n"


REPORT_HEADER = ("n", "mean_sup_error", "std_error", "slope", "slope_lo", "slope_hi")


def sup_norm_error(traj, zv_limit: OdePath | object, grid=None) -> float:
    """sup_t |Z_V^n(t) - Z_V(t)| for a piecewise-constant path.

    ``traj`` exposes ``times``, ``zv`` and ``t_end`` (Trajectory, SlowPath).
    Both one-sided values are checked at every jump and at each ``grid``
    point, which is exact when the limit is monotone between jumps.
    ``zv_limit`` is a continuous callable of time (an OdePath) or another
    step path with ``times`` and ``zv_at`` for path-to-path distances.
    """
    t_end = traj.t_end
    if isinstance(zv_limit, OdePath) and zv_limit.t_end < t_end - 1e-12:
        raise ValueError("limit path does not cover the trajectory horizon")
    times = np.asarray(traj.times, dtype=float)
    zv = np.asarray(traj.zv, dtype=float)
    if hasattr(zv_limit, "zv_at"):
        # two step paths: the gap is itself a step function with breaks at
        # the union of both jump sets
        other = np.asarray(zv_limit.times, dtype=float)
        pts = np.union1d(times, other[other <= t_end])
        if grid is not None:
            pts = np.union1d(pts, np.asarray(grid, dtype=float))
        if pts.size and pts.max() > t_end + 1e-12:
            raise ValueError("grid exceeds the trajectory horizon")
        idx = np.searchsorted(times, pts, side="right") - 1
        return float(np.max(np.abs(zv[idx] - zv_limit.zv_at(pts))))
    limit = zv_limit
    # post-jump values at each record, pre-jump values at the next record / t_end
    right = np.append(times[1:], t_end)
    errs = [np.abs(zv - limit(times)), np.abs(zv - limit(right))]
    if grid is not None:
        grid = np.asarray(grid, dtype=float)
        if grid.size and grid.max() > t_end + 1e-12:
            raise ValueError("grid exceeds the trajectory horizon")
        idx = np.searchsorted(times, grid, side="right") - 1
        errs.append(np.abs(zv[idx] - limit(grid)))
    return float(max(e.max() for e in errs if e.size))


def _ols_slope(x, y) -> float:
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))


def fit_rate(n_values, errors, *, resamples: int = 200, seed: int = 0, level: float = 0.90):
    """Least-squares slope of log(error) on log(n) with a pairs-bootstrap interval.

    Returns (slope, (lo, hi)).  Resamples with fewer than two distinct n
    are redrawn.
    """
    x = np.log(np.asarray(n_values, dtype=float))
    y = np.asarray(errors, dtype=float)
    if x.size < 3 or x.size != y.size:
        raise ValueError("need at least three (n, error) pairs")
    if np.any(y <= 0) or np.any(~np.isfinite(y)):
        raise ValueError("errors must be positive and finite")
    if np.unique(x).size < 2:
        raise ValueError("need at least two distinct n values")
    y = np.log(y)
    slope = _ols_slope(x, y)
    rng = np.random.default_rng(seed)
    boots = []
    while len(boots) < resamples:
        i = rng.integers(0, x.size, x.size)
        if np.unique(x[i]).size < 2:
            continue
        boots.append(_ols_slope(x[i], y[i]))
    a = (1.0 - level) / 2.0
    lo, hi = np.quantile(boots, [a, 1.0 - a])
    return slope, (float(lo), float(hi))


def ks_distance(samples_a, samples_b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|."""
    a = np.sort(np.asarray(samples_a, dtype=float))
    b = np.sort(np.asarray(samples_b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("KS distance needs two non-empty samples")
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_to_cdf(samples, cdf) -> float:
    """One-sample KS distance to a CDF, valid for discrete laws too: the
    empirical CDF is compared on both sides of every sample value."""
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise ValueError("empty sample")
    u = np.unique(x)
    f_emp = np.searchsorted(x, u, side="right") / x.size
    f_emp_left = np.searchsorted(x, u, side="left") / x.size
    f = np.asarray([cdf(v) for v in u], dtype=float)
    f_left = np.asarray([cdf(np.nextafter(v, -np.inf)) for v in u], dtype=float)
    return float(max(np.max(np.abs(f_emp - f)), np.max(np.abs(f_emp_left - f_left))))
