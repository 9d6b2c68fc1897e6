"""Equilibria of the fast complex dynamics and the reduced ODE models.

With the slow total ``z_v`` and the enzyme total ``K`` frozen, the complex
obeys ``dz_c/dt = k1 (z_v - z_c)(K - z_c) - km1 z_c``.  Its roots
``z_minus <= min(z_v, K)`` (stable) and ``z_plus > z_v`` (unstable) drive
every reduced model here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .core import RateConstants

FLLN_TQSSA = "FLLN_TQSSA"
DET_TQSSA = "DET_TQSSA"
DET_SQSSA = "DET_SQSSA"
MODELS = (FLLN_TQSSA, DET_TQSSA, DET_SQSSA)


@dataclass(frozen=True)
class Equilibria:
    z_minus: float
    z_plus: float
    disc: float
    dz_minus: float
    dz_plus: float
    d2z_minus: float
    d2z_plus: float


def discriminant(k_tot, z_v, rates: RateConstants):
    """D = (z_v - K)^2 k1^2 + 2 km1 (z_v + K) k1 + km1^2 (sum of non-negative terms)."""
    k1, km1 = rates.k1, rates.km1
    return (z_v - k_tot) ** 2 * k1**2 + 2.0 * km1 * (z_v + k_tot) * k1 + km1**2


def roots(k_tot, z_v, rates: RateConstants):
    """(z_minus, z_plus, D); vectorises over numpy inputs.

    z_plus comes from the explicit formula (no cancellation, every term is
    positive) and z_minus from the product of roots z_v * K.
    """
    k1, km1 = rates.k1, rates.km1
    d = discriminant(k_tot, z_v, rates)
    z_plus = ((z_v + k_tot) * k1 + km1 + np.sqrt(d)) / (2.0 * k1)
    z_minus = z_v * k_tot / z_plus
    return z_minus, z_plus, d


def z_minus(k_tot, z_v, rates: RateConstants):
    return roots(k_tot, z_v, rates)[0]


def dz_minus_dzv(k_tot, z_v, rates: RateConstants):
    k1, km1 = rates.k1, rates.km1
    d = discriminant(k_tot, z_v, rates)
    return 0.5 - ((z_v - k_tot) * k1 + km1) / (2.0 * np.sqrt(d))


def dz_minus_dk(k_tot, z_v, rates: RateConstants):
    """Sensitivity of the stable root to the enzyme total; equals (z_v - z_minus)/sqrt(D)."""
    k1, km1 = rates.k1, rates.km1
    d = discriminant(k_tot, z_v, rates)
    return 0.5 - ((k_tot - z_v) * k1 + km1) / (2.0 * np.sqrt(d))


def equilibria(k_tot: float, z_v: float, rates: RateConstants) -> Equilibria:
    zm, zp, d = roots(k_tot, z_v, rates)
    sq = math.sqrt(d)
    slope = ((z_v - k_tot) * rates.k1 + rates.km1) / (2.0 * sq)
    # D - ((z_v - K) k1 + km1)^2 = 4 k1 km1 K
    curv = 2.0 * rates.k1**2 * rates.km1 * k_tot / d**1.5
    return Equilibria(
        z_minus=float(zm),
        z_plus=float(zp),
        disc=float(d),
        dz_minus=0.5 - slope,
        dz_plus=0.5 + slope,
        d2z_minus=-curv,
        d2z_plus=curv,
    )


def fast_drift(k_tot, z_v, z_c, rates: RateConstants):
    return rates.k1 * (z_v - z_c) * (k_tot - z_c) - rates.km1 * z_c


def apply_generator_B(g_prime: Callable[[float], float], k_tot, z_v, z_c, rates: RateConstants) -> float:
    """Fast generator applied to g, given its derivative: drift * g'(z_c)."""
    return fast_drift(k_tot, z_v, z_c, rates) * g_prime(z_c)


@dataclass(frozen=True)
class OdePath:
    """ODE solution on a time grid; ``slopes`` holds the right-hand side at
    each node so the path interpolates with cubic Hermite pieces."""

    times: np.ndarray
    values: np.ndarray
    model: str
    slopes: np.ndarray
    clamped: bool = False
    _spline: CubicHermiteSpline | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model tag {self.model!r}")
        object.__setattr__(self, "_spline", CubicHermiteSpline(self.times, self.values, self.slopes))

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < self.times[0] - 1e-12) or np.any(t > self.times[-1] + 1e-12):
            raise ValueError("evaluation time outside the ODE horizon")
        return self._spline(np.clip(t, self.times[0], self.times[-1]))

    def rows(self):
        for t, v in zip(self.times, self.values):
            yield float(t), float(v), self.model


def _check_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing with at least two points")
    return grid


def rk4(f: Callable[[float], float], y0: float, grid, h: float | None = None, h_max: float = 1e-3):
    """Classical fixed-step RK4 for an autonomous scalar ODE.

    Each grid interval is split into equal steps no longer than ``h``
    (default: a tenth of the interval, capped at ``h_max``).  Negative
    undershoots are clamped to zero.  Returns (values, clamped).
    """
    grid = _check_grid(grid)
    if h is not None and not h > 0:
        raise ValueError("step size must be positive")
    out = np.empty(grid.size)
    out[0] = y = float(y0)
    clamped = False
    for i in range(grid.size - 1):
        span = grid[i + 1] - grid[i]
        target = h if h is not None else min(span / 10.0, h_max)
        m = max(1, math.ceil(span / target - 1e-9))
        dt = span / m
        for _ in range(m):
            k1 = f(y)
            k2 = f(y + 0.5 * dt * k1)
            k3 = f(y + 0.5 * dt * k2)
            k4 = f(y + dt * k3)
            y = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if y < 0.0:
                y = 0.0
                clamped = True
        out[i + 1] = y
    return out, clamped


def _solve(rhs, y0, grid, model, h):
    if y0 < 0:
        raise ValueError("initial value must be non-negative")
    grid = _check_grid(grid)
    values, clamped = rk4(rhs, y0, grid, h=h)
    slopes = np.array([rhs(v) for v in values])
    return OdePath(grid, values, model, slopes, clamped)


def flln_rhs(k2_tot: float, rates: RateConstants) -> Callable[[float], float]:
    def rhs(z_v):
        return -rates.k2 * float(z_minus(k2_tot, max(z_v, 0.0), rates))

    return rhs


def solve_flln_ode(z_v0: float, k2_tot: float, rates: RateConstants, grid, h: float | None = None) -> OdePath:
    """Limit of the scaled substrate-plus-complex total: dZ_V/dt = -k2 z_minus(K2, Z_V)."""
    return _solve(flln_rhs(k2_tot, rates), z_v0, grid, FLLN_TQSSA, h)


def solve_det_tqssa(t0: float, e0: float, rates: RateConstants, grid, h: float | None = None) -> OdePath:
    """Classical deterministic tQSSA for T = S + C; same root as the limit
    ODE but with the Michaelis constant (km1 + k2)/k1 in place of km1/k1."""
    if e0 < 0:
        raise ValueError("e0 must be non-negative")
    eff = RateConstants(rates.k1, rates.km1 + rates.k2, rates.k2)
    path = _solve(flln_rhs(e0, eff), t0, grid, DET_TQSSA, h)
    return path


def solve_det_sqssa(s0: float, e0: float, rates: RateConstants, grid, h: float | None = None) -> OdePath:
    """Michaelis-Menten rate law dS/dt = -k2 e0 S / (kM + S)."""
    if e0 < 0:
        raise ValueError("e0 must be non-negative")
    km = rates.michaelis

    def rhs(s):
        s = max(s, 0.0)
        return -rates.k2 * e0 * s / (km + s)

    return _solve(rhs, s0, grid, DET_SQSSA, h)


ODE_HEADER = ("t", "value", "model")
