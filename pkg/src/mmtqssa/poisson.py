"""Closed-form solution of the Poisson equation for the fast generator.

For fixed z_v, F(z_v, .) solves  drift(z_c) * dF/dz_c = -(z_c - z_minus)
on 0 <= z_c <= z_v with F(z_v, z_minus) = 0.  Because the drift factors as
k1 (z_c - z_minus)(z_c - z_plus), F is a logarithm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import RateConstants
from . import tqssa

DOMAIN_SLACK = 1e-12


@dataclass(frozen=True)
class PoissonContext:
    """Enzyme total and rates; ``k2_tot`` may be an array that broadcasts
    against the evaluation points."""

    k2_tot: float
    rates: RateConstants

    def __post_init__(self):
        if not np.all(np.asarray(self.k2_tot) > 0):
            raise ValueError("k2_tot must be positive")

    def roots(self, z_v):
        return tqssa.roots(self.k2_tot, z_v, self.rates)


def _check_domain(z_v, z_c):
    z_v = np.asarray(z_v, dtype=float)
    z_c = np.asarray(z_c, dtype=float)
    if np.any(z_c > z_v + DOMAIN_SLACK) or np.any(z_c < -DOMAIN_SLACK):
        raise ValueError("Poisson solution is defined for 0 <= z_c <= z_v only")
    return z_v, z_c


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def F(ctx: PoissonContext, z_v, z_c):
    z_v, z_c = _check_domain(z_v, z_c)
    zm, zp, _ = ctx.roots(z_v)
    return _out(-np.log((zp - z_c) / (zp - zm)) / ctx.rates.k1)


def F_expanded(ctx: PoissonContext, z_v, z_c):
    """Same function via z_plus - z_minus = sqrt(D)/k1; kept as a cross-check."""
    z_v, z_c = _check_domain(z_v, z_c)
    k1 = ctx.rates.k1
    _, zp, d = ctx.roots(z_v)
    return _out(-(np.log(zp - z_c) - 0.5 * np.log(d) + np.log(k1)) / k1)


def dF_dzc(ctx: PoissonContext, z_v, z_c):
    z_v, z_c = _check_domain(z_v, z_c)
    _, zp, _ = ctx.roots(z_v)
    return _out(1.0 / (ctx.rates.k1 * (zp - z_c)))


def d2F_dzc2(ctx: PoissonContext, z_v, z_c):
    z_v, z_c = _check_domain(z_v, z_c)
    _, zp, _ = ctx.roots(z_v)
    return _out(1.0 / (ctx.rates.k1 * (zp - z_c) ** 2))


def dF_dzv(ctx: PoissonContext, z_v, z_c):
    z_v, z_c = _check_domain(z_v, z_c)
    k1, km1 = ctx.rates.k1, ctx.rates.km1
    _, zp, d = ctx.roots(z_v)
    dzp = 1.0 - tqssa.dz_minus_dzv(ctx.k2_tot, z_v, ctx.rates)
    dlog_d = ((z_v - ctx.k2_tot) * k1**2 + k1 * km1) / d
    return _out(-(dzp / (zp - z_c) - dlog_d) / k1)


def poisson_residual(ctx: PoissonContext, z_v, z_c):
    """B F + (z_c - z_minus); identically zero for the closed form."""
    z_v, z_c = _check_domain(z_v, z_c)
    zm, zp, _ = ctx.roots(z_v)
    drift = tqssa.fast_drift(ctx.k2_tot, z_v, z_c, ctx.rates)
    return _out(drift / (ctx.rates.k1 * (zp - z_c)) + (z_c - zm))


def residual_rows(ctx: PoissonContext, z_v, z_c):
    res = np.atleast_1d(poisson_residual(ctx, z_v, z_c))
    for a, b, r in zip(np.atleast_1d(z_v), np.atleast_1d(z_c), res):
        yield float(a), float(b), float(r)


RESIDUAL_HEADER = ("z_v", "z_c", "residual")
