"""Occupation measure of (Z_C, Z_V) over time and its concentration on the
stable-equilibrium curve."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import ExperimentConfig, RateConstants, Trajectory
from . import ssa, tqssa
from .tqssa import OdePath


@dataclass(frozen=True)
class Bins:
    zc_edges: np.ndarray
    zv_edges: np.ndarray
    t_edges: np.ndarray

    @classmethod
    def uniform(cls, k1_tot: float, t_end: float, n_space: int = 200, n_time: int = 50) -> "Bins":
        return cls(
            np.linspace(0.0, k1_tot, n_space + 1),
            np.linspace(0.0, k1_tot, n_space + 1),
            np.linspace(0.0, t_end, n_time + 1),
        )

    def check_covers(self, k1_tot: float, t_end: float):
        for name, e, hi in (("zc", self.zc_edges, k1_tot), ("zv", self.zv_edges, k1_tot), ("t", self.t_edges, t_end)):
            if e.ndim != 1 or e.size < 2 or np.any(np.diff(e) <= 0):
                raise ValueError(f"{name} edges must be strictly increasing")
            if e[0] > 0 or e[-1] < hi * (1 - 1e-12):
                raise ValueError(f"{name} bins [{e[0]}, {e[-1]}] do not cover [0, {hi}]")
        if abs(self.t_edges[-1] - t_end) > 1e-12 * max(1.0, t_end):
            raise ValueError("time bins must end exactly at the horizon")


@dataclass(frozen=True)
class OccupationMeasure:
    zc_edges: np.ndarray
    zv_edges: np.ndarray
    t_edges: np.ndarray
    mass: np.ndarray

    @property
    def total(self) -> float:
        return float(self.mass.sum())

    def __add__(self, other: "OccupationMeasure") -> "OccupationMeasure":
        for a, b in ((self.zc_edges, other.zc_edges), (self.zv_edges, other.zv_edges), (self.t_edges, other.t_edges)):
            if not np.array_equal(a, b):
                raise ValueError("cannot merge measures on different bins")
        return OccupationMeasure(self.zc_edges, self.zv_edges, self.t_edges, self.mass + other.mass)

    def marginal_zv(self) -> np.ndarray:
        """Mass per (zv bin, time bin)."""
        return self.mass.sum(axis=0)

    def rows(self):
        """Nonzero cells as (zc_lo, zc_hi, zv_lo, zv_hi, t_lo, t_hi, mass)."""
        for i, j, k in zip(*np.nonzero(self.mass)):
            yield (
                float(self.zc_edges[i]), float(self.zc_edges[i + 1]),
                float(self.zv_edges[j]), float(self.zv_edges[j + 1]),
                float(self.t_edges[k]), float(self.t_edges[k + 1]),
                float(self.mass[i, j, k]),
            )


OCCUPATION_HEADER = ("zc_lo", "zc_hi", "zv_lo", "zv_hi", "t_lo", "t_hi", "mass")


@njit(cache=True)
def _accumulate(times, zc, zv, t_end, zc_edges, zv_edges, t_edges, mass):
    kt = 0
    m = times.shape[0]
    for i in range(m):
        t1 = times[i + 1] if i + 1 < m else t_end
        if t1 <= times[i]:
            continue
        ic = ssa._bin_index(zc_edges, zc[i])
        iv = ssa._bin_index(zv_edges, zv[i])
        kt = ssa._deposit(mass, ic, iv, times[i], t1, t_edges, kt)


def compute_occupation(traj: Trajectory, bins: Bins) -> OccupationMeasure:
    """Exact sojourn times of a jump-resolved path, binned in (z_c, z_v, t)."""
    k1_tot = float(traj.zv[0] + traj.scaled[0, 3])
    bins.check_covers(k1_tot, traj.t_end)
    mass = np.zeros((bins.zc_edges.size - 1, bins.zv_edges.size - 1, bins.t_edges.size - 1))
    _accumulate(traj.times, traj.zc.copy(), traj.zv, float(traj.t_end),
                bins.zc_edges, bins.zv_edges, bins.t_edges, mass)
    return OccupationMeasure(bins.zc_edges, bins.zv_edges, bins.t_edges, mass)


def simulate_occupation(config: ExperimentConfig, replica: int = 0, bins: Bins | None = None) -> OccupationMeasure:
    """Occupation measure accumulated while simulating, without storing the path.

    Consumes the same random stream as ``ssa.simulate`` for the same replica,
    so it reproduces ``compute_occupation(simulate(config, replica))``.
    """
    bins = bins or Bins.uniform(config.k1_tot, config.t_end)
    bins.check_covers(config.k1_tot, config.t_end)
    scales = config.regime.species_scales(config.n)
    coeffs = ssa.propensity_coefficients(config.rates, config.regime, config.n)
    raw = ssa.run_kernel(
        config.x0, coeffs, config.t_end, ssa.derive_seed(config.master_seed, replica),
        mode=ssa.RECORD_NONE, max_jumps=config.max_jumps,
        occupation=(bins.zc_edges, bins.zv_edges, bins.t_edges, float(scales[0]), float(scales[2])),
    )
    return OccupationMeasure(bins.zc_edges, bins.zv_edges, bins.t_edges, raw.occupation)


def concentration_fraction(
    occ: OccupationMeasure,
    zv_limit: OdePath,
    k2_tot: float,
    rates: RateConstants,
    eps: float = 0.05,
    t_burn: float = 0.1,
) -> float:
    """Share of post-burn-in time spent within ``eps`` of the stable
    equilibrium z_minus(K2, Z_V(t)), judged at cell centres.

    A time bin straddling ``t_burn`` counts with the fraction of its width
    lying after it.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    te = occ.t_edges
    if not t_burn < te[-1]:
        raise ValueError("burn-in must end before the horizon")
    width = np.diff(te)
    weight = np.clip((te[1:] - np.maximum(te[:-1], t_burn)) / width, 0.0, 1.0)
    t_mid = 0.5 * (te[:-1] + te[1:])
    target = tqssa.z_minus(k2_tot, np.maximum(zv_limit(t_mid), 0.0), rates)
    zc_mid = 0.5 * (occ.zc_edges[:-1] + occ.zc_edges[1:])
    inside = np.abs(zc_mid[:, None] - target[None, :]) <= eps  # (zc bin, t bin)
    per_cell = occ.mass.sum(axis=1)  # (zc bin, t bin)
    total = float((per_cell * weight).sum())
    if total <= 0:
        raise ValueError("no occupation mass after burn-in")
    return float((per_cell * inside * weight).sum() / total)
