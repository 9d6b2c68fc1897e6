"""Invariant suites run by ``mmtqssa verify``.

Each suite returns a SuiteResult with a pass count over the checked items.
Random grids draw (K, z_V) uniformly from [0, 10]^2 and z_C from [0, z_V].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ExperimentConfig, RateConstants, conserved_counts
from . import occupation, poisson, ssa, tqssa


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: int
    total: int
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        extra = f"  ({self.detail})" if self.detail else ""
        return f"[{tag}] {self.name}: {self.passed}/{self.total}{extra}"


def _suite(name, mask, detail="") -> SuiteResult:
    mask = np.asarray(mask, dtype=bool).ravel()
    return SuiteResult(name, int(mask.sum()), int(mask.size), detail)


@dataclass(frozen=True)
class DomainSample:
    k: np.ndarray
    zv: np.ndarray
    zc: np.ndarray


def domain_sample(size: int = 10_000, seed: int = 0, lo: float = 0.0, hi: float = 10.0, margin: float = 0.0) -> DomainSample:
    """Random points with K, z_V in [lo, hi] and z_C in [margin, z_V - margin]."""
    rng = np.random.default_rng(seed)
    k = rng.uniform(lo, hi, size)
    zv = rng.uniform(max(lo, 2 * margin), hi, size)
    zc = margin + rng.uniform(0.0, 1.0, size) * (zv - 2 * margin)
    return DomainSample(k, zv, zc)


def root_residuals(rates: RateConstants, pts: DomainSample, tol: float = 1e-10) -> SuiteResult:
    zm, zp, _ = tqssa.roots(pts.k, pts.zv, rates)
    ok = []
    for z in (zm, zp):
        # relative to the size of the individual terms of the quadratic
        scale = rates.k1 * (pts.zv + z) * (pts.k + z) + rates.km1 * z + 1e-300
        ok.append(np.abs(tqssa.fast_drift(pts.k, pts.zv, z, rates)) <= tol * scale)
    return _suite("equilibrium roots solve the quadratic (rel 1e-10)", np.concatenate(ok))


def equilibrium_bounds(rates: RateConstants, pts: DomainSample) -> SuiteResult:
    k1, km1 = rates.k1, rates.km1
    zm, zp, d = tqssa.roots(pts.k, pts.zv, rates)
    dz = tqssa.dz_minus_dzv(pts.k, pts.zv, rates)
    tiny = 1e-12
    checks = [
        d >= np.maximum((pts.zv - pts.k) ** 2 * k1**2, km1**2) * (1 - tiny),
        (zm >= 0) & (zm <= np.minimum(pts.zv, pts.k) * (1 + tiny) + tiny),
        zp - pts.zv >= km1 / (2 * k1) * (1 - tiny),
        np.abs(dz) <= 1.0 * (1 + pts.zv),
        (dz >= -tiny) & (dz <= 1 + tiny),
    ]
    return _suite("equilibrium bounds (discriminant, range, gap, slope)", np.concatenate(checks))


def derivative_fd(rates: RateConstants, pts: DomainSample, h: float = 1e-6, tol: float = 1e-4) -> SuiteResult:
    zv = np.maximum(pts.zv, h)
    fd = (tqssa.z_minus(pts.k, zv + h, rates) - tqssa.z_minus(pts.k, zv - h, rates)) / (2 * h)
    fd_k = (tqssa.z_minus(np.maximum(pts.k, h) + h, zv, rates) - tqssa.z_minus(np.maximum(pts.k, h) - h, zv, rates)) / (2 * h)
    a = np.abs(fd - tqssa.dz_minus_dzv(pts.k, zv, rates)) <= tol
    b = np.abs(fd_k - tqssa.dz_minus_dk(np.maximum(pts.k, h), zv, rates)) <= tol
    return _suite("root derivatives match central differences (h=1e-6, tol 1e-4)", np.concatenate([a, b]))


def single_stable_zero(rates: RateConstants, pts: DomainSample, fine: int = 2001) -> SuiteResult:
    """Sign of the fast drift on [0, z_V]: positive below z_minus, negative above."""
    ok = []
    s = np.linspace(0.0, 1.0, fine)
    for k, zv in zip(pts.k, pts.zv):
        if k <= 0 or zv <= 0:
            ok.append(True)
            continue
        zc = s * zv
        zm = tqssa.z_minus(k, zv, rates)
        f = tqssa.fast_drift(k, zv, zc, rates)
        far = np.abs(zc - zm) > 1e-9 * max(1.0, zv)
        ok.append(bool(np.all(np.sign(f[far]) == np.sign(zm - zc[far]))))
    return _suite("fast drift has one zero on [0, z_V], at the stable root", ok)


def poisson_residual_suite(rates: RateConstants, pts: DomainSample, tol: float = 1e-9) -> SuiteResult:
    k = np.maximum(pts.k, 1e-12)
    ctx = poisson.PoissonContext(k, rates)
    res = np.abs(poisson.poisson_residual(ctx, pts.zv, pts.zc))
    return _suite(f"Poisson residual below {tol:g}", res < tol, f"max {res.max():.3g}")


def poisson_bounds(rates: RateConstants, pts: DomainSample) -> SuiteResult:
    k1, km1 = rates.k1, rates.km1
    k = np.maximum(pts.k, 1e-12)
    ctx = poisson.PoissonContext(k, rates)
    f = poisson.F(ctx, pts.zv, pts.zc)
    tiny = 1 + 1e-12
    checks = [
        np.abs(f) <= np.log(2.0 + 2.0 * k1 * (pts.zv + k) / km1) / k1 * tiny,
        poisson.dF_dzc(ctx, pts.zv, pts.zc) <= 2.0 / km1 * tiny,
        poisson.d2F_dzc2(ctx, pts.zv, pts.zc) <= 4.0 * k1 / km1**2 * tiny,
        np.abs(poisson.dF_dzv(ctx, pts.zv, pts.zc)) <= 3.0 / km1 * (1 + pts.zv) * tiny,
    ]
    return _suite("Poisson solution growth and derivative bounds", np.concatenate(checks))


def poisson_fd(rates: RateConstants, pts: DomainSample, h: float = 1e-6, tol: float = 1e-4) -> SuiteResult:
    """Needs points with z_C at least h away from 0 and z_V."""
    ctx = poisson.PoissonContext(np.maximum(pts.k, 1e-12), rates)
    zv, zc = pts.zv, pts.zc
    d1 = (poisson.F(ctx, zv, zc + h) - poisson.F(ctx, zv, zc - h)) / (2 * h)
    d2 = (poisson.dF_dzc(ctx, zv, zc + h) - poisson.dF_dzc(ctx, zv, zc - h)) / (2 * h)
    dv = (poisson.F(ctx, zv + h, zc) - poisson.F(ctx, zv - h, zc)) / (2 * h)
    checks = [
        np.abs(d1 - poisson.dF_dzc(ctx, zv, zc)) <= tol,
        np.abs(d2 - poisson.d2F_dzc2(ctx, zv, zc)) <= tol,
        np.abs(dv - poisson.dF_dzv(ctx, zv, zc)) <= tol,
    ]
    return _suite("Poisson derivatives match central differences", np.concatenate(checks))


def poisson_centering(rates: RateConstants, pts: DomainSample) -> SuiteResult:
    k = np.maximum(pts.k, 1e-12)
    ctx = poisson.PoissonContext(k, rates)
    zm = tqssa.z_minus(k, pts.zv, rates)
    return _suite("Poisson centering F(z_V, z_minus) = 0", np.abs(poisson.F(ctx, pts.zv, zm)) < 1e-12)


def path_invariants(config: ExperimentConfig, replicas: int = 5) -> SuiteResult:
    """Exact conservation, admissible jumps, monotone product and support, per jump."""
    ok = []
    for r in range(replicas):
        tr = ssa.simulate(config, r)
        x = tr.counts
        k1, k2 = conserved_counts(config.x0)
        d = np.diff(x, axis=0)
        allowed = (d[:, None, :] == ssa.JUMPS[None, :, :]).all(axis=2).any(axis=1)
        z = tr.scaled
        zv = z[:, 0] + z[:, 2]
        ok += [
            bool(np.all(x[:, 0] + x[:, 2] + x[:, 3] == k1)),
            bool(np.all(x[:, 1] + x[:, 2] == k2)),
            bool(allowed.all()),
            bool(np.all(np.diff(x[:, 3]) >= 0)),
            bool(np.all(z[:, 2] <= zv) and np.all(zv <= config.k1_tot + 1e-12)),
            bool(np.all(np.diff(tr.times) > 0)),
        ]
    return _suite("per-jump conservation, jump set, monotone product, support", ok)


def _det_worker(config, r):
    return ssa.simulate(config, r).counts.tobytes()


def determinism(config: ExperimentConfig) -> SuiteResult:
    a = ssa.simulate(config, 0)
    b = ssa.simulate(config, 0)
    c = ssa.simulate(config, 1)
    serial = ssa.run_replicas(_det_worker, config, 3, threads=1)
    pooled = ssa.run_replicas(_det_worker, config, 3, threads=2)
    ok = [
        np.array_equal(a.times, b.times) and np.array_equal(a.counts, b.counts),
        not (a.times.size == c.times.size and np.array_equal(a.times, c.times)),
        serial == pooled,
    ]
    return _suite("seeded determinism and worker-count independence", ok)


def occupation_suite(config: ExperimentConfig, replicas: int = 3) -> SuiteResult:
    bins = occupation.Bins.uniform(config.k1_tot, config.t_end)
    ok = []
    for r in range(replicas):
        occ = occupation.simulate_occupation(config, r, bins)
        ok.append(abs(occ.total - config.t_end) <= 1e-10 * config.t_end)
        # cells lying entirely in {z_c > z_v}
        above = bins.zc_edges[:-1][:, None] >= bins.zv_edges[1:][None, :]
        ok.append(bool(np.all(occ.mass.sum(axis=2)[above] == 0)))
    return _suite("occupation mass equals horizon, support within z_c <= z_v", ok)


def rk4_order(config: ExperimentConfig) -> SuiteResult:
    grid = np.array([0.0, config.t_end])
    sols = [tqssa.solve_flln_ode(config.z0.zv, config.k2_tot, config.rates, grid, h=h).values[-1] for h in (0.2, 0.1, 0.05)]
    order = np.log2(abs(sols[0] - sols[1]) / abs(sols[1] - sols[2]))
    return _suite("RK4 observed order >= 3.5", [order >= 3.5], f"order {order:.2f}")


def run_all(config: ExperimentConfig, size: int = 10_000, seed: int = 0) -> list[SuiteResult]:
    rates = config.rates
    pts = domain_sample(size, seed)
    inner = domain_sample(min(size, 1000), seed + 1, margin=1e-5)
    small = config.with_(n=min(config.n, 200), t_end=min(config.t_end, 2.0))
    return [
        root_residuals(rates, pts),
        equilibrium_bounds(rates, pts),
        derivative_fd(rates, pts),
        single_stable_zero(rates, domain_sample(200, seed + 2)),
        poisson_residual_suite(rates, pts),
        poisson_bounds(rates, pts),
        poisson_fd(rates, inner),
        poisson_centering(rates, pts),
        path_invariants(small),
        determinism(small),
        occupation_suite(small),
        rk4_order(config),
    ]
