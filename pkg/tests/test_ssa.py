import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from mmtqssa import ssa
from mmtqssa.core import (
    CopyState,
    ExperimentConfig,
    RateConstants,
    ScaledState,
    TQSSA,
    Trajectory,
    conserved_counts,
    fig1_config,
)
from mmtqssa.stats import ks_to_cdf


def small_config(**kw):
    base = dict(n=100, t_end=2.0, replicas=4, grid_points=21)
    base.update(kw)
    return ExperimentConfig(**base)


def test_propensities_fig1_start():
    a = ssa.propensities(CopyState(900, 100, 0, 0), RateConstants(1, 1, 0.75), TQSSA, 1000)
    assert (a.a1, a.am1, a.a2) == (90000.0, 0.0, 0.0)


def test_propensities_absorbing():
    a = ssa.propensities(CopyState(0, 5, 0, 7), RateConstants(1, 1, 1), TQSSA, 10)
    assert (a.a1, a.am1, a.a2) == (0.0, 0.0, 0.0)


def test_propensities_unit():
    a = ssa.propensities(CopyState(1, 1, 1, 0), RateConstants(1, 1, 1), TQSSA, 1)
    assert (a.a1, a.am1, a.a2) == (1.0, 1.0, 1.0)


def test_propensities_unbinding_scales_with_n():
    a = ssa.propensities(CopyState(0, 0, 3, 0), RateConstants(1, 2, 0.5), TQSSA, 50)
    assert a.am1 == 2 * 50 * 3 and a.a2 == 1.5


def test_propensity_overflow_guard():
    with pytest.raises(OverflowError):
        ssa.propensity_coefficients(RateConstants(1, 1e300, 1), TQSSA, 10**10)


def test_absorbed_start_gives_single_segment():
    cfg = small_config(z0=ScaledState(0.0, 0.1, 0.0, 0.5))
    tr = ssa.simulate(cfg, 0)
    assert len(tr) == 1 and tr.times[0] == 0.0
    assert np.array_equal(ssa.sample_on_grid(tr, cfg.time_grid()), np.tile(tr.scaled[0], (cfg.grid_points, 1)))


@given(st.integers(0, 50), st.floats(0.1, 3.0), st.integers(20, 300))
@settings(max_examples=25, deadline=None)
def test_conservation_and_jump_set(replica, t_end, n):
    cfg = small_config(n=n, t_end=t_end)
    tr = ssa.simulate(cfg, replica)
    k1, k2 = conserved_counts(cfg.x0)
    x = tr.counts
    assert np.all(x[:, 0] + x[:, 2] + x[:, 3] == k1)
    assert np.all(x[:, 1] + x[:, 2] == k2)
    d = np.diff(x, axis=0)
    assert (d[:, None, :] == ssa.JUMPS[None]).all(axis=2).any(axis=1).all()
    assert np.all(np.diff(x[:, 3]) >= 0)
    zv = tr.zv
    assert np.all(np.diff(zv) <= 0)
    assert np.all(tr.zc <= zv) and np.all(zv <= cfg.k1_tot)
    assert np.all(np.diff(tr.times) > 0) and tr.times[-1] <= t_end


def test_determinism_and_replica_distinctness():
    cfg = small_config()
    a, b, c = ssa.simulate(cfg, 3), ssa.simulate(cfg, 3), ssa.simulate(cfg, 4)
    assert np.array_equal(a.times, b.times) and np.array_equal(a.counts, b.counts)
    assert not np.array_equal(a.times[:10], c.times[:10])


def test_recording_mode_does_not_change_the_path():
    cfg = small_config(n=300)
    full = ssa.simulate(cfg, 2)
    slow = ssa.simulate_zv(cfg, 2)
    grid = cfg.time_grid()
    assert np.array_equal(slow.zv_at(grid), full.zv_at(grid))
    assert np.array_equal(slow.grid_states, ssa.sample_on_grid(full, grid))
    assert slow.jumps == len(full) - 1
    # product events only
    changes = np.flatnonzero(np.diff(full.counts[:, 3]))
    assert np.array_equal(slow.times[1:], full.times[changes + 1])


def test_small_buffer_resumes_identically():
    cfg = small_config(n=200)
    coeffs = ssa.propensity_coefficients(cfg.rates, cfg.regime, cfg.n)
    seed = ssa.derive_seed(cfg.master_seed, 0)
    a = ssa.run_kernel(cfg.x0, coeffs, cfg.t_end, seed, chunk=7)
    b = ssa.run_kernel(cfg.x0, coeffs, cfg.t_end, seed, chunk=1 << 16)
    assert np.array_equal(a.rec_times, b.rec_times) and np.array_equal(a.rec_counts, b.rec_counts)


def test_jump_cap_raises():
    with pytest.raises(ssa.JumpCapExceeded):
        ssa.simulate(small_config(max_jumps=10), 0)


def test_sample_on_grid_cadlag():
    times = np.array([0.0, 1.0, 2.0])
    counts = np.array([[5, 1, 0, 0], [4, 0, 1, 0], [4, 1, 0, 1]])
    tr = Trajectory(times, counts, 1, 0, 3.0)
    z = ssa.sample_on_grid(tr, [0.0, 0.5, 1.0, 1.999, 2.0, 3.0])
    assert np.array_equal(z[:, 3], [0, 0, 0, 0, 1, 1])
    assert np.array_equal(z[2], counts[1])
    with pytest.raises(ValueError):
        ssa.sample_on_grid(tr, [3.5])


def test_sample_on_grid_at_jump_times_round_trips():
    tr = ssa.simulate(small_config(), 1)
    assert np.array_equal(ssa.sample_on_grid(tr, tr.times), tr.scaled)


def test_qv_closed_forms():
    counts = np.array([[10, 0, 3, 0]])
    tr = Trajectory(np.array([0.0]), counts, 10, 0, 4.0)
    assert ssa.qv_martingale_mv(tr, RateConstants(1, 1, 0.5)) == pytest.approx(0.5 * 0.3 * 4.0 / 10)
    tr0 = Trajectory(np.array([0.0]), np.array([[10, 1, 0, 0]]), 10, 0, 4.0)
    assert ssa.qv_martingale_mv(tr0, RateConstants(1, 1, 0.5)) == 0.0


def test_qv_fig1_bound():
    cfg = fig1_config()
    tr = ssa.simulate(cfg, 0)
    qv = ssa.qv_martingale_mv(tr, cfg.rates)
    assert 0 < qv < 1e-3
    assert qv <= cfg.k1_tot * cfg.t_end * cfg.rates.k2 / cfg.n


def test_mean_first_product_time():
    # one substrate, one enzyme; km1 -> 0 recovers Exp(k1) + Exp(k2)
    for km1 in (1e-9, 1.0):
        rates = RateConstants(1.0, km1, 0.75)
        cfg = ExperimentConfig(rates=rates, n=1, z0=ScaledState(1, 1, 0, 0), t_end=200.0)
        hits = []
        for r in range(10_000):
            tr = ssa.simulate(cfg, r)
            hits.append(tr.times[np.argmax(tr.counts[:, 3] == 1)])
        hits = np.array(hits)
        target = oracles.mean_first_product_time(1.0, km1, 0.75)
        assert abs(hits.mean() - target) < 3 * hits.std(ddof=1) / np.sqrt(hits.size)
    assert oracles.mean_first_product_time(1.0, 0.0, 0.75) == pytest.approx(1 + 1 / 0.75)


@pytest.mark.parametrize("x0", [(1, 1, 0, 0), (2, 1, 0, 0)])
def test_single_enzyme_law_matches_ctmc(x0):
    rates = RateConstants(1.0, 1.0, 0.75)
    cfg = ExperimentConfig(rates=rates, n=1, z0=ScaledState(*map(float, x0)), t_end=1.0)
    states, p = oracles.ctmc_distribution(x0, 1.0, 1.0, 0.75, 1.0)
    zc = np.array([ssa.simulate(cfg, r).counts[-1, 2] for r in range(20_000)])
    pc = {}
    for s, q in zip(states, p):
        pc[s[2]] = pc.get(s[2], 0.0) + q
    cdf = lambda v: sum(q for c, q in pc.items() if c <= v)
    assert ks_to_cdf(zc, cdf) < 0.02


def test_run_replicas_independent_of_workers():
    cfg = small_config()
    f = _zv_end
    assert ssa.run_replicas(f, cfg, 4, threads=1) == ssa.run_replicas(f, cfg, 4, threads=2)


def _zv_end(cfg, r):
    return float(ssa.simulate_zv(cfg, r).zv[-1])


def test_trajectory_rows():
    cfg = small_config()
    tr = ssa.simulate(cfg, 0)
    rows = list(ssa.trajectory_rows(tr, cfg.time_grid()))
    assert len(rows) == cfg.grid_points and len(rows[0]) == 6
    assert rows[0][5] == pytest.approx(rows[0][1] + rows[0][3])
    assert len(list(ssa.trajectory_rows(tr, full=True))) == len(tr)
    with pytest.raises(TypeError):
        list(ssa.trajectory_rows(ssa.simulate_zv(cfg, 0), full=True))
