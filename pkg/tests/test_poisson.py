import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from mmtqssa import poisson, tqssa
from mmtqssa.core import RateConstants

FIG1 = RateConstants(1.0, 1.0, 0.75)
CTX = poisson.PoissonContext(0.1, FIG1)


def test_context_validation():
    with pytest.raises(ValueError):
        poisson.PoissonContext(0.0, FIG1)


def test_centering():
    zv = np.linspace(0.0, 10.0, 1001)
    zm = tqssa.z_minus(0.1, zv, FIG1)
    assert np.max(np.abs(poisson.F(CTX, zv, zm))) < 1e-12


def test_value_at_zero_complex_is_negative():
    lo, hi = oracles.quadratic_roots(1.0, 1.0, 0.1, 1.0)
    expected = -np.log(hi / (hi - lo))
    assert poisson.F(CTX, 1.0, 0.0) == pytest.approx(expected, rel=1e-10)
    assert poisson.F(CTX, 1.0, 0.0) < 0


def test_two_forms_agree():
    a = poisson.F(CTX, 1.0, 0.03)
    b = poisson.F_expanded(CTX, 1.0, 0.03)
    assert a == pytest.approx(b, rel=1e-12)
    lo, hi = oracles.quadratic_roots(1.0, 1.0, 0.1, 1.0)
    assert a == pytest.approx(-np.log((hi - 0.03) / (hi - lo)), rel=1e-10)


def test_domain_guard():
    with pytest.raises(ValueError):
        poisson.F(CTX, 0.5, 0.6)
    with pytest.raises(ValueError):
        poisson.dF_dzv(CTX, 0.5, -0.1)
    poisson.F(CTX, 0.5, 0.5 + 1e-13)  # inside the rounding slack


domain = st.tuples(st.floats(1e-3, 10), st.floats(1e-3, 10), st.floats(0, 1)).map(lambda t: (t[0], t[1], t[1] * t[2]))


@given(domain, st.floats(0.1, 10), st.floats(0.1, 10))
def test_residual_identity(pt, k1, km1):
    k, zv, zc = pt
    ctx = poisson.PoissonContext(k, RateConstants(k1, km1, 1.0))
    assert abs(poisson.poisson_residual(ctx, zv, zc)) < 1e-9


def test_residual_grid_fig1():
    rng = np.random.default_rng(11)
    zv = rng.uniform(0, 10, 10_000)
    zc = rng.uniform(0, 1, 10_000) * zv
    assert np.max(np.abs(poisson.poisson_residual(CTX, zv, zc))) < 1e-9
    assert poisson.poisson_residual(CTX, 1.0, tqssa.z_minus(0.1, 1.0, FIG1)) == pytest.approx(0.0, abs=1e-15)


@given(domain, st.floats(0.1, 10), st.floats(0.1, 10))
def test_bounds(pt, k1, km1):
    k, zv, zc = pt
    rates = RateConstants(k1, km1, 1.0)
    ctx = poisson.PoissonContext(k, rates)
    tol = 1 + 1e-12
    assert 0 < poisson.dF_dzc(ctx, zv, zc) <= 2 / km1 * tol
    assert 0 < poisson.d2F_dzc2(ctx, zv, zc) <= 4 * k1 / km1**2 * tol
    assert abs(poisson.F(ctx, zv, zc)) <= np.log(2 + 2 * k1 * (zv + k) / km1) / k1 * tol
    assert abs(poisson.dF_dzv(ctx, zv, zc)) <= 3 / km1 * tol


def test_second_derivative_identity():
    zv, zc = 2.0, 0.7
    assert poisson.d2F_dzc2(CTX, zv, zc) == pytest.approx(FIG1.k1 * poisson.dF_dzc(CTX, zv, zc) ** 2, rel=1e-14)


def test_derivatives_match_finite_differences():
    rng = np.random.default_rng(5)
    h = 1e-6
    zv = rng.uniform(1e-2, 10, 1000)
    zc = h + rng.uniform(0, 1, 1000) * (zv - 2 * h)
    for k in (0.1, 3.0):
        ctx = poisson.PoissonContext(k, FIG1)
        d1 = (poisson.F(ctx, zv, zc + h) - poisson.F(ctx, zv, zc - h)) / (2 * h)
        d2 = (poisson.dF_dzc(ctx, zv, zc + h) - poisson.dF_dzc(ctx, zv, zc - h)) / (2 * h)
        dv = (poisson.F(ctx, zv + h, zc) - poisson.F(ctx, zv - h, zc)) / (2 * h)
        assert np.max(np.abs(d1 - poisson.dF_dzc(ctx, zv, zc))) < 1e-4
        assert np.max(np.abs(d2 - poisson.d2F_dzc2(ctx, zv, zc))) < 1e-4
        assert np.max(np.abs(dv - poisson.dF_dzv(ctx, zv, zc))) < 1e-4


def test_growth_bound_in_zv():
    zv = np.linspace(0, 10, 2001)
    zc = 0.5 * zv
    assert np.all(np.abs(poisson.dF_dzv(CTX, zv, zc)) <= 3.0 * (1 + zv))


def test_residual_rows():
    rows = list(poisson.residual_rows(CTX, [1.0, 2.0], [0.1, 0.2]))
    assert len(rows) == 2 and rows[0][:2] == (1.0, 0.1) and abs(rows[0][2]) < 1e-12
