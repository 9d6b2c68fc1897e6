"""Independent reference computations used by the tests.

None of these call into the package's numerical code: roots come from
numpy's companion-matrix solver, the limit path from scipy's adaptive
integrator, and the exact law from a dense matrix exponential.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.linalg import expm

JUMPS = [(-1, -1, 1, 0), (1, 1, -1, 0), (0, 1, -1, 1)]


def quadratic_roots(k1, km1, k, zv):
    """Both roots of k1 z^2 - ((zv + K) k1 + km1) z + k1 zv K = 0, ascending."""
    r = np.roots([k1, -((zv + k) * k1 + km1), k1 * zv * k])
    return np.sort(r.real)


def stable_root(k1, km1, k, zv):
    return quadratic_roots(k1, km1, k, zv)[0]


def limit_path(k1, km1, k2, k, zv0, t_end):
    """Dense-output solution of dZ/dt = -k2 z_minus(K, Z)."""

    def rhs(_, y):
        return [-k2 * stable_root(k1, km1, k, max(y[0], 0.0))]

    sol = solve_ivp(rhs, (0.0, t_end), [zv0], method="DOP853", rtol=1e-12, atol=1e-14, dense_output=True)
    return lambda t: sol.sol(t)[0]


def linear_sde_variance(k1, km1, k2, k, zv0, t):
    """Var U(t) for dU = -k2 z_minus'(Z_V) U dt + sqrt(k2 z_minus(Z_V)) dW, U(0)=0."""
    zv = limit_path(k1, km1, k2, k, zv0, t)

    def slope(s):
        z = zv(s)
        h = 1e-6 * max(1.0, z)
        return -k2 * (stable_root(k1, km1, k, z + h) - stable_root(k1, km1, k, z - h)) / (2 * h)

    def integrand(s):
        decay, _ = quad(slope, s, t, epsabs=1e-12)
        return np.exp(2 * decay) * k2 * stable_root(k1, km1, k, zv(s))

    return quad(integrand, 0.0, t, epsabs=1e-12)[0]


def linear_ode_solution(k1, km1, k2, k, zv0, t, u0):
    """u(t) for du/dt = -k2 z_minus'(Z_V) u."""
    zv = limit_path(k1, km1, k2, k, zv0, t)

    def slope(s):
        z = zv(s)
        h = 1e-6 * max(1.0, z)
        return -k2 * (stable_root(k1, km1, k, z + h) - stable_root(k1, km1, k, z - h)) / (2 * h)

    return u0 * np.exp(quad(slope, 0.0, t, epsabs=1e-13)[0])


def ctmc_states(x0):
    """All copy states reachable from x0, in BFS order."""
    states, seen, i = [tuple(x0)], {tuple(x0)}, 0
    while i < len(states):
        s = states[i]
        for d in JUMPS:
            y = tuple(a + b for a, b in zip(s, d))
            if min(y) >= 0 and y not in seen:
                seen.add(y)
                states.append(y)
        i += 1
    return states


def ctmc_distribution(x0, k1, km1, k2, t, n=1):
    """Exact law at time t of the mass-action chain (tQSSA scaling, n enzymes)."""
    states = ctmc_states(x0)
    idx = {s: i for i, s in enumerate(states)}
    q = np.zeros((len(states), len(states)))
    for s in states:
        xs, xe, xc, _ = s
        for d, a in zip(JUMPS, (k1 * xs * xe, n * km1 * xc, k2 * xc)):
            if a > 0:
                q[idx[s], idx[tuple(u + v for u, v in zip(s, d))]] += a
    np.fill_diagonal(q, -q.sum(axis=1))
    p0 = np.zeros(len(states))
    p0[0] = 1.0
    return states, p0 @ expm(q * t)


def mean_first_product_time(k1, km1, k2):
    """One substrate, one enzyme: (k1 + km1 + k2) / (k1 k2), which tends to
    1/k1 + 1/k2 as km1 -> 0."""
    return (k1 + km1 + k2) / (k1 * k2)


def rk4_linear(a, b, u0, t_end, h):
    """Fixed-step RK4 for the non-autonomous linear ODE u' = a(t) u + b(t)."""
    steps = int(round(t_end / h))
    ts, us = [0.0], [u0]
    t, u = 0.0, u0
    f = lambda s, v: a(s) * v + b(s)
    for _ in range(steps):
        k1 = f(t, u)
        k2 = f(t + h / 2, u + h / 2 * k1)
        k3 = f(t + h / 2, u + h / 2 * k2)
        k4 = f(t + h, u + h * k3)
        u += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
        ts.append(t)
        us.append(u)
    return np.array(ts), np.array(us)
