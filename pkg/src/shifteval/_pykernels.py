"""Pure numpy implementation of the damped-trend kernels.

Every routine performs the same floating point operations, in the same
order, as its counterpart in ``_kernels.pyx`` so the two backends agree
bit for bit.
"""
from __future__ import annotations

import numpy as np


def holt_filter(y, alpha, beta, phi, l0, b0):
    y = np.ascontiguousarray(y, dtype=np.float64)
    n = y.shape[0]
    levels = np.empty(n)
    trends = np.empty(n)
    fitted = np.empty(n)
    a = float(alpha)
    bt = float(beta)
    p = float(phi)
    lev = float(l0)
    tr = float(b0)
    for t in range(n):
        f = lev + p * tr
        new_lev = a * float(y[t]) + (1.0 - a) * f
        tr = bt * (new_lev - lev) + (1.0 - bt) * p * tr
        lev = new_lev
        fitted[t] = f
        levels[t] = lev
        trends[t] = tr
    return levels, trends, fitted


def holt_sse(y, alpha, beta, phi, l0, b0):
    a = float(alpha)
    bt = float(beta)
    p = float(phi)
    lev = float(l0)
    tr = float(b0)
    sse = 0.0
    for obs in np.asarray(y, dtype=np.float64).tolist():
        f = lev + p * tr
        e = obs - f
        sse += e * e
        new_lev = a * obs + (1.0 - a) * f
        tr = bt * (new_lev - lev) + (1.0 - bt) * p * tr
        lev = new_lev
    return sse


def holt_grid_sse(y, alphas, betas, phis, l0, b0):
    """SSE for every (alpha, beta, phi) on the grid; shape (len(alphas), len(betas), len(phis))."""
    a, bt, p = np.meshgrid(
        np.asarray(alphas, dtype=np.float64),
        np.asarray(betas, dtype=np.float64),
        np.asarray(phis, dtype=np.float64),
        indexing="ij",
    )
    one_a = 1.0 - a
    one_b = 1.0 - bt
    lev = np.full(a.shape, float(l0))
    tr = np.full(a.shape, float(b0))
    sse = np.zeros(a.shape)
    for obs in np.asarray(y, dtype=np.float64).tolist():
        f = lev + p * tr
        e = obs - f
        sse += e * e
        new_lev = a * obs + one_a * f
        tr = bt * (new_lev - lev) + one_b * p * tr
        lev = new_lev
    return sse


def simulate_paths(level, trend, alpha, beta, phi, shocks):
    """Iterate the recursion forward, adding ``shocks[path, step]`` to each one-step forecast."""
    shocks = np.ascontiguousarray(shocks, dtype=np.float64)
    n_paths, horizon = shocks.shape
    a = float(alpha)
    bt = float(beta)
    p = float(phi)
    lev = np.full(n_paths, float(level))
    tr = np.full(n_paths, float(trend))
    out = np.empty((n_paths, horizon))
    for h in range(horizon):
        f = lev + p * tr
        obs = f + shocks[:, h]
        new_lev = a * obs + (1.0 - a) * f
        tr = bt * (new_lev - lev) + (1.0 - bt) * p * tr
        lev = new_lev
        out[:, h] = obs
    return out
