# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled damped-trend kernels.

Operation order mirrors ``_pykernels`` exactly; the build disables FMA
contraction so results are bitwise identical to the fallback.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def holt_filter(y, double alpha, double beta, double phi, double l0, double b0):
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = yv.shape[0]
    levels_arr = np.empty(n)
    trends_arr = np.empty(n)
    fitted_arr = np.empty(n)
    cdef double[::1] levels = levels_arr
    cdef double[::1] trends = trends_arr
    cdef double[::1] fitted = fitted_arr
    cdef double lev = l0, tr = b0, f, new_lev
    cdef Py_ssize_t t
    with nogil:
        for t in range(n):
            f = lev + phi * tr
            new_lev = alpha * yv[t] + (1.0 - alpha) * f
            tr = beta * (new_lev - lev) + (1.0 - beta) * phi * tr
            lev = new_lev
            fitted[t] = f
            levels[t] = lev
            trends[t] = tr
    return levels_arr, trends_arr, fitted_arr


cdef inline double _sse(const double[::1] yv, double alpha, double beta, double phi,
                        double l0, double b0) noexcept nogil:
    cdef double lev = l0, tr = b0, f, e, new_lev, sse = 0.0
    cdef double one_a = 1.0 - alpha
    cdef double one_b = 1.0 - beta
    cdef Py_ssize_t t
    for t in range(yv.shape[0]):
        f = lev + phi * tr
        e = yv[t] - f
        sse += e * e
        new_lev = alpha * yv[t] + one_a * f
        tr = beta * (new_lev - lev) + one_b * phi * tr
        lev = new_lev
    return sse


def holt_sse(y, double alpha, double beta, double phi, double l0, double b0):
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    return _sse(yv, alpha, beta, phi, l0, b0)


def holt_grid_sse(y, alphas, betas, phis, double l0, double b0):
    a3, b3, p3 = np.meshgrid(
        np.asarray(alphas, dtype=np.float64),
        np.asarray(betas, dtype=np.float64),
        np.asarray(phis, dtype=np.float64),
        indexing="ij",
    )
    shape = a3.shape
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef const double[::1] av = np.ascontiguousarray(a3).ravel()
    cdef const double[::1] bv = np.ascontiguousarray(b3).ravel()
    cdef const double[::1] pv = np.ascontiguousarray(p3).ravel()
    cdef Py_ssize_t m = av.shape[0]
    cdef double[::1] one_a = np.empty(m)
    cdef double[::1] one_b = np.empty(m)
    cdef double[::1] lev = np.full(m, l0)
    cdef double[::1] tr = np.full(m, b0)
    sse_arr = np.zeros(m)
    cdef double[::1] sse = sse_arr
    cdef double obs, f, e, new_lev
    cdef Py_ssize_t c, t
    with nogil:
        for c in range(m):
            one_a[c] = 1.0 - av[c]
            one_b[c] = 1.0 - bv[c]
        # time outer, grid points inner: the lanes are independent and vectorise
        for t in range(yv.shape[0]):
            obs = yv[t]
            for c in range(m):
                f = lev[c] + pv[c] * tr[c]
                e = obs - f
                sse[c] = sse[c] + e * e
                new_lev = av[c] * obs + one_a[c] * f
                tr[c] = bv[c] * (new_lev - lev[c]) + one_b[c] * pv[c] * tr[c]
                lev[c] = new_lev
    return sse_arr.reshape(shape)


cdef enum:
    BLOCK = 16


def simulate_paths(double level, double trend, double alpha, double beta, double phi, shocks):
    cdef const double[:, ::1] sv = np.ascontiguousarray(shocks, dtype=np.float64)
    cdef Py_ssize_t n_paths = sv.shape[0], horizon = sv.shape[1]
    out_arr = np.empty((n_paths, horizon))
    cdef double[:, ::1] out = out_arr
    cdef double lev[BLOCK]
    cdef double tr[BLOCK]
    cdef double one_a = 1.0 - alpha, one_b = 1.0 - beta
    cdef double f, obs, new_lev
    cdef Py_ssize_t i0, j, h, width
    with nogil:
        # interleave a block of independent paths to hide the recursion's latency
        for i0 in range(0, n_paths, BLOCK):
            width = min(BLOCK, n_paths - i0)
            for j in range(width):
                lev[j] = level
                tr[j] = trend
            for h in range(horizon):
                for j in range(width):
                    f = lev[j] + phi * tr[j]
                    obs = f + sv[i0 + j, h]
                    new_lev = alpha * obs + one_a * f
                    tr[j] = beta * (new_lev - lev[j]) + one_b * phi * tr[j]
                    lev[j] = new_lev
                    out[i0 + j, h] = obs
    return out_arr
