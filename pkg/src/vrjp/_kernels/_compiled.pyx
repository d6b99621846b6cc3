# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twin of the pure-numpy kernel backend.

Same contracts as ``vrjp._kernels.pure``: pre-drawn random arrays in, path /
field arrays out, identical draw-consumption order.  Scalar loops here replace
the vectorized sample axis there; the arithmetic per element is the same.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport log1p, sqrt

cnp.import_array()

BACKEND = "compiled"


cdef inline double ig_draw(double phi, double lam, double z, double u) noexcept nogil:
    cdef double nu = z * z
    cdef double t2 = 2.0 * lam * phi
    cdef double root = sqrt(nu * (nu + 2.0 * t2))
    cdef double x = 2.0 * lam / (nu + t2 + root)
    if u * (1.0 + phi * x) <= 1.0:
        return x
    return 1.0 / (phi * phi * x)


cdef inline Py_ssize_t pick(const double* cum, Py_ssize_t n, double u) noexcept nogil:
    cdef double target = u * cum[n - 1]
    cdef Py_ssize_t j = 0
    while j < n - 1 and cum[j] <= target:
        j += 1
    return j


def ig_transform(phi, lam, z, u):
    phi_b, lam_b, z_b, u_b = np.broadcast_arrays(
        np.asarray(phi, dtype=np.float64), np.asarray(lam, dtype=np.float64),
        np.asarray(z, dtype=np.float64), np.asarray(u, dtype=np.float64))
    shape = z_b.shape
    cdef double[::1] pf = np.ascontiguousarray(phi_b, dtype=np.float64).ravel()
    cdef double[::1] lf = np.ascontiguousarray(lam_b, dtype=np.float64).ravel()
    cdef double[::1] zf = np.ascontiguousarray(z_b, dtype=np.float64).ravel()
    cdef double[::1] uf = np.ascontiguousarray(u_b, dtype=np.float64).ravel()
    out = np.empty(zf.shape[0], dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t k
    with nogil:
        for k in range(zf.shape[0]):
            o[k] = ig_draw(pf[k], lf[k], zf[k], uf[k])
    return out.reshape(shape)


def beta_eliminate(w, order, z, u):
    cdef double[:, ::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef long long[::1] ordv = np.ascontiguousarray(order, dtype=np.int64)
    cdef double[:, ::1] zv = np.ascontiguousarray(z, dtype=np.float64)
    cdef double[:, ::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t n = wv.shape[0]
    cdef Py_ssize_t n_samples = zv.shape[0]
    beta = np.empty((n_samples, n), dtype=np.float64)
    cdef double[:, ::1] bv = beta
    scratch = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] wt = scratch
    alive_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] alive = alive_arr
    cdef Py_ssize_t s_i, k, i, j, m
    cdef double s, g, gw
    with nogil:
        for s_i in range(n_samples):
            for i in range(n):
                alive[i] = 1
                for j in range(n):
                    wt[i, j] = wv[i, j]
            for k in range(n):
                i = ordv[k]
                alive[i] = 0
                s = 0.0
                for j in range(n):
                    if alive[j]:
                        s += wt[i, j]
                g = ig_draw(s, 1.0, zv[s_i, k], uv[s_i, k])
                bv[s_i, i] = 0.5 * (1.0 / g + wt[i, i])
                for j in range(n):
                    if alive[j]:
                        gw = g * wt[j, i]
                        for m in range(n):
                            if alive[m]:
                                wt[j, m] += gw * wt[i, m]
    return beta


def beta_eliminate_many(w3, order, z, u):
    cdef double[:, :, ::1] wv = np.ascontiguousarray(w3, dtype=np.float64)
    cdef long long[::1] ordv = np.ascontiguousarray(order, dtype=np.int64)
    cdef double[:, ::1] zv = np.ascontiguousarray(z, dtype=np.float64)
    cdef double[:, ::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t n = wv.shape[1]
    cdef Py_ssize_t n_samples = zv.shape[0]
    beta = np.empty((n_samples, n), dtype=np.float64)
    cdef double[:, ::1] bv = beta
    scratch = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] wt = scratch
    alive_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] alive = alive_arr
    cdef Py_ssize_t s_i, k, i, j, m
    cdef double s, g, gw
    with nogil:
        for s_i in range(n_samples):
            for i in range(n):
                alive[i] = 1
                for j in range(n):
                    wt[i, j] = wv[s_i, i, j]
            for k in range(n):
                i = ordv[k]
                alive[i] = 0
                s = 0.0
                for j in range(n):
                    if alive[j]:
                        s += wt[i, j]
                g = ig_draw(s, 1.0, zv[s_i, k], uv[s_i, k])
                bv[s_i, i] = 0.5 * (1.0 / g + wt[i, i])
                for j in range(n):
                    if alive[j]:
                        gw = g * wt[j, i]
                        for m in range(n):
                            if alive[m]:
                                wt[j, m] += gw * wt[i, m]
    return beta


def chain_paths(ccum, start, u):
    cdef double[:, ::1] cv = np.ascontiguousarray(ccum, dtype=np.float64)
    cdef double[:, ::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t n = cv.shape[0]
    cdef Py_ssize_t n_samples = uv.shape[0]
    cdef Py_ssize_t n_steps = uv.shape[1]
    x = np.empty((n_samples, n_steps + 1), dtype=np.int32)
    cdef int[:, ::1] xv = x
    cdef Py_ssize_t s_i, t, cur
    cdef int start_i = start
    with nogil:
        for s_i in range(n_samples):
            cur = start_i
            xv[s_i, 0] = <int>cur
            for t in range(n_steps):
                cur = pick(&cv[cur, 0], n, uv[s_i, t])
                xv[s_i, t + 1] = <int>cur
    return x


def chain_paths_many(ccum3, start, u):
    cdef double[:, :, ::1] cv = np.ascontiguousarray(ccum3, dtype=np.float64)
    cdef double[:, ::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t n = cv.shape[1]
    cdef Py_ssize_t n_samples = uv.shape[0]
    cdef Py_ssize_t n_steps = uv.shape[1]
    x = np.empty((n_samples, n_steps + 1), dtype=np.int32)
    cdef int[:, ::1] xv = x
    cdef Py_ssize_t s_i, t, cur
    cdef int start_i = start
    with nogil:
        for s_i in range(n_samples):
            cur = start_i
            xv[s_i, 0] = <int>cur
            for t in range(n_steps):
                cur = pick(&cv[s_i, cur, 0], n, uv[s_i, t])
                xv[s_i, t + 1] = <int>cur
    return x


cdef void _vrjp_one(const double* w, Py_ssize_t n,
                    Py_ssize_t start, const double* uw, const double* uc,
                    Py_ssize_t n_steps, int* x_row, double* t_row,
                    double* loc, double* cum) noexcept nogil:
    cdef Py_ssize_t t, j, cur
    cdef double acc, total, wait
    for j in range(n):
        loc[j] = 1.0
    cur = start
    x_row[0] = <int>cur
    for t in range(n_steps):
        acc = 0.0
        for j in range(n):
            acc += w[cur * n + j] * loc[j]
            cum[j] = acc
        total = cum[n - 1]
        wait = -log1p(-uw[t]) / total
        loc[cur] += wait
        t_row[t] = wait
        cur = pick(cum, n, uc[t])
        x_row[t + 1] = <int>cur


def vrjp_paths(w, start, u_wait, u_choice):
    cdef double[:, ::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef double[:, ::1] uwv = np.ascontiguousarray(u_wait, dtype=np.float64)
    cdef double[:, ::1] ucv = np.ascontiguousarray(u_choice, dtype=np.float64)
    cdef Py_ssize_t n = wv.shape[0]
    cdef Py_ssize_t n_samples = uwv.shape[0]
    cdef Py_ssize_t n_steps = uwv.shape[1]
    x = np.empty((n_samples, n_steps + 1), dtype=np.int32)
    t_out = np.empty((n_samples, n_steps), dtype=np.float64)
    cdef int[:, ::1] xv = x
    cdef double[:, ::1] tv = t_out
    buf = np.empty(2 * n, dtype=np.float64)
    cdef double[::1] bv = buf
    cdef Py_ssize_t s_i
    cdef Py_ssize_t start_i = start
    with nogil:
        for s_i in range(n_samples):
            _vrjp_one(&wv[0, 0], n, start_i, &uwv[s_i, 0], &ucv[s_i, 0],
                      n_steps, &xv[s_i, 0], &tv[s_i, 0], &bv[0], &bv[n])
    return x, t_out


def vrjp_paths_many(w3, start, u_wait, u_choice):
    cdef double[:, :, ::1] wv = np.ascontiguousarray(w3, dtype=np.float64)
    cdef double[:, ::1] uwv = np.ascontiguousarray(u_wait, dtype=np.float64)
    cdef double[:, ::1] ucv = np.ascontiguousarray(u_choice, dtype=np.float64)
    cdef Py_ssize_t n = wv.shape[1]
    cdef Py_ssize_t n_samples = uwv.shape[0]
    cdef Py_ssize_t n_steps = uwv.shape[1]
    x = np.empty((n_samples, n_steps + 1), dtype=np.int32)
    t_out = np.empty((n_samples, n_steps), dtype=np.float64)
    cdef int[:, ::1] xv = x
    cdef double[:, ::1] tv = t_out
    buf = np.empty(2 * n, dtype=np.float64)
    cdef double[::1] bv = buf
    cdef Py_ssize_t s_i
    cdef Py_ssize_t start_i = start
    with nogil:
        for s_i in range(n_samples):
            _vrjp_one(&wv[s_i, 0, 0], n, start_i, &uwv[s_i, 0],
                      &ucv[s_i, 0], n_steps, &xv[s_i, 0], &tv[s_i, 0],
                      &bv[0], &bv[n])
    return x, t_out


def errw_paths(w0, start, u):
    cdef double[:, ::1] wv = np.ascontiguousarray(w0, dtype=np.float64)
    cdef double[:, ::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t n = wv.shape[0]
    cdef Py_ssize_t n_samples = uv.shape[0]
    cdef Py_ssize_t n_steps = uv.shape[1]
    x = np.empty((n_samples, n_steps + 1), dtype=np.int32)
    cdef int[:, ::1] xv = x
    scratch = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] wt = scratch
    cum_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] cum = cum_arr
    cdef Py_ssize_t s_i, t, j, cur, nxt
    cdef double acc
    cdef Py_ssize_t start_i = start
    with nogil:
        for s_i in range(n_samples):
            for j in range(n):
                for t in range(n):
                    wt[j, t] = wv[j, t]
            cur = start_i
            xv[s_i, 0] = <int>cur
            for t in range(n_steps):
                acc = 0.0
                for j in range(n):
                    acc += wt[cur, j]
                    cum[j] = acc
                nxt = pick(&cum[0], n, uv[s_i, t])
                wt[cur, nxt] += 1.0
                wt[nxt, cur] += 1.0
                xv[s_i, t + 1] = <int>nxt
                cur = nxt
    return x
