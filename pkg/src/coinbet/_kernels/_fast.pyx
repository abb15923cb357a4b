# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled backend for the truncated-Gaussian mixture kernels.

Same semantics as ``_ref`` (see its docstring for the windowed-rule math);
the loops are plain C.  Results agree with ``_ref`` to ~1e-12 but not
bitwise (different summation order).
"""

import numpy as np

from libc.math cimport exp, fabs, log, log1p, sqrt, HUGE_VAL

cdef double WINDOW_DROP = 45.0


cdef inline void _mix_query(double x, double lam, const double[::1] nodes,
                            const double[::1] weights,
                            double *logint, double *ratio) noexcept nogil:
    cdef double xa = fabs(x)
    cdef double m = xa / (2.0 * lam)
    cdef double mc = m if m < 0.5 else 0.5
    cdef double s = sqrt((mc - m) * (mc - m) + WINDOW_DROP / lam)
    cdef double a = m - s
    cdef double b = m + s
    cdef double mid, half, t, h, hm, e, den, num
    cdef Py_ssize_t j, n = nodes.shape[0]
    if a < -0.5:
        a = -0.5
    if b > 0.5:
        b = 0.5
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    hm = -HUGE_VAL
    for j in range(n):
        t = mid + half * nodes[j]
        h = t * (xa - lam * t)
        if h > hm:
            hm = h
    den = 0.0
    num = 0.0
    for j in range(n):
        t = mid + half * nodes[j]
        h = t * (xa - lam * t)
        e = exp(h - hm) * weights[j]
        den += e
        num += t * e
    logint[0] = hm + log(half * den)
    if x == 0.0:
        ratio[0] = 0.0
    elif x > 0.0:
        ratio[0] = num / den
    else:
        ratio[0] = -(num / den)


def mix_batch(xs, vs, double inv2sig, nodes, weights):
    """Vector of mixture queries; λ_i = v_i + inv2sig."""
    cdef const double[::1] x = np.ascontiguousarray(xs, dtype=np.float64)
    cdef const double[::1] v = np.ascontiguousarray(vs, dtype=np.float64)
    cdef const double[::1] nd = np.ascontiguousarray(nodes, dtype=np.float64)
    cdef const double[::1] wt = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t i, n = x.shape[0]
    logint_arr = np.empty(n)
    ratio_arr = np.empty(n)
    cdef double[::1] li = logint_arr
    cdef double[::1] ra = ratio_arr
    for i in range(n):
        _mix_query(x[i], v[i] + inv2sig, nd, wt, &li[i], &ra[i])
    return logint_arr, ratio_arr


def bettor_run(coins, double inv2sig, bint use_round_count, nodes, weights):
    """Full bettor loop; see ``_ref.bettor_run``."""
    cdef const double[::1] c_arr = np.ascontiguousarray(coins, dtype=np.float64)
    cdef const double[::1] nd = np.ascontiguousarray(nodes, dtype=np.float64)
    cdef const double[::1] wt = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t t, T = c_arr.shape[0]
    beta_arr = np.empty(T)
    logw_arr = np.empty(T)
    logint_arr = np.empty(T)
    cdef double[::1] beta = beta_arr
    cdef double[::1] logw = logw_arr
    cdef double[::1] logint = logint_arr
    cdef double sum_c = 0.0, sum_csq = 0.0, lw = 0.0
    cdef double v, b, c, li, dummy
    for t in range(T):
        v = <double>t if use_round_count else sum_csq
        _mix_query(sum_c, v + inv2sig, nd, wt, &dummy, &b)
        c = c_arr[t]
        lw += log1p(b * c)
        sum_c += c
        sum_csq += c * c
        v = <double>(t + 1) if use_round_count else sum_csq
        _mix_query(sum_c, v + inv2sig, nd, wt, &li, &dummy)
        beta[t] = b
        logw[t] = lw
        logint[t] = li
    return beta_arr, logw_arr, logint_arr


def experts_run(losses, pi, double inv2sig, bint use_round_count, nodes, weights):
    """Full experts-reduction loop; see ``_ref.experts_run``."""
    cdef const double[:, ::1] g = np.ascontiguousarray(losses, dtype=np.float64)
    cdef const double[::1] pi_v = np.ascontiguousarray(pi, dtype=np.float64)
    cdef const double[::1] nd = np.ascontiguousarray(nodes, dtype=np.float64)
    cdef const double[::1] wt = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t t, i, T = g.shape[0], d = g.shape[1]
    xs_arr = np.empty((T, d))
    hs_arr = np.empty(T)
    coins_arr = np.empty((T, d))
    logw_arr = np.empty((T, d))
    cdef double[:, ::1] xs = xs_arr
    cdef double[::1] hs = hs_arr
    cdef double[:, ::1] coins = coins_arr
    cdef double[:, ::1] logw = logw_arr
    logpi_arr = np.log(np.asarray(pi_v))
    cdef double[::1] logpi = logpi_arr
    scratch = np.zeros((4, d))
    cdef double[::1] sum_c = scratch[0]
    cdef double[::1] sum_csq = scratch[1]
    cdef double[::1] logw_cur = scratch[2]
    cdef double[::1] betas = scratch[3]
    xbuf_arr = np.empty(d)
    lwbuf_arr = np.empty(d)
    cdef double[::1] xbuf = xbuf_arr
    cdef double[::1] lwbuf = lwbuf_arr
    cdef double v, li, b, mx, ssum, h, c
    cdef Py_ssize_t npos
    for t in range(T):
        npos = 0
        mx = -HUGE_VAL
        for i in range(d):
            v = <double>t if use_round_count else sum_csq[i]
            _mix_query(sum_c[i], v + inv2sig, nd, wt, &li, &b)
            betas[i] = b
            if b > 0.0:
                lwbuf[i] = logpi[i] + log(b) + logw_cur[i]
                npos += 1
                if lwbuf[i] > mx:
                    mx = lwbuf[i]
        if npos > 0:
            ssum = 0.0
            for i in range(d):
                if betas[i] > 0.0:
                    xbuf[i] = exp(lwbuf[i] - mx)
                    ssum += xbuf[i]
                else:
                    xbuf[i] = 0.0
            for i in range(d):
                xbuf[i] /= ssum
        else:
            for i in range(d):
                xbuf[i] = pi_v[i]
        h = 0.0
        for i in range(d):
            h += g[t, i] * xbuf[i]
        for i in range(d):
            c = h - g[t, i]
            if betas[i] <= 0.0 and c < 0.0:
                c = 0.0
            logw_cur[i] += log1p(betas[i] * c)
            sum_c[i] += c
            sum_csq[i] += c * c
            xs[t, i] = xbuf[i]
            coins[t, i] = c
            logw[t, i] = logw_cur[i]
        hs[t] = h
    return xs_arr, hs_arr, coins_arr, logw_arr
