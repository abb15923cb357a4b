"""Numpy reference backend for the truncated-Gaussian mixture kernels.

The core query evaluates, for a truncated-Gaussian-type exponent
h(β) = βx − λβ² on [-1/2, 1/2],

    log ∫ exp(h(β)) dβ   and   ∫ β exp(h) / ∫ exp(h),

with a fixed Gauss-Legendre rule on the exact level-set window
{β : h(β) ≥ max_support h − Δ}, Δ = 45.  Because h is an exact quadratic,
the window is available in closed form, the discarded tails carry relative
mass ≤ e^{-45} ≈ 3e-20 (below double rounding), and 64 nodes integrate the
windowed Gaussian segment to machine precision.

Everything is computed from |x|; the log-integral is therefore bit-exactly
even in x and the ratio bit-exactly odd (with an exact 0 at x = 0).
"""

from __future__ import annotations

import math

import numpy as np

#: Log-drop defining the integration window; e^{-45} is below 1 ulp.
WINDOW_DROP = 45.0


def _mix_query(
    x: float, lam: float, nodes: np.ndarray, weights: np.ndarray
) -> tuple[float, float]:
    """(log ∫_{-1/2}^{1/2} e^{βx-λβ²} dβ, moment ratio) for λ > 0."""
    xa = abs(x)
    m = xa / (2.0 * lam)
    mc = m if m < 0.5 else 0.5  # in-support argmax of the quadratic
    s = math.sqrt((mc - m) ** 2 + WINDOW_DROP / lam)
    a = max(-0.5, m - s)
    b = min(0.5, m + s)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    t = mid + half * nodes
    h = t * (xa - lam * t)
    hm = float(h.max())
    e = np.exp(h - hm)
    den = float(np.dot(weights, e))
    logint = hm + math.log(half * den)
    if x == 0.0:
        return logint, 0.0
    ratio = float(np.dot(weights * t, e)) / den
    return logint, ratio if x > 0.0 else -ratio


def mix_batch(xs, vs, inv2sig, nodes, weights):
    """Vector of mixture queries; λ_i = v_i + inv2sig."""
    x = np.ascontiguousarray(xs, dtype=np.float64)
    v = np.ascontiguousarray(vs, dtype=np.float64)
    n = x.shape[0]
    logint = np.empty(n)
    ratio = np.empty(n)
    for i in range(n):
        logint[i], ratio[i] = _mix_query(x[i], v[i] + inv2sig, nodes, weights)
    return logint, ratio


def bettor_run(coins, inv2sig, use_round_count, nodes, weights):
    """Full bettor loop: per-round fraction, log-wealth, and raw log-integral.

    The returned log-integral is the *unnormalized* mixture integral at the
    post-round state (Σc, V); callers subtract the prior normalizer.
    """
    c_arr = np.ascontiguousarray(coins, dtype=np.float64)
    T = c_arr.shape[0]
    beta = np.empty(T)
    logw = np.empty(T)
    logint = np.empty(T)
    sum_c = 0.0
    sum_csq = 0.0
    lw = 0.0
    for t in range(T):
        v = float(t) if use_round_count else sum_csq
        _, b = _mix_query(sum_c, v + inv2sig, nodes, weights)
        c = c_arr[t]
        lw += math.log1p(b * c)
        sum_c += c
        sum_csq += c * c
        v_post = float(t + 1) if use_round_count else sum_csq
        li, _ = _mix_query(sum_c, v_post + inv2sig, nodes, weights)
        beta[t] = b
        logw[t] = lw
        logint[t] = li
    return beta, logw, logint


def experts_run(losses, pi, inv2sig, use_round_count, nodes, weights):
    """Full experts-reduction loop with one mixture bettor per expert.

    Returns (iterates (T,d), alg losses (T,), coins (T,d), log-wealths (T,d)).
    """
    g_arr = np.ascontiguousarray(losses, dtype=np.float64)
    pi_arr = np.ascontiguousarray(pi, dtype=np.float64)
    T, d = g_arr.shape
    logpi = np.log(pi_arr)
    sum_c = np.zeros(d)
    sum_csq = np.zeros(d)
    logw_cur = np.zeros(d)
    xs = np.empty((T, d))
    hs = np.empty(T)
    coins = np.empty((T, d))
    logw = np.empty((T, d))
    betas = np.empty(d)
    for t in range(T):
        for i in range(d):
            v = float(t) if use_round_count else sum_csq[i]
            _, betas[i] = _mix_query(sum_c[i], v + inv2sig, nodes, weights)
        pos = betas > 0.0
        if pos.any():
            lw = logpi[pos] + np.log(betas[pos]) + logw_cur[pos]
            w = np.exp(lw - lw.max())
            x = np.zeros(d)
            x[pos] = w / w.sum()
        else:
            x = pi_arr.copy()
        g = g_arr[t]
        h = float(np.dot(g, x))
        c = h - g
        c[~pos] = np.maximum(c[~pos], 0.0)
        logw_cur += np.log1p(betas * c)
        sum_c += c
        sum_csq += c * c
        xs[t] = x
        hs[t] = h
        coins[t] = c
        logw[t] = logw_cur
    return xs, hs, coins, logw
