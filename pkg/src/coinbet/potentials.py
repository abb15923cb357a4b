"""Wealth potentials, the wealth floor, and regret-bound formulas.

A betting potential maps the coin sum x = Σc_t (and an exponent scale v,
either Σc_t² or the round count t) to a log-domain lower bound on achievable
wealth.  Three concrete objects live here:

- the Gamma-ratio closed form for conjugate-power priors on binary coins,
- the mixture integral ∫ exp(βx − β²v) F(β) dβ for an arbitrary prior F,
- the erf closed form of that integral for a truncated-Gaussian prior,
  with the σ² = 1/(2T) default specialization and its floor
  −ln 2 + s²/(8T).

The regret-bound formulas at the bottom are envelope values only; nothing
here asserts them (that is harness/test policy).
"""

from __future__ import annotations

import math

from scipy.special import erfcx

from . import numerics, priors

__all__ = [
    "conj_power_log_wealth",
    "squint_log_potential",
    "trunc_gauss_log_potential_closed",
    "default_potential_log",
    "wealth_floor_log",
    "regret_bound_gaussian",
    "regret_bound_shifted_kt",
    "squint_bound_reference",
]

_LN2 = math.log(2.0)


def conj_power_log_wealth(z: float, a: float, b: float) -> float:
    """Log wealth of the conjugate-power mixture after a heads and b tails.

    T ln 2 + lnΓ(a+z+1) + lnΓ(b+z+1) + lnΓ(2z+2) − lnΓ(T+2z+2) − 2 lnΓ(z+1)
    with T = a + b.  Equals log ∫ (1+β)^a (1−β)^b F(β) dβ for the normalized
    (1±β)^z prior.  a and b may be real (a, b = (t ± Σc)/2 extends the form
    to continuous coins; integer counts are the binary special case).
    """
    if not (a >= 0 and b >= 0):
        raise ValueError(f"need a, b >= 0, got a={a}, b={b}")
    if not z >= 0:
        raise ValueError(f"need z >= 0, got {z}")
    t = a + b
    return (
        t * _LN2
        + numerics.log_gamma(a + z + 1.0)
        + numerics.log_gamma(b + z + 1.0)
        + numerics.log_gamma(2.0 * z + 2.0)
        - numerics.log_gamma(t + 2.0 * z + 2.0)
        - 2.0 * numerics.log_gamma(z + 1.0)
    )


def squint_log_potential(
    x: float,
    v: float,
    prior: priors.PriorSpec,
    tol: float = numerics.DEFAULT_TOL,
) -> float:
    """log ∫_support exp(βx − β²v) F(β) dβ for a normalized prior F.

    Integration runs over the prior's own support.  The wealth guarantee
    behind this potential needs support ⊆ [−1/2, 1/2]; wider (conjugate
    -power) priors are still accepted, where the same integral is the
    binary-coin mixture wealth.

    Even priors make the value even in x, so it is evaluated at |x|
    (bit-exact evenness).
    """
    if not v >= 0:
        raise ValueError(f"need v >= 0, got {v}")
    xa = abs(x)
    lo, hi = prior.support
    res = numerics.integrate_log(
        lambda beta: beta * xa - beta * beta * v + priors.log_density(prior, beta),
        lo,
        hi,
        tol,
    )
    return res.log_value


def _log_erf_sum(a1: float, a2: float) -> float:
    """log(erf(a1) + erf(a2)) for a1 + a2 > 0, stable when a1 < 0.

    For a1 < 0 the sum is erf(a2) − erf(−a1), a cancellation-prone
    difference; rewrite via the scaled complement erfcx (erf(y) =
    1 − e^{−y²} erfcx(y)) so only positive well-scaled terms are combined:

        erf(w) − erf(u) = e^{−u²} (erfcx(u) − e^{u²−w²} erfcx(w)),  u < w.
    """
    if a1 >= 0.0:
        return math.log(math.erf(a1) + math.erf(a2))
    u, w = -a1, a2
    return -u * u + math.log(float(erfcx(u)) - math.exp(u * u - w * w) * float(erfcx(w)))


def trunc_gauss_log_potential_closed(x: float, T: float, sigma_sq: float) -> float:
    """Closed form of the truncated-Gaussian mixture potential.

    With λ = T + 1/(2σ²):

        x²/(4λ) − ln(2√2 σ √λ erf(1/(2√2 σ)))
                + ln[erf(√λ/2 − x/(2√λ)) + erf(√λ/2 + x/(2√λ))]

    Evaluated at |x| (the function is even).  Whenever |x| < λ both erf
    arguments are positive; beyond that ``_log_erf_sum`` keeps relative
    accuracy.
    """
    if not T >= 0:
        raise ValueError(f"need T >= 0, got {T}")
    if not sigma_sq > 0:
        raise ValueError(f"need sigma_sq > 0, got {sigma_sq}")
    lam = T + 0.5 / sigma_sq
    xa = abs(x)
    rt = math.sqrt(lam)
    sigma = math.sqrt(sigma_sq)
    log_norm = math.log(
        2.0 * math.sqrt(2.0) * sigma * rt * math.erf(1.0 / (2.0 * math.sqrt(2.0) * sigma))
    )
    return (
        xa * xa / (4.0 * lam)
        - log_norm
        + _log_erf_sum(0.5 * rt - xa / (2.0 * rt), 0.5 * rt + xa / (2.0 * rt))
    )


def default_potential_log(x: float, T: int) -> float:
    """Truncated-Gaussian potential at the default σ² = 1/(2T) (λ = 2T)."""
    if not T >= 1:
        raise ValueError(f"need T >= 1, got {T}")
    if abs(x) > T:
        raise ValueError(f"|x| <= T required, got x={x}, T={T}")
    return trunc_gauss_log_potential_closed(x, float(T), 0.5 / T)


def wealth_floor_log(s: float, T: int) -> float:
    """Floor −ln 2 + s²/(8T): the potential never drops below this."""
    if not T >= 1:
        raise ValueError(f"need T >= 1, got {T}")
    if abs(s) > T:
        raise ValueError(f"|s| <= T required, got s={s}, T={T}")
    return -_LN2 + s * s / (8.0 * T)


def _check_bound_args(T: int, kl: float) -> None:
    if not T >= 1:
        raise ValueError(f"need T >= 1, got {T}")
    if not kl >= 0:
        raise ValueError(f"need kl >= 0, got {kl}")


def regret_bound_gaussian(T: int, kl: float) -> float:
    """√(8T(kl + ln 2)) — the envelope the default potential yields."""
    _check_bound_args(T, kl)
    return math.sqrt(8.0 * T * (kl + _LN2))


def regret_bound_shifted_kt(T: int, kl: float) -> float:
    """√(3T(kl + 3)) — data-independent comparison envelope (diagnostic)."""
    _check_bound_args(T, kl)
    return math.sqrt(3.0 * T * (kl + 3.0))


def squint_bound_reference(T: int, kl: float, v_u: float) -> float:
    """Data-dependent comparison envelope (diagnostic):

    √(2 v_u)·[1 + √(2(kl + ln(1/2 + ln(T+1))))] + 1 + 5(kl + ln(1 + 2 ln(T+1))).
    """
    _check_bound_args(T, kl)
    if not v_u >= 0:
        raise ValueError(f"need v_u >= 0, got {v_u}")
    log_t1 = math.log(T + 1.0)
    return (
        math.sqrt(2.0 * v_u) * (1.0 + math.sqrt(2.0 * (kl + math.log(0.5 + log_t1))))
        + 1.0
        + 5.0 * (kl + math.log(1.0 + 2.0 * log_t1))
    )
