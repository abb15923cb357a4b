"""Special functions and stable log-domain quadrature.

Everything downstream (priors, potentials, bettors) funnels its integrals
through this module.  All mixture integrals are carried in log domain from
end to end: wealth grows like exp(T/8), which overflows a double near
T ≈ 5600, so nothing here ever materializes exp(h) without first removing
the grid maximum of h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import roots_legendre

__all__ = [
    "QuadratureRule",
    "LogIntegralResult",
    "QuadratureConvergenceError",
    "erf",
    "log_gamma",
    "gauss_legendre",
    "integrate_log",
    "signed_moment_ratio",
]

#: First refinement level for adaptive integration.
MIN_NODES = 32
#: Node-count cap; exceeding it raises QuadratureConvergenceError.
MAX_NODES = 4096
#: Default relative tolerance, two orders under the loosest downstream need.
DEFAULT_TOL = 1e-10


class QuadratureConvergenceError(RuntimeError):
    """Raised when doubling refinement hits the node cap without settling."""


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre rule on the reference interval [-1, 1].

    nodes are strictly increasing and exactly antisymmetric about 0;
    weights are positive and sum to 2 (the reference interval length).
    """

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def scaled(self, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
        """Affinely map the rule onto [lo, hi]; returns (points, weights)."""
        half = 0.5 * (hi - lo)
        return lo + half * (self.nodes + 1.0), half * self.weights


@dataclass(frozen=True)
class LogIntegralResult:
    """log of a positive integral plus the last refinement's relative change."""

    log_value: float
    est_rel_error: float


@lru_cache(maxsize=32)
def gauss_legendre(order: int) -> QuadratureRule:
    """Cached Gauss-Legendre rule of the given order."""
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    nodes, weights = roots_legendre(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes=nodes, weights=weights, order=order)


def erf(x: float) -> float:
    """Gauss error function erf(x) = (2/sqrt(pi)) ∫_0^x e^{-t^2} dt."""
    if not math.isfinite(x):
        raise ValueError(f"erf requires finite x, got {x}")
    return math.erf(x)


def log_gamma(x: float) -> float:
    """Natural log of Gamma(x) for x > 0."""
    if not x > 0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def _eval_exponent(exponent: Callable[[float], float], points: np.ndarray) -> np.ndarray:
    vals = np.array([float(exponent(float(p))) for p in points])
    if np.isnan(vals).any() or np.isposinf(vals).any():
        raise ValueError("exponent evaluated to NaN or +inf at an interior node")
    return vals


def _log_integral_at(
    exponent: Callable[[float], float], lo: float, hi: float, order: int
) -> float:
    """Single-level log ∫ exp(h) over [lo, hi] with grid-max factoring."""
    points, weights = gauss_legendre(order).scaled(lo, hi)
    h = _eval_exponent(exponent, points)
    m = float(h.max())  # grid maximum, factored out before exponentiation
    return m + math.log(float(np.dot(weights, np.exp(h - m))))


def integrate_log(
    exponent: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = DEFAULT_TOL,
) -> LogIntegralResult:
    """log ∫_lo^hi exp(exponent(β)) dβ by doubling Gauss-Legendre refinement.

    The node count doubles from 32 until the relative change of the integral
    between consecutive levels drops below ``tol`` (cap 4096, then
    QuadratureConvergenceError).  The returned est_rel_error is the relative
    change between the final two levels.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    if not tol > 0:
        raise ValueError(f"need tol > 0, got {tol}")
    prev = _log_integral_at(exponent, lo, hi, MIN_NODES)
    order = 2 * MIN_NODES
    while order <= MAX_NODES:
        cur = _log_integral_at(exponent, lo, hi, order)
        rel = abs(math.expm1(prev - cur))
        if rel < tol:
            return LogIntegralResult(log_value=cur, est_rel_error=rel)
        prev = cur
        order *= 2
    raise QuadratureConvergenceError(
        f"no convergence to tol={tol} at {MAX_NODES} nodes on [{lo}, {hi}]"
    )


def _half_moment_logs(
    exponent: Callable[[float], float], upper: float, order: int, flip: bool
) -> tuple[float, float]:
    """(log ∫_0^upper β e^{h(±β)} dβ, log ∫_0^upper e^{h(±β)} dβ)."""
    points, weights = gauss_legendre(order).scaled(0.0, upper)
    h = _eval_exponent(exponent, -points if flip else points)
    m = float(h.max())
    e = np.exp(h - m)
    num = float(np.dot(weights * points, e))
    den = float(np.dot(weights, e))
    return m + math.log(num), m + math.log(den)


def _signed_ratio_at(
    exponent: Callable[[float], float], lo: float, hi: float, order: int
) -> float:
    """Moment ratio at a fixed refinement level, numerator split at β = 0.

    Both halves are integrated over (0, |endpoint|) with the *same* node set,
    so an even exponent on a symmetric interval cancels bit-exactly to 0.
    """
    if lo >= 0.0 or hi <= 0.0:
        # Single-signed support: no cancellation possible.
        points, weights = gauss_legendre(order).scaled(lo, hi)
        h = _eval_exponent(exponent, points)
        m = float(h.max())
        e = np.exp(h - m)
        return float(np.dot(weights * points, e)) / float(np.dot(weights, e))
    pos_num, pos_den = _half_moment_logs(exponent, hi, order, flip=False)
    neg_num, neg_den = _half_moment_logs(exponent, -lo, order, flip=True)
    # Denominator: log-sum-exp of the two halves.
    top = max(pos_den, neg_den)
    log_den = top + math.log(math.exp(pos_den - top) + math.exp(neg_den - top))
    if pos_num == neg_num:
        return 0.0
    sign = 1.0 if pos_num > neg_num else -1.0
    big, small = max(pos_num, neg_num), min(pos_num, neg_num)
    log_num = big + math.log1p(-math.exp(small - big))
    return sign * math.exp(log_num - log_den)


def signed_moment_ratio(
    exponent: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = DEFAULT_TOL,
) -> float:
    """∫ β exp(h(β)) dβ / ∫ exp(h(β)) dβ over [lo, hi].

    The numerator changes sign at β = 0, so it is split there into two
    positive log-domain integrals whose signs are combined at the end.  The
    result always lies in [lo, hi].
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    if not tol > 0:
        raise ValueError(f"need tol > 0, got {tol}")
    prev = _signed_ratio_at(exponent, lo, hi, MIN_NODES)
    order = 2 * MIN_NODES
    while order <= MAX_NODES:
        cur = _signed_ratio_at(exponent, lo, hi, order)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return min(max(cur, lo), hi)
        prev = cur
        order *= 2
    raise QuadratureConvergenceError(
        f"moment ratio did not settle to tol={tol} at {MAX_NODES} nodes"
    )
