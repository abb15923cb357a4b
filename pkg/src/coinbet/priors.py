"""Symmetric priors over betting fractions.

Two families:

- ``conjugate_power``: density ∝ (1+β)^z (1-β)^z on [-1, 1].  The normalizer
  is the Beta-integral closed form 2^{2z+1} Γ(z+1)² / Γ(2z+2); z = 0 is the
  uniform prior, larger z concentrates mass near 0.
- ``truncated_gaussian``: density ∝ exp(-β²/(2σ²)) on [-1/2, 1/2].

Both densities are even, which is what makes every fresh bettor start at
fraction 0 and every potential an even function of the coin sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import numerics

__all__ = [
    "PriorSpec",
    "conjugate_power",
    "truncated_gaussian",
    "log_density",
    "conj_power_log_normalizer",
    "trunc_gauss_log_normalizer",
]

CONJ_POWER = "conjugate_power"
TRUNC_GAUSSIAN = "truncated_gaussian"

_SUPPORTS = {CONJ_POWER: (-1.0, 1.0), TRUNC_GAUSSIAN: (-0.5, 0.5)}


@dataclass(frozen=True)
class PriorSpec:
    """Immutable description of a prior over fractions.

    Exactly one of ``z`` (conjugate_power) / ``sigma_sq`` (truncated_gaussian)
    is set; ``support`` is fixed per family.
    """

    kind: str
    z: float | None = None
    sigma_sq: float | None = None
    support: tuple[float, float] = field(init=False)

    def __post_init__(self) -> None:
        if self.kind not in _SUPPORTS:
            raise ValueError(f"unknown prior kind {self.kind!r}")
        if self.kind == CONJ_POWER:
            if self.z is None or self.sigma_sq is not None:
                raise ValueError("conjugate_power takes z only")
            if not self.z >= 0:
                raise ValueError(f"z must be >= 0, got {self.z}")
        else:
            if self.sigma_sq is None or self.z is not None:
                raise ValueError("truncated_gaussian takes sigma_sq only")
            if not self.sigma_sq > 0:
                raise ValueError(f"sigma_sq must be > 0, got {self.sigma_sq}")
        object.__setattr__(self, "support", _SUPPORTS[self.kind])

    def log_normalizer(self) -> float:
        """log ∫_support of the unnormalized density."""
        if self.kind == CONJ_POWER:
            return conj_power_log_normalizer(self.z)
        return trunc_gauss_log_normalizer(self.sigma_sq)


def conjugate_power(z: float) -> PriorSpec:
    return PriorSpec(kind=CONJ_POWER, z=z)


def truncated_gaussian(sigma_sq: float) -> PriorSpec:
    return PriorSpec(kind=TRUNC_GAUSSIAN, sigma_sq=sigma_sq)


def conj_power_log_normalizer(z: float) -> float:
    """log ∫_{-1}^{1} (1+β)^z (1-β)^z dβ = (2z+1) ln 2 + 2 lnΓ(z+1) − lnΓ(2z+2)."""
    if not z >= 0:
        raise ValueError(f"z must be >= 0, got {z}")
    return (
        (2.0 * z + 1.0) * math.log(2.0)
        + 2.0 * numerics.log_gamma(z + 1.0)
        - numerics.log_gamma(2.0 * z + 2.0)
    )


def trunc_gauss_log_normalizer(sigma_sq: float) -> float:
    """log ∫_{-1/2}^{1/2} e^{-β²/(2σ²)} dβ = ln(σ√(2π)·erf(1/(2√2 σ)))."""
    if not sigma_sq > 0:
        raise ValueError(f"sigma_sq must be > 0, got {sigma_sq}")
    sigma = math.sqrt(sigma_sq)
    return 0.5 * math.log(2.0 * math.pi * sigma_sq) + math.log(
        numerics.erf(1.0 / (2.0 * math.sqrt(2.0) * sigma))
    )


def _log_density_unnorm(prior: PriorSpec, beta: float) -> float:
    if prior.kind == CONJ_POWER:
        if prior.z == 0.0:
            return 0.0  # avoid 0 * (-inf) at the endpoints
        if abs(beta) == 1.0:
            return -math.inf  # log1p(-1) would raise instead
        return prior.z * (math.log1p(beta) + math.log1p(-beta))
    return -beta * beta / (2.0 * prior.sigma_sq)


def log_density(prior: PriorSpec, beta: float) -> float:
    """Natural log of the normalized density at ``beta``.

    −inf at the support endpoints for conjugate_power with z > 0 (the
    quadrature rules only ever sample interior points).
    """
    lo, hi = prior.support
    if not lo <= beta <= hi:
        raise ValueError(f"beta={beta} outside support [{lo}, {hi}]")
    return _log_density_unnorm(prior, beta) - prior.log_normalizer()
