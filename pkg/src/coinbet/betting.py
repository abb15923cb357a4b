"""Online bettor state machines and the doubling-trick wrapper.

Two families:

- ``conjugate_power``: closed-form fraction β_{t+1} = Σc / (t + 2z + 2), the
  posterior mean of the (1±β)^z prior after binary evidence.  On binary coins
  its realized wealth *equals* the Gamma-ratio potential; on continuous coins
  the relation is an empirical inequality.
- ``mixture_quadrature``: bets the exact posterior-mean fraction
  ∫β·exp(βΣc − β²V) F / ∫exp(βΣc − β²V) F over the prior's support, with
  V = Σc² ("variance" mode) or V = t ("round_count" mode).

Wealth is tracked in log domain throughout.  Truncated-Gaussian mixture
bettors run on the compiled kernel backend; other priors go through the
adaptive quadrature in :mod:`coinbet.numerics`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _kernels, numerics, potentials, priors

__all__ = [
    "CONJUGATE_POWER",
    "MIXTURE_QUADRATURE",
    "VARIANCE",
    "ROUND_COUNT",
    "BettorConfig",
    "BettorState",
    "Trajectory",
    "EpochRecord",
    "conj_power_config",
    "default_mixture_config",
    "next_fraction",
    "observe",
    "run",
    "doubling_wrap",
]

CONJUGATE_POWER = "conjugate_power"
MIXTURE_QUADRATURE = "mixture_quadrature"
VARIANCE = "variance"
ROUND_COUNT = "round_count"

#: Fixed rule order for the windowed truncated-Gaussian kernel; 64 nodes
#: integrate the exact-window Gaussian segment to machine precision.
KERNEL_ORDER = 64


@dataclass(frozen=True)
class BettorState:
    """Immutable bettor state: rounds seen, log-wealth, running coin sums."""

    t: int = 0
    log_wealth: float = 0.0
    sum_c: float = 0.0
    sum_csq: float = 0.0


@dataclass(frozen=True)
class BettorConfig:
    """Bettor family plus its parameters.

    ``z`` only for conjugate_power; ``prior`` and ``exponent_mode`` only for
    mixture_quadrature.
    """

    family: str
    prior: priors.PriorSpec | None = None
    z: float | None = None
    exponent_mode: str | None = None

    def __post_init__(self) -> None:
        if self.family == CONJUGATE_POWER:
            if self.z is None or not self.z >= 0:
                raise ValueError(f"conjugate_power needs z >= 0, got {self.z}")
            if self.prior is not None or self.exponent_mode is not None:
                raise ValueError("conjugate_power takes no prior/exponent_mode")
        elif self.family == MIXTURE_QUADRATURE:
            if self.prior is None:
                raise ValueError("mixture_quadrature needs a prior")
            if self.exponent_mode not in (VARIANCE, ROUND_COUNT):
                raise ValueError(
                    f"exponent_mode must be {VARIANCE!r} or {ROUND_COUNT!r}, "
                    f"got {self.exponent_mode!r}"
                )
            if self.z is not None:
                raise ValueError("mixture_quadrature takes no z (set it on the prior)")
        else:
            raise ValueError(f"unknown family {self.family!r}")


def conj_power_config(z: float) -> BettorConfig:
    return BettorConfig(family=CONJUGATE_POWER, z=z)


def default_mixture_config(T: int, exponent_mode: str = ROUND_COUNT) -> BettorConfig:
    """Mixture bettor over the truncated Gaussian with σ² = 1/(2T)."""
    if not T >= 1:
        raise ValueError(f"need T >= 1, got {T}")
    return BettorConfig(
        family=MIXTURE_QUADRATURE,
        prior=priors.truncated_gaussian(0.5 / T),
        exponent_mode=exponent_mode,
    )


@dataclass(frozen=True)
class EpochRecord:
    """One doubling epoch: nominal length 2^k, what was played, and the floor."""

    k: int
    start: int
    nominal_length: int
    length: int
    sum_c: float
    final_log_wealth: float
    floor_log: float


@dataclass(frozen=True)
class Trajectory:
    """Per-round (β_t, c_t, log-wealth) plus the matching potential value.

    ``log_potential[t]`` is the configured potential at the post-round state:
    the Gamma form at (a, b) = ((t±Σc)/2) for conjugate_power, the mixture
    integral at (Σc, V) for mixture_quadrature.  ``dominance_margin`` is
    log-wealth minus potential.
    """

    beta: np.ndarray
    coin: np.ndarray
    log_wealth: np.ndarray
    log_potential: np.ndarray
    final_state: BettorState
    epochs: tuple[EpochRecord, ...] = ()

    def __len__(self) -> int:
        return self.beta.shape[0]

    @property
    def dominance_margin(self) -> np.ndarray:
        return self.log_wealth - self.log_potential


def _exponent_scale(config: BettorConfig, state: BettorState) -> float:
    return state.sum_csq if config.exponent_mode == VARIANCE else float(state.t)


def _kernel_rule() -> tuple[np.ndarray, np.ndarray]:
    rule = numerics.gauss_legendre(KERNEL_ORDER)
    return rule.nodes, rule.weights


def _inv2sig(prior: priors.PriorSpec) -> float:
    return 0.5 / prior.sigma_sq


def next_fraction(config: BettorConfig, state: BettorState) -> float:
    """The fraction the bettor stakes next round.

    conjugate_power: Σc/(t + 2z + 2), clamped into (−1, 1).
    mixture_quadrature: the posterior-mean moment ratio over the prior's
    support (truncated-Gaussian priors evaluate on the windowed kernel,
    others by adaptive quadrature), clamped into the support.
    """
    if config.family == CONJUGATE_POWER:
        beta = state.sum_c / (state.t + 2.0 * config.z + 2.0)
        return min(max(beta, -1.0 + 1e-12), 1.0 - 1e-12)
    prior = config.prior
    v = _exponent_scale(config, state)
    lo, hi = prior.support
    if prior.kind == priors.TRUNC_GAUSSIAN:
        nodes, weights = _kernel_rule()
        _, ratio = _kernels.mix_batch(
            np.array([state.sum_c]), np.array([v]), _inv2sig(prior), nodes, weights
        )
        beta = float(ratio[0])
    else:
        x = state.sum_c
        z = prior.z
        beta = numerics.signed_moment_ratio(
            lambda b: b * x - b * b * v + priors._log_density_unnorm(prior, b),
            lo,
            hi,
        )
    return min(max(beta, lo), hi)


def observe(config: BettorConfig, state: BettorState, c: float) -> BettorState:
    """Advance one round on coin c ∈ [−1, 1]; wealth multiplies by (1 + βc)."""
    if not (math.isfinite(c) and abs(c) <= 1.0):
        raise ValueError(f"coin must lie in [-1, 1], got {c}")
    beta = next_fraction(config, state)
    if 1.0 + beta * c <= 0.0:
        # Unreachable for in-support fractions with |c| <= 1; a trip here
        # means a clamping bug upstream.
        raise RuntimeError(f"wealth would go non-positive: beta={beta}, c={c}")
    return BettorState(
        t=state.t + 1,
        log_wealth=state.log_wealth + math.log1p(beta * c),
        sum_c=state.sum_c + c,
        sum_csq=state.sum_csq + c * c,
    )


def _conj_potential(z: float, t: int, sum_c: float) -> float:
    a = max(0.5 * (t + sum_c), 0.0)
    b = max(0.5 * (t - sum_c), 0.0)
    return potentials.conj_power_log_wealth(z, a, b)


def _run_fold(config: BettorConfig, coins: np.ndarray) -> Trajectory:
    """Generic observe-fold used by every family except the kernel fast path."""
    T = coins.shape[0]
    beta = np.empty(T)
    logw = np.empty(T)
    logpot = np.empty(T)
    state = BettorState()
    for t in range(T):
        b = next_fraction(config, state)
        state = observe(config, state, float(coins[t]))
        beta[t] = b
        logw[t] = state.log_wealth
        if config.family == CONJUGATE_POWER:
            logpot[t] = _conj_potential(config.z, state.t, state.sum_c)
        else:
            logpot[t] = potentials.squint_log_potential(
                state.sum_c, _exponent_scale(config, state), config.prior
            )
    return Trajectory(
        beta=beta, coin=coins, log_wealth=logw, log_potential=logpot, final_state=state
    )


def run(config: BettorConfig, coins: Sequence[float]) -> Trajectory:
    """Fold :func:`observe` over a coin sequence, recording the trajectory."""
    c_arr = np.ascontiguousarray(coins, dtype=np.float64)
    if c_arr.ndim != 1:
        raise ValueError("coins must be one-dimensional")
    if c_arr.size and (np.abs(c_arr).max() > 1.0 or not np.isfinite(c_arr).all()):
        raise ValueError("all coins must lie in [-1, 1]")
    if (
        config.family == MIXTURE_QUADRATURE
        and config.prior.kind == priors.TRUNC_GAUSSIAN
    ):
        nodes, weights = _kernel_rule()
        beta, logw, logint = _kernels.bettor_run(
            c_arr,
            _inv2sig(config.prior),
            config.exponent_mode == ROUND_COUNT,
            nodes,
            weights,
        )
        logpot = logint - config.prior.log_normalizer()
        sum_c = 0.0
        sum_csq = 0.0
        for c in c_arr:  # sequential, matching the kernel's accumulation
            sum_c += c
            sum_csq += c * c
        final = BettorState(
            t=int(c_arr.size),
            log_wealth=float(logw[-1]) if c_arr.size else 0.0,
            sum_c=sum_c,
            sum_csq=sum_csq,
        )
        return Trajectory(
            beta=beta,
            coin=c_arr,
            log_wealth=logw,
            log_potential=logpot,
            final_state=final,
        )
    return _run_fold(config, c_arr)


def doubling_wrap(
    config_factory: Callable[[int], BettorConfig], coins: Sequence[float]
) -> Trajectory:
    """Restart a fresh bettor on epochs of length 1, 2, 4, ….

    Epoch k plays config_factory(2^k) from unit wealth; the concatenated
    trajectory records within-epoch wealth/potential, and ``epochs`` carries
    one :class:`EpochRecord` per epoch with the floor at the *nominal*
    length 2^k (the potential only grows as the exponent scale shrinks, so
    a truncated final epoch dominates its nominal floor as well).
    """
    c_arr = np.ascontiguousarray(coins, dtype=np.float64)
    pieces: list[Trajectory] = []
    records: list[EpochRecord] = []
    start = 0
    k = 0
    while start < c_arr.size:
        nominal = 1 << k
        chunk = c_arr[start : start + nominal]
        traj = run(config_factory(nominal), chunk)
        records.append(
            EpochRecord(
                k=k,
                start=start,
                nominal_length=nominal,
                length=int(chunk.size),
                sum_c=traj.final_state.sum_c,
                final_log_wealth=traj.final_state.log_wealth,
                floor_log=potentials.wealth_floor_log(traj.final_state.sum_c, nominal),
            )
        )
        pieces.append(traj)
        start += nominal
        k += 1
    if not pieces:
        empty = run(config_factory(1), c_arr)
        return Trajectory(
            beta=empty.beta,
            coin=empty.coin,
            log_wealth=empty.log_wealth,
            log_potential=empty.log_potential,
            final_state=empty.final_state,
            epochs=(),
        )
    return Trajectory(
        beta=np.concatenate([p.beta for p in pieces]),
        coin=c_arr,
        log_wealth=np.concatenate([p.log_wealth for p in pieces]),
        log_potential=np.concatenate([p.log_potential for p in pieces]),
        final_state=pieces[-1].final_state,
        epochs=tuple(records),
    )
