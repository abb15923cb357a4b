"""Reduction from coin betting to learning with expert advice.

One bettor per expert.  Each round:

1. fractions β_{t,i} from each expert's bettor state;
2. weights ŵ_{t,i} = π_i · β_{t,i} · Wealth_{t-1,i} (log domain);
3. iterate x_t ∝ max(ŵ_t, 0), falling back to π when no weight is positive;
4. algorithm loss h_t = ⟨g_t, x_t⟩;
5. coin c_{t,i} = h_t − g_{t,i}, clipped up to 0 when ŵ_{t,i} ≤ 0;
6. every bettor observes its coin.

Losses g_t ∈ [0,1]^d give coins in [−1, 1].  Regret vs a comparator u is
Σ_t ⟨g_t, x_t − u⟩, compared against the √(8T(KL(u;π)+ln 2)) envelope.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import _kernels, betting, numerics, potentials, priors

__all__ = [
    "ExpertsConfig",
    "ExpertsState",
    "RoundRecord",
    "RegretRecord",
    "uniform_pi",
    "kl",
    "predict",
    "step",
    "run_game",
    "doubling_game",
    "regret_curve",
    "v_t_diagnostic",
]

_SIMPLEX_TOL = 1e-12


def uniform_pi(d: int) -> np.ndarray:
    if d < 1:
        raise ValueError(f"need d >= 1, got {d}")
    return np.full(d, 1.0 / d)


def _check_simplex(p: np.ndarray, what: str, strict_positive: bool = False) -> None:
    if p.ndim != 1:
        raise ValueError(f"{what} must be a vector")
    if np.any(p < 0):
        raise ValueError(f"{what} entries must be nonnegative")
    if strict_positive and np.any(p <= 0):
        raise ValueError(f"{what} entries must be strictly positive")
    if abs(float(p.sum()) - 1.0) > _SIMPLEX_TOL:
        raise ValueError(f"{what} must sum to 1 within {_SIMPLEX_TOL}")


@dataclass(frozen=True)
class ExpertsConfig:
    """Expert count, prior on experts, per-expert bettor template, horizon."""

    d: int
    prior_pi: np.ndarray
    bettor: betting.BettorConfig
    horizon: int

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError(f"need d >= 1, got {self.d}")
        if self.horizon < 1:
            raise ValueError(f"need horizon >= 1, got {self.horizon}")
        pi = np.ascontiguousarray(self.prior_pi, dtype=np.float64)
        if pi.shape != (self.d,):
            raise ValueError(f"prior_pi must have shape ({self.d},)")
        _check_simplex(pi, "prior_pi", strict_positive=True)
        pi.setflags(write=False)
        object.__setattr__(self, "prior_pi", pi)


def default_experts_config(d: int, T: int) -> ExpertsConfig:
    """Uniform prior, truncated-Gaussian σ²=1/(2T) round-count bettors."""
    return ExpertsConfig(
        d=d,
        prior_pi=uniform_pi(d),
        bettor=betting.default_mixture_config(T),
        horizon=T,
    )


@dataclass(frozen=True)
class ExpertsState:
    """Per-expert bettor states plus the current iterate."""

    bettors: tuple[betting.BettorState, ...]
    x: np.ndarray
    t: int = 0


def initial_state(config: ExpertsConfig) -> ExpertsState:
    return ExpertsState(
        bettors=tuple(betting.BettorState() for _ in range(config.d)),
        x=config.prior_pi.copy(),
        t=0,
    )


def kl(u, pi) -> float:
    """Σ u_i ln(u_i/π_i), with 0·ln 0 = 0."""
    u_arr = np.ascontiguousarray(u, dtype=np.float64)
    pi_arr = np.ascontiguousarray(pi, dtype=np.float64)
    if u_arr.shape != pi_arr.shape:
        raise ValueError("u and pi must have equal length")
    _check_simplex(u_arr, "u")
    _check_simplex(pi_arr, "pi")
    mask = u_arr > 0
    if np.any(pi_arr[mask] <= 0):
        raise ValueError("kl undefined: zero pi entry with nonzero u entry")
    total = float(np.sum(u_arr[mask] * (np.log(u_arr[mask]) - np.log(pi_arr[mask]))))
    return max(total, 0.0)


def _fractions(state: ExpertsState, config: ExpertsConfig) -> np.ndarray:
    return np.array(
        [betting.next_fraction(config.bettor, s) for s in state.bettors]
    )


def _iterate_from_fractions(
    betas: np.ndarray, log_wealths: np.ndarray, pi: np.ndarray
) -> np.ndarray:
    """x ∝ max(π_i β_i W_i, 0) with prior fallback, all in log domain."""
    pos = betas > 0.0
    if not pos.any():
        return pi.copy()
    lw = np.log(pi[pos]) + np.log(betas[pos]) + log_wealths[pos]
    w = np.exp(lw - lw.max())
    x = np.zeros(pi.shape[0])
    x[pos] = w / w.sum()
    return x


def predict(state: ExpertsState, config: ExpertsConfig) -> np.ndarray:
    """The iterate x_t the reduction plays from this state."""
    betas = _fractions(state, config)
    log_wealths = np.array([s.log_wealth for s in state.bettors])
    return _iterate_from_fractions(betas, log_wealths, config.prior_pi)


@dataclass(frozen=True)
class RoundRecord:
    """One round of the reduction: what was played and what was fed back."""

    g: np.ndarray
    x: np.ndarray
    h: float
    coins: np.ndarray
    betas: np.ndarray


def step(
    state: ExpertsState, config: ExpertsConfig, g_t
) -> tuple[ExpertsState, RoundRecord]:
    """Play one round against loss vector g_t ∈ [0,1]^d."""
    g = np.ascontiguousarray(g_t, dtype=np.float64)
    if g.shape != (config.d,):
        raise ValueError(f"loss vector must have shape ({config.d},)")
    if np.any(g < 0) or np.any(g > 1):
        raise ValueError("losses must lie in [0, 1]")
    betas = _fractions(state, config)
    log_wealths = np.array([s.log_wealth for s in state.bettors])
    x = _iterate_from_fractions(betas, log_wealths, config.prior_pi)
    h = float(np.dot(g, x))
    coins = h - g
    neg = betas <= 0.0
    coins[neg] = np.maximum(coins[neg], 0.0)
    new_bettors = tuple(
        betting.observe(config.bettor, s, float(c))
        for s, c in zip(state.bettors, coins)
    )
    new_state = ExpertsState(bettors=new_bettors, x=x, t=state.t + 1)
    return new_state, RoundRecord(g=g, x=x, h=h, coins=coins, betas=betas)


def regret_curve(h: np.ndarray, g: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Cumulative Σ_{s<=t} ⟨g_s, x_s − u⟩ from stored rounds.

    This is the one canonical implementation; recomputing from a record's
    stored arrays reproduces the stored curve exactly.
    """
    return np.cumsum(h - g @ u)


@dataclass(frozen=True)
class RegretRecord:
    """Full game transcript plus per-comparator regret curves and envelopes."""

    d: int
    pi: np.ndarray
    g: np.ndarray
    x: np.ndarray
    h: np.ndarray
    coins: np.ndarray
    expert_log_wealth: np.ndarray
    comparators: Mapping[str, np.ndarray]
    curves: Mapping[str, np.ndarray] = field(default_factory=dict)
    envelope_gaussian: Mapping[str, float] = field(default_factory=dict)

    @property
    def rounds(self) -> int:
        return self.h.shape[0]

    def final_regret(self, name: str) -> float:
        curve = self.curves[name]
        return float(curve[-1]) if curve.shape[0] else 0.0


def _build_record(
    config: ExpertsConfig,
    g: np.ndarray,
    x: np.ndarray,
    h: np.ndarray,
    coins: np.ndarray,
    logw: np.ndarray,
    extra_comparators: Mapping[str, np.ndarray] | None,
) -> RegretRecord:
    T = h.shape[0]
    comparators: dict[str, np.ndarray] = {}
    for i in range(config.d):
        e = np.zeros(config.d)
        e[i] = 1.0
        comparators[f"e{i + 1}"] = e
    for name, u in (extra_comparators or {}).items():
        u_arr = np.ascontiguousarray(u, dtype=np.float64)
        _check_simplex(u_arr, f"comparator {name!r}")
        comparators[name] = u_arr
    curves = {name: regret_curve(h, g, u) for name, u in comparators.items()}
    horizon = max(T, 1)
    envelopes = {
        name: potentials.regret_bound_gaussian(horizon, kl(u, config.prior_pi))
        for name, u in comparators.items()
    }
    return RegretRecord(
        d=config.d,
        pi=config.prior_pi,
        g=g,
        x=x,
        h=h,
        coins=coins,
        expert_log_wealth=logw,
        comparators=comparators,
        curves=curves,
        envelope_gaussian=envelopes,
    )


def run_game(
    config: ExpertsConfig,
    losses,
    extra_comparators: Mapping[str, np.ndarray] | None = None,
) -> RegretRecord:
    """Fold :func:`step` over a loss sequence (rows = rounds).

    Truncated-Gaussian mixture bettors run on the compiled kernel; any other
    bettor family goes through the generic per-round fold.
    """
    g = np.ascontiguousarray(losses, dtype=np.float64)
    if g.ndim != 2 or g.shape[1] != config.d:
        raise ValueError(f"losses must have shape (T, {config.d})")
    if g.shape[0] > config.horizon:
        raise ValueError(f"{g.shape[0]} rounds exceed horizon {config.horizon}")
    if g.size and (g.min() < 0 or g.max() > 1):
        raise ValueError("losses must lie in [0, 1]")
    bettor = config.bettor
    if (
        bettor.family == betting.MIXTURE_QUADRATURE
        and bettor.prior.kind == priors.TRUNC_GAUSSIAN
    ):
        rule = numerics.gauss_legendre(betting.KERNEL_ORDER)
        xs, hs, coins, logw = _kernels.experts_run(
            g,
            config.prior_pi,
            0.5 / bettor.prior.sigma_sq,
            bettor.exponent_mode == betting.ROUND_COUNT,
            rule.nodes,
            rule.weights,
        )
        return _build_record(config, g, xs, hs, coins, logw, extra_comparators)
    state = initial_state(config)
    T = g.shape[0]
    xs = np.empty((T, config.d))
    hs = np.empty(T)
    coins = np.empty((T, config.d))
    logw = np.empty((T, config.d))
    for t in range(T):
        state, rec = step(state, config, g[t])
        xs[t] = rec.x
        hs[t] = rec.h
        coins[t] = rec.coins
        logw[t] = [s.log_wealth for s in state.bettors]
    return _build_record(config, g, xs, hs, coins, logw, extra_comparators)


def doubling_game(
    make_config: Callable[[int], ExpertsConfig],
    losses,
    extra_comparators: Mapping[str, np.ndarray] | None = None,
) -> list[tuple[int, RegretRecord]]:
    """Doubling-trick experts: fresh state per epoch of length 1, 2, 4, ….

    Returns (nominal epoch length, epoch record) pairs; epoch k plays
    make_config(2^k) on its slice of the loss stream.
    """
    g = np.ascontiguousarray(losses, dtype=np.float64)
    out: list[tuple[int, RegretRecord]] = []
    start = 0
    k = 0
    while start < g.shape[0]:
        nominal = 1 << k
        chunk = g[start : start + nominal]
        record = run_game(make_config(nominal), chunk, extra_comparators)
        out.append((nominal, record))
        start += nominal
        k += 1
    return out


def v_t_diagnostic(record: RegretRecord, u) -> float:
    """V_T(u) = Σ_t Σ_i u_i ⟨g_t, x_t − e_i⟩² from a finished record."""
    u_arr = np.ascontiguousarray(u, dtype=np.float64)
    _check_simplex(u_arr, "u")
    if record.rounds == 0:
        return 0.0
    sq = (record.h[:, None] - record.g) ** 2
    return float(np.sum(sq @ u_arr))
