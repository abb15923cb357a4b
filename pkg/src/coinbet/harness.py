"""Command-line front end: verification suites, simulations, CSV emission.

Subcommands
-----------

- ``verify <suite>`` — run a named property suite (special_functions, priors,
  potentials, wealth_dominance, floor, experts_bounds, all); one CSV row per
  check; exit status 1 iff any row fails.
- ``simulate-bettor`` — one bettor trajectory as CSV (columns: round, coin,
  fraction, log_wealth, log_potential, dominance_margin; ``--doubling`` adds
  epoch and epoch_floor_margin columns).
- ``experts`` — one experts game as CSV (columns: round, loss_of_algorithm,
  regret_<comparator>…, envelope_gaussian, envelope_shifted_kt,
  envelope_squint_reference, plus a summary row with the max
  regret/envelope ratio; ``--doubling`` adds an epoch column and sums
  per-epoch envelopes in the summary).
- ``bound-table`` — tabulate the three bound formulas over T × kl lists.

Every CSV starts with a ``#``-prefixed manifest line (JSON: command, full
parameter set, seed, version, backend, output path).  Re-running the command
recorded in a manifest reproduces the file byte-identically.  One 64-bit
seed drives a run; per-trial RNGs are derived by a splitmix64 stream
(state += 0x9E3779B97F4A7C15; xor-shift-multiply finalizer), substream i
feeding ``numpy.random.default_rng``.

Envelope columns in the per-round experts CSV use the worst vertex KL and
the running round count (the squint reference uses v_u = t); per-comparator
final envelopes appear in the summary row denominator.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import erfcx, roots_jacobi

from . import __version__, _kernels, betting, experts, numerics, potentials, priors

__all__ = [
    "GeneratorSpec",
    "RunManifest",
    "CheckRow",
    "parse_generator",
    "trial_rng",
    "make_coins",
    "make_losses",
    "adversarial_run",
    "run_suite",
    "main",
]

SUITES = (
    "special_functions",
    "priors",
    "potentials",
    "wealth_dominance",
    "floor",
    "experts_bounds",
    "all",
)

_MASK64 = (1 << 64) - 1


def _splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step: (new state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def substream_seed(seed: int, index: int) -> int:
    """The index-th 64-bit substream seed derived from a run seed."""
    state = seed & _MASK64
    out = 0
    for _ in range(index + 1):
        state, out = _splitmix64(state)
    return out


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Per-trial RNG: PCG64 seeded by the index-th splitmix64 output."""
    return np.random.default_rng(substream_seed(seed, index))


# --------------------------------------------------------------------------
# Generators
# --------------------------------------------------------------------------

COIN_KINDS = ("binary", "binary_exhaustive", "rademacher", "biased", "alternating",
              "adversarial_sign_flip")
LOSS_KINDS = ("alternating", "biased", "single_best_expert", "iid_uniform_losses")

_GEN_ALIASES = {
    "binary": "binary",
    "binary-exhaustive": "binary_exhaustive",
    "rademacher": "rademacher",
    "biased": "biased",
    "alternating": "alternating",
    "adversarial": "adversarial_sign_flip",
    "adversarial-sign-flip": "adversarial_sign_flip",
    "single-best": "single_best_expert",
    "single-best-expert": "single_best_expert",
    "iid-uniform": "iid_uniform_losses",
    "iid-uniform-losses": "iid_uniform_losses",
}


@dataclass(frozen=True)
class GeneratorSpec:
    """A coin/loss stream: kind, seed, and per-kind parameters."""

    kind: str
    seed: int = 0
    p: float | None = None
    coins: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in COIN_KINDS and self.kind not in LOSS_KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.p is not None and not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")


def parse_generator(text: str, seed: int = 0, coins: str | None = None) -> GeneratorSpec:
    """Parse a --gen string like ``rademacher`` or ``biased:0.7``."""
    name, _, param = text.partition(":")
    kind = _GEN_ALIASES.get(name.strip())
    if kind is None:
        raise ValueError(f"unknown generator {name!r}")
    p = float(param) if param else None
    return GeneratorSpec(kind=kind, seed=seed, p=p, coins=coins)


def _parse_coin_string(text: str) -> np.ndarray:
    out = []
    for ch in text.strip():
        if ch == "+":
            out.append(1.0)
        elif ch == "-":
            out.append(-1.0)
        else:
            raise ValueError(f"coin strings use '+'/'-' only, got {ch!r}")
    return np.array(out)


def make_coins(spec: GeneratorSpec, T: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """Materialize an offline coin stream of length T in [-1, 1]."""
    if rng is None:
        rng = trial_rng(spec.seed, 0)
    if spec.kind == "binary":
        if spec.coins is None:
            raise ValueError("binary generator needs an explicit coin string")
        return _parse_coin_string(spec.coins)
    if spec.kind == "rademacher":
        return np.where(rng.random(T) < 0.5, 1.0, -1.0)
    if spec.kind == "biased":
        p = 0.5 if spec.p is None else spec.p
        return np.where(rng.random(T) < p, 1.0, -1.0)
    if spec.kind == "alternating":
        c = np.empty(T)
        c[0::2] = 1.0
        c[1::2] = -1.0
        return c
    raise ValueError(f"{spec.kind!r} is not an offline coin generator")


def binary_sequences(T: int) -> Iterable[np.ndarray]:
    """All 2^T binary (+1/-1) coin sequences of length T."""
    for bits in range(1 << T):
        yield np.array([1.0 if (bits >> i) & 1 else -1.0 for i in range(T)])


def adversarial_run(
    config: betting.BettorConfig, T: int, rng: np.random.Generator
) -> tuple[np.ndarray, betting.BettorState]:
    """Sign-flip adversary: coin c_t = -sign(β_t)·m_t, magnitude m_t = 1
    with probability 1/2 else uniform on (0,1); +m_t when β_t = 0.

    Returns the coin sequence and the final bettor state.
    """
    state = betting.BettorState()
    coins = np.empty(T)
    for t in range(T):
        beta = betting.next_fraction(config, state)
        m = 1.0 if rng.random() < 0.5 else float(rng.random())
        c = -m if beta > 0.0 else m
        state = betting.observe(config, state, c)
        coins[t] = c
    return coins, state


def make_losses(
    spec: GeneratorSpec, T: int, d: int, rng: np.random.Generator | None = None
) -> np.ndarray:
    """Materialize a loss stream of shape (T, d) with entries in [0, 1]."""
    if rng is None:
        rng = trial_rng(spec.seed, 0)
    if spec.kind == "alternating":
        g = np.zeros((T, d))
        g[np.arange(T), np.arange(T) % d] = 1.0
        return g
    if spec.kind == "biased":
        p = 0.5 if spec.p is None else spec.p
        return (rng.random((T, d)) < p).astype(float)
    if spec.kind == "single_best_expert":
        best = int(rng.integers(d))
        g = (rng.random((T, d)) < 0.75).astype(float)
        g[:, best] = (rng.random(T) < 0.25).astype(float)
        return g
    if spec.kind == "iid_uniform_losses":
        return rng.random((T, d))
    raise ValueError(f"{spec.kind!r} is not a loss generator")


# --------------------------------------------------------------------------
# Manifest and CSV plumbing
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce a run byte-identically."""

    command: str
    params: dict
    seed: int
    version: str
    backend: str
    out: str | None

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "params": self.params,
            "seed": self.seed,
            "version": self.version,
            "backend": self.backend,
            "out": self.out,
        }
        return json.dumps(payload, sort_keys=True, separators=(", ", ": "))


def _manifest(command: str, args: argparse.Namespace, skip: Sequence[str] = ()) -> RunManifest:
    params = {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in ("command", "out", "func") and k not in skip
    }
    return RunManifest(
        command=command,
        params=params,
        seed=int(getattr(args, "seed", 0) or 0),
        version=__version__,
        backend=_kernels.BACKEND,
        out=getattr(args, "out", None),
    )


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(out: str | None, manifest: RunManifest, header: Sequence[str],
               rows: Iterable[Sequence]) -> str:
    """Write manifest comment + header + rows; returns the text written."""
    buf = io.StringIO()
    buf.write("# " + manifest.to_json() + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    return text


# --------------------------------------------------------------------------
# Verify suites
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckRow:
    """One verification row; passes iff margin clears the row's threshold."""

    name: str
    params: str
    lhs: float
    rhs: float
    margin: float
    passed: bool

    def as_row(self) -> tuple:
        return (self.name, self.params, self.lhs, self.rhs, self.margin,
                "pass" if self.passed else "fail")


def _closed_exp_quad_log(a: float, b: float, lo: float, hi: float) -> float:
    """log ∫_lo^hi exp(a t + b t²) dt in closed form, b <= 0.

    b = 0 reduces to the linear antiderivative; b < 0 completes the square
    and evaluates the erf difference through erfcx when cancellation looms.
    """
    if b > 0:
        raise ValueError("closed form implemented for b <= 0 only")
    if b == 0.0:
        if a == 0.0:
            return math.log(hi - lo)
        # (e^{a hi} - e^{a lo}) / a, computed from the dominant endpoint.
        top, bot = (hi, lo) if a > 0 else (lo, hi)
        return a * top + math.log1p(-math.exp(a * (bot - top))) - math.log(abs(a))
    q = -b
    mu = a / (2.0 * q)
    rt = math.sqrt(q)
    u = rt * (lo - mu)
    w = rt * (hi - mu)
    lead = a * a / (4.0 * q) + math.log(0.5 * math.sqrt(math.pi / q))
    if u >= 0.0:
        diff = -u * u + math.log(
            float(erfcx(u)) - math.exp(u * u - w * w) * float(erfcx(w))
        )
    elif w <= 0.0:
        diff = -w * w + math.log(
            float(erfcx(-w)) - math.exp(w * w - u * u) * float(erfcx(-u))
        )
    else:
        diff = math.log(math.erf(-u) + math.erf(w))
    return lead + diff


def _suite_special_functions(tol: float | None, seed: int, trials: int) -> list[CheckRow]:
    rows = []
    agree_tol = 1e-10 if tol is None else tol
    xs = np.linspace(0.0, 6.0, 10**4)
    odd = max(abs(numerics.erf(-float(x)) + numerics.erf(float(x))) for x in xs)
    rows.append(CheckRow("erf_oddness", "grid=[0,6]x1e4", odd, 0.0, -odd, odd == 0.0))
    grid = np.geomspace(1e-2, 1e6, 200)
    rec = max(
        abs(numerics.log_gamma(float(x) + 1.0) - numerics.log_gamma(float(x)) - math.log(float(x)))
        / max(1.0, abs(numerics.log_gamma(float(x) + 1.0)))
        for x in grid
    )
    rows.append(CheckRow("log_gamma_recurrence", "x in [1e-2,1e6]", rec, 1e-12,
                         1e-12 - rec, rec <= 1e-12))
    for order in (4, 16, 64):
        rule = numerics.gauss_legendre(order)
        worst = 0.0
        for k in range(0, 2 * order):
            approx = float(np.dot(rule.weights, rule.nodes**k))
            exact = 0.0 if k % 2 else 2.0 / (k + 1)
            worst = max(worst, abs(approx - exact) / max(1.0, abs(exact)))
        rows.append(CheckRow("quadrature_exactness", f"order={order}", worst, 1e-12,
                             1e-12 - worst, worst <= 1e-12))
    worst = 0.0
    for a in (-100.0, -31.6, -10.0, -1.0, 0.0, 1.0, 10.0, 31.6, 100.0):
        for b in (0.0, -1.0, -10.0, -100.0, -1000.0, -10000.0):
            ref = _closed_exp_quad_log(a, b, -0.5, 0.5)
            got = numerics.integrate_log(lambda t: a * t + b * t * t, -0.5, 0.5).log_value
            worst = max(worst, abs(math.expm1(got - ref)))
    rows.append(CheckRow("integrate_log_vs_closed", "a in [-100..100]; b in [-1e4..0]",
                         worst, agree_tol, agree_tol - worst, worst <= agree_tol))
    return rows


def _suite_priors(tol: float | None, seed: int, trials: int) -> list[CheckRow]:
    rows = []
    norm_tol = 1e-9 if tol is None else tol
    closed_tol = 1e-10 if tol is None else tol
    specs = [priors.conjugate_power(z) for z in (0.0, 0.5, 1.0, 5.0, 50.0, 500.0)]
    specs += [priors.truncated_gaussian(s) for s in (0.5, 0.05, 0.0005)]
    for spec in specs:
        label = (f"z={spec.z}" if spec.kind == priors.CONJ_POWER
                 else f"sigma_sq={spec.sigma_sq}")
        lo, hi = spec.support
        total = math.exp(
            numerics.integrate_log(lambda b: priors.log_density(spec, b), lo, hi).log_value
        )
        err = abs(total - 1.0)
        rows.append(CheckRow("prior_normalization", label, total, 1.0,
                             norm_tol - err, err <= norm_tol))
    for z in (0.0, 0.5, 1.0, 5.0, 50.0, 500.0):
        spec = priors.conjugate_power(z)
        closed = priors.conj_power_log_normalizer(z)
        quad = numerics.integrate_log(
            lambda b: 0.0 if z == 0.0 else z * (math.log1p(b) + math.log1p(-b)),
            -1.0, 1.0,
        ).log_value
        err = abs(math.expm1(closed - quad))
        rows.append(CheckRow("conj_normalizer_closed_vs_quad", f"z={z}", closed, quad,
                             closed_tol - err, err <= closed_tol))
    grid = np.linspace(-0.5, 0.5, 10**4)
    for z in (0.5, 1.0, 5.0, 50.0):
        margins = z * (np.log1p(grid) + np.log1p(-grid)) + 2.0 * z * grid**2
        m = float(margins.min())
        rows.append(CheckRow("prior_gaussian_shape_lb", f"z={z}", m, 0.0, m, m >= 0.0))
    return rows


def _suite_potentials(tol: float | None, seed: int, trials: int) -> list[CheckRow]:
    rows = []
    pot_tol = 1e-8 if tol is None else tol
    gamma_tol = 1e-9 if tol is None else tol
    for T in (1, 2, 10, 100, 1000, 10000):
        prior = priors.truncated_gaussian(0.5 / T)
        worst = 0.0
        for x in np.linspace(-T, T, 21):
            closed = potentials.trunc_gauss_log_potential_closed(float(x), T, 0.5 / T)
            quad = potentials.squint_log_potential(float(x), float(T), prior)
            worst = max(worst, abs(closed - quad) / max(1.0, abs(closed)))
        rows.append(CheckRow("trunc_gauss_closed_vs_quad", f"T={T}", worst, pot_tol,
                             pot_tol - worst, worst <= pot_tol))
    for T, z in ((4, 0.0), (6, 0.5), (8, 2.0), (8, 3.5)):
        # Gauss–Jacobi with weight (1−β)^z(1+β)^z integrates the remaining
        # polynomial factor (1+β)^a(1−β)^b exactly; Gauss–Legendre cannot
        # resolve the endpoint singularities for fractional z.
        nodes, weights = roots_jacobi(T + 2, z, z)
        worst = 0.0
        for a in range(T + 1):
            b = T - a
            closed = potentials.conj_power_log_wealth(z, a, b)
            total = float(np.dot(weights, (1.0 + nodes) ** a * (1.0 - nodes) ** b))
            quad = math.log(total) - priors.conj_power_log_normalizer(z)
            err = abs(math.expm1(closed - quad))
            worst = max(worst, err)
        rows.append(CheckRow("gamma_wealth_vs_quad", f"T={T};z={z}", worst, gamma_tol,
                             gamma_tol - worst, worst <= gamma_tol))
    ts = np.unique(np.concatenate([np.arange(1, 51), np.geomspace(1, 10**6, 60).astype(int)]))
    worst = math.inf
    for T in ts:
        ratio = math.erf(math.sqrt(T) / (2.0 * math.sqrt(2.0))) / (
            math.sqrt(2.0) * math.erf(math.sqrt(T) / 2.0)
        )
        worst = min(worst, ratio - 0.5)
    rows.append(CheckRow("erf_ratio_above_half", "T in [1,1e6]", worst, 0.0, worst,
                         worst > 0.0))
    beta = np.linspace(-1.0, 1.0, 1000)
    cs = np.linspace(-1.0, 1.0, 1000)
    bc = np.outer(beta, cs).ravel()
    bc = bc[np.abs(bc) <= 0.5]
    margin = np.log1p(bc) - bc + bc * bc
    m = float(margin.min())
    ulp = float(np.spacing(1.0))
    rows.append(CheckRow("key_inequality_log1p", "1e6 grid |bc|<=1/2", m, -ulp, m + ulp,
                         m >= -ulp))
    return rows


def _suite_floor(tol: float | None, seed: int, trials: int) -> list[CheckRow]:
    slack = 0.0 if tol is None else tol
    rows = []
    horizons = list(range(1, 51)) + [100, 1000, 10**4, 10**6]
    for T in horizons:
        worst = math.inf
        for s in np.linspace(-T, T, 101):
            margin = potentials.default_potential_log(float(s), T) - potentials.wealth_floor_log(
                float(s), T
            )
            worst = min(worst, margin)
        rows.append(CheckRow("wealth_floor", f"T={T}", worst, slack, worst - slack,
                             worst > slack))
    return rows


def _suite_wealth_dominance(tol: float | None, seed: int, trials: int) -> list[CheckRow]:
    margin_tol = -1e-9 if tol is None else -tol
    n_trials = trials if trials else 50
    rows = []
    T = 200
    for mode in (betting.ROUND_COUNT, betting.VARIANCE):
        config = betting.BettorConfig(
            family=betting.MIXTURE_QUADRATURE,
            prior=priors.truncated_gaussian(0.5 / T),
            exponent_mode=mode,
        )
        worst = math.inf
        for i in range(n_trials):
            rng = trial_rng(seed, i)
            coins = rng.uniform(-1.0, 1.0, T)
            traj = betting.run(config, coins)
            worst = min(worst, float(traj.dominance_margin.min()))
        rows.append(CheckRow("mixture_dominance", f"mode={mode};trials={n_trials}",
                             worst, margin_tol, worst - margin_tol, worst >= margin_tol))
    T = 100
    for delta in (T // 2, T, 2 * T):
        z = (delta - 1) / 2.0
        config = betting.conj_power_config(z)
        worst = math.inf
        for i in range(n_trials):
            rng = trial_rng(seed, 1000 + i)
            if i % 2:
                coins = rng.uniform(-1.0, 1.0, T)
                traj = betting.run(config, coins)
                state = traj.final_state
            else:
                _, state = adversarial_run(config, T, rng)
            pot = potentials.conj_power_log_wealth(
                z, (T + state.sum_c) / 2.0, (T - state.sum_c) / 2.0
            )
            worst = min(worst, state.log_wealth - pot)
        rows.append(CheckRow("conj_dominance", f"delta={delta};T={T}", worst, margin_tol,
                             worst - margin_tol, worst >= margin_tol))
    return rows


def _suite_experts_bounds(tol: float | None, seed: int, trials: int) -> list[CheckRow]:
    n_seeds = trials if trials else 25
    rows = []
    combo = 0
    for d in (2, 10):
        for T in (100, 1000):
            config = experts.default_experts_config(d, T)
            kl_star = experts.kl(np.eye(d)[0], config.prior_pi)
            env = potentials.regret_bound_gaussian(T, kl_star)
            streams: list[tuple[str, int]] = [("alternating", 1),
                                              ("biased", n_seeds),
                                              ("single_best_expert", n_seeds)]
            for kind, n in streams:
                worst = -math.inf
                for i in range(n):
                    rng = trial_rng(seed, combo * 1000 + i)
                    g = make_losses(GeneratorSpec(kind=kind, p=0.5 if kind == "biased" else None),
                                    T, d, rng)
                    record = experts.run_game(config, g)
                    for name in (f"e{j + 1}" for j in range(d)):
                        worst = max(worst, record.final_regret(name) / env)
                rows.append(CheckRow("experts_regret_ratio", f"d={d};T={T};{kind}",
                                     worst, 1.0, 1.0 - worst, worst <= 1.0))
                combo += 1
    return rows


_SUITE_FUNCS: dict[str, Callable[[float | None, int, int], list[CheckRow]]] = {
    "special_functions": _suite_special_functions,
    "priors": _suite_priors,
    "potentials": _suite_potentials,
    "floor": _suite_floor,
    "wealth_dominance": _suite_wealth_dominance,
    "experts_bounds": _suite_experts_bounds,
}


def run_suite(suite: str, tol: float | None = None, seed: int = 0,
              trials: int = 0) -> list[CheckRow]:
    """Run one named suite (or 'all'); returns its check rows."""
    if suite == "all":
        rows = []
        for name in SUITES[:-1]:
            rows.extend(_SUITE_FUNCS[name](tol, seed, trials))
        return rows
    if suite not in _SUITE_FUNCS:
        raise ValueError(f"unknown suite {suite!r}")
    return _SUITE_FUNCS[suite](tol, seed, trials)


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------


def _cmd_verify(args: argparse.Namespace) -> int:
    rows = run_suite(args.suite, args.tol, args.seed, args.trials)
    manifest = _manifest("verify", args)
    _write_csv(args.out, manifest,
               ("name", "params", "lhs", "rhs", "margin", "pass"),
               (r.as_row() for r in rows))
    return 0 if all(r.passed for r in rows) else 1


def _bettor_config_from_args(args: argparse.Namespace) -> betting.BettorConfig:
    if args.family == "conj-power":
        return betting.conj_power_config(args.z if args.z is not None else 0.0)
    if args.family != "mixture":
        raise ValueError(f"unknown family {args.family!r}")
    if args.prior == "conj-power":
        prior = priors.conjugate_power(args.z if args.z is not None else 0.0)
    elif args.prior == "trunc-gauss":
        sigma_sq = args.sigma2 if args.sigma2 is not None else 0.5 / max(args.T, 1)
        prior = priors.truncated_gaussian(sigma_sq)
    else:
        raise ValueError(f"unknown prior {args.prior!r}")
    return betting.BettorConfig(
        family=betting.MIXTURE_QUADRATURE, prior=prior,
        exponent_mode=betting.ROUND_COUNT,
    )


def _cmd_simulate_bettor(args: argparse.Namespace) -> int:
    spec = parse_generator(args.gen, seed=args.seed, coins=args.coins)
    manifest = _manifest("simulate-bettor", args)
    rng = trial_rng(args.seed, 0)
    if args.doubling:
        factory = _doubling_bettor_factory(args)
        if spec.kind == "adversarial_sign_flip":
            raise ValueError("adversarial generator is not supported with --doubling")
        coins = make_coins(spec, args.T, rng)
        traj = betting.doubling_wrap(factory, coins)
        header = ("round", "epoch", "coin", "fraction", "log_wealth",
                  "log_potential", "dominance_margin", "epoch_floor_margin")
        rows = []
        epoch_iter = iter(traj.epochs)
        epoch = next(epoch_iter, None)
        for t in range(len(traj)):
            while epoch is not None and t >= epoch.start + epoch.length:
                epoch = next(epoch_iter, None)
            is_last = epoch is not None and t == epoch.start + epoch.length - 1
            rows.append((
                t + 1,
                epoch.nominal_length if epoch is not None else "",
                traj.coin[t], traj.beta[t], traj.log_wealth[t],
                traj.log_potential[t], traj.dominance_margin[t],
                (epoch.final_log_wealth - epoch.floor_log) if is_last else "",
            ))
        _write_csv(args.out, manifest, header, rows)
        return 0
    config = _bettor_config_from_args(args)
    if spec.kind == "adversarial_sign_flip":
        coins, _ = adversarial_run(config, args.T, rng)
    else:
        coins = make_coins(spec, args.T, rng)
    traj = betting.run(config, coins)
    header = ("round", "coin", "fraction", "log_wealth", "log_potential",
              "dominance_margin")
    rows = [
        (t + 1, traj.coin[t], traj.beta[t], traj.log_wealth[t],
         traj.log_potential[t], traj.dominance_margin[t])
        for t in range(len(traj))
    ]
    _write_csv(args.out, manifest, header, rows)
    return 0


def _doubling_bettor_factory(args: argparse.Namespace) -> Callable[[int], betting.BettorConfig]:
    if args.family == "conj-power":
        z = args.z
        return lambda T: betting.conj_power_config(z if z is not None else (T - 1) / 2.0)
    return lambda T: betting.default_mixture_config(T)


def _parse_pi(text: str, d: int) -> np.ndarray:
    if text == "uniform":
        return experts.uniform_pi(d)
    vals = np.array([float(v) for v in text.split(",")])
    if vals.shape[0] != d:
        raise ValueError(f"--pi needs {d} entries, got {vals.shape[0]}")
    return vals


def _experts_rows(record: experts.RegretRecord, offset: int, epoch: int | None,
                  kl_star: float) -> list[tuple]:
    rows = []
    for t in range(record.rounds):
        tt = t + 1
        row = [offset + tt]
        if epoch is not None:
            row.append(epoch)
        row.append(record.h[t])
        row.extend(record.curves[name][t] for name in record.comparators)
        row.append(potentials.regret_bound_gaussian(tt, kl_star))
        row.append(potentials.regret_bound_shifted_kt(tt, kl_star))
        row.append(potentials.squint_bound_reference(tt, kl_star, float(tt)))
        rows.append(tuple(row))
    return rows


def _cmd_experts(args: argparse.Namespace) -> int:
    spec = parse_generator(args.gen, seed=args.seed)
    manifest = _manifest("experts", args)
    rng = trial_rng(args.seed, 0)
    pi = _parse_pi(args.pi, args.d)
    g = make_losses(spec, args.T, args.d, rng)
    names: list[str] | None = None
    if args.doubling:
        def make_config(T: int) -> experts.ExpertsConfig:
            return experts.ExpertsConfig(
                d=args.d, prior_pi=pi, bettor=betting.default_mixture_config(T),
                horizon=T,
            )

        epochs = experts.doubling_game(make_config, g)
        kl_star = max(
            experts.kl(np.eye(args.d)[i], pi) for i in range(args.d)
        )
        rows: list[tuple] = []
        offset = 0
        totals: dict[str, float] = {}
        env_total = 0.0
        for nominal, record in epochs:
            names = list(record.comparators)
            rows.extend(_experts_rows(record, offset, nominal, kl_star))
            offset += record.rounds
            for name in names:
                totals[name] = totals.get(name, 0.0) + record.final_regret(name)
            env_total += potentials.regret_bound_gaussian(nominal, kl_star)
        ratio = max(totals[n] / env_total for n in totals) if totals else 0.0
        summary: list = ["summary", "", ratio]
        summary.extend(totals[n] for n in (names or []))
        summary.extend([env_total, "", ""])
        rows.append(tuple(summary))
        header = ["round", "epoch", "loss_of_algorithm"]
        header += [f"regret_{n}" for n in (names or [])]
        header += ["envelope_gaussian", "envelope_shifted_kt",
                   "envelope_squint_reference"]
        _write_csv(args.out, manifest, header, rows)
        return 0
    config = experts.ExpertsConfig(
        d=args.d, prior_pi=pi, bettor=_bettor_config_from_args(args),
        horizon=max(args.T, 1),
    )
    record = experts.run_game(config, g)
    names = list(record.comparators)
    kl_star = max(experts.kl(record.comparators[n], pi) for n in names)
    rows = _experts_rows(record, 0, None, kl_star)
    finals = {n: record.final_regret(n) for n in names}
    ratio = (
        max(finals[n] / record.envelope_gaussian[n] for n in names)
        if record.rounds
        else 0.0
    )
    summary = ["summary", ratio]
    summary.extend(finals[n] for n in names)
    summary.extend([max(record.envelope_gaussian.values()) if names else "", "", ""])
    rows.append(tuple(summary))
    header = ["round", "loss_of_algorithm"]
    header += [f"regret_{n}" for n in names]
    header += ["envelope_gaussian", "envelope_shifted_kt", "envelope_squint_reference"]
    _write_csv(args.out, manifest, header, rows)
    return 0


def _cmd_bound_table(args: argparse.Namespace) -> int:
    manifest = _manifest("bound-table", args)
    ts = [int(v) for v in args.T.split(",")]
    kls = [float(v) for v in args.kl.split(",")]
    rows = []
    for T in ts:
        for klv in kls:
            rows.append((
                T, klv,
                potentials.regret_bound_gaussian(T, klv),
                potentials.regret_bound_shifted_kt(T, klv),
                potentials.squint_bound_reference(T, klv, float(T)),
            ))
    _write_csv(args.out, manifest,
               ("T", "kl", "gaussian", "shifted_kt", "squint_reference"), rows)
    return 0


# --------------------------------------------------------------------------
# Argument parsing
# --------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coinbet",
        description="Verification and simulation harness for coin-betting potentials.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run a property suite, emit a CSV report")
    p_verify.add_argument("suite", choices=SUITES)
    p_verify.add_argument("--tol", type=float, default=None)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--trials", type=int, default=0)
    p_verify.add_argument("--out", default=None)
    p_verify.set_defaults(func=_cmd_verify)

    p_sim = sub.add_parser("simulate-bettor", help="one bettor trajectory as CSV")
    p_sim.add_argument("--family", choices=("conj-power", "mixture"), default="mixture")
    p_sim.add_argument("--prior", choices=("trunc-gauss", "conj-power"),
                       default="trunc-gauss")
    p_sim.add_argument("--z", type=float, default=None)
    p_sim.add_argument("--sigma2", type=float, default=None)
    p_sim.add_argument("--T", type=int, default=100)
    p_sim.add_argument("--gen", default="rademacher")
    p_sim.add_argument("--coins", default=None)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--doubling", action="store_true")
    p_sim.add_argument("--out", default=None)
    p_sim.set_defaults(func=_cmd_simulate_bettor)

    p_exp = sub.add_parser("experts", help="one experts game as CSV")
    p_exp.add_argument("--d", type=int, default=2)
    p_exp.add_argument("--T", type=int, default=100)
    p_exp.add_argument("--pi", default="uniform")
    p_exp.add_argument("--family", choices=("conj-power", "mixture"), default="mixture")
    p_exp.add_argument("--prior", choices=("trunc-gauss", "conj-power"),
                       default="trunc-gauss")
    p_exp.add_argument("--z", type=float, default=None)
    p_exp.add_argument("--sigma2", type=float, default=None)
    p_exp.add_argument("--gen", default="biased:0.5")
    p_exp.add_argument("--seed", type=int, default=0)
    p_exp.add_argument("--doubling", action="store_true")
    p_exp.add_argument("--out", default=None)
    p_exp.set_defaults(func=_cmd_experts)

    p_tab = sub.add_parser("bound-table", help="tabulate the bound formulas")
    p_tab.add_argument("--T", default="1,10,100,1000,10000")
    p_tab.add_argument("--kl", default="0.0")
    p_tab.add_argument("--out", default=None)
    p_tab.set_defaults(func=_cmd_bound_table)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, numerics.QuadratureConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
