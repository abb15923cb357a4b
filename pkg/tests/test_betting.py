"""Bettor state machines: fractions, wealth accounting, doubling wrapper."""

import math

import numpy as np
import pytest

from coinbet import betting, potentials, priors
from coinbet.betting import (
    CONJUGATE_POWER,
    MIXTURE_QUADRATURE,
    ROUND_COUNT,
    VARIANCE,
    BettorConfig,
    BettorState,
    conj_power_config,
    default_mixture_config,
    doubling_wrap,
    next_fraction,
    observe,
    run,
)
from coinbet.harness import binary_sequences


class TestConfigs:
    def test_conj_power_factory(self):
        cfg = conj_power_config(3.0)
        assert cfg.family == CONJUGATE_POWER
        assert cfg.z == 3.0
        assert cfg.prior is None

    def test_default_mixture_sigma(self):
        cfg = default_mixture_config(8)
        assert cfg.family == MIXTURE_QUADRATURE
        assert cfg.exponent_mode == ROUND_COUNT
        assert cfg.prior.kind == priors.TRUNC_GAUSSIAN
        assert cfg.prior.sigma_sq == 0.5 / 8

    def test_default_mixture_variance_mode(self):
        cfg = default_mixture_config(8, exponent_mode=VARIANCE)
        assert cfg.exponent_mode == VARIANCE

    def test_conj_power_validation(self):
        with pytest.raises(ValueError):
            conj_power_config(-1.0)
        with pytest.raises(ValueError):
            BettorConfig(family=CONJUGATE_POWER)
        with pytest.raises(ValueError):
            BettorConfig(
                family=CONJUGATE_POWER, z=1.0, prior=priors.truncated_gaussian(0.1)
            )

    def test_mixture_validation(self):
        with pytest.raises(ValueError):
            BettorConfig(family=MIXTURE_QUADRATURE, exponent_mode=ROUND_COUNT)
        with pytest.raises(ValueError):
            BettorConfig(
                family=MIXTURE_QUADRATURE,
                prior=priors.truncated_gaussian(0.1),
                exponent_mode="bogus",
            )
        with pytest.raises(ValueError):
            BettorConfig(
                family=MIXTURE_QUADRATURE,
                prior=priors.truncated_gaussian(0.1),
                exponent_mode=ROUND_COUNT,
                z=1.0,
            )

    def test_unknown_family(self):
        with pytest.raises(ValueError, match="unknown family"):
            BettorConfig(family="martingale")

    def test_default_mixture_needs_horizon(self):
        with pytest.raises(ValueError):
            default_mixture_config(0)


class TestNextFraction:
    def test_fresh_bettor_bets_nothing(self):
        state = BettorState()
        assert next_fraction(conj_power_config(0.0), state) == 0.0
        assert next_fraction(conj_power_config(7.5), state) == 0.0
        assert next_fraction(default_mixture_config(10), state) == 0.0

    def test_conj_power_hand_values(self):
        # β = Σc / (t + 2z + 2) at the post-observation state.
        state = BettorState(t=1, sum_c=1.0, sum_csq=1.0)
        assert next_fraction(conj_power_config(0.0), state) == pytest.approx(1.0 / 3.0)
        assert next_fraction(conj_power_config(0.5), state) == pytest.approx(0.25)
        state = BettorState(t=4, sum_c=-2.0, sum_csq=4.0)
        assert next_fraction(conj_power_config(1.0), state) == pytest.approx(-0.25)

    def test_conj_power_clamped_into_open_interval(self):
        # Synthetic state with |Σc| > t + 2z + 2 exercises the clamp.
        state = BettorState(t=0, sum_c=100.0, sum_csq=0.0)
        beta = next_fraction(conj_power_config(0.0), state)
        assert beta == 1.0 - 1e-12
        state = BettorState(t=0, sum_c=-100.0, sum_csq=0.0)
        assert next_fraction(conj_power_config(0.0), state) == -1.0 + 1e-12

    def test_mixture_fraction_inside_support(self):
        cfg = default_mixture_config(5)
        lo, hi = cfg.prior.support
        rng = np.random.default_rng(3)
        state = BettorState()
        for c in rng.uniform(-1.0, 1.0, size=50):
            beta = next_fraction(cfg, state)
            assert lo <= beta <= hi
            state = observe(cfg, state, float(c))

    def test_mixture_sign_follows_coin_sum(self):
        cfg = default_mixture_config(10)
        up = next_fraction(cfg, BettorState(t=3, sum_c=2.0, sum_csq=3.0))
        down = next_fraction(cfg, BettorState(t=3, sum_c=-2.0, sum_csq=3.0))
        assert up > 0.0
        assert down < 0.0
        assert up == -down  # even prior: posterior mean is odd in Σc

    def test_variance_mode_more_aggressive_when_variance_small(self):
        prior = priors.truncated_gaussian(0.05)
        state = BettorState(t=10, sum_c=3.0, sum_csq=2.5)
        var_cfg = BettorConfig(
            family=MIXTURE_QUADRATURE, prior=prior, exponent_mode=VARIANCE
        )
        rc_cfg = BettorConfig(
            family=MIXTURE_QUADRATURE, prior=prior, exponent_mode=ROUND_COUNT
        )
        assert next_fraction(var_cfg, state) > next_fraction(rc_cfg, state) > 0.0


class TestObserve:
    def test_single_round_arithmetic(self):
        cfg = conj_power_config(0.0)
        s1 = observe(cfg, BettorState(), 1.0)
        assert s1.t == 1
        assert s1.sum_c == 1.0
        assert s1.sum_csq == 1.0
        assert s1.log_wealth == 0.0  # first bet is always 0
        s2 = observe(cfg, s1, 1.0)
        # β₂ = 1/3 on c = +1: wealth multiplies by 4/3.
        assert s2.log_wealth == pytest.approx(math.log1p(1.0 / 3.0), rel=1e-15)
        assert s2.sum_c == 2.0

    def test_rejects_out_of_range_coins(self):
        cfg = conj_power_config(0.0)
        for bad in (1.5, -1.0001, math.nan, math.inf):
            with pytest.raises(ValueError):
                observe(cfg, BettorState(), bad)

    def test_state_is_immutable(self):
        state = BettorState()
        observe(conj_power_config(0.0), state, 0.5)
        assert state.t == 0 and state.log_wealth == 0.0


class TestRun:
    def test_empty_sequence(self):
        for cfg in (conj_power_config(1.0), default_mixture_config(4)):
            traj = run(cfg, [])
            assert len(traj) == 0
            assert traj.final_state.t == 0
            assert traj.final_state.log_wealth == 0.0

    def test_input_validation(self):
        with pytest.raises(ValueError):
            run(conj_power_config(0.0), [0.5, 1.2])
        with pytest.raises(ValueError):
            run(conj_power_config(0.0), [[0.5], [0.2]])
        with pytest.raises(ValueError):
            run(default_mixture_config(2), [0.1, math.nan])

    def test_trajectory_shapes_and_margin(self):
        traj = run(default_mixture_config(6), [0.5, -0.25, 1.0, 0.0, -1.0, 0.125])
        assert len(traj) == 6
        for arr in (traj.beta, traj.coin, traj.log_wealth, traj.log_potential):
            assert arr.shape == (6,)
        np.testing.assert_array_equal(
            traj.dominance_margin, traj.log_wealth - traj.log_potential
        )
        assert traj.final_state.t == 6
        assert traj.final_state.log_wealth == traj.log_wealth[-1]

    def test_wealth_recomputes_from_betas(self):
        rng = np.random.default_rng(11)
        coins = rng.uniform(-1.0, 1.0, size=60)
        traj = run(default_mixture_config(60), coins)
        rebuilt = np.cumsum(np.log1p(traj.beta * coins))
        np.testing.assert_allclose(traj.log_wealth, rebuilt, rtol=0, atol=1e-12)


class TestConjPowerOnBinaryCoins:
    @pytest.mark.parametrize("z", [0.0, 0.5, 2.0])
    def test_wealth_equals_gamma_form_exhaustively(self, z):
        # Every binary sequence up to T = 8: realized wealth is the closed
        # form at the running (heads, tails) count, at every round.
        cfg = conj_power_config(z)
        for T in range(1, 9):
            for seq in binary_sequences(T):
                traj = run(cfg, seq)
                np.testing.assert_allclose(
                    traj.log_wealth, traj.log_potential, rtol=0, atol=1e-12
                )

    def test_path_independence(self):
        rng = np.random.default_rng(5)
        base = np.array([1.0] * 7 + [-1.0] * 5)
        cfg = conj_power_config(1.5)
        reference = run(cfg, base).final_state.log_wealth
        for _ in range(20):
            perm = rng.permutation(base)
            assert run(cfg, perm).final_state.log_wealth == pytest.approx(
                reference, rel=1e-12
            )

    def test_two_round_hand_value(self):
        traj = run(conj_power_config(0.0), [1.0, 1.0])
        assert traj.log_wealth[-1] == pytest.approx(math.log(4.0 / 3.0), rel=1e-14)


class TestConjPowerOnContinuousCoins:
    @pytest.mark.parametrize("z", [10.0, 50.0])
    def test_dominance_margin_nonnegative(self, z):
        # On non-binary coins equality becomes an inequality: realized
        # wealth stays above the closed form at (a, b) = ((t ± Σc)/2).
        cfg = conj_power_config(z)
        for seed in range(8):
            rng = np.random.default_rng(900 + seed)
            coins = rng.uniform(-1.0, 1.0, size=100)
            traj = run(cfg, coins)
            assert float(traj.dominance_margin.min()) >= -1e-9


class TestMixtureDominance:
    @pytest.mark.parametrize("mode", [ROUND_COUNT, VARIANCE])
    def test_log_wealth_dominates_potential(self, mode):
        T = 200
        cfg = default_mixture_config(T, exponent_mode=mode)
        for seed in range(20):
            rng = np.random.default_rng(1234 + seed)
            coins = rng.uniform(-1.0, 1.0, size=T)
            traj = run(cfg, coins)
            assert float(traj.dominance_margin.min()) >= -1e-9

    def test_round_count_potential_matches_closed_form(self):
        # The kernel's integral minus the prior normalizer is the erf form.
        T = 120
        cfg = default_mixture_config(T)
        rng = np.random.default_rng(77)
        coins = rng.uniform(-1.0, 1.0, size=T)
        traj = run(cfg, coins)
        csum = np.cumsum(coins)
        for t in range(T):
            closed = potentials.trunc_gauss_log_potential_closed(
                float(csum[t]), float(t + 1), 0.5 / T
            )
            assert traj.log_potential[t] == pytest.approx(closed, rel=1e-10, abs=1e-10)

    def test_binary_coins_make_modes_agree(self):
        # c² = 1 every round, so Σc² and t coincide and so do the bettors.
        rng = np.random.default_rng(42)
        coins = rng.choice([-1.0, 1.0], size=64)
        rc = run(default_mixture_config(64, ROUND_COUNT), coins)
        var = run(default_mixture_config(64, VARIANCE), coins)
        np.testing.assert_array_equal(rc.beta, var.beta)
        np.testing.assert_array_equal(rc.log_wealth, var.log_wealth)


class TestKernelAgainstFold:
    def test_kernel_path_matches_generic_fold(self):
        T = 50
        cfg = default_mixture_config(T)
        rng = np.random.default_rng(2718)
        coins = rng.uniform(-1.0, 1.0, size=T)
        fast = run(cfg, coins)
        slow = betting._run_fold(cfg, np.asarray(coins))
        np.testing.assert_array_equal(fast.beta, slow.beta)
        np.testing.assert_array_equal(fast.log_wealth, slow.log_wealth)
        np.testing.assert_allclose(
            fast.log_potential, slow.log_potential, rtol=0, atol=1e-12
        )

    def test_conj_prior_uses_adaptive_path(self):
        # Non-Gaussian mixture priors run through signed_moment_ratio.
        cfg = BettorConfig(
            family=MIXTURE_QUADRATURE,
            prior=priors.conjugate_power(2.0),
            exponent_mode=VARIANCE,
        )
        traj = run(cfg, [0.5, 0.5, -0.25, 1.0])
        assert len(traj) == 4
        assert np.isfinite(traj.log_wealth).all()
        assert np.all(np.abs(traj.beta) <= 1.0)


class TestDoublingWrap:
    def _factory(self, T):
        return default_mixture_config(T)

    def test_epoch_structure(self):
        T = 100
        rng = np.random.default_rng(9)
        coins = rng.uniform(-1.0, 1.0, size=T)
        traj = doubling_wrap(self._factory, coins)
        assert len(traj) == T
        epochs = traj.epochs
        assert [e.k for e in epochs] == list(range(len(epochs)))
        assert [e.nominal_length for e in epochs] == [1 << e.k for e in epochs]
        assert sum(e.length for e in epochs) == T
        starts = [e.start for e in epochs]
        assert starts == [sum(e.nominal_length for e in epochs[:i]) for i in range(len(epochs))]
        # only the last epoch may be cut short
        for e in epochs[:-1]:
            assert e.length == e.nominal_length
        assert epochs[-1].length <= epochs[-1].nominal_length

    def test_epoch_floor_uses_nominal_length(self):
        coins = np.full(10, 0.5)
        traj = doubling_wrap(self._factory, coins)
        for e in traj.epochs:
            assert e.floor_log == potentials.wealth_floor_log(e.sum_c, e.nominal_length)

    def test_wealth_restarts_each_epoch(self):
        rng = np.random.default_rng(31)
        coins = rng.uniform(-1.0, 1.0, size=31)  # epochs 1+2+4+8+16, none cut
        traj = doubling_wrap(self._factory, coins)
        for e in traj.epochs:
            # a fresh even-prior bettor stakes 0 on its first round
            assert traj.log_wealth[e.start] == 0.0
        assert traj.epochs[-1].final_log_wealth == traj.log_wealth[-1]

    def test_epoch_wealth_meets_floor(self):
        for seed in range(10):
            rng = np.random.default_rng(400 + seed)
            coins = rng.uniform(-1.0, 1.0, size=100)
            traj = doubling_wrap(self._factory, coins)
            for e in traj.epochs:
                assert e.final_log_wealth >= e.floor_log - 1e-9

    def test_empty_input(self):
        traj = doubling_wrap(self._factory, [])
        assert len(traj) == 0
        assert traj.epochs == ()

    def test_works_with_conj_power_factory(self):
        traj = doubling_wrap(lambda T: conj_power_config(0.5), [1.0, -1.0, 1.0, 1.0, -1.0])
        assert len(traj) == 5
        assert len(traj.epochs) == 3
