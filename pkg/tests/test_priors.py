"""Prior families: construction, normalizers, densities."""

import dataclasses
import math

import numpy as np
import pytest

from coinbet import numerics, priors
from coinbet.priors import (
    PriorSpec,
    conj_power_log_normalizer,
    conjugate_power,
    log_density,
    trunc_gauss_log_normalizer,
    truncated_gaussian,
)


class TestPriorSpec:
    def test_conjugate_power_factory(self):
        p = conjugate_power(2.0)
        assert p.kind == priors.CONJ_POWER
        assert p.z == 2.0
        assert p.sigma_sq is None
        assert p.support == (-1.0, 1.0)

    def test_truncated_gaussian_factory(self):
        p = truncated_gaussian(0.25)
        assert p.kind == priors.TRUNC_GAUSSIAN
        assert p.sigma_sq == 0.25
        assert p.z is None
        assert p.support == (-0.5, 0.5)

    def test_z_zero_is_uniform_and_allowed(self):
        p = conjugate_power(0.0)
        assert p.log_normalizer() == pytest.approx(math.log(2.0), rel=1e-15)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="unknown prior kind"):
            PriorSpec(kind="cauchy", z=1.0)

    def test_mixed_parameters_rejected(self):
        with pytest.raises(ValueError):
            PriorSpec(kind=priors.CONJ_POWER, z=1.0, sigma_sq=0.1)
        with pytest.raises(ValueError):
            PriorSpec(kind=priors.TRUNC_GAUSSIAN, sigma_sq=0.1, z=1.0)

    def test_missing_parameter_rejected(self):
        with pytest.raises(ValueError):
            PriorSpec(kind=priors.CONJ_POWER)
        with pytest.raises(ValueError):
            PriorSpec(kind=priors.TRUNC_GAUSSIAN)

    @pytest.mark.parametrize("z", [-1.0, -1e-300, float("nan")])
    def test_bad_z_rejected(self, z):
        with pytest.raises(ValueError):
            conjugate_power(z)

    @pytest.mark.parametrize("sigma_sq", [0.0, -0.5, float("nan")])
    def test_bad_sigma_sq_rejected(self, sigma_sq):
        with pytest.raises(ValueError):
            truncated_gaussian(sigma_sq)

    def test_frozen(self):
        p = conjugate_power(1.0)
        with pytest.raises(dataclasses.FrozenInstanceError):
            p.z = 3.0


class TestConjPowerNormalizer:
    @pytest.mark.parametrize("z", [0, 0.5, 2, 10])
    def test_golden(self, golden, z):
        key = ("conj_power_log_normalizer", f"z={z}")
        assert conj_power_log_normalizer(float(z)) == pytest.approx(
            golden[key], rel=1e-14
        )

    def test_integer_z_exact_rationals(self):
        # ∫(1-β²)^z dβ over [-1,1] is 2^{2z+1} (z!)² / (2z+1)! for integer z.
        for z in range(0, 8):
            exact = 2.0 ** (2 * z + 1) * math.factorial(z) ** 2 / math.factorial(
                2 * z + 1
            )
            assert conj_power_log_normalizer(float(z)) == pytest.approx(
                math.log(exact), rel=1e-13
            )

    @pytest.mark.parametrize("z", [0.0, 0.5, 1.0, 5.0, 17.25])
    def test_matches_quadrature(self, z):
        def h(beta: float) -> float:
            if z == 0.0:
                return 0.0
            return z * (math.log1p(beta) + math.log1p(-beta))

        res = numerics.integrate_log(h, -1.0, 1.0)
        assert res.log_value == pytest.approx(
            conj_power_log_normalizer(z), rel=1e-10, abs=1e-10
        )

    def test_decreasing_in_z(self):
        # Larger z concentrates the prior, shrinking the unnormalized mass.
        values = [conj_power_log_normalizer(z) for z in np.linspace(0.0, 40.0, 81)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_rejects_negative_z(self):
        with pytest.raises(ValueError):
            conj_power_log_normalizer(-0.5)


class TestTruncGaussNormalizer:
    @pytest.mark.parametrize("sigma_sq", [0.25, 0.5, 0.005])
    def test_golden(self, golden, sigma_sq):
        key = ("trunc_gauss_log_normalizer", f"sigma_sq={sigma_sq}")
        assert trunc_gauss_log_normalizer(sigma_sq) == pytest.approx(
            golden[key], rel=1e-14
        )

    def test_wide_prior_mass_approaches_interval_length(self):
        # σ² → ∞ flattens the density to 1 on [-1/2, 1/2].
        assert trunc_gauss_log_normalizer(1e12) == pytest.approx(0.0, abs=1e-10)

    def test_narrow_prior_is_full_gaussian_mass(self):
        # Tiny σ leaves no tail outside the interval: mass → σ√(2π).
        sigma_sq = 1e-6
        expected = 0.5 * math.log(2.0 * math.pi * sigma_sq)
        assert trunc_gauss_log_normalizer(sigma_sq) == pytest.approx(expected, rel=1e-15)

    @pytest.mark.parametrize("sigma_sq", [0.01, 0.1, 0.5, 2.0])
    def test_matches_quadrature(self, sigma_sq):
        res = numerics.integrate_log(
            lambda b: -b * b / (2.0 * sigma_sq), -0.5, 0.5
        )
        assert res.log_value == pytest.approx(
            trunc_gauss_log_normalizer(sigma_sq), rel=1e-10
        )

    def test_consistent_with_generic_integral_golden(self, golden):
        # σ² = 1/2 makes the exponent exactly -β², the generic quadrature case.
        assert trunc_gauss_log_normalizer(0.5) == pytest.approx(
            golden[("integrate_log", "h=-b^2;[-1/2,1/2]")], rel=1e-13
        )

    def test_increasing_in_sigma_sq(self):
        values = [trunc_gauss_log_normalizer(s) for s in np.geomspace(1e-4, 10.0, 60)]
        assert all(a < b for a, b in zip(values, values[1:]))


class TestLogDensity:
    def test_golden_conjugate_power(self, golden):
        p = conjugate_power(2.0)
        assert log_density(p, 0.3) == pytest.approx(
            golden[("prior_log_density", "conj_z=2;beta=0.3")], rel=1e-14
        )

    def test_golden_truncated_gaussian(self, golden):
        p = truncated_gaussian(0.05)
        assert log_density(p, 0.2) == pytest.approx(
            golden[("prior_log_density", "trunc_sigma_sq=0.05;beta=0.2")], rel=1e-14
        )

    @pytest.mark.parametrize(
        "prior",
        [
            conjugate_power(0.0),
            conjugate_power(0.5),
            conjugate_power(5.0),
            truncated_gaussian(0.05),
            truncated_gaussian(1.0),
        ],
        ids=["conj0", "conj0.5", "conj5", "trunc0.05", "trunc1"],
    )
    def test_normalized(self, prior):
        lo, hi = prior.support
        res = numerics.integrate_log(lambda b: log_density(prior, b), lo, hi)
        assert res.log_value == pytest.approx(0.0, abs=1e-9)

    def test_even_bitwise(self):
        rng = np.random.default_rng(20240917)
        for prior in (conjugate_power(3.0), truncated_gaussian(0.2)):
            lo, hi = prior.support
            for b in rng.uniform(0.0, hi, size=200):
                b = float(b)
                assert log_density(prior, -b) == log_density(prior, b)

    def test_mode_at_zero(self):
        rng = np.random.default_rng(7)
        for prior in (conjugate_power(0.5), truncated_gaussian(0.03)):
            peak = log_density(prior, 0.0)
            lo, hi = prior.support
            for b in rng.uniform(lo, hi, size=100):
                if b != 0.0:
                    assert log_density(prior, float(b)) < peak

    def test_endpoints(self):
        assert log_density(conjugate_power(1.0), 1.0) == -math.inf
        assert log_density(conjugate_power(1.0), -1.0) == -math.inf
        # z = 0 has no endpoint zero; the uniform density is log(1/2) there.
        assert log_density(conjugate_power(0.0), 1.0) == pytest.approx(
            -math.log(2.0), rel=1e-15
        )
        assert math.isfinite(log_density(truncated_gaussian(0.1), 0.5))

    def test_outside_support_rejected(self):
        with pytest.raises(ValueError, match="outside support"):
            log_density(conjugate_power(1.0), 1.0001)
        with pytest.raises(ValueError, match="outside support"):
            log_density(truncated_gaussian(0.1), 0.51)

    @pytest.mark.parametrize("z", [0.5, 1.0, 5.0, 50.0])
    def test_gaussian_shape_lower_bound(self, z):
        """(1+β)^z (1-β)^z ≥ e^{-2zβ²} on |β| ≤ 1/2, with equality only at 0."""
        prior = conjugate_power(z)
        norm = prior.log_normalizer()
        for b in np.linspace(-0.5, 0.5, 2_000):  # even count: grid skips β = 0
            b = float(b)
            unnorm = log_density(prior, b) + norm
            assert unnorm > -2.0 * z * b * b

    def test_gaussian_shape_bound_tight_at_zero(self):
        prior = conjugate_power(3.0)
        assert log_density(prior, 0.0) + prior.log_normalizer() == 0.0
