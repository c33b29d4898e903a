"""Expansion residuals, log-log slope fits, and the asymptotic lower rate."""

import math

import numpy as np
import pytest

from erlab.gaussians import Gaussian
from erlab.linear_model import GaussianInput, LinearModelSpec, MonomialFeatures
from erlab.rates import fit_rate, lemma2_residual, lower_rate_bound
from erlab.risk import AlgorithmSpec, bayes_excess_risk_mc
from erlab.seeding import SeedSpec

# residual(1) with sigma_w = sigma = 1 is 0.5 log 2; residual(100) frozen
RESIDUAL_N1 = 0.34657359027997264
RESIDUAL_N100 = 0.004975165426584046


class TestExpansionResidual:
    def test_frozen_values(self):
        np.testing.assert_allclose(lemma2_residual(1.0, 1.0, [1])[0], RESIDUAL_N1, atol=1e-12)
        np.testing.assert_allclose(
            lemma2_residual(1.0, 1.0, [100])[0], RESIDUAL_N100, atol=1e-12
        )

    def test_matches_closed_form(self):
        # the expansion terms must collapse to 0.5 log(1 + sigma^2/(n sigma_w^2))
        for sw, s in ((1.0, 1.0), (0.5, 2.0), (3.0, 0.7)):
            ns = np.array([1, 5, 50, 500])
            got = lemma2_residual(sw, s, ns)
            expect = 0.5 * np.log1p(s**2 / (ns * sw**2))
            np.testing.assert_allclose(got, expect, atol=1e-12)

    def test_decays_below_centipoint_by_n_100(self):
        assert lemma2_residual(1.0, 1.0, [100])[0] < 0.01

    def test_monotone_decreasing(self):
        vals = lemma2_residual(1.0, 1.0, [1, 2, 4, 8, 16, 32])
        assert np.all(np.diff(vals) < 0)


class TestRateFit:
    def test_recovers_synthetic_slopes(self):
        ns = np.array([10.0, 20.0, 40.0, 80.0, 160.0])
        for slope, scale in ((-1.0, 3.7), (-0.5, 0.9), (-2.0, 12.0)):
            fit = fit_rate(ns, scale * ns**slope)
            np.testing.assert_allclose(fit.slope, slope, atol=1e-10)
            np.testing.assert_allclose(fit.intercept, math.log(scale), atol=1e-10)
            np.testing.assert_allclose(fit.r_squared, 1.0, atol=1e-12)

    def test_noisy_series_keeps_r_squared_below_one(self):
        rng = np.random.default_rng(44)
        ns = np.array([8.0, 16.0, 32.0, 64.0, 128.0, 256.0])
        vals = 2.0 / ns * np.exp(rng.normal(0.0, 0.05, size=ns.size))
        fit = fit_rate(ns, vals)
        assert -1.2 <= fit.slope <= -0.8
        assert fit.r_squared < 1.0

    def test_rejects_nonpositive_or_short_input(self):
        with pytest.raises(ValueError):
            fit_rate([1.0], [2.0])
        with pytest.raises(ValueError):
            fit_rate([1.0, 2.0], [1.0, -1.0])


class TestLowerRate:
    def test_unit_fixture(self):
        np.testing.assert_allclose(
            lower_rate_bound(1, 0.0, 100), 1.0 / (100.0 * math.pi), rtol=1e-15
        )

    def test_fisher_term_shifts_the_constant(self):
        # exp(-(2/d) E log det J) with d = 1, E = log 4 scales by 1/16
        got = lower_rate_bound(1, math.log(4.0), 200)
        np.testing.assert_allclose(got, 1.0 / (16.0 * 200.0 * math.pi), rtol=1e-12)

    def test_scales_as_one_over_n(self):
        v1 = lower_rate_bound(2, 0.3, 100)
        v2 = lower_rate_bound(2, 0.3, 200)
        np.testing.assert_allclose(v1 / v2, 2.0, rtol=1e-12)


class TestRiskDecayInvariants:
    def model(self):
        return LinearModelSpec(
            MonomialFeatures(0),
            1.0,
            1.0,
            np.zeros(1),
            0.0,
            GaussianInput(Gaussian(np.zeros(1), np.eye(1))),
        )

    def test_posterior_sampling_decay_slope(self):
        # the ps Bayes excess is (sigma_e^2 + ...)/(n + lam) scaled; the
        # log-log slope over a dyadic grid must sit near -1
        model = self.model()
        ns = [16, 64, 256, 1024, 4096]
        means = []
        for i, n in enumerate(ns):
            est = bayes_excess_risk_mc(
                AlgorithmSpec("posterior_sampling", model), None, n, 3000, SeedSpec(60 + i)
            )
            means.append(est.mean)
        fit = fit_rate(ns, means)
        assert -1.1 <= fit.slope <= -0.4

    def test_lower_rate_below_bayes_optimal_risk(self):
        model = self.model()
        for n in (64, 256):
            est = bayes_excess_risk_mc(
                AlgorithmSpec("rls", model), None, n, 20_000, SeedSpec(70)
            )
            lower = lower_rate_bound(1, 0.0, n)
            assert lower <= est.mean + 3 * est.std_error
