"""Exact threshold-class information, risk, and channel capacity."""

import itertools
import math

import numpy as np
import pytest

from erlab.thresholds import (
    DiscreteChannel,
    ThresholdClassSpec,
    blahut_arimoto,
    enumerate_version_states,
    exact_bayes_excess,
    exact_cmi_test,
    exact_cmi_yn,
    growth_count,
    labels_for,
    sauer_bound,
    threshold_channel,
)

# exact_cmi_yn for k = 3, uniform px and prior, frozen from a direct
# enumeration of P(y^n | x^n) entropies (independent script)
CMI_YN_K3 = {1: 0.6059391565991873, 2: 0.8951268994263408, 3: 1.0685391670976085}
# binary symmetric channel, flip 0.1: capacity = log 2 - H_b(0.1)
BSC_CAPACITY = 0.3680642071684971


def uniform_spec(k=3):
    return ThresholdClassSpec(
        k=k, px=np.full(k, 1.0 / k), prior_t=np.full(k + 1, 1.0 / (k + 1))
    )


def skewed_spec():
    return ThresholdClassSpec(
        k=3,
        px=np.array([0.5, 0.3, 0.2]),
        prior_t=np.array([0.1, 0.4, 0.2, 0.3]),
    )


class TestGrowthFunction:
    def test_distinct_points_give_m_plus_one(self):
        spec = uniform_spec(5)
        for pts in ([1], [1, 2], [2, 4], [1, 3, 5]):
            assert growth_count(spec, pts) == len(pts) + 1

    def test_repeated_points_collapse(self):
        spec = uniform_spec(5)
        assert growth_count(spec, [2, 2, 2]) == 2

    def test_labels_are_step_functions(self):
        spec = uniform_spec(4)
        np.testing.assert_array_equal(labels_for(spec, 3, np.array([1, 2, 3, 4])), [0, 0, 1, 1])
        np.testing.assert_array_equal(labels_for(spec, 5, np.array([1, 2, 3, 4])), [0, 0, 0, 0])


class TestSauerRate:
    def test_fixtures(self):
        assert sauer_bound(1, 1) == 1.0
        np.testing.assert_allclose(sauer_bound(1, 10), (1 + math.log(10)) / 10, rtol=1e-15)
        np.testing.assert_allclose(sauer_bound(2, 10), (1 + 2 * math.log(10)) / 10, rtol=1e-15)

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            sauer_bound(0, 5)
        with pytest.raises(ValueError):
            sauer_bound(1, 0)


class TestExactLabelInformation:
    def test_frozen_uniform_fixtures(self):
        spec = uniform_spec()
        for n, expect in CMI_YN_K3.items():
            np.testing.assert_allclose(exact_cmi_yn(spec, n), expect, rtol=1e-12)

    def test_zero_at_n_zero(self):
        assert exact_cmi_yn(uniform_spec(), 0) == 0.0

    def test_single_point_is_label_entropy(self):
        # n = 1: I(T; Y | X) = E_x H_b(P(h_T(x) = 1))
        spec = skewed_spec()
        oracle = 0.0
        for x, p_x in enumerate(spec.px, start=1):
            q = float(sum(spec.prior_t[t - 1] for t in range(1, spec.k + 2) if x >= t))
            h = 0.0 if q in (0.0, 1.0) else -q * math.log(q) - (1 - q) * math.log(1 - q)
            oracle += p_x * h
        np.testing.assert_allclose(exact_cmi_yn(spec, 1), oracle, rtol=1e-12)

    def test_brute_force_oracle_small(self):
        # independent route: entropy of the y^n distribution per x^n sequence
        spec = skewed_spec()
        n = 2
        oracle = 0.0
        for xs in itertools.product(range(1, 4), repeat=n):
            p_xs = float(np.prod([spec.px[x - 1] for x in xs]))
            mass = {}
            for t in range(1, spec.k + 2):
                key = tuple(labels_for(spec, t, np.array(xs)))
                mass[key] = mass.get(key, 0.0) + float(spec.prior_t[t - 1])
            oracle += p_xs * -sum(m * math.log(m) for m in mass.values() if m > 0)
        np.testing.assert_allclose(exact_cmi_yn(spec, n), oracle, rtol=1e-12)

    def test_monotone_and_concave_in_n(self):
        spec = uniform_spec()
        vals = [exact_cmi_yn(spec, n) for n in range(0, 6)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))
        diffs = np.diff(vals)
        assert np.all(np.diff(diffs) <= 1e-12)


class TestChainIdentity:
    def test_cmi_test_equals_information_increment(self):
        for spec in (uniform_spec(), skewed_spec(), uniform_spec(2)):
            for n in (1, 2, 3):
                lhs = exact_cmi_test(spec, n)
                rhs = exact_cmi_yn(spec, n + 1) - exact_cmi_yn(spec, n)
                np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_three_term_chain(self):
        # cmi_test(n) <= cmi_yn(n)/n <= sauer rate, all n >= 1
        spec = uniform_spec()
        for n in (1, 2, 3, 4):
            cmi_t = exact_cmi_test(spec, n)
            per_sample = exact_cmi_yn(spec, n) / n
            assert cmi_t <= per_sample + 1e-12
            assert per_sample <= sauer_bound(1, n) + 1e-12

    def test_four_term_chain_from_two(self):
        # ...and cmi_test(n) <= cmi_yn(n+1)/(n+1) joins the chain once n >= 2
        spec = uniform_spec()
        for n in (2, 3, 4):
            assert exact_cmi_test(spec, n) <= exact_cmi_yn(spec, n + 1) / (n + 1) + 1e-12


class TestExactRisk:
    def test_bayes_optimal_dominates_posterior_sampling(self):
        for spec in (uniform_spec(), skewed_spec()):
            for n in (1, 2, 3):
                bo = exact_bayes_excess(spec, n, "bayes_optimal")
                ps = exact_bayes_excess(spec, n, "posterior_sampling")
                assert 0.0 <= bo <= ps + 1e-15

    def test_posterior_sampling_brute_force_oracle(self):
        # oracle: E[2 q (1 - q)] summed over x^n, version interval, and test x
        spec = skewed_spec()
        n = 2
        oracle = 0.0
        for xs in itertools.product(range(1, 4), repeat=n):
            p_xs = float(np.prod([spec.px[x - 1] for x in xs]))
            mass = {}
            for t in range(1, spec.k + 2):
                key = tuple(labels_for(spec, t, np.array(xs)))
                mass.setdefault(key, []).append(t)
            for ts in mass.values():
                m = float(sum(spec.prior_t[t - 1] for t in ts))
                if m == 0.0:
                    continue
                for x in range(1, 4):
                    q = sum(spec.prior_t[t - 1] for t in ts if x >= t) / m
                    oracle += p_xs * m * float(spec.px[x - 1]) * 2.0 * q * (1.0 - q)
        np.testing.assert_allclose(
            exact_bayes_excess(spec, n, "posterior_sampling"), oracle, rtol=1e-12
        )

    def test_risk_bounded_by_label_information(self):
        # 2q(1-q) <= 3 H_b(q) pointwise lifts to ps <= 3 * cmi_test
        for spec in (uniform_spec(), skewed_spec()):
            for n in (1, 2, 3):
                ps = exact_bayes_excess(spec, n, "posterior_sampling")
                assert ps <= 3.0 * exact_cmi_test(spec, n) + 1e-12

    def test_pointwise_quadratic_entropy_inequality(self):
        qs = np.linspace(0.0, 1.0, 1001)
        with np.errstate(divide="ignore", invalid="ignore"):
            hb = -(qs * np.log(qs) + (1 - qs) * np.log(1 - qs))
        hb = np.nan_to_num(hb)
        assert np.all(2 * qs * (1 - qs) <= 3 * hb + 1e-12)

    def test_mismatched_sampling_prior_is_worse(self):
        spec = skewed_spec()
        uniform_prior = np.full(4, 0.25)
        matched = exact_bayes_excess(spec, 2, "posterior_sampling")
        mismatched = exact_bayes_excess(spec, 2, "posterior_sampling", prior0=uniform_prior)
        assert matched <= mismatched + 1e-12


class TestVersionStates:
    def test_states_partition_probability(self):
        for spec in (uniform_spec(), skewed_spec()):
            states = enumerate_version_states(spec, 2)
            total = sum(
                st.prob_xn * float(spec.prior_t[st.lo - 1 : st.hi].sum()) for st in states
            )
            np.testing.assert_allclose(total, 1.0, rtol=1e-12)

    def test_enumeration_guard(self):
        spec = uniform_spec(8)
        with pytest.raises(ValueError, match="guard"):
            enumerate_version_states(spec, 12)


class TestBlahutArimoto:
    def test_identity_channel_capacity(self):
        chan = DiscreteChannel(np.eye(3))
        res = blahut_arimoto(chan, 1e-9)
        np.testing.assert_allclose(res.capacity, math.log(3.0), atol=1e-8)
        np.testing.assert_allclose(res.prior, np.full(3, 1 / 3), atol=1e-6)

    def test_binary_symmetric_channel(self):
        chan = DiscreteChannel([[0.9, 0.1], [0.1, 0.9]])
        res = blahut_arimoto(chan, 1e-8)
        np.testing.assert_allclose(res.capacity, BSC_CAPACITY, atol=1e-5)
        closed = math.log(2.0) + 0.1 * math.log(0.1) + 0.9 * math.log(0.9)
        np.testing.assert_allclose(BSC_CAPACITY, closed, rtol=1e-14)

    def test_bracket_certifies(self):
        res = blahut_arimoto(threshold_channel(uniform_spec(), 2), 1e-7)
        assert res.lower <= res.upper
        assert res.upper - res.lower <= 1e-7
        assert res.capacity == res.lower

    def test_useless_channel_has_zero_capacity(self):
        chan = DiscreteChannel([[0.5, 0.5], [0.5, 0.5]])
        res = blahut_arimoto(chan, 1e-9)
        assert abs(res.capacity) <= 1e-9

    def test_capacity_dominates_generating_prior(self):
        spec = skewed_spec()
        for n in (1, 2):
            res = blahut_arimoto(threshold_channel(spec, n), 1e-8)
            assert res.upper >= exact_cmi_yn(spec, n) - 1e-9

    def test_rejects_non_stochastic(self):
        with pytest.raises(ValueError):
            DiscreteChannel([[0.6, 0.6], [0.5, 0.5]])

    def test_threshold_channel_rows_sum_to_one(self):
        chan = threshold_channel(uniform_spec(), 2)
        np.testing.assert_allclose(np.asarray(chan.matrix).sum(axis=1), 1.0, rtol=1e-12)


class TestSpecValidation:
    def test_rejects_bad_simplex(self):
        with pytest.raises(ValueError):
            ThresholdClassSpec(k=2, px=np.array([0.6, 0.6]), prior_t=np.full(3, 1 / 3))

    def test_rejects_wrong_lengths(self):
        with pytest.raises(ValueError):
            ThresholdClassSpec(k=2, px=np.full(3, 1 / 3), prior_t=np.full(3, 1 / 3))
