"""Acceptance gate: one test per criterion, at the stated tolerances.

Each test prints a single pass/fail line (pytest -v adds its own) and
asserts both the numerical criterion and its runtime limit.  Tolerances
and instance grids are pinned here and must not be loosened.
"""

import json
import math
import time

import numpy as np

from erlab.cli import main
from erlab.envelopes import (
    GaussianMeanBall,
    bound_thm10,
    legendre_dual,
    legendre_dual_inverse,
    legendre_dual_numeric,
    model_envelope,
)
from erlab.games import (
    PayoffMatrix,
    build_payoff,
    duality_gap_pure,
    solve_fictitious_play,
    solve_lp,
    threshold_minimax_game,
)
from erlab.gaussians import Gaussian
from erlab.linear_model import (
    GaussianInput,
    IdentityFeatures,
    LinearModelSpec,
    MonomialFeatures,
    UniformBoxInput,
    generate,
    mi_w_zn,
    posterior,
)
from erlab.rates import fit_rate, lemma2_residual, lower_rate_bound
from erlab.risk import (
    AlgorithmSpec,
    bayes_excess_risk_mc,
    envelope_check,
    paired_bayes_excess_mc,
)
from erlab.seeding import SeedSpec
from erlab.thresholds import (
    DiscreteChannel,
    ThresholdClassSpec,
    blahut_arimoto,
    exact_bayes_excess,
    exact_cmi_test,
    exact_cmi_yn,
    sauer_bound,
)


class _Stopwatch:
    def __init__(self, label, limit_s):
        self.label = label
        self.limit_s = limit_s

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        status = "FAIL" if exc_type else "PASS"
        print(f"{status} {self.label} ({elapsed:.1f}s, limit {self.limit_s}s)", flush=True)
        if exc_type is None:
            assert elapsed < self.limit_s, f"{self.label} exceeded {self.limit_s}s: {elapsed:.1f}s"
        return False


def scalar_model(mu=0.0, c=1.0):
    return LinearModelSpec(
        MonomialFeatures(0),
        1.0,
        1.0,
        np.array([mu]),
        c,
        GaussianInput(Gaussian(np.zeros(1), np.eye(1))),
    )


def test_criterion_01_conjugacy_oracle():
    # posterior mean == ridge minimizer to 1e-10 on 200 random instances
    with _Stopwatch("criterion 1: conjugacy oracle", 10):
        rng = np.random.default_rng(1001)
        for trial in range(200):
            d = int(rng.integers(1, 9))
            n = int(rng.integers(1, 65))
            sw = float(rng.uniform(0.3, 2.0))
            se = float(rng.uniform(0.3, 2.0))
            c = float(rng.uniform(0.0, 2.0))
            mu = rng.normal(size=d)
            norm = np.linalg.norm(mu)
            if norm > 0:
                mu *= rng.uniform(0.0, c) / norm
            spec = LinearModelSpec(
                IdentityFeatures(d),
                sw,
                se,
                mu,
                c,
                GaussianInput(Gaussian(np.zeros(d), np.eye(d))),
            )
            data = generate(spec, rng.normal(size=d), n, SeedSpec(2000 + trial))
            lam = spec.lam
            stacked = np.vstack([data.phi, math.sqrt(lam) * np.eye(d)])
            rhs = np.concatenate([data.ys, math.sqrt(lam) * mu])
            ridge, *_ = np.linalg.lstsq(stacked, rhs, rcond=None)
            np.testing.assert_allclose(posterior(spec, data).mean, ridge, atol=1e-10)


def test_criterion_02_mi_oracle():
    # mi_w_zn with phi == 1, d = 1 matches 0.5 log(1 + n) within 3 se at 1e5 reps
    with _Stopwatch("criterion 2: MI gaussian-channel oracle", 30):
        spec = scalar_model()
        for n in (1, 4, 16):
            mi, se = mi_w_zn(spec, n, 100_000, SeedSpec(3000 + n), workers=4)
            assert abs(mi - 0.5 * math.log1p(float(n))) <= 3 * se


def test_criterion_03_legendre_fixtures():
    # piecewise conjugate/inverse vs numeric to 1e-8 over 1000 random triples,
    # branch continuity phi*(1) = 1/(64 sw^2 + 32 se^2)
    with _Stopwatch("criterion 3: Legendre fixtures", 5):
        rng = np.random.default_rng(1003)
        for _ in range(1000):
            sw = float(rng.uniform(0.2, 3.0))
            se = float(rng.uniform(0.2, 3.0))
            gamma = float(rng.uniform(0.0, 3.0))
            env = model_envelope(sw, se)
            closed = legendre_dual(env, gamma)
            numeric = legendre_dual_numeric(env, gamma)
            assert abs(closed - numeric) <= 1e-8
            assert legendre_dual_inverse(env, closed) >= gamma - 1e-8
        for sw, se in ((1.0, 1.0), (0.5, 2.0), (2.0, 0.3)):
            env = model_envelope(sw, se)
            q = 16.0 * sw**2 + 8.0 * se**2
            knee_value = 1.0 / (64.0 * sw**2 + 32.0 * se**2)
            # both branch formulas at the knee gamma = 1
            below = 1.0 / (4.0 * q)
            above = env.b * 1.0 - q * env.b**2
            assert abs(legendre_dual(env, 1.0) - knee_value) <= 1e-12
            assert abs(below - knee_value) <= 1e-12
            assert abs(above - knee_value) <= 1e-12


def test_criterion_04_envelope_validity():
    # 0 violations over 50 pairs, 8 lambda points, 1e6 draws per cell
    with _Stopwatch("criterion 4: envelope validity", 300):
        report = envelope_check(
            scalar_model(),
            n_pairs=50,
            data_sizes=(1, 2, 4, 8),
            lam_points=8,
            draws=1_000_000,
            seed=SeedSpec(1004),
        )
        assert len(report.rows) == 50 * 8
        assert report.violations == 0


def test_criterion_05_thm10_bound_chain():
    # MC Bayes excess of posterior sampling <= thm10 + 3 se on the full grid,
    # and rls <= ps within 3 paired se
    with _Stopwatch("criterion 5: thm10 bound chain", 600):
        c = 1.0
        for d in (1, 4):
            if d == 1:
                features = MonomialFeatures(0)
                inputs = GaussianInput(Gaussian(np.zeros(1), np.eye(1)))
            else:
                features = IdentityFeatures(4)
                # inputs in [-1/2, 1/2]^4 keep ||phi|| <= 1
                inputs = UniformBoxInput(np.full(4, -0.5), np.full(4, 0.5))
            for mu_scale in (0.0, 0.5, 1.0):
                mu = np.zeros(d)
                mu[0] = mu_scale * c
                spec = LinearModelSpec(features, 1.0, 1.0, mu, c, inputs)
                env = model_envelope(1.0, 1.0)
                ball = GaussianMeanBall(c, 1.0)
                for n in (16, 256):
                    tag = f"d={d} mu={mu_scale} n={n}"
                    algs = [
                        AlgorithmSpec("rls", spec, label="rls"),
                        AlgorithmSpec("posterior_sampling", spec, label="ps"),
                    ]
                    ests, pairs = paired_bayes_excess_mc(
                        algs, None, n, 20_000, SeedSpec(1005, 16 * d + n), workers=4
                    )
                    rls_est, ps_est = ests
                    mi, _ = mi_w_zn(spec, n, 10_000, SeedSpec(1006, 16 * d + n), workers=4)
                    bound = bound_thm10(env, ball, mi, n).value
                    assert ps_est.mean <= bound + 3 * ps_est.std_error, tag
                    diff = pairs[(0, 1)]
                    assert diff.mean <= 3 * diff.std_error, tag


def test_criterion_06_exact_vc_chain():
    # cmi_test <= cmi_yn/n <= sauer rate and ps <= 3 cmi_test, exactly,
    # for every k <= 5, n <= 5
    with _Stopwatch("criterion 6: exact vc chain", 120):
        for k in range(1, 6):
            spec = ThresholdClassSpec(
                k=k, px=np.full(k, 1.0 / k), prior_t=np.full(k + 1, 1.0 / (k + 1))
            )
            for n in range(1, 6):
                cmi_t = exact_cmi_test(spec, n)
                per_sample = exact_cmi_yn(spec, n) / n
                assert cmi_t <= per_sample + 1e-12, (k, n)
                assert per_sample <= sauer_bound(1, n) + 1e-12, (k, n)
                ps = exact_bayes_excess(spec, n, "posterior_sampling")
                assert ps <= 3.0 * cmi_t + 1e-12, (k, n)


def test_criterion_07_duality_at_finite_scale():
    # LP primal == dual to 1e-9, FP within its certificate, pure sandwich,
    # and the designer-second threshold game has pure maximin exactly 0
    with _Stopwatch("criterion 7: finite-scale duality", 60):
        pennies = PayoffMatrix(("h", "t"), ("H", "T"), np.array([[1.0, -1.0], [-1.0, 1.0]]))
        rps = PayoffMatrix(
            ("r", "p", "s"),
            ("R", "P", "S"),
            np.array([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]]),
        )
        worked = PayoffMatrix(("a", "b"), ("c", "d"), np.array([[3.0, 1.0], [0.0, 2.0]]))
        fixtures = [(pennies, 0.0), (rps, 0.0), (worked, 1.5)]
        rng = np.random.default_rng(1007)
        games = [(m, None) for m in (
            PayoffMatrix(
                tuple(f"r{i}" for i in range(8)),
                tuple(f"c{j}" for j in range(8)),
                rng.normal(size=(8, 8)),
            )
            for _ in range(50)
        )]
        for game, expected in fixtures + games:
            sol = solve_lp(game)
            assert abs(sol.value - sol.dual_value) <= 1e-9
            if expected is not None:
                assert abs(sol.value - expected) <= 1e-9
            fp = solve_fictitious_play(game, iterations=2000)
            assert abs(fp.value - sol.value) <= fp.gap + 1e-12
            pure = duality_gap_pure(game)
            assert pure.maximin - 1e-9 <= sol.value <= pure.minimax + 1e-9

        spec = ThresholdClassSpec(
            k=3, px=np.full(3, 1.0 / 3.0), prior_t=np.full(4, 0.25)
        )
        algs = [
            AlgorithmSpec("constant", spec, const_t=t, label=f"h_{t}")
            for t in range(1, spec.k + 2)
        ]
        payoff = build_payoff(spec, algs, list(range(1, spec.k + 2)), 2, mode="exact")
        assert duality_gap_pure(payoff).maximin == 0.0


def test_criterion_08_capacity_route():
    # threshold game value <= 3 kappa_n / n with kappa_n from blahut_arimoto
    # at tol 1e-6, exact entries, k <= 4, n <= 4; plus the BSC fixture
    with _Stopwatch("criterion 8: capacity route", 120):
        from erlab.thresholds import threshold_channel

        for k in range(1, 5):
            spec = ThresholdClassSpec(
                k=k, px=np.full(k, 1.0 / k), prior_t=np.full(k + 1, 1.0 / (k + 1))
            )
            for n in range(1, 5):
                game = threshold_minimax_game(spec, n)
                cap = blahut_arimoto(threshold_channel(spec, n), 1e-6)
                assert game.value <= 3.0 * cap.capacity / n + 1e-9, (k, n)
        bsc = blahut_arimoto(DiscreteChannel([[0.9, 0.1], [0.1, 0.9]]), 1e-6)
        closed = math.log(2.0) + 0.1 * math.log(0.1) + 0.9 * math.log(0.9)
        assert abs(bsc.capacity - closed) <= 1e-5


def test_criterion_09_lemma2_residual():
    # residual curve to 1e-12, < 0.01 by n = 100, synthetic slopes to 1e-10,
    # lower rate fixture and one-sided MC comparison
    with _Stopwatch("criterion 9: residual and rates", 60):
        ns = np.array([1, 2, 5, 10, 50, 100, 1000])
        got = lemma2_residual(1.0, 1.0, ns)
        np.testing.assert_allclose(got, 0.5 * np.log1p(1.0 / ns), atol=1e-12)
        assert lemma2_residual(1.0, 1.0, [100])[0] < 0.01
        grid = np.array([10.0, 20.0, 40.0, 80.0, 160.0])
        assert abs(fit_rate(grid, 2.0 / grid).slope + 1.0) <= 1e-10
        assert abs(fit_rate(grid, 2.0 / np.sqrt(grid)).slope + 0.5) <= 1e-10
        assert abs(lower_rate_bound(1, 0.0, 100) - 1.0 / (100.0 * math.pi)) <= 1e-15
        est = bayes_excess_risk_mc(
            AlgorithmSpec("rls", scalar_model()), None, 100, 20_000, SeedSpec(1009), workers=4
        )
        assert lower_rate_bound(1, 0.0, 100) <= est.mean + 3 * est.std_error


def test_criterion_10_determinism(tmp_path):
    # equal seeds give byte-identical results.csv under 1 and 8 workers
    with _Stopwatch("criterion 10: determinism", 120):
        base = {
            "experiment": "rls-bound",
            "seed": 77,
            "ns": [1, 4],
            "reps": 4000,
            "mi_reps": 4000,
        }
        outputs = []
        for tag, threads in (("w1", "1"), ("w1b", "1"), ("w8", "8")):
            cfg = dict(base, output_dir=str(tmp_path / tag))
            path = tmp_path / f"{tag}.json"
            path.write_text(json.dumps(cfg))
            assert main(["run", "--threads", threads, str(path)]) == 0
            outputs.append((tmp_path / tag / "results.csv").read_bytes())
        assert outputs[0] == outputs[1]
        assert outputs[0] == outputs[2]
