"""Command line front end: validated JSON configs in, CSV/JSON reports out.

`erlab run config.json` executes one experiment and writes results.csv,
report.json, and config-echo.json into the configured output directory.
`erlab run --check` additionally asserts the experiment's invariants and
exits 3 if any fail; malformed configs exit 2 before anything is computed.
Strict validation: unknown keys are rejected, every value is type- and
range-checked, and the full schema is documented in docs/config.md.

Determinism contract: the same config and seed produce byte-identical
results.csv for any --threads value (the ERLAB_SEED environment variable,
when set, overrides the config seed).  Partial outputs are removed if a run
fails mid-write.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .envelopes import (
    GaussianMeanBall,
    bound_thm4,
    bound_thm5,
    bound_thm7,
    bound_thm10,
    model_envelope,
)
from .games import (
    build_payoff,
    duality_gap_pure,
    solve_fictitious_play,
    solve_lp,
    threshold_minimax_game,
)
from .gaussians import Gaussian
from .linear_model import (
    GaussianInput,
    IdentityFeatures,
    LinearModelSpec,
    MonomialFeatures,
    UniformBoxInput,
    cmi_y_given_xzn,
    mi_w_zn,
)
from .rates import fit_rate, lemma2_residual, lower_rate_bound
from .risk import AlgorithmSpec, bayes_excess_risk_mc, envelope_check, paired_bayes_excess_mc
from .seeding import SeedSpec
from .thresholds import (
    DiscreteChannel,
    ThresholdClassSpec,
    blahut_arimoto,
    exact_bayes_excess,
    exact_cmi_test,
    exact_cmi_yn,
    sauer_bound,
    threshold_channel,
)


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config validation

_REQUIRED = object()


def _check_bool_free_number(value, key):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")


def _pos_float(value, key):
    _check_bool_free_number(value, key)
    if value <= 0:
        raise ConfigError(f"{key}: must be positive")
    return float(value)


def _nonneg_float(value, key):
    _check_bool_free_number(value, key)
    if value < 0:
        raise ConfigError(f"{key}: must be non-negative")
    return float(value)


def _float_any(value, key):
    _check_bool_free_number(value, key)
    return float(value)


def _bounded_int(lo, hi):
    def check(value, key):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        if not (lo <= value <= hi):
            raise ConfigError(f"{key}: must be in [{lo}, {hi}]")
        return value

    return check


def _int_list(lo, hi):
    item = _bounded_int(lo, hi)

    def check(value, key):
        if not isinstance(value, list) or not value:
            raise ConfigError(f"{key}: expected a non-empty list of integers")
        return [item(v, key) for v in value]

    return check


def _string_choice(*choices):
    def check(value, key):
        if value not in choices:
            raise ConfigError(f"{key}: must be one of {sorted(choices)}")
        return value

    return check


def _simplex_or_uniform(length_key):
    def check(value, key):
        if value == "uniform":
            return value
        if not isinstance(value, list) or not value:
            raise ConfigError(f"{key}: expected 'uniform' or a list of probabilities")
        vec = []
        for v in value:
            _check_bool_free_number(v, key)
            if v < 0:
                raise ConfigError(f"{key}: probabilities must be non-negative")
            vec.append(float(v))
        if abs(sum(vec) - 1.0) > 1e-12:
            raise ConfigError(f"{key}: probabilities must sum to 1 within 1e-12")
        return vec

    return check


def _string(value, key):
    if not isinstance(value, str) or not value:
        raise ConfigError(f"{key}: expected a non-empty string")
    return value


_COMMON = {
    "experiment": (_string, _REQUIRED),
    "seed": (_bounded_int(0, 2**64 - 1), _REQUIRED),
    "output_dir": (_string, _REQUIRED),
}

_MODEL_FIELDS = {
    "feature_map": (_string_choice("identity", "monomial"), "monomial"),
    "d": (_bounded_int(1, 16), 1),
    "degree": (_bounded_int(0, 8), 0),
    "sigma_w": (_pos_float, 1.0),
    "sigma_e": (_pos_float, 1.0),
    "c": (_nonneg_float, 1.0),
    "input": (_string_choice("gaussian", "box"), "gaussian"),
    "box_low": (_float_any, -1.0),
    "box_high": (_float_any, 1.0),
}

_SCHEMAS = {
    "rls-bound": {
        **_MODEL_FIELDS,
        "mu_norm": (_nonneg_float, 0.0),
        "ns": (_int_list(1, 1 << 20), _REQUIRED),
        "reps": (_bounded_int(2, 100_000_000), 100_000),
        "mi_reps": (_bounded_int(2, 100_000_000), 20_000),
    },
    "game": {
        "sigma_w": (_pos_float, 1.0),
        "sigma_e": (_pos_float, 1.0),
        "c": (_pos_float, 1.0),
        "n": (_bounded_int(0, 1 << 20), 8),
        "grid_sizes": (_int_list(2, 1024), _REQUIRED),
        "mode": (_string_choice("exact", "mc"), "exact"),
        "reps": (_bounded_int(2, 100_000_000), 20_000),
        "fp_iterations": (_bounded_int(1, 10_000_000), 20_000),
    },
    "vc": {
        "k": (_bounded_int(1, 8), _REQUIRED),
        "px": (_simplex_or_uniform("k"), "uniform"),
        "prior_t": (_simplex_or_uniform("k"), "uniform"),
        "ns": (_int_list(1, 24), _REQUIRED),
        "ba_tol": (_pos_float, 1e-6),
    },
    "rates": {
        "sigma_w": (_pos_float, 1.0),
        "sigma": (_pos_float, 1.0),
        "ns": (_int_list(1, 1 << 20), _REQUIRED),
        "reps": (_bounded_int(2, 100_000_000), 100_000),
    },
    "capacity": {
        "k": (_bounded_int(1, 8), _REQUIRED),
        "px": (_simplex_or_uniform("k"), "uniform"),
        "prior_t": (_simplex_or_uniform("k"), "uniform"),
        "ns": (_int_list(1, 24), _REQUIRED),
        "ba_tol": (_pos_float, 1e-6),
    },
    "envelope": {
        **_MODEL_FIELDS,
        "pairs": (_bounded_int(1, 10_000), 50),
        "data_sizes": (_int_list(0, 1 << 16), [1, 2, 4, 8]),
        "lambda_points": (_bounded_int(1, 64), 8),
        "draws": (_bounded_int(50, 1_000_000_000), 1_000_000),
    },
}


def validate_config(raw: dict) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    if "experiment" not in raw:
        raise ConfigError("missing required key 'experiment'")
    name = raw["experiment"]
    if name not in _SCHEMAS:
        raise ConfigError(f"experiment: must be one of {sorted(_SCHEMAS)}")
    schema = {**_COMMON, **_SCHEMAS[name]}
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(unknown)}")
    cfg = {}
    for key, (validator, default) in schema.items():
        if key in raw:
            cfg[key] = validator(raw[key], key)
        elif default is _REQUIRED:
            raise ConfigError(f"missing required key '{key}'")
        else:
            cfg[key] = default
    _cross_validate(name, cfg)
    return cfg


def _cross_validate(name: str, cfg: dict) -> None:
    if name in ("rls-bound", "envelope"):
        if cfg["input"] == "box" and cfg["box_low"] >= cfg["box_high"]:
            raise ConfigError("box_low must be strictly below box_high")
    if name == "rls-bound" and cfg["mu_norm"] > cfg["c"] + 1e-12:
        raise ConfigError("mu_norm must not exceed c")
    if name in ("vc", "capacity"):
        k = cfg["k"]
        for key in ("px", "prior_t"):
            expected = k if key == "px" else k + 1
            if cfg[key] != "uniform" and len(cfg[key]) != expected:
                raise ConfigError(f"{key}: expected length {expected} for k={k}")
        n_max = max(cfg["ns"])
        states = (k + 1) * k ** (n_max + 1)
        if states > 10_000_000:
            raise ConfigError(
                f"k={k}, n={n_max} needs {states} enumeration states (limit 10000000)"
            )


# ---------------------------------------------------------------------------
# experiment runners


@dataclass
class RunResult:
    fieldnames: list
    rows: list
    bound_reports: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)


def _model_from_cfg(cfg: dict, mu_norm: float = 0.0) -> LinearModelSpec:
    if cfg["feature_map"] == "monomial":
        features = MonomialFeatures(cfg["degree"])
    else:
        features = IdentityFeatures(cfg["d"])
    p = features.in_dim
    if cfg["input"] == "gaussian":
        inputs = GaussianInput(Gaussian(np.zeros(p), np.eye(p)))
    else:
        inputs = UniformBoxInput(np.full(p, cfg["box_low"]), np.full(p, cfg["box_high"]))
    mu = np.zeros(features.dim)
    mu[0] = mu_norm
    return LinearModelSpec(features, cfg["sigma_w"], cfg["sigma_e"], mu, cfg["c"], inputs)


def _is_constant_scalar_feature(spec: LinearModelSpec) -> bool:
    return (
        isinstance(spec.features, MonomialFeatures)
        and spec.features.degree == 0
        and spec.d == 1
    )


def _run_rls_bound(cfg: dict, threads: int, check: bool) -> RunResult:
    spec = _model_from_cfg(cfg, cfg["mu_norm"])
    env = model_envelope(spec.sigma_w, spec.sigma_e)
    ball = GaussianMeanBall(spec.c, spec.sigma_w)
    seed = cfg["seed"]
    rows, reports, failures = [], [], []
    mi_series = []
    for i, n in enumerate(cfg["ns"]):
        base = 16 * i
        algs = [
            AlgorithmSpec("rls", spec, label="rls"),
            AlgorithmSpec("posterior_sampling", spec, label="ps"),
        ]
        ests, pairs = paired_bayes_excess_mc(
            algs, None, n, cfg["reps"], SeedSpec(seed, base + 1), workers=threads
        )
        rls_est, ps_est = ests
        mi, mi_se = mi_w_zn(spec, n, cfg["mi_reps"], SeedSpec(seed, base + 2), threads)
        cmi_grid = []
        for gi, scale in enumerate((0.0, 0.5, 1.0)):
            mu_g = np.zeros(spec.d)
            mu_g[0] = scale * spec.c
            cmi_grid.append(
                cmi_y_given_xzn(
                    spec.with_mean(mu_g), n, cfg["mi_reps"], SeedSpec(seed, base + 3 + gi), threads
                )
            )
        cmi, cmi_se = cmi_y_given_xzn(
            spec, n, cfg["mi_reps"], SeedSpec(seed, base + 6), threads
        )
        cmi_sup = max(v for v, _ in cmi_grid)
        thm10 = bound_thm10(env, ball, mi, n)
        thm7 = bound_thm7(env, ball, cmi_sup, n)
        reports += [thm10, thm7]
        mi_series.append((n, mi, mi_se))
        rows.append(
            {
                "n": n,
                "mc_excess_rls": rls_est.mean,
                "mc_excess_ps": ps_est.mean,
                "se_rls": rls_est.std_error,
                "se_ps": ps_est.std_error,
                "mi_wzn": mi,
                "cmi": cmi,
                "bound_thm10": thm10.value,
                "bound_thm7": thm7.value,
            }
        )
        if check:
            if ps_est.mean > thm10.value + 3 * ps_est.std_error:
                failures.append(
                    f"n={n}: posterior-sampling risk {ps_est.mean:.6g} exceeds "
                    f"thm10 bound {thm10.value:.6g} + 3 se"
                )
            if ps_est.mean > thm7.value + 3 * ps_est.std_error:
                failures.append(
                    f"n={n}: posterior-sampling risk {ps_est.mean:.6g} exceeds "
                    f"thm7 bound {thm7.value:.6g} + 3 se"
                )
            diff = pairs[(0, 1)]  # rls - ps
            if diff.mean > 3 * diff.std_error:
                failures.append(f"n={n}: rls does not dominate posterior sampling (paired 3 se)")
            for label, est in (("rls", rls_est), ("ps", ps_est)):
                if est.mean < -3 * est.std_error:
                    failures.append(f"n={n}: {label} excess risk negative beyond 3 se")
            if cmi > mi / n + 3 * (cmi_se + mi_se / n):
                failures.append(f"n={n}: cmi exceeds mi/n beyond 3 combined se")
            vals = [v for v, _ in cmi_grid]
            ses = [s for _, s in cmi_grid]
            for a in range(3):
                for b in range(a + 1, 3):
                    if abs(vals[a] - vals[b]) > 3 * (ses[a] + ses[b]):
                        failures.append(
                            f"n={n}: cmi is not mean-independent across the mu grid"
                        )
            if _is_constant_scalar_feature(spec):
                oracle = 0.5 * math.log1p(n * spec.sigma_w**2 / spec.sigma_e**2)
                if abs(mi - oracle) > 3 * mi_se:
                    failures.append(
                        f"n={n}: mi {mi:.6g} misses the channel closed form {oracle:.6g}"
                    )
    if check:
        for (n1, m1, s1), (n2, m2, s2) in zip(mi_series, mi_series[1:]):
            if n2 > n1 and m2 < m1 - 3 * (s1 + s2):
                failures.append(f"mi not monotone between n={n1} and n={n2}")
    fieldnames = [
        "n",
        "mc_excess_rls",
        "mc_excess_ps",
        "se_rls",
        "se_ps",
        "mi_wzn",
        "cmi",
        "bound_thm10",
        "bound_thm7",
    ]
    return RunResult(fieldnames, rows, reports, {"family_radius": ball.c**2 / (2 * ball.sigma_w**2)}, failures)


def _run_game(cfg: dict, threads: int, check: bool) -> RunResult:
    spec = LinearModelSpec(
        MonomialFeatures(0),
        cfg["sigma_w"],
        cfg["sigma_e"],
        np.zeros(1),
        cfg["c"],
        GaussianInput(Gaussian(np.zeros(1), np.eye(1))),
    )
    n = cfg["n"]
    rows, failures = [], []
    summary = {}
    for i, g in enumerate(cfg["grid_sizes"]):
        ws = np.linspace(-cfg["c"], cfg["c"], g)
        algs = [
            AlgorithmSpec("rls", spec, label="rls"),
            AlgorithmSpec("posterior_sampling", spec, label="ps"),
        ] + [
            AlgorithmSpec("constant", spec, weights=np.array([v]), label=f"const@{v:g}")
            for v in ws
        ]
        payoff = build_payoff(
            spec,
            algs,
            [np.array([v]) for v in ws],
            n,
            mode=cfg["mode"],
            mc_reps=cfg["reps"],
            seed=SeedSpec(cfg["seed"], 10_000 * (i + 1)),
            workers=threads,
        )
        lp = solve_lp(payoff)
        fp = solve_fictitious_play(payoff, iterations=cfg["fp_iterations"])
        pure = duality_gap_pure(payoff)
        rows.append(
            {
                "grid_points": g,
                "lp_value": lp.value,
                "lp_dual_value": lp.dual_value,
                "fp_value": fp.value,
                "fp_gap": fp.gap,
                "pure_maximin": pure.maximin,
                "pure_minimax": pure.minimax,
            }
        )
        if check:
            if abs(lp.value - lp.dual_value) > 1e-9:
                failures.append(f"grid={g}: LP primal and dual differ beyond 1e-9")
            if abs(fp.value - lp.value) > fp.gap + 1e-12:
                failures.append(f"grid={g}: fictitious play strays beyond its certified gap")
            if not (pure.maximin - 1e-9 <= lp.value <= pure.minimax + 1e-9):
                failures.append(f"grid={g}: mixed value escapes the pure sandwich")
            if cfg["mode"] == "exact" and pure.maximin != 0.0:
                failures.append(
                    f"grid={g}: designer-second maximin is {pure.maximin!r}, expected exactly 0"
                )
        if i == len(cfg["grid_sizes"]) - 1:
            summary = {
                "final_grid": g,
                "lp_value": lp.value,
                "row_strategy": [float(v) for v in lp.row_strategy.weights],
                "least_favorable_prior": [float(v) for v in lp.col_strategy.weights],
                "fp_gap": fp.gap,
            }
    fieldnames = [
        "grid_points",
        "lp_value",
        "lp_dual_value",
        "fp_value",
        "fp_gap",
        "pure_maximin",
        "pure_minimax",
    ]
    return RunResult(fieldnames, rows, [], summary, failures)


def _threshold_from_cfg(cfg: dict) -> ThresholdClassSpec:
    k = cfg["k"]
    px = np.full(k, 1.0 / k) if cfg["px"] == "uniform" else np.asarray(cfg["px"])
    prior = (
        np.full(k + 1, 1.0 / (k + 1))
        if cfg["prior_t"] == "uniform"
        else np.asarray(cfg["prior_t"])
    )
    return ThresholdClassSpec(k=k, px=px, prior_t=prior)


def _run_vc(cfg: dict, threads: int, check: bool) -> RunResult:
    spec = _threshold_from_cfg(cfg)
    rows, reports, failures = [], [], []
    for n in cfg["ns"]:
        cmi_t = exact_cmi_test(spec, n)
        cmi_y = exact_cmi_yn(spec, n)
        sauer = sauer_bound(1, n)
        bo = exact_bayes_excess(spec, n, "bayes_optimal")
        ps = exact_bayes_excess(spec, n, "posterior_sampling")
        thm4b = bound_thm4("b", 1.0, cmi_t)
        cap = blahut_arimoto(threshold_channel(spec, n), cfg["ba_tol"])
        thm5b = bound_thm5("b", 1.0, cap.capacity, n)
        game = threshold_minimax_game(spec, n)
        reports += [thm4b, thm5b]
        rows.append(
            {
                "n": n,
                "cmi_test": cmi_t,
                "cmi_yn": cmi_y,
                "cmi_yn_over_n": cmi_y / n,
                "sauer_bound": sauer,
                "excess_bayes_opt": bo,
                "excess_post_sampling": ps,
                "thm4b_bound": thm4b.value,
                "kappa_n": cap.capacity,
                "thm5b_bound": thm5b.value,
                "game_value": game.value,
                "cmi_yn_scaled": cmi_y * n,
            }
        )
        if check:
            failures += _vc_checks(spec, n, cmi_t, cmi_y, sauer, bo, ps, thm4b, cap, game, cfg)
    fieldnames = [
        "n",
        "cmi_test",
        "cmi_yn",
        "cmi_yn_over_n",
        "sauer_bound",
        "excess_bayes_opt",
        "excess_post_sampling",
        "thm4b_bound",
        "kappa_n",
        "thm5b_bound",
        "game_value",
        "cmi_yn_scaled",
    ]
    return RunResult(fieldnames, rows, reports, {"d_vc": 1}, failures)


def _vc_checks(spec, n, cmi_t, cmi_y, sauer, bo, ps, thm4b, cap, game, cfg) -> list:
    failures = []
    if cmi_t > cmi_y / n + 1e-12:
        failures.append(f"n={n}: cmi_test exceeds cmi_yn/n")
    if cmi_y / n > sauer + 1e-12:
        failures.append(f"n={n}: cmi_yn/n exceeds the growth rate bound")
    ident = exact_cmi_yn(spec, n + 1) - exact_cmi_yn(spec, n)
    if abs(cmi_t - ident) > 1e-10:
        failures.append(f"n={n}: chain identity broken: {cmi_t!r} vs {ident!r}")
    if bo > ps + 1e-12:
        failures.append(f"n={n}: bayes_optimal does not dominate posterior sampling")
    if ps > thm4b.value + 1e-12:
        failures.append(f"n={n}: posterior sampling exceeds the thm4b bound")
    if game.value > 3.0 * (cap.upper + cfg["ba_tol"]) / n + 1e-9:
        failures.append(f"n={n}: game value exceeds the thm5b capacity bound")
    if cap.upper < cmi_y - 1e-9:
        failures.append(f"n={n}: capacity upper estimate falls below an achievable rate")
    return failures


def _run_rates(cfg: dict, threads: int, check: bool) -> RunResult:
    sw, s = cfg["sigma_w"], cfg["sigma"]
    spec = LinearModelSpec(
        MonomialFeatures(0),
        sw,
        s,
        np.zeros(1),
        0.0,
        GaussianInput(Gaussian(np.zeros(1), np.eye(1))),
    )
    ns = cfg["ns"]
    residuals = lemma2_residual(sw, s, ns)
    e_log_j = math.log(1.0 / s**2)
    rows, failures = [], []
    for i, n in enumerate(ns):
        alg = AlgorithmSpec("bayes_optimal", spec, label="bayes_opt")
        est = bayes_excess_risk_mc(
            alg, None, n, cfg["reps"], SeedSpec(cfg["seed"], i + 1), workers=threads
        )
        lower = lower_rate_bound(1, e_log_j, n)
        rows.append(
            {
                "n": n,
                "lemma2_residual": float(residuals[i]),
                "lower_rate_bound": lower,
                "mc_bayes_excess": est.mean,
                "se": est.std_error,
            }
        )
        if check:
            closed = 0.5 * math.log1p(s**2 / (n * sw**2))
            if abs(residuals[i] - closed) > 1e-12:
                failures.append(f"n={n}: residual does not match its closed form to 1e-12")
            if n >= 100 and residuals[i] >= 0.01:
                failures.append(f"n={n}: residual {residuals[i]:.6g} not below 0.01")
            if lower > est.mean + 3 * est.std_error:
                failures.append(f"n={n}: lower rate exceeds the Bayes-optimal MC risk + 3 se")
    fit = fit_rate(ns, residuals) if len(ns) >= 2 else None
    if check:
        grid = np.array([10.0, 20.0, 40.0, 80.0, 160.0])
        for target in (-1.0, -0.5):
            got = fit_rate(grid, 3.7 * grid**target).slope
            if abs(got - target) > 1e-10:
                failures.append(f"synthetic slope {target} recovered as {got!r}")
        if abs(lower_rate_bound(1, 0.0, 100) - 1.0 / (100.0 * math.pi)) > 1e-15:
            failures.append("lower_rate_bound(1, 0, 100) deviates from 1/(100 pi)")
    summary = {"e_log_det_j": e_log_j}
    if fit is not None:
        summary["residual_fit"] = {
            "slope": fit.slope,
            "intercept": fit.intercept,
            "r_squared": fit.r_squared,
        }
    fieldnames = ["n", "lemma2_residual", "lower_rate_bound", "mc_bayes_excess", "se"]
    return RunResult(fieldnames, rows, [], summary, failures)


def _run_capacity(cfg: dict, threads: int, check: bool) -> RunResult:
    spec = _threshold_from_cfg(cfg)
    rows, reports, failures = [], [], []
    for n in cfg["ns"]:
        cap = blahut_arimoto(threshold_channel(spec, n), cfg["ba_tol"])
        cmi_y = exact_cmi_yn(spec, n)
        thm5b = bound_thm5("b", 1.0, cap.capacity, n)
        reports += [
            bound_thm5("a", 1.0, cap.capacity, n),
            thm5b,
            bound_thm5("c", 1.0, cap.capacity, n),
        ]
        game = threshold_minimax_game(spec, n)
        rows.append(
            {
                "n": n,
                "kappa_n": cap.capacity,
                "kappa_upper": cap.upper,
                "kappa_over_n": cap.capacity / n,
                "cmi_yn": cmi_y,
                "thm5b_bound": thm5b.value,
                "game_value": game.value,
            }
        )
        if check:
            if game.value > 3.0 * (cap.upper + cfg["ba_tol"]) / n + 1e-9:
                failures.append(f"n={n}: game value exceeds the thm5b capacity bound")
            if cap.upper < cmi_y - 1e-9:
                failures.append(f"n={n}: capacity upper estimate below the generating prior's rate")
    if check:
        bsc = blahut_arimoto(DiscreteChannel([[0.9, 0.1], [0.1, 0.9]]), cfg["ba_tol"])
        closed = math.log(2.0) - (-0.1 * math.log(0.1) - 0.9 * math.log(0.9))
        if abs(bsc.capacity - closed) > 1e-5:
            failures.append("binary symmetric channel capacity misses its closed form by >1e-5")
    fieldnames = [
        "n",
        "kappa_n",
        "kappa_upper",
        "kappa_over_n",
        "cmi_yn",
        "thm5b_bound",
        "game_value",
    ]
    return RunResult(fieldnames, rows, reports, {}, failures)


def _run_envelope(cfg: dict, threads: int, check: bool) -> RunResult:
    spec = _model_from_cfg(cfg)
    env = model_envelope(spec.sigma_w, spec.sigma_e)
    report = envelope_check(
        spec,
        env,
        n_pairs=cfg["pairs"],
        data_sizes=cfg["data_sizes"],
        lam_points=cfg["lambda_points"],
        draws=cfg["draws"],
        seed=SeedSpec(cfg["seed"], 0),
    )
    rows = [
        {
            "pair": r.pair,
            "n": r.n,
            "lam": r.lam,
            "mc_cgf": r.cgf,
            "std_error": r.std_error,
            "bound": r.bound,
            "violated": int(r.violated),
        }
        for r in report.rows
    ]
    failures = []
    if check and report.violations:
        failures.append(f"envelope violated in {report.violations} of {len(rows)} cells")
    fieldnames = ["pair", "n", "lam", "mc_cgf", "std_error", "bound", "violated"]
    return RunResult(fieldnames, rows, [], {"violations": report.violations}, failures)


_EXPERIMENTS = {
    "capacity": (
        _run_capacity,
        "threshold-channel capacity by Blahut-Arimoto feeding the thm5 bounds and game value",
    ),
    "envelope": (
        _run_envelope,
        "Monte Carlo domination check of the quadratic cumulant envelope behind thm7/thm10",
    ),
    "game": (
        _run_game,
        "zero-sum excess-risk games: LP vs fictitious play vs pure sandwich (duality route)",
    ),
    "rates": (
        _run_rates,
        "expansion residual decay, log-log slope fits, and the lower_rate limit",
    ),
    "rls-bound": (
        _run_rls_bound,
        "Gaussian regression: paired RLS/posterior-sampling risk against thm7/thm10",
    ),
    "vc": (
        _run_vc,
        "exact threshold-class information chain: thm4 bounds, growth rate, thm5 game check",
    ),
}


# ---------------------------------------------------------------------------
# output writing


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_outputs(out_dir: str, cfg: dict, result: RunResult, check: bool) -> None:
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "csv": os.path.join(out_dir, "results.csv"),
        "report": os.path.join(out_dir, "report.json"),
        "echo": os.path.join(out_dir, "config-echo.json"),
    }
    written = []
    try:
        with open(paths["csv"], "w", newline="") as fh:
            written.append(paths["csv"])
            fh.write(",".join(result.fieldnames) + "\n")
            for row in result.rows:
                fh.write(",".join(_format_cell(row[k]) for k in result.fieldnames) + "\n")
        report = {
            "experiment": cfg["experiment"],
            "seed": cfg["seed"],
            "bound_reports": [b.as_dict() for b in result.bound_reports],
            "summary": result.summary,
            "check": {
                "enabled": check,
                "passed": not result.failures,
                "failures": result.failures,
            },
        }
        with open(paths["report"], "w") as fh:
            written.append(paths["report"])
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
        with open(paths["echo"], "w") as fh:
            written.append(paths["echo"])
            json.dump(cfg, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except BaseException:
        for p in written:
            try:
                os.remove(p)
            except OSError:
                pass
        raise


# ---------------------------------------------------------------------------
# entry points


def _cmd_list() -> int:
    for name in sorted(_EXPERIMENTS):
        print(f"{name:<10} {_EXPERIMENTS[name][1]}")
    return 0


def _cmd_run(config_path: str, check: bool, threads: int) -> int:
    if threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 2
    try:
        with open(config_path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: config is not valid JSON: {exc}", file=sys.stderr)
        return 2
    env_seed = os.environ.get("ERLAB_SEED")
    if env_seed is not None:
        try:
            raw["seed"] = int(env_seed)
        except ValueError:
            print(f"error: ERLAB_SEED must be an integer, got {env_seed!r}", file=sys.stderr)
            return 2
    try:
        cfg = validate_config(raw)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    runner = _EXPERIMENTS[cfg["experiment"]][0]
    result = runner(cfg, threads, check)
    _write_outputs(cfg["output_dir"], cfg, result, check)
    if check and result.failures:
        for f in result.failures:
            print(f"FAILED: {f}", file=sys.stderr)
        return 3
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="erlab", description="excess-risk laboratory experiments"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run one experiment from a JSON config")
    run_p.add_argument("config", help="path to the experiment config")
    run_p.add_argument("--check", action="store_true", help="assert invariants; exit 3 on failure")
    run_p.add_argument("--threads", type=int, default=1, help="worker cap (results identical)")
    sub.add_parser("list", help="list experiments with descriptions")
    args = parser.parse_args(argv)
    if args.command == "list":
        return _cmd_list()
    return _cmd_run(args.config, args.check, args.threads)


if __name__ == "__main__":
    sys.exit(main())
