"""Monte Carlo excess risk of learning algorithms, with paired replicates.

Excess risk of algorithm A at parameter w is E[l(A(Z^n, X), Y) - l(f*_w(X), Y)]
with squared loss for the Gaussian regression model and 0-1 loss for the
threshold model (where realizable labels make the optimal loss zero).  The
Bayes variants redraw W from a prior in every replicate.

Replicate r draws everything it needs from seed.substream(r) in a fixed
order, so estimates are bit-identical for any worker count, and every
algorithm in a paired run sees the same data, test point, and (where
shareable) algorithm noise.  Standard errors are sample std / sqrt(reps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .envelopes import CumulantEnvelope, model_envelope
from .gaussians import Gaussian
from .linear_model import FiniteInput, LinearModelSpec, _draw_replicates
from .seeding import SeedSpec, chunk_ranges, map_indexed
from .thresholds import ThresholdClassSpec

_KINDS = ("posterior_sampling", "rls", "bayes_optimal", "constant", "table")


@dataclass(frozen=True)
class AlgorithmSpec:
    """A learning rule bound to its model.

    kind selects the rule; the remaining fields parameterize it.  For the
    Gaussian model, prior_mean is the rule's own prior center (defaults to
    the model's) and weights defines the constant predictor x -> w^T phi(x).
    For the threshold model, prior_t is the sampler prior over thresholds,
    const_t the constant classifier h_t, and table a lookup predictor.
    """

    kind: str
    model: LinearModelSpec | ThresholdClassSpec
    prior_mean: np.ndarray | None = None
    prior_t: np.ndarray | None = None
    weights: np.ndarray | None = None
    const_t: int | None = None
    table: Mapping[int, int] | None = None
    label: str = ""

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}")
        linear = isinstance(self.model, LinearModelSpec)
        if self.kind == "rls" and not linear:
            raise ValueError("rls is only defined for the Gaussian regression model")
        if self.kind == "constant":
            if linear and self.weights is None:
                raise ValueError("constant predictor needs weights for the Gaussian model")
            if not linear and self.const_t is None:
                raise ValueError("constant predictor needs const_t for the threshold model")
        if self.kind == "table" and self.table is None:
            raise ValueError("table predictor needs a lookup table")
        if not self.label:
            object.__setattr__(self, "label", self.kind)


@dataclass(frozen=True)
class RiskEstimate:
    mean: float
    std_error: float
    reps: int
    seed: SeedSpec

    def __post_init__(self):
        if self.reps < 2:
            raise ValueError("reps must be at least 2 for a standard error")


def _estimate(diffs_sum, diffs_sumsq, reps, seed) -> RiskEstimate:
    mean = diffs_sum / reps
    var = max(diffs_sumsq - reps * mean * mean, 0.0) / (reps - 1)
    return RiskEstimate(mean=mean, std_error=math.sqrt(var / reps), reps=reps, seed=seed)


# ---------------------------------------------------------------------------
# Gaussian regression model


def _linear_chunk_diffs(
    spec: LinearModelSpec,
    algs: Sequence[AlgorithmSpec],
    seed: SeedSpec,
    lo: int,
    hi: int,
    n: int,
    w_fixed,
    gen_prior_mean,
) -> np.ndarray:
    d = spec.d
    ws, _, phi, ys, xs_test, phi_test, e_test, extras = _draw_replicates(
        spec, seed, lo, hi, n, w_fixed, gen_prior_mean, True, extra_normals=d
    )
    count = hi - lo
    lam = spec.lam
    if n > 0:
        gram = np.einsum("rni,rnj->rij", phi, phi)
        a_mat = gram + lam * np.eye(d)
        rhs_base = np.einsum("rnd,rn->rd", phi, ys)
    else:
        a_mat = np.broadcast_to(lam * np.eye(d), (count, d, d))
        rhs_base = np.zeros((count, d))

    means_cache: dict[bytes, np.ndarray] = {}

    def post_means(prior_mean: np.ndarray) -> np.ndarray:
        key = prior_mean.tobytes()
        if key not in means_cache:
            rhs = rhs_base + lam * prior_mean
            means_cache[key] = np.linalg.solve(a_mat, rhs[..., None])[..., 0]
        return means_cache[key]

    chol = None
    if any(a.kind == "posterior_sampling" for a in algs):
        covs = spec.sigma_e**2 * np.linalg.inv(a_mat)
        chol = np.linalg.cholesky(0.5 * (covs + np.swapaxes(covs, -1, -2)))

    f_star = np.einsum("rd,rd->r", ws, phi_test)
    diffs = np.empty((len(algs), count))
    for ai, alg in enumerate(algs):
        pm = spec.mu_prior if alg.prior_mean is None else np.asarray(alg.prior_mean, float)
        if alg.kind in ("rls", "bayes_optimal"):
            pred = np.einsum("rd,rd->r", post_means(pm), phi_test)
        elif alg.kind == "posterior_sampling":
            draw = post_means(pm) + np.einsum("rde,re->rd", chol, extras)
            pred = np.einsum("rd,rd->r", draw, phi_test)
        elif alg.kind == "constant":
            pred = phi_test @ np.asarray(alg.weights, dtype=float)
        elif alg.kind == "table":
            if not isinstance(spec.inputs, FiniteInput):
                raise ValueError("table predictor requires a finite input distribution")
            pred = np.array([float(alg.table[int(x[0])]) for x in xs_test])
        else:  # pragma: no cover
            raise AssertionError(alg.kind)
        # (pred - y)^2 - (f* - y)^2 with y = f* + e
        diffs[ai] = (pred - f_star - e_test) ** 2 - e_test**2
    return diffs


# ---------------------------------------------------------------------------
# threshold model


def _threshold_chunk_diffs(
    spec: ThresholdClassSpec,
    algs: Sequence[AlgorithmSpec],
    seed: SeedSpec,
    lo_rep: int,
    hi_rep: int,
    n: int,
    t_fixed,
    gen_prior,
) -> np.ndarray:
    if not spec.realizable:
        raise ValueError("only the realizable labeling model is implemented")
    k = spec.k
    count = hi_rep - lo_rep
    cum_gen = np.concatenate([[0.0], np.cumsum(gen_prior)])
    ts = np.empty(count, dtype=np.int64)
    x_seq = np.empty((count, n), dtype=np.int64)
    x_test = np.empty(count, dtype=np.int64)
    u_ps = np.empty(count)
    for i in range(count):
        rng = seed.substream(lo_rep + i)
        if t_fixed is None:
            ts[i] = int(np.searchsorted(cum_gen, rng.random(), side="right"))
        else:
            ts[i] = t_fixed
            rng.random()
        if n > 0:
            x_seq[i] = rng.choice(k, size=n, p=spec.px) + 1
        x_test[i] = rng.choice(k, p=spec.px) + 1
        u_ps[i] = rng.random()

    labels = x_seq >= ts[:, None]
    if n > 0:
        hi_v = np.where(labels, x_seq, k + 1).min(axis=1)
        lo_v = np.where(~labels, x_seq, 0).max(axis=1) + 1
    else:
        hi_v = np.full(count, k + 1, dtype=np.int64)
        lo_v = np.ones(count, dtype=np.int64)
    true_label = x_test >= ts

    diffs = np.empty((len(algs), count))
    for ai, alg in enumerate(algs):
        p0 = spec.prior_t if alg.prior_t is None else np.asarray(alg.prior_t, dtype=float)
        cum0 = np.concatenate([[0.0], np.cumsum(p0)])
        if alg.kind == "posterior_sampling":
            mass_lo = cum0[lo_v - 1]
            mass_hi = cum0[hi_v]
            window = mass_hi - mass_lo
            uniform_draw = np.minimum(
                lo_v + np.floor(u_ps * (hi_v - lo_v + 1)).astype(np.int64), hi_v
            )
            targets = mass_lo + u_ps * window
            prior_draw = np.searchsorted(cum0, targets, side="right")
            t_s = np.where(window > 0, prior_draw, uniform_draw)
            pred = x_test >= t_s
        elif alg.kind == "bayes_optimal":
            mass_lo = cum0[lo_v - 1]
            window = cum0[hi_v] - mass_lo
            upper = np.minimum(hi_v, x_test)
            q_prior = np.where(
                window > 0, (cum0[np.maximum(upper, lo_v - 1)] - mass_lo) / np.where(window > 0, window, 1.0), 0.0
            )
            q_unif = (upper - lo_v + 1) / (hi_v - lo_v + 1)
            q_alg = np.where(window > 0, q_prior, q_unif)
            q_alg = np.where(x_test >= lo_v, q_alg, 0.0)
            pred = q_alg >= 0.5
        elif alg.kind == "constant":
            pred = x_test >= alg.const_t
        elif alg.kind == "table":
            tbl = np.array([int(alg.table[x]) for x in range(1, k + 1)])
            pred = tbl[x_test - 1].astype(bool)
        else:  # pragma: no cover
            raise AssertionError(alg.kind)
        diffs[ai] = (pred != true_label).astype(float)
    return diffs


# ---------------------------------------------------------------------------
# public estimators


def _run_paired(model, algs, seed, n, reps, w_fixed, gen_prior, workers):
    if reps < 2:
        raise ValueError("mc_reps must be at least 2")
    ranges = chunk_ranges(reps)
    n_algs = len(algs)

    def one_chunk(idx):
        lo, hi = ranges[idx]
        if isinstance(model, LinearModelSpec):
            d = _linear_chunk_diffs(model, algs, seed, lo, hi, n, w_fixed, gen_prior)
        else:
            d = _threshold_chunk_diffs(model, algs, seed, lo, hi, n, w_fixed, gen_prior)
        sums = d.sum(axis=1)
        sumsqs = (d * d).sum(axis=1)
        pair_stats = {}
        for i in range(n_algs):
            for j in range(i + 1, n_algs):
                dd = d[i] - d[j]
                pair_stats[(i, j)] = (float(dd.sum()), float((dd * dd).sum()))
        return sums, sumsqs, pair_stats

    results = map_indexed(one_chunk, len(ranges), workers)
    ests = []
    for i in range(n_algs):
        s = math.fsum(r[0][i] for r in results)
        ss = math.fsum(r[1][i] for r in results)
        ests.append(_estimate(s, ss, reps, seed))
    pair_ests = {}
    for i in range(n_algs):
        for j in range(i + 1, n_algs):
            s = math.fsum(r[2][(i, j)][0] for r in results)
            ss = math.fsum(r[2][(i, j)][1] for r in results)
            pair_ests[(i, j)] = _estimate(s, ss, reps, seed)
    return ests, pair_ests


def _gen_prior_for(model, prior):
    if isinstance(model, LinearModelSpec):
        if prior is None:
            return None  # model's own prior mean
        if isinstance(prior, Gaussian):
            return np.asarray(prior.mean, dtype=float)
        return np.asarray(prior, dtype=float)
    if prior is None:
        return model.prior_t
    return np.asarray(prior, dtype=float)


def excess_risk_mc(
    alg: AlgorithmSpec,
    w,
    n: int,
    mc_reps: int = 100_000,
    seed: SeedSpec = SeedSpec(0),
    workers: int = 1,
) -> RiskEstimate:
    """Excess risk at a fixed parameter w (weight vector or threshold)."""
    if isinstance(alg.model, LinearModelSpec):
        w_fixed = np.asarray(w, dtype=float)
    else:
        w_fixed = int(w)
    gen_prior = _gen_prior_for(alg.model, None)
    ests, _ = _run_paired(alg.model, [alg], seed, n, mc_reps, w_fixed, gen_prior, workers)
    return ests[0]


def bayes_excess_risk_mc(
    alg: AlgorithmSpec,
    prior=None,
    n: int = 1,
    mc_reps: int = 100_000,
    seed: SeedSpec = SeedSpec(0),
    workers: int = 1,
) -> RiskEstimate:
    """Excess risk averaged over W drawn from the prior in each replicate."""
    gen_prior = _gen_prior_for(alg.model, prior)
    ests, _ = _run_paired(alg.model, [alg], seed, n, mc_reps, None, gen_prior, workers)
    return ests[0]


def paired_bayes_excess_mc(
    algs: Sequence[AlgorithmSpec],
    prior=None,
    n: int = 1,
    mc_reps: int = 100_000,
    seed: SeedSpec = SeedSpec(0),
    workers: int = 1,
) -> tuple[list[RiskEstimate], dict[tuple[int, int], RiskEstimate]]:
    """Estimates for several algorithms on shared replicates.

    The second return value maps (i, j) to the estimate of risk_i - risk_j
    with the paired standard error, the right scale for dominance checks.
    """
    if not algs:
        raise ValueError("need at least one algorithm")
    model = algs[0].model
    if any(a.model is not model for a in algs[1:]):
        raise ValueError("paired algorithms must share one model")
    gen_prior = _gen_prior_for(model, prior)
    return _run_paired(model, list(algs), seed, n, mc_reps, None, gen_prior, workers)


def run_posterior_sampling(
    spec: LinearModelSpec,
    data,
    x,
    seed: SeedSpec = SeedSpec(0),
    prior_mean: np.ndarray | None = None,
) -> float:
    """One posterior-sampling prediction at x: draw W' ~ posterior, predict W'^T phi(x)."""
    from .gaussians import sample
    from .linear_model import posterior

    spec0 = spec if prior_mean is None else spec.with_mean(prior_mean)
    post = posterior(spec0, data)
    w_draw = sample(post, seed, 1)[0]
    feats = spec.features.batch(np.atleast_1d(x))[0]
    return float(w_draw @ feats)


# ---------------------------------------------------------------------------
# envelope verification


@dataclass(frozen=True)
class EnvelopeRow:
    pair: int
    n: int
    lam: float
    cgf: float
    std_error: float
    bound: float
    violated: bool


@dataclass(frozen=True)
class EnvelopeReport:
    rows: list[EnvelopeRow]

    @property
    def violations(self) -> int:
        return sum(r.violated for r in self.rows)


_CGF_BATCHES = 25


def envelope_check(
    spec: LinearModelSpec,
    env: CumulantEnvelope | None = None,
    n_pairs: int = 50,
    data_sizes: Sequence[int] = (1, 2, 4, 8),
    lam_points: int = 8,
    draws: int = 1_000_000,
    seed: SeedSpec = SeedSpec(0),
) -> EnvelopeReport:
    """Empirical check that the envelope dominates the posterior-sampling cgf.

    For each random conditioning pair (z^n, x) — generated under a prior mean
    drawn uniformly from the ball ||mu|| <= c — the cgf of the loss
    l(A_PS(z^n, x), Y) is estimated at every grid point lam in [0, b) by
    batch-means Monte Carlo and compared against phi(lam) + 3 std errors.
    The sampler runs under the family-center prior; Y follows the posterior
    predictive of the drawn prior.
    """
    if env is None:
        env = model_envelope(spec.sigma_w, spec.sigma_e)
    if draws < _CGF_BATCHES * 2:
        raise ValueError(f"draws must be at least {2 * _CGF_BATCHES}")
    per_batch = draws // _CGF_BATCHES
    used = per_batch * _CGF_BATCHES
    lams = np.arange(lam_points) * (env.b / lam_points)
    d = spec.d
    rows: list[EnvelopeRow] = []
    for pair in range(n_pairs):
        rng = seed.substream(pair * (lam_points + 1))
        n = int(data_sizes[pair % len(data_sizes)])
        direction = rng.standard_normal(d)
        norm = float(np.linalg.norm(direction))
        radius = spec.c * rng.random() ** (1.0 / d)
        mu_true = (radius / norm) * direction if norm > 0 else np.zeros(d)
        w = mu_true + spec.sigma_w * rng.standard_normal(d)
        xs = spec.inputs.draw(rng, n)
        noise = spec.sigma_e * rng.standard_normal(n)
        x_test = spec.inputs.draw(rng, 1)
        phi = spec.features.batch(xs)
        ys = phi @ w + noise
        phi_t = spec.features.batch(x_test)[0]

        lam_ridge = spec.lam
        a_mat = phi.T @ phi + lam_ridge * np.eye(d)
        mean0 = np.linalg.solve(a_mat, phi.T @ ys + lam_ridge * spec.mu_prior)
        mean_true = np.linalg.solve(a_mat, phi.T @ ys + lam_ridge * mu_true)
        cov = spec.sigma_e**2 * np.linalg.inv(a_mat)
        a0 = float(mean0 @ phi_t)
        a1 = float(mean_true @ phi_t)
        s_proj = math.sqrt(max(float(phi_t @ cov @ phi_t), 0.0))

        for j, lam in enumerate(lams):
            rng_j = seed.substream(pair * (lam_points + 1) + 1 + j)
            z_ps = rng_j.standard_normal(used)
            z_w = rng_j.standard_normal(used)
            z_e = rng_j.standard_normal(used)
            h = (a0 + s_proj * z_ps) - (a1 + s_proj * z_w) - spec.sigma_e * z_e
            losses = (h * h).reshape(_CGF_BATCHES, per_batch)
            if lam == 0.0:
                value, se = 0.0, 0.0
            else:
                g_b = lam * losses.mean(axis=1) + np.log(
                    np.exp(-lam * losses).mean(axis=1)
                )
                value = float(g_b.mean())
                se = float(g_b.std(ddof=1) / math.sqrt(_CGF_BATCHES))
            bound = env.value(float(lam))
            rows.append(
                EnvelopeRow(
                    pair=pair,
                    n=n,
                    lam=float(lam),
                    cgf=value,
                    std_error=se,
                    bound=bound,
                    violated=bool(value > bound + 3.0 * se),
                )
            )
    return EnvelopeReport(rows=rows)
