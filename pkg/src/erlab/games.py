"""Finite zero-sum games between an algorithm designer and the world.

The designer picks rows (algorithms) and minimizes; the world picks columns
(model parameters) and maximizes; entries are excess risks.  The mixed value
is computed two ways — an exact LP route through the in-repo simplex solver
and fictitious play with a certified duality gap — and the pure-strategy
orders sandwich it:

    max_j min_i M_ij  <=  mixed value  <=  min_i max_j M_ij.

`threshold_minimax_game` grows the designer's action set by a double-oracle
loop (exact Bayes-rule best response against the LP's least favorable prior)
until no algorithm beats the current value, so the reported value is the
unrestricted minimax value up to the returned certificate gap.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .linear_model import LinearModelSpec, MonomialFeatures
from .lp import simplex_max
from .risk import AlgorithmSpec, excess_risk_mc
from .seeding import SeedSpec
from .thresholds import ThresholdClassSpec, enumerate_version_states


@dataclass(frozen=True)
class MixedStrategy:
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a non-empty vector")
        if float(w.min()) < -1e-12 or abs(float(w.sum()) - 1.0) > 1e-12:
            raise ValueError("weights must lie on the simplex to within 1e-12")
        w = np.clip(w, 0.0, None)
        object.__setattr__(self, "weights", w / w.sum())


@dataclass(frozen=True)
class PayoffMatrix:
    row_labels: tuple
    col_labels: tuple
    values: np.ndarray
    std_errors: np.ndarray | None = None

    def __post_init__(self):
        vals = np.atleast_2d(np.asarray(self.values, dtype=float))
        if vals.shape != (len(self.row_labels), len(self.col_labels)):
            raise ValueError("matrix shape must match the label lists")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "row_labels", tuple(self.row_labels))
        object.__setattr__(self, "col_labels", tuple(self.col_labels))
        if self.std_errors is not None:
            se = np.atleast_2d(np.asarray(self.std_errors, dtype=float))
            if se.shape != vals.shape:
                raise ValueError("std_errors must match the matrix shape")
            object.__setattr__(self, "std_errors", se)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["row_label", "col_label", "value", "std_error"])
            se = self.std_errors
            for i, rl in enumerate(self.row_labels):
                for j, cl in enumerate(self.col_labels):
                    err = 0.0 if se is None else float(se[i, j])
                    writer.writerow([rl, cl, repr(float(self.values[i, j])), repr(err)])

    @classmethod
    def from_csv(cls, path) -> "PayoffMatrix":
        rows: dict[str, dict[str, tuple[float, float]]] = {}
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            for rec in reader:
                rows.setdefault(rec["row_label"], {})[rec["col_label"]] = (
                    float(rec["value"]),
                    float(rec["std_error"]),
                )
        row_labels = tuple(rows)
        col_labels = tuple(next(iter(rows.values()))) if rows else ()
        vals = np.array([[rows[r][c][0] for c in col_labels] for r in row_labels])
        ses = np.array([[rows[r][c][1] for c in col_labels] for r in row_labels])
        return cls(row_labels, col_labels, vals, ses)


def _matrix_of(game) -> np.ndarray:
    return game.values if isinstance(game, PayoffMatrix) else np.atleast_2d(np.asarray(game, float))


# ---------------------------------------------------------------------------
# solvers


@dataclass(frozen=True)
class GameSolution:
    value: float
    dual_value: float
    row_strategy: MixedStrategy
    col_strategy: MixedStrategy
    iterations: int


def solve_lp(game) -> GameSolution:
    """Exact mixed value by LP.  value and dual_value are the row and column
    players' optima recomputed independently; they agree to solver precision."""
    m_mat = _matrix_of(game)
    rows, cols = m_mat.shape
    shift = 1.0 - float(m_mat.min())
    pos = m_mat + shift
    # designer side: max 1'u  s.t.  pos^T u <= 1  (u = p / value)
    res = simplex_max(pos.T, np.ones(cols), np.ones(rows))
    u_sum = float(res.x.sum())
    if u_sum <= 0:
        raise RuntimeError("degenerate game LP")
    value = 1.0 / u_sum - shift
    row_strategy = MixedStrategy(res.x / u_sum)
    y = res.duals
    y_sum = float(y.sum())
    if y_sum <= 0:
        raise RuntimeError("degenerate dual solution")
    dual_value = 1.0 / y_sum - shift
    col_strategy = MixedStrategy(y / y_sum)
    return GameSolution(
        value=value,
        dual_value=dual_value,
        row_strategy=row_strategy,
        col_strategy=col_strategy,
        iterations=res.iterations,
    )


def least_favorable_prior(game) -> MixedStrategy:
    """The world's optimal mixed strategy (the prior attaining the game value)."""
    return solve_lp(game).col_strategy


@dataclass(frozen=True)
class FictitiousPlayResult:
    value: float
    row_strategy: MixedStrategy
    col_strategy: MixedStrategy
    gap: float
    iterations: int


def solve_fictitious_play(
    game, iterations: int = 20_000, tol: float = 0.0
) -> FictitiousPlayResult:
    """Simultaneous fictitious play with a certified duality gap.

    gap = max_j pbar' M e_j - min_i e_i' M qbar, which brackets both the true
    value and the reported pbar' M qbar, so |value - LP value| <= gap always.
    """
    m_mat = _matrix_of(game)
    rows, cols = m_mat.shape
    row_counts = np.zeros(rows)
    col_counts = np.zeros(cols)
    # accumulated payoffs against the opponent's empirical past
    row_payoff = np.zeros(rows)  # sum over past cols of M[:, j]
    col_payoff = np.zeros(cols)  # sum over past rows of M[i, :]
    i_cur, j_cur = 0, 0
    done = 0
    for t in range(1, iterations + 1):
        row_counts[i_cur] += 1
        col_counts[j_cur] += 1
        row_payoff += m_mat[:, j_cur]
        col_payoff += m_mat[i_cur, :]
        i_cur = int(np.argmin(row_payoff))
        j_cur = int(np.argmax(col_payoff))
        done = t
        if tol > 0.0 and t % 128 == 0:
            gap = float(col_payoff.max() / t - row_payoff.min() / t)
            if gap <= tol:
                break
    pbar = MixedStrategy(row_counts / done)
    qbar = MixedStrategy(col_counts / done)
    upper = float(col_payoff.max() / done)  # max_j pbar' M e_j
    lower = float(row_payoff.min() / done)  # min_i e_i' M qbar
    value = float(pbar.weights @ m_mat @ qbar.weights)
    return FictitiousPlayResult(
        value=value,
        row_strategy=pbar,
        col_strategy=qbar,
        gap=upper - lower,
        iterations=done,
    )


@dataclass(frozen=True)
class PureGaps:
    maximin: float  # world commits first: max_j min_i
    minimax: float  # designer commits first: min_i max_j
    gap: float


def duality_gap_pure(game) -> PureGaps:
    m_mat = _matrix_of(game)
    maximin = float(m_mat.min(axis=0).max())
    minimax = float(m_mat.max(axis=1).min())
    return PureGaps(maximin=maximin, minimax=minimax, gap=minimax - maximin)


# ---------------------------------------------------------------------------
# payoff construction


def build_payoff(
    model,
    algs,
    ws,
    n: int,
    mode: str = "exact",
    mc_reps: int = 100_000,
    seed: SeedSpec = SeedSpec(0),
    workers: int = 1,
) -> PayoffMatrix:
    """Excess-risk payoff matrix of the given algorithms against the given
    parameters at sample size n.

    Exact mode supports the threshold model (full enumeration) and the 1-D
    constant-feature Gaussian model (closed forms); MC mode estimates every
    entry with excess_risk_mc on an entry-specific stream and records the
    standard errors.
    """
    algs = list(algs)
    ws = list(ws)
    row_labels = tuple(a.label for a in algs)
    if isinstance(model, ThresholdClassSpec):
        col_labels = tuple(f"t={int(t)}" for t in ws)
    else:
        col_labels = tuple(f"w={float(np.atleast_1d(w)[0]):g}" for w in ws)
    if mode == "exact":
        if isinstance(model, ThresholdClassSpec):
            vals = _exact_threshold_matrix(model, algs, [int(t) for t in ws], n)
        elif (
            isinstance(model, LinearModelSpec)
            and model.d == 1
            and isinstance(model.features, MonomialFeatures)
            and model.features.degree == 0
        ):
            vals = _exact_scalar_gaussian_matrix(model, algs, ws, n)
        else:
            raise ValueError(
                "exact payoff mode supports threshold models and the 1-D "
                "constant-feature Gaussian model only"
            )
        return PayoffMatrix(row_labels, col_labels, vals, np.zeros_like(vals))
    if mode != "mc":
        raise ValueError("mode must be 'exact' or 'mc'")
    vals = np.empty((len(algs), len(ws)))
    ses = np.empty_like(vals)
    for i, alg in enumerate(algs):
        for j, w in enumerate(ws):
            entry_seed = seed.with_stream(seed.stream_id + 1 + i * len(ws) + j)
            est = excess_risk_mc(alg, w, n, mc_reps, entry_seed, workers)
            vals[i, j] = est.mean
            ses[i, j] = est.std_error
    return PayoffMatrix(row_labels, col_labels, vals, ses)


def _exact_scalar_gaussian_matrix(spec: LinearModelSpec, algs, ws, n: int) -> np.ndarray:
    """Closed forms for phi(x) = 1, d = 1: with lam = sigma_e^2/sigma_w^2,

    rls / bayes_optimal with prior center m0:
        (n sigma_e^2 + lam^2 (m0 - w)^2) / (n + lam)^2
    posterior sampling adds the posterior variance sigma_e^2 / (n + lam);
    the constant predictor v scores (v - w)^2.
    """
    lam = spec.lam
    vals = np.empty((len(algs), len(ws)))
    for i, alg in enumerate(algs):
        for j, w in enumerate(ws):
            wv = float(np.atleast_1d(w)[0])
            if alg.kind in ("rls", "bayes_optimal", "posterior_sampling"):
                m0 = spec.mu_prior if alg.prior_mean is None else np.asarray(alg.prior_mean, float)
                m0 = float(np.atleast_1d(m0)[0])
                base = (n * spec.sigma_e**2 + lam**2 * (m0 - wv) ** 2) / (n + lam) ** 2
                if alg.kind == "posterior_sampling":
                    base += spec.sigma_e**2 / (n + lam)
                vals[i, j] = base
            elif alg.kind == "constant":
                v = float(np.atleast_1d(alg.weights)[0])
                vals[i, j] = (v - wv) ** 2
            else:
                raise ValueError(f"exact Gaussian mode does not support kind {alg.kind!r}")
    return vals


def _state_q1(cum: np.ndarray, lo: int, hi: int, k: int) -> np.ndarray:
    """Posterior P(h_T(x) = 1 | T in [lo, hi]) for x = 1..k under the prior
    with cumulative masses cum; uniform on the interval if the mass is zero."""
    mass = float(cum[hi] - cum[lo - 1])
    xs = np.arange(1, k + 1)
    upper = np.minimum(xs, hi)
    if mass > 0:
        q = np.where(xs >= lo, (cum[np.maximum(upper, lo - 1)] - cum[lo - 1]) / mass, 0.0)
    else:
        q = np.where(xs >= lo, (upper - lo + 1) / (hi - lo + 1), 0.0)
    return q


def _exact_threshold_matrix(spec: ThresholdClassSpec, algs, ts, n: int) -> np.ndarray:
    k = spec.k
    states = enumerate_version_states(spec, n)
    px = spec.px
    xs = np.arange(1, k + 1)
    vals = np.zeros((len(algs), len(ts)))
    cums = {}
    for ai, alg in enumerate(algs):
        p0 = spec.prior_t if alg.prior_t is None else np.asarray(alg.prior_t, dtype=float)
        key = p0.tobytes()
        if key not in cums:
            cums[key] = np.concatenate([[0.0], np.cumsum(p0)])
        cum0 = cums[key]
        for st in states:
            if alg.kind in ("posterior_sampling", "bayes_optimal"):
                q1 = _state_q1(cum0, st.lo, st.hi, k)
            for tj, t in enumerate(ts):
                if not (st.lo <= t <= st.hi):
                    continue
                true_lab = (xs >= t).astype(float)
                if alg.kind == "posterior_sampling":
                    err = q1 * (1.0 - true_lab) + (1.0 - q1) * true_lab
                elif alg.kind == "bayes_optimal":
                    pred = (q1 >= 0.5).astype(float)
                    err = (pred != true_lab).astype(float)
                elif alg.kind == "constant":
                    pred = (xs >= alg.const_t).astype(float)
                    err = (pred != true_lab).astype(float)
                elif alg.kind == "table":
                    pred = np.array([float(alg.table[int(x)]) for x in xs])
                    err = (pred != true_lab).astype(float)
                else:
                    raise ValueError(f"exact threshold mode does not support kind {alg.kind!r}")
                vals[ai, tj] += st.prob_xn * float(err @ px)
    return vals


# ---------------------------------------------------------------------------
# the threshold minimax game, rows generated by a double oracle


@dataclass(frozen=True)
class ThresholdGameResult:
    payoff: PayoffMatrix
    value: float
    row_strategy: MixedStrategy
    least_favorable: MixedStrategy
    certificate_gap: float
    rounds: int


def _bayes_rule(spec: ThresholdClassSpec, states, q: np.ndarray) -> np.ndarray:
    cum = np.concatenate([[0.0], np.cumsum(q)])
    preds = np.empty((len(states), spec.k), dtype=np.int8)
    for si, st in enumerate(states):
        preds[si] = _state_q1(cum, st.lo, st.hi, spec.k) >= 0.5
    return preds


def _rule_payoff_row(spec: ThresholdClassSpec, states, preds: np.ndarray) -> np.ndarray:
    k = spec.k
    xs = np.arange(1, k + 1)
    row = np.zeros(k + 1)
    for si, st in enumerate(states):
        pred = preds[si]
        for t in range(st.lo, st.hi + 1):
            err = (pred != (xs >= t)).astype(float)
            row[t - 1] += st.prob_xn * float(err @ spec.px)
    return row


def threshold_minimax_game(
    spec: ThresholdClassSpec, n: int, tol: float = 1e-10, max_rounds: int = 256
) -> ThresholdGameResult:
    """Mixed value of the excess-risk game over all learning rules.

    Columns are the k+1 thresholds; rows start from the Bayes rule of the
    uniform prior and grow by exact best responses to the current least
    favorable prior.  At termination the LP value exceeds the best response's
    Bayes risk by at most certificate_gap, so it equals the minimax value
    over all (randomized) algorithms to that accuracy.
    """
    states = enumerate_version_states(spec, n)
    uniform = np.full(spec.k + 1, 1.0 / (spec.k + 1))
    rules = [_bayes_rule(spec, states, uniform)]
    rows = [_rule_payoff_row(spec, states, rules[0])]
    seen = {rules[0].tobytes()}
    for round_idx in range(1, max_rounds + 1):
        mat = np.vstack(rows)
        sol = solve_lp(mat)
        q = sol.col_strategy.weights
        best = _bayes_rule(spec, states, q)
        best_row = _rule_payoff_row(spec, states, best)
        bayes_risk = float(best_row @ q)
        gap = sol.value - bayes_risk
        if gap <= tol or best.tobytes() in seen:
            labels = tuple(f"rule_{i}" for i in range(len(rows)))
            cols = tuple(f"t={t}" for t in range(1, spec.k + 2))
            payoff = PayoffMatrix(labels, cols, mat, np.zeros_like(mat))
            return ThresholdGameResult(
                payoff=payoff,
                value=sol.value,
                row_strategy=sol.row_strategy,
                least_favorable=sol.col_strategy,
                certificate_gap=max(gap, 0.0),
                rounds=round_idx,
            )
        rules.append(best)
        rows.append(best_row)
        seen.add(best.tobytes())
    raise RuntimeError(f"double oracle did not converge in {max_rounds} rounds")
