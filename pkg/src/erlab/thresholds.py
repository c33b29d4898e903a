"""Exact information and risk computations for 1-D threshold classifiers.

Hypotheses are h_t(x) = 1[x >= t] for t in {1, ..., k+1} over the finite
domain X = {1, ..., k} (t = k+1 is the all-zero classifier), with labels
realizable: Y = h_T(X) for a latent T ~ prior_t.  The class has VC dimension
one, so every quantity here is computable by exhaustive enumeration of x^n
sequences; sums are accumulated with compensated summation.

Because the labeling of x^n determines and is determined by the interval of
consistent thresholds (the version space), mutual information reduces to
entropies of interval masses:

    I(T; Y^n | X^n)    = E_{X^n} H(labeling of X^n)
    I(T; Y | X, Z^n)   = E_{X^n} E_groups E_X H_b(q1),  q1 = P(h_T(X)=1 | group)

and the chain I(T; Y | X, Z^n) = I(T; Y^{n+1} | X^{n+1}) - I(T; Y^n | X^n)
holds exactly, which the tests exploit as a second route.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

# Exhaustive enumeration is refused beyond this many (threshold, sequence)
# states; callers see a clear error instead of an unbounded loop.
_MAX_STATES = 10_000_000


@dataclass(frozen=True)
class ThresholdClassSpec:
    k: int
    px: np.ndarray
    prior_t: np.ndarray
    realizable: bool = True

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        px = np.asarray(self.px, dtype=float)
        prior = np.asarray(self.prior_t, dtype=float)
        if px.shape != (self.k,):
            raise ValueError(f"px must have length {self.k}")
        if prior.shape != (self.k + 1,):
            raise ValueError(f"prior_t must have length {self.k + 1}")
        for name, v in (("px", px), ("prior_t", prior)):
            if np.any(v < 0) or abs(float(v.sum()) - 1.0) > 1e-12:
                raise ValueError(f"{name} must lie on the probability simplex (1e-12)")
        object.__setattr__(self, "px", px)
        object.__setattr__(self, "prior_t", prior)

    @property
    def thresholds(self) -> np.ndarray:
        return np.arange(1, self.k + 2)


def labels_for(spec: ThresholdClassSpec, t: int, xs: np.ndarray) -> np.ndarray:
    return (np.asarray(xs) >= t).astype(np.int64)


def growth_count(spec: ThresholdClassSpec, points) -> int:
    """Number of distinct labelings of the given points by the class."""
    xs = np.asarray(points)
    seen = {tuple(labels_for(spec, t, xs)) for t in range(1, spec.k + 2)}
    return len(seen)


def sauer_bound(dvc: int, n: int) -> float:
    """(1/n) log(e n^dvc), the growth-function rate bound, in nats."""
    if dvc < 1 or n < 1:
        raise ValueError("dvc and n must be at least 1")
    return (1.0 + dvc * math.log(n)) / n


def _guard(spec: ThresholdClassSpec, n_points: int) -> None:
    states = (spec.k + 1) * spec.k**n_points
    if states > _MAX_STATES:
        raise ValueError(
            f"enumeration over {states} states exceeds the {_MAX_STATES} guard "
            f"(k={spec.k}, points={n_points}); reduce k or n"
        )


# ---------------------------------------------------------------------------
# version-space enumeration

# For one x^n the distinct labelings correspond to threshold intervals
# [1, v1], [v1+1, v2], ..., [vm+1, k+1] where v1 < ... < vm are the distinct
# values in x^n.  Each state below is one (x^n, interval) pair.


@dataclass(frozen=True)
class VersionState:
    prob_xn: float
    lo: int
    hi: int


def _interval_edges(k: int, xs: tuple) -> list[tuple[int, int]]:
    cuts = sorted(set(xs))
    edges = [1] + [v + 1 for v in cuts] + [k + 2]
    return [(edges[i], edges[i + 1] - 1) for i in range(len(edges) - 1)]


def enumerate_version_states(spec: ThresholdClassSpec, n: int) -> list[VersionState]:
    """All (x^n, version-space interval) pairs with their x^n probabilities."""
    if n < 0:
        raise ValueError("n must be non-negative")
    _guard(spec, n)
    k = spec.k
    out = []
    for xs in itertools.product(range(1, k + 1), repeat=n):
        p_xn = float(np.prod(spec.px[np.array(xs, dtype=int) - 1])) if n > 0 else 1.0
        for lo, hi in _interval_edges(k, xs):
            out.append(VersionState(prob_xn=p_xn, lo=lo, hi=hi))
    return out


def _interval_mass(cum: np.ndarray, lo: int, hi: int) -> float:
    # cum[j] = mass of {t <= j}, cum[0] = 0
    return float(cum[hi] - cum[lo - 1])


def _binary_entropy(q: float) -> float:
    if q <= 0.0 or q >= 1.0:
        return 0.0
    return -q * math.log(q) - (1.0 - q) * math.log(1.0 - q)


def exact_cmi_yn(spec: ThresholdClassSpec, n: int) -> float:
    """I(T; Y^n | X^n) in nats by full enumeration; 0 when n = 0."""
    if n == 0:
        return 0.0
    _require_realizable(spec)
    _guard(spec, n)
    cum = np.concatenate([[0.0], np.cumsum(spec.prior_t)])
    terms = []
    for xs in itertools.product(range(1, spec.k + 1), repeat=n):
        p_xn = float(np.prod(spec.px[np.array(xs, dtype=int) - 1]))
        ent = math.fsum(
            -m * math.log(m)
            for lo, hi in _interval_edges(spec.k, xs)
            if (m := _interval_mass(cum, lo, hi)) > 0.0
        )
        terms.append(p_xn * ent)
    return math.fsum(terms)


def exact_cmi_test(spec: ThresholdClassSpec, n: int) -> float:
    """I(T; Y | X, Z^n) in nats by full enumeration over x^n, groups, and x."""
    _require_realizable(spec)
    cum = np.concatenate([[0.0], np.cumsum(spec.prior_t)])
    px = spec.px
    k = spec.k
    terms = []
    for st in enumerate_version_states(spec, n):
        mass = _interval_mass(cum, st.lo, st.hi)
        if mass <= 0.0:
            continue
        for x in range(1, k + 1):
            q1 = _interval_mass(cum, st.lo, min(st.hi, x)) / mass if x >= st.lo else 0.0
            terms.append(st.prob_xn * mass * px[x - 1] * _binary_entropy(q1))
    return math.fsum(terms)


def exact_bayes_excess(
    spec: ThresholdClassSpec,
    n: int,
    alg: str = "posterior_sampling",
    prior0: np.ndarray | None = None,
) -> float:
    """Exact Bayes excess 0-1 risk of the named algorithm.

    The algorithm's posterior restricts prior0 (default: the generating
    prior) to the version-space interval; posterior_sampling predicts with
    one posterior draw, bayes_optimal takes the posterior majority label.
    Realizable labels make the optimal risk zero, so risk equals excess.
    """
    _require_realizable(spec)
    if alg not in ("posterior_sampling", "bayes_optimal"):
        raise ValueError("alg must be 'posterior_sampling' or 'bayes_optimal'")
    p0 = spec.prior_t if prior0 is None else np.asarray(prior0, dtype=float)
    cum_true = np.concatenate([[0.0], np.cumsum(spec.prior_t)])
    cum0 = np.concatenate([[0.0], np.cumsum(p0)])
    px, k = spec.px, spec.k
    terms = []
    for st in enumerate_version_states(spec, n):
        mass_true = _interval_mass(cum_true, st.lo, st.hi)
        if mass_true <= 0.0:
            continue
        mass0 = _interval_mass(cum0, st.lo, st.hi)
        for x in range(1, k + 1):
            in_lo = _interval_mass(cum_true, st.lo, min(st.hi, x)) if x >= st.lo else 0.0
            q_true = in_lo / mass_true
            if mass0 > 0.0:
                q_alg = (
                    _interval_mass(cum0, st.lo, min(st.hi, x)) / mass0 if x >= st.lo else 0.0
                )
            else:
                # sampler prior puts no mass on this version space: fall back
                # to uniform over the interval
                q_alg = (min(st.hi, x) - st.lo + 1) / (st.hi - st.lo + 1) if x >= st.lo else 0.0
            if alg == "posterior_sampling":
                err = q_true * (1.0 - q_alg) + (1.0 - q_true) * q_alg
            else:
                pred = 1 if q_alg >= 0.5 else 0
                err = (1.0 - q_true) if pred == 1 else q_true
            terms.append(st.prob_xn * mass_true * px[x - 1] * err)
    return math.fsum(terms)


def _require_realizable(spec: ThresholdClassSpec) -> None:
    if not spec.realizable:
        raise ValueError("only the realizable labeling model is implemented")


# ---------------------------------------------------------------------------
# channels and capacity


@dataclass(frozen=True)
class DiscreteChannel:
    """Row-stochastic transition matrix; rows are inputs, columns outputs."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        if np.any(m < 0):
            raise ValueError("channel entries must be non-negative")
        if np.max(np.abs(m.sum(axis=1) - 1.0)) > 1e-12:
            raise ValueError("channel rows must sum to 1 within 1e-12")
        object.__setattr__(self, "matrix", m)

    @property
    def n_inputs(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class CapacityResult:
    capacity: float
    prior: np.ndarray
    lower: float
    upper: float
    iterations: int


def blahut_arimoto(
    channel: DiscreteChannel, tol: float = 1e-6, max_iter: int = 500_000
) -> CapacityResult:
    """Channel capacity in nats by the Blahut-Arimoto iteration.

    Stops when the certified bracket max_w D(P_w || s) - sum_w r_w D(P_w || s)
    falls below tol; the returned capacity is the certified lower end, so it
    is within tol of the true capacity.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    p = channel.matrix
    m = p.shape[0]
    r = np.full(m, 1.0 / m)
    mask = p > 0
    plogp = np.where(mask, p * np.log(np.where(mask, p, 1.0)), 0.0)
    for it in range(1, max_iter + 1):
        s = r @ p
        # D_w = sum_j p_wj log(p_wj / s_j); r > 0 keeps s positive wherever needed
        div = plogp - np.where(mask, p * np.log(np.where(s > 0, s, 1.0)), 0.0)
        d_w = div.sum(axis=1)
        lower = float(r @ d_w)
        upper = float(d_w.max())
        if upper - lower <= tol:
            return CapacityResult(capacity=lower, prior=r, lower=lower, upper=upper, iterations=it)
        r = r * np.exp(d_w - d_w.max())
        r = r / r.sum()
    raise RuntimeError(f"capacity iteration did not certify tol={tol} in {max_iter} steps")


def threshold_channel(spec: ThresholdClassSpec, n: int) -> DiscreteChannel:
    """The channel T -> Z^n = (X^n, Y^n) with X^n drawn iid from px."""
    _require_realizable(spec)
    _guard(spec, n)
    k = spec.k
    columns: dict[tuple, int] = {}
    rows = [[] for _ in range(k + 1)]  # (col, prob) pairs per threshold
    for xi, xs in enumerate(itertools.product(range(1, k + 1), repeat=n)):
        p_xn = float(np.prod(spec.px[np.array(xs, dtype=int) - 1])) if n > 0 else 1.0
        for ti, t in enumerate(range(1, k + 2)):
            lab = tuple(1 if x >= t else 0 for x in xs)
            col = columns.setdefault((xi, lab), len(columns))
            rows[ti].append((col, p_xn))
    mat = np.zeros((k + 1, len(columns)))
    for ti, pairs in enumerate(rows):
        for col, prob in pairs:
            mat[ti, col] += prob
    return DiscreteChannel(mat)


def conjecture_table(spec: ThresholdClassSpec, ns) -> list[dict]:
    """Diagnostic rows of I(T; Y^n | X^n) scaled by n / d_vc; never asserted."""
    rows = []
    for n in ns:
        v = exact_cmi_yn(spec, n)
        rows.append({"n": int(n), "cmi_yn": v, "cmi_yn_scaled": v * n / 1.0})
    return rows
