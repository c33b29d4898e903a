"""Conjugate Gaussian linear regression and its information functionals.

Model: Y = W^T phi(X) + E with W ~ N(mu, sigma_w^2 I_d), E ~ N(0, sigma_e^2),
X drawn independently of W.  With lam := sigma_e^2 / sigma_w^2 the posterior
after n observations is Gaussian with

    mean = (Phi^T Phi + lam I)^{-1} (Phi^T Y + lam mu)
    cov  = (Phi^T Phi / sigma_e^2 + I / sigma_w^2)^{-1}

so the posterior mean coincides with the regularized least squares solution
argmin ||Phi w - Y||^2 + lam ||w - mu||^2.

The mutual information I(W; Z^n) is a Monte Carlo average over datasets of
KL(posterior || prior), expanded in the eigenbasis of Phi^T Phi / n, and the
conditional term I(W; Y | X, Z^n) averages (1/2) log(1 + phi(X)^T Cov phi(X)
/ sigma_e^2) over a fresh test input.  Both are reported in nats with a
standard error (sample std / sqrt(reps)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .gaussians import Gaussian
from .seeding import SeedSpec, chunk_ranges, map_indexed

# Eigenvalues of Phi^T Phi / n below this are treated as exactly zero.
_EIG_FLOOR = 1e-12


# ---------------------------------------------------------------------------
# feature maps


@dataclass(frozen=True)
class IdentityFeatures:
    """phi(x) = x on R^d."""

    d: int

    @property
    def dim(self) -> int:
        return self.d

    @property
    def in_dim(self) -> int:
        return self.d

    def batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        if xs.shape[-1] != self.d:
            raise ValueError(f"expected inputs of dimension {self.d}")
        return xs


@dataclass(frozen=True)
class MonomialFeatures:
    """Scalar x mapped to (1, x, ..., x^degree); degree 0 is the constant feature."""

    degree: int

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("degree must be non-negative")

    @property
    def dim(self) -> int:
        return self.degree + 1

    @property
    def in_dim(self) -> int:
        return 1

    def batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float).reshape(-1)
        return np.vander(xs, self.degree + 1, increasing=True)


@dataclass(frozen=True)
class TabulatedFeatures:
    """Lookup table from a finite input alphabet to feature vectors."""

    table: Mapping[int, np.ndarray]

    def __post_init__(self):
        dims = {np.asarray(v, dtype=float).shape for v in self.table.values()}
        if len(dims) != 1:
            raise ValueError("all feature vectors must share one shape")
        (shape,) = dims
        if len(shape) != 1:
            raise ValueError("feature vectors must be 1-D")

    @property
    def dim(self) -> int:
        return len(np.asarray(next(iter(self.table.values()))))

    @property
    def in_dim(self) -> int:
        return 1

    def batch(self, xs: np.ndarray) -> np.ndarray:
        flat = np.asarray(xs).reshape(-1)
        return np.stack([np.asarray(self.table[int(x)], dtype=float) for x in flat])


# ---------------------------------------------------------------------------
# input distributions


@dataclass(frozen=True)
class GaussianInput:
    dist: Gaussian

    @property
    def dim(self) -> int:
        return self.dist.dim

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        from .gaussians import _chol_or_eig_factor

        z = rng.standard_normal((n, self.dist.dim))
        return self.dist.mean + z @ _chol_or_eig_factor(self.dist.cov).T


@dataclass(frozen=True)
class UniformBoxInput:
    lows: np.ndarray
    highs: np.ndarray

    def __post_init__(self):
        lows = np.atleast_1d(np.asarray(self.lows, dtype=float))
        highs = np.atleast_1d(np.asarray(self.highs, dtype=float))
        if lows.shape != highs.shape or lows.ndim != 1:
            raise ValueError("lows and highs must be vectors of equal length")
        if np.any(highs < lows):
            raise ValueError("box must have highs >= lows")
        object.__setattr__(self, "lows", lows)
        object.__setattr__(self, "highs", highs)

    @property
    def dim(self) -> int:
        return self.lows.shape[0]

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.lows, self.highs, size=(n, self.dim))


@dataclass(frozen=True)
class FiniteInput:
    """Discrete input law; the companion of TabulatedFeatures."""

    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        values = np.atleast_1d(np.asarray(self.values, dtype=float))
        if values.ndim == 1:
            values = values[:, None]
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != (values.shape[0],):
            raise ValueError("probs must have one entry per value")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("probs must be a probability vector")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        idx = rng.choice(self.values.shape[0], size=n, p=self.probs)
        return self.values[idx]


# ---------------------------------------------------------------------------
# model and data


@dataclass(frozen=True)
class LinearModelSpec:
    features: IdentityFeatures | MonomialFeatures | TabulatedFeatures
    sigma_w: float
    sigma_e: float
    mu_prior: np.ndarray
    c: float
    inputs: GaussianInput | UniformBoxInput | FiniteInput

    def __post_init__(self):
        if self.sigma_w <= 0 or self.sigma_e <= 0:
            raise ValueError("sigma_w and sigma_e must be positive")
        mu = np.atleast_1d(np.asarray(self.mu_prior, dtype=float))
        if mu.shape != (self.features.dim,):
            raise ValueError(f"mu_prior must have length {self.features.dim}")
        if self.c < 0:
            raise ValueError("c must be non-negative")
        if float(np.linalg.norm(mu)) > self.c + 1e-12:
            raise ValueError("||mu_prior|| must not exceed c")
        if self.inputs.dim != self.features.in_dim:
            raise ValueError("input distribution dimension does not match feature map")
        object.__setattr__(self, "mu_prior", mu)

    @property
    def d(self) -> int:
        return self.features.dim

    @property
    def lam(self) -> float:
        return self.sigma_e**2 / self.sigma_w**2

    def prior(self, mean: np.ndarray | None = None) -> Gaussian:
        mu = self.mu_prior if mean is None else np.asarray(mean, dtype=float)
        return Gaussian(mu, self.sigma_w**2 * np.eye(self.d))

    def with_mean(self, mu: np.ndarray) -> "LinearModelSpec":
        return LinearModelSpec(
            self.features, self.sigma_w, self.sigma_e, np.asarray(mu, float), self.c, self.inputs
        )


@dataclass(frozen=True)
class Dataset:
    xs: np.ndarray
    ys: np.ndarray
    phi: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.phi.shape[0] != self.ys.shape[0]:
            raise ValueError("phi and ys must have matching lengths")

    @property
    def n(self) -> int:
        return self.ys.shape[0]


def generate(spec: LinearModelSpec, w: np.ndarray, n: int, seed: SeedSpec) -> Dataset:
    """Draw a dataset of n points under parameter w.

    Draw order within the stream is fixed (inputs, then noise), so equal
    seeds give byte-identical datasets.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    w = np.asarray(w, dtype=float)
    if w.shape != (spec.d,):
        raise ValueError(f"w must have length {spec.d}")
    rng = seed.generator()
    xs = spec.inputs.draw(rng, n)
    noise = spec.sigma_e * rng.standard_normal(n)
    phi = spec.features.batch(xs) if n > 0 else np.zeros((0, spec.d))
    ys = phi @ w + noise
    return Dataset(xs=xs, ys=ys, phi=phi)


def posterior(spec: LinearModelSpec, data: Dataset) -> Gaussian:
    """Posterior over W given the dataset; the prior itself when n = 0."""
    if data.n == 0:
        return spec.prior()
    lam = spec.lam
    gram = data.phi.T @ data.phi
    a_mat = gram + lam * np.eye(spec.d)
    mean = np.linalg.solve(a_mat, data.phi.T @ data.ys + lam * spec.mu_prior)
    cov = spec.sigma_e**2 * np.linalg.inv(a_mat)
    return Gaussian(mean, 0.5 * (cov + cov.T))


def rls_predict(spec: LinearModelSpec, data: Dataset, x) -> np.ndarray | float:
    """Prediction of the regularized least squares fit at x (single or batch)."""
    mean = posterior(spec, data).mean
    feats = spec.features.batch(np.atleast_1d(x))
    out = feats @ mean
    return float(out[0]) if out.shape == (1,) else out


# ---------------------------------------------------------------------------
# batched simulation over replicates

# Per-replicate draw order: w, inputs, noise, test input, test noise, then
# any algorithm randomness.  Replicate r uses seed.substream(r).


def _draw_replicates(
    spec: LinearModelSpec,
    seed: SeedSpec,
    lo: int,
    hi: int,
    n: int,
    w_fixed: np.ndarray | None,
    prior_mean: np.ndarray | None,
    with_test: bool,
    extra_normals: int = 0,
):
    d, p = spec.d, spec.features.in_dim
    count = hi - lo
    ws = np.empty((count, d))
    xs = np.empty((count, n, p))
    noise = np.empty((count, n))
    x_test = np.empty((count, p)) if with_test else None
    e_test = np.empty(count) if with_test else None
    extras = np.empty((count, extra_normals)) if extra_normals else None
    mu = spec.mu_prior if prior_mean is None else np.asarray(prior_mean, dtype=float)
    for i in range(count):
        rng = seed.substream(lo + i)
        if w_fixed is None:
            ws[i] = mu + spec.sigma_w * rng.standard_normal(d)
        else:
            ws[i] = w_fixed
            # keep the stream layout identical whether w is drawn or pinned
            rng.standard_normal(d)
        xs[i] = spec.inputs.draw(rng, n)
        noise[i] = spec.sigma_e * rng.standard_normal(n)
        if with_test:
            x_test[i] = spec.inputs.draw(rng, 1)[0]
            e_test[i] = spec.sigma_e * rng.standard_normal()
        if extra_normals:
            extras[i] = rng.standard_normal(extra_normals)
    phi = spec.features.batch(xs.reshape(count * n, p)).reshape(count, n, d) if n > 0 else np.zeros((count, 0, d))
    ys = np.einsum("rnd,rd->rn", phi, ws) + noise
    phi_test = spec.features.batch(x_test) if with_test else None
    return ws, xs, phi, ys, x_test, phi_test, e_test, extras


def _posterior_batch(spec: LinearModelSpec, phi: np.ndarray, ys: np.ndarray, prior_mean=None):
    """Posterior means and shared solve pieces for a (reps, n, d) batch."""
    lam = spec.lam
    d = spec.d
    mu = spec.mu_prior if prior_mean is None else np.asarray(prior_mean, dtype=float)
    gram = np.einsum("rni,rnj->rij", phi, phi)
    a_mat = gram + lam * np.eye(d)
    rhs = np.einsum("rnd,rn->rd", phi, ys) + lam * mu
    means = np.linalg.solve(a_mat, rhs[..., None])[..., 0]
    covs = spec.sigma_e**2 * np.linalg.inv(a_mat)
    covs = 0.5 * (covs + np.swapaxes(covs, -1, -2))
    return gram, means, covs


def _mc_mean_se(chunk_stats: list[tuple[float, float, int]]) -> tuple[float, float]:
    # fixed-order reduction over (sum, sum of squares, count) triples
    total = sum(s[2] for s in chunk_stats)
    mean = math.fsum(s[0] for s in chunk_stats) / total
    sumsq = math.fsum(s[1] for s in chunk_stats)
    var = max(sumsq - total * mean * mean, 0.0) / (total - 1)
    return mean, math.sqrt(var / total)


def mi_w_zn(
    spec: LinearModelSpec,
    n: int,
    mc_reps: int = 100_000,
    seed: SeedSpec = SeedSpec(0),
    workers: int = 1,
) -> tuple[float, float]:
    """MC estimate of I(W; Z^n) in nats, with standard error.

    Averages KL(posterior || prior) over datasets, written in the eigenbasis
    of Phi^T Phi / n: with shat_i the (clamped) eigenvalues and lam the ridge
    weight, each draw contributes

        (1/2) [ sum_i log((n shat_i + lam)/lam) - d
                + sum_i lam/(n shat_i + lam) + ||mean - mu||^2 / sigma_w^2 ].
    """
    if n == 0:
        return 0.0, 0.0
    if mc_reps < 2:
        raise ValueError("mc_reps must be at least 2")
    lam, d = spec.lam, spec.d

    def one_chunk(args):
        lo, hi = args
        _, _, phi, ys, _, _, _, _ = _draw_replicates(spec, seed, lo, hi, n, None, None, False)
        gram, means, _ = _posterior_batch(spec, phi, ys)
        shat = np.linalg.eigvalsh(gram / n)
        shat[shat < _EIG_FLOOR] = 0.0
        scaled = n * shat + lam
        mahal = np.sum((means - spec.mu_prior) ** 2, axis=1) / spec.sigma_w**2
        vals = 0.5 * (
            np.sum(np.log(scaled / lam), axis=1) - d + np.sum(lam / scaled, axis=1) + mahal
        )
        return float(vals.sum()), float((vals * vals).sum()), vals.size

    stats = map_indexed(
        lambda i: one_chunk(chunk_ranges(mc_reps)[i]), len(chunk_ranges(mc_reps)), workers
    )
    return _mc_mean_se(stats)


def cmi_y_given_xzn(
    spec: LinearModelSpec,
    n: int,
    mc_reps: int = 100_000,
    seed: SeedSpec = SeedSpec(0),
    workers: int = 1,
) -> tuple[float, float]:
    """MC estimate of I(W; Y | X, Z^n) in nats, with standard error.

    Each draw contributes (1/2) log(1 + phi(X)^T Cov_post phi(X) / sigma_e^2)
    at a fresh test input X; the posterior covariance does not depend on the
    labels, so the integrand is mu-independent.
    """
    if mc_reps < 2:
        raise ValueError("mc_reps must be at least 2")

    def one_chunk(args):
        lo, hi = args
        _, _, phi, ys, _, phi_test, _, _ = _draw_replicates(spec, seed, lo, hi, n, None, None, True)
        if n > 0:
            _, _, covs = _posterior_batch(spec, phi, ys)
        else:
            covs = np.broadcast_to(spec.sigma_w**2 * np.eye(spec.d), (hi - lo, spec.d, spec.d))
        quad = np.einsum("rd,rde,re->r", phi_test, covs, phi_test)
        vals = 0.5 * np.log1p(quad / spec.sigma_e**2)
        return float(vals.sum()), float((vals * vals).sum()), vals.size

    stats = map_indexed(
        lambda i: one_chunk(chunk_ranges(mc_reps)[i]), len(chunk_ranges(mc_reps)), workers
    )
    return _mc_mean_se(stats)


def effective_dim_bound(spec: LinearModelSpec, data: Dataset) -> float:
    """Per-dataset effective dimension surrogate dominating the MI integrand:

    -sum_i log(lam / (n shat_i + lam)) + ||mean - mu||^2 / sigma_w^2.
    """
    if data.n == 0:
        return 0.0
    lam = spec.lam
    gram = data.phi.T @ data.phi
    shat = np.linalg.eigvalsh(gram / data.n)
    shat = np.where(shat < _EIG_FLOOR, 0.0, shat)
    mean = posterior(spec, data).mean
    mahal = float(np.sum((mean - spec.mu_prior) ** 2)) / spec.sigma_w**2
    return float(np.sum(np.log((data.n * shat + lam) / lam))) + mahal


def mi_kl_integrand(spec: LinearModelSpec, data: Dataset) -> float:
    """The I(W; Z^n) integrand for one dataset (KL of posterior from prior)."""
    if data.n == 0:
        return 0.0
    lam, d, n = spec.lam, spec.d, data.n
    gram = data.phi.T @ data.phi
    shat = np.linalg.eigvalsh(gram / n)
    shat = np.where(shat < _EIG_FLOOR, 0.0, shat)
    scaled = n * shat + lam
    mean = posterior(spec, data).mean
    mahal = float(np.sum((mean - spec.mu_prior) ** 2)) / spec.sigma_w**2
    return 0.5 * (
        float(np.sum(np.log(scaled / lam))) - d + float(np.sum(lam / scaled)) + mahal
    )
