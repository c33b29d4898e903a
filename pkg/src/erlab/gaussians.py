"""Multivariate Gaussian primitives: KL divergence, entropy, sampling.

All information quantities in this package are in nats.  Closed forms used
here, for p = N(mu1, S1) and q = N(mu2, S2) in d dimensions:

    KL(p || q) = (1/2) [ log(|S2|/|S1|) - d + tr(S2^{-1} S1)
                         + (mu2 - mu1)^T S2^{-1} (mu2 - mu1) ]
    h(p)       = (d/2) log(2 pi e) + (1/2) log |S1|
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .seeding import SeedSpec

# Cholesky pivots below this are treated as numerically semidefinite and the
# sampler switches to an eigendecomposition factor.
_PIVOT_FLOOR = 1e-12


@dataclass(frozen=True)
class Gaussian:
    """Mean vector and symmetric PSD covariance; shapes validated on build."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        cov = np.atleast_2d(np.asarray(self.cov, dtype=float))
        if mean.ndim != 1:
            raise ValueError("mean must be a vector")
        d = mean.shape[0]
        if cov.shape != (d, d):
            raise ValueError(f"cov must be {d}x{d}, got {cov.shape}")
        scale = max(1.0, float(np.max(np.abs(cov))))
        if not np.allclose(cov, cov.T, atol=1e-10 * scale):
            raise ValueError("cov must be symmetric")
        cov = 0.5 * (cov + cov.T)
        if d <= 64:
            w = np.linalg.eigvalsh(cov)
            if w.min() < -1e-9 * scale:
                raise ValueError("cov must be positive semidefinite")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def _chol_or_eig_factor(cov: np.ndarray) -> np.ndarray:
    """Matrix F with F F^T = cov. Cholesky when PD, eigenfactor otherwise."""
    try:
        chol = np.linalg.cholesky(cov)
        if np.min(np.diag(chol)) >= _PIVOT_FLOOR:
            return chol
    except np.linalg.LinAlgError:
        pass
    w, v = np.linalg.eigh(cov)
    w = np.clip(w, 0.0, None)
    return v * np.sqrt(w)


def sample(p: Gaussian, seed: SeedSpec, count: int = 1) -> np.ndarray:
    """Draw ``count`` iid points from p; shape (count, d), deterministic in seed."""
    if count < 0:
        raise ValueError("count must be non-negative")
    factor = _chol_or_eig_factor(p.cov)
    z = seed.generator().standard_normal((count, p.dim))
    return p.mean + z @ factor.T


def gaussian_kl(p: Gaussian, q: Gaussian) -> float:
    """KL(p || q) in nats. Raises if q.cov is singular (degenerate reference)."""
    if p.dim != q.dim:
        raise ValueError(f"dimension mismatch: {p.dim} vs {q.dim}")
    d = p.dim
    try:
        chol_q = np.linalg.cholesky(q.cov)
    except np.linalg.LinAlgError:
        raise ValueError("q.cov is singular: KL against a degenerate reference") from None
    logdet_q = 2.0 * float(np.sum(np.log(np.diag(chol_q))))
    sign, logdet_p = np.linalg.slogdet(p.cov)
    if sign <= 0:
        return math.inf
    half = np.linalg.solve(chol_q, p.cov)
    trace = float(np.trace(np.linalg.solve(chol_q, half.T)))
    u = np.linalg.solve(chol_q, q.mean - p.mean)
    mahal = float(u @ u)
    return 0.5 * (logdet_q - logdet_p - d + trace + mahal)


def gaussian_entropy(p: Gaussian) -> float:
    """Differential entropy in nats; -inf for a degenerate covariance."""
    sign, logdet = np.linalg.slogdet(p.cov)
    if sign <= 0:
        return -math.inf
    return 0.5 * p.dim * math.log(2.0 * math.pi * math.e) + 0.5 * float(logdet)
