"""Asymptotic rate checks: expansion residuals, log-log fits, lower bounds.

For the scalar conjugate location model (W ~ N(0, sigma_w^2), observations
W + noise with noise variance sigma^2) the exact mutual information is
(1/2) log(1 + n sigma_w^2 / sigma^2) and its large-n expansion is

    (1/2) log(n / 2 pi e) + h(W) + (1/2) log J,   J = 1 / sigma^2,

so the residual has the closed form (1/2) log(1 + sigma^2 / (n sigma_w^2)),
decaying like 1/n.  `lemma2_residual` evaluates the expansion terms
literally; the closed form is the test oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float


def lemma2_residual(sigma_w: float, sigma: float, ns) -> np.ndarray:
    """Exact MI minus its expansion, per sample size, in nats."""
    if sigma_w <= 0 or sigma <= 0:
        raise ValueError("sigma_w and sigma must be positive")
    ns = np.asarray(ns, dtype=float)
    if np.any(ns < 1):
        raise ValueError("sample sizes must be at least 1")
    exact = 0.5 * np.log1p(ns * sigma_w**2 / sigma**2)
    entropy_w = 0.5 * math.log(2.0 * math.pi * math.e * sigma_w**2)
    fisher = 1.0 / sigma**2
    expansion = 0.5 * np.log(ns / (2.0 * math.pi * math.e)) + entropy_w + 0.5 * math.log(fisher)
    return exact - expansion


def fit_rate(ns, values) -> RateFit:
    """Least squares fit of log(values) against log(ns)."""
    ns = np.asarray(ns, dtype=float)
    values = np.asarray(values, dtype=float)
    if ns.shape != values.shape or ns.ndim != 1 or ns.size < 2:
        raise ValueError("need two equal-length 1-D arrays with at least 2 points")
    if np.any(ns <= 0) or np.any(values <= 0):
        raise ValueError("log-log fit needs positive ns and values")
    lx, ly = np.log(ns), np.log(values)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return RateFit(slope=float(slope), intercept=float(intercept), r_squared=r2)


def lower_rate_bound(d: int, e_log_det_j: float, n: int) -> float:
    """(d / (n pi)) exp(-(2/d) E[log det J]).

    The asymptotic statement carries an o(1) term inside the exponent; it is
    dropped here, so treat the value as the limiting rate, not a finite-n
    certified bound.
    """
    if d < 1 or n < 1:
        raise ValueError("d and n must be at least 1")
    return (d / (n * math.pi)) * math.exp(-(2.0 / d) * e_log_det_j)
