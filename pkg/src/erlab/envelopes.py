"""Cumulant envelopes, Legendre duals, and the excess-risk bound evaluators.

An envelope phi dominates the cumulant generating function of the loss on
[0, b).  Its Legendre dual and generalized inverse,

    phi*(gamma)    = sup_{lam in [0,b)} lam * gamma - phi(lam)
    phi*^{-1}(x)   = sup { gamma >= 0 : phi*(gamma) <= x },

turn information radii into risk bounds.  For the quadratic envelope
phi(lam) = q lam^2 on [0, b) both have closed forms:

    phi*(gamma)  = gamma^2 / (4q)          for 0 <= gamma <= 2qb
                 = b gamma - q b^2         for gamma >= 2qb
    phi*^{-1}(x) = 2 sqrt(q x)             for 0 <= x <= q b^2
                 = x / b + q b             for x >= q b^2

The Gaussian regression loss admits q = 16 sigma_w^2 + 8 sigma_e^2 with
b = 1 / (2q); `model_envelope` builds that instance.  General envelopes are
conjugated numerically (grid plus golden-section, tolerance 1e-10) and
inverted by monotone bisection to the same tolerance; the numeric route
doubles as the test oracle for the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_TOL = 1e-10

BOUND_NAMES = frozenset(
    ["thm4a", "thm4b", "thm4c", "thm5a", "thm5b", "thm5c", "thm7", "thm10", "lower_rate"]
)


@dataclass(frozen=True)
class CumulantEnvelope:
    """phi on [0, b): quadratic when quad_coeff is set, else the callable phi."""

    b: float
    quad_coeff: float | None = None
    phi: Callable[[float], float] | None = None

    def __post_init__(self):
        if self.b <= 0:
            raise ValueError("b must be positive")
        if (self.quad_coeff is None) == (self.phi is None):
            raise ValueError("provide exactly one of quad_coeff or phi")
        if self.quad_coeff is not None and self.quad_coeff <= 0:
            raise ValueError("quad_coeff must be positive")

    def value(self, lam: float) -> float:
        if self.quad_coeff is not None:
            return self.quad_coeff * lam * lam
        return float(self.phi(lam))


def quadratic_envelope(q: float, b: float | None = None) -> CumulantEnvelope:
    return CumulantEnvelope(b=(1.0 / (2.0 * q) if b is None else b), quad_coeff=q)


def model_envelope(sigma_w: float, sigma_e: float) -> CumulantEnvelope:
    """Envelope certified for the squared loss of posterior sampling."""
    q = 16.0 * sigma_w**2 + 8.0 * sigma_e**2
    return CumulantEnvelope(b=1.0 / (2.0 * q), quad_coeff=q)


@dataclass(frozen=True)
class GaussianMeanBall:
    """Prior family {N(mu, sigma_w^2 I) : ||mu||_2 <= c}."""

    c: float
    sigma_w: float

    def __post_init__(self):
        if self.c < 0:
            raise ValueError("c must be non-negative")
        if self.sigma_w <= 0:
            raise ValueError("sigma_w must be positive")


def family_radius(family: GaussianMeanBall) -> float:
    """sup over the family of KL from the center N(0, sigma_w^2 I):
    c^2 / (2 sigma_w^2), attained on the boundary of the mean ball."""
    return family.c**2 / (2.0 * family.sigma_w**2)


# ---------------------------------------------------------------------------
# conjugation


def _dual_quadratic(q: float, b: float, gamma: float) -> float:
    lam = min(max(gamma / (2.0 * q), 0.0), b)
    return lam * gamma - q * lam * lam


def legendre_dual(env: CumulantEnvelope, gamma: float) -> float:
    if env.quad_coeff is not None:
        return _dual_quadratic(env.quad_coeff, env.b, gamma)
    return legendre_dual_numeric(env, gamma)


def legendre_dual_numeric(env: CumulantEnvelope, gamma: float) -> float:
    """sup_{lam in [0,b)} lam*gamma - phi(lam) by grid plus golden-section.

    phi must be evaluable on the closed interval; continuity makes the sup
    over [0, b) equal to the max over [0, b].
    """
    b = env.b

    def obj(lam: float) -> float:
        return lam * gamma - env.value(lam)

    grid = np.linspace(0.0, b, 1025)
    vals = np.array([obj(t) for t in grid])
    k = int(np.argmax(vals))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, grid.size - 1)]
    # golden-section: the grid bracket contains a maximizer
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = obj(x1), obj(x2)
    while hi - lo > _TOL * max(1.0, b):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = obj(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = obj(x1)
    best = max(f1, f2, float(vals[k]))
    return max(best, 0.0) if gamma <= 0 else best


def legendre_dual_inverse(env: CumulantEnvelope, x: float) -> float:
    """Generalized inverse sup{gamma >= 0 : phi*(gamma) <= x}; requires x >= 0."""
    if x < 0:
        raise ValueError("argument of the inverse dual must be non-negative")
    if env.quad_coeff is not None:
        q, b = env.quad_coeff, env.b
        knee = q * b * b
        if x <= knee:
            return 2.0 * math.sqrt(q * x)
        return x / b + q * b
    return _inverse_numeric(env, x)


def _inverse_numeric(env: CumulantEnvelope, x: float) -> float:
    if x == 0.0:
        return 0.0
    lo, hi = 0.0, 1.0
    for _ in range(200):
        if legendre_dual_numeric(env, hi) > x:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise ValueError("inverse dual did not bracket: envelope slope appears unbounded")
    while hi - lo > _TOL * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if legendre_dual_numeric(env, mid) <= x:
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# bound evaluators


@dataclass(frozen=True)
class BoundReport:
    bound_name: str
    inputs: dict = field(default_factory=dict)
    value: float = 0.0

    def __post_init__(self):
        if self.bound_name not in BOUND_NAMES:
            raise ValueError(f"unknown bound_name {self.bound_name!r}")

    def as_dict(self) -> dict:
        return {
            "bound_name": self.bound_name,
            "inputs": {k: float(v) for k, v in self.inputs.items()},
            "value": float(self.value),
        }


def bound_thm4(kind: str, loss_range: float, cmi: float) -> BoundReport:
    """Conditional-information excess risk bounds for a [0, B]-valued loss:
    (a) 2*B*I, (b) 3*B*I, (c) B*sqrt(I/2) with I = I(W; Y | X, Z^n)."""
    if loss_range <= 0:
        raise ValueError("loss range B must be positive")
    if cmi < 0:
        raise ValueError("cmi must be non-negative")
    if kind == "a":
        value = 2.0 * loss_range * cmi
    elif kind == "b":
        value = 3.0 * loss_range * cmi
    elif kind == "c":
        value = loss_range * math.sqrt(cmi / 2.0)
    else:
        raise ValueError("kind must be 'a', 'b', or 'c'")
    return BoundReport(f"thm4{kind}", {"B": loss_range, "cmi": cmi}, value)


def bound_thm5(kind: str, loss_range: float, kappa_n: float, n: int) -> BoundReport:
    """Capacity form of the same bounds: I replaced by kappa_n / n."""
    if n <= 0:
        raise ValueError("n must be positive")
    if kappa_n < 0:
        raise ValueError("kappa_n must be non-negative")
    inner = bound_thm4(kind, loss_range, kappa_n / n)
    return BoundReport(f"thm5{kind}", {"B": loss_range, "kappa_n": kappa_n, "n": n}, inner.value)


def bound_thm7(
    env: CumulantEnvelope, family: GaussianMeanBall, cmi_sup: float, n: int
) -> BoundReport:
    """Minimax bound phi*^{-1}(r/n + sup I(W; Y | X, Z^n)) with r the family radius."""
    if n <= 0:
        raise ValueError("n must be positive")
    if cmi_sup < 0:
        raise ValueError("cmi_sup must be non-negative")
    r = family_radius(family)
    value = legendre_dual_inverse(env, r / n + cmi_sup)
    return BoundReport("thm7", {"radius": r, "cmi_sup": cmi_sup, "n": n}, value)


def bound_thm10(
    env: CumulantEnvelope, family: GaussianMeanBall, mi_wzn: float, n: int
) -> BoundReport:
    """Posterior-sampling bound phi*^{-1}((I(W; Z^n) + r) / n)."""
    if n <= 0:
        raise ValueError("n must be positive")
    if mi_wzn < 0:
        raise ValueError("mi_wzn must be non-negative")
    r = family_radius(family)
    value = legendre_dual_inverse(env, (mi_wzn + r) / n)
    return BoundReport("thm10", {"radius": r, "mi_wzn": mi_wzn, "n": n}, value)
