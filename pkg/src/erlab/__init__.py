"""erlab: a numerical laboratory for excess-risk bounds.

Estimates minimax and Bayes excess risk for conjugate Gaussian regression
and one-dimensional threshold classification, computes the information
quantities the risk bounds consume (mutual information, conditional mutual
information, channel capacity), and evaluates the bounds themselves so that
every comparison in the test suite runs against an independently computed
quantity.
"""

from .envelopes import (
    BOUND_NAMES,
    BoundReport,
    CumulantEnvelope,
    GaussianMeanBall,
    bound_thm4,
    bound_thm5,
    bound_thm7,
    bound_thm10,
    family_radius,
    legendre_dual,
    legendre_dual_inverse,
    model_envelope,
    quadratic_envelope,
)
from .games import (
    FictitiousPlayResult,
    GameSolution,
    MixedStrategy,
    PayoffMatrix,
    PureGaps,
    ThresholdGameResult,
    build_payoff,
    duality_gap_pure,
    least_favorable_prior,
    solve_fictitious_play,
    solve_lp,
    threshold_minimax_game,
)
from .gaussians import Gaussian, gaussian_entropy, gaussian_kl, sample
from .linear_model import (
    Dataset,
    FiniteInput,
    GaussianInput,
    IdentityFeatures,
    LinearModelSpec,
    MonomialFeatures,
    TabulatedFeatures,
    UniformBoxInput,
    cmi_y_given_xzn,
    effective_dim_bound,
    generate,
    mi_kl_integrand,
    mi_w_zn,
    posterior,
    rls_predict,
)
from .lp import LPResult, LPUnboundedError, simplex_max
from .rates import RateFit, fit_rate, lemma2_residual, lower_rate_bound
from .risk import (
    AlgorithmSpec,
    EnvelopeReport,
    EnvelopeRow,
    RiskEstimate,
    bayes_excess_risk_mc,
    envelope_check,
    excess_risk_mc,
    paired_bayes_excess_mc,
    run_posterior_sampling,
)
from .seeding import SeedSpec
from .thresholds import (
    CapacityResult,
    DiscreteChannel,
    ThresholdClassSpec,
    VersionState,
    blahut_arimoto,
    conjecture_table,
    enumerate_version_states,
    exact_bayes_excess,
    exact_cmi_test,
    exact_cmi_yn,
    growth_count,
    sauer_bound,
    threshold_channel,
)

__version__ = "0.1.0"

__all__ = [
    "AlgorithmSpec",
    "BOUND_NAMES",
    "BoundReport",
    "CapacityResult",
    "CumulantEnvelope",
    "Dataset",
    "DiscreteChannel",
    "EnvelopeReport",
    "EnvelopeRow",
    "FictitiousPlayResult",
    "FiniteInput",
    "GameSolution",
    "Gaussian",
    "GaussianInput",
    "GaussianMeanBall",
    "IdentityFeatures",
    "LPResult",
    "LPUnboundedError",
    "LinearModelSpec",
    "MixedStrategy",
    "MonomialFeatures",
    "PayoffMatrix",
    "PureGaps",
    "RateFit",
    "RiskEstimate",
    "SeedSpec",
    "TabulatedFeatures",
    "ThresholdClassSpec",
    "ThresholdGameResult",
    "UniformBoxInput",
    "VersionState",
    "bayes_excess_risk_mc",
    "blahut_arimoto",
    "bound_thm10",
    "bound_thm4",
    "bound_thm5",
    "bound_thm7",
    "build_payoff",
    "cmi_y_given_xzn",
    "conjecture_table",
    "duality_gap_pure",
    "effective_dim_bound",
    "enumerate_version_states",
    "envelope_check",
    "exact_bayes_excess",
    "exact_cmi_test",
    "exact_cmi_yn",
    "excess_risk_mc",
    "family_radius",
    "fit_rate",
    "gaussian_entropy",
    "gaussian_kl",
    "generate",
    "growth_count",
    "least_favorable_prior",
    "legendre_dual",
    "legendre_dual_inverse",
    "lemma2_residual",
    "lower_rate_bound",
    "mi_kl_integrand",
    "mi_w_zn",
    "model_envelope",
    "paired_bayes_excess_mc",
    "posterior",
    "quadratic_envelope",
    "rls_predict",
    "run_posterior_sampling",
    "sample",
    "sauer_bound",
    "simplex_max",
    "solve_fictitious_play",
    "solve_lp",
    "threshold_channel",
    "threshold_minimax_game",
]
