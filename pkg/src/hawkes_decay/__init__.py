"""Hawkes processes with exponential kernels and the uncertainty of their decay.

Simulation by thinning, exact log-likelihoods, four decay estimators,
Gamma-Exponential conjugate inference over sequences of decay estimates, a
changepoint sampler for breaks in stationarity, and the synthetic studies
that exercise them.
"""

from .bayes import GammaExpModel, GammaExponentialDecay, bayesian_bootstrap, diagnose, empirical_bootstrap
from .changepoint import ChangepointModel, ChangepointSampler, exact_small_posterior, mcmc
from .core import (
    EventStream,
    HawkesParams,
    RealizationSet,
    as_realizations,
    granger_causes,
    influence_direction,
    intensity_at,
    is_stationary,
    spectral_radius,
    validate,
)
from .estimators import (
    DecayEstimates,
    ExpHawkesEstimator,
    FitConfig,
    SequentialDecayEstimator,
    fit_decay,
    fit_mu_alpha,
    sequential_estimates,
)
from .exceptions import HawkesError, NumericalError, ValidationError
from .likelihood import LoglikOptions, loglik_multi, loglik_scan, loglik_uni, rescale
from .sim import SimSpec, simulate, simulate_batch

__version__ = "0.1.0"

__all__ = [
    "EventStream",
    "HawkesParams",
    "RealizationSet",
    "as_realizations",
    "validate",
    "spectral_radius",
    "is_stationary",
    "intensity_at",
    "influence_direction",
    "granger_causes",
    "SimSpec",
    "simulate",
    "simulate_batch",
    "LoglikOptions",
    "loglik_uni",
    "loglik_multi",
    "loglik_scan",
    "rescale",
    "FitConfig",
    "fit_decay",
    "fit_mu_alpha",
    "sequential_estimates",
    "DecayEstimates",
    "ExpHawkesEstimator",
    "SequentialDecayEstimator",
    "GammaExpModel",
    "GammaExponentialDecay",
    "diagnose",
    "empirical_bootstrap",
    "bayesian_bootstrap",
    "ChangepointModel",
    "ChangepointSampler",
    "mcmc",
    "exact_small_posterior",
    "HawkesError",
    "ValidationError",
    "NumericalError",
]
