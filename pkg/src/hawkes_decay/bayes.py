"""Conjugate Gamma-Exponential inference over sequences of decay estimates.

Decay estimates are modelled as Exponential draws with rate ``lam`` and
``lam ~ Gamma(shape=a0, rate=b0)``. The posterior is Gamma(a0 + K, b0 + sum),
and the predictive of a new estimate is Lomax. Every predictive formula here
is written directly as ``Lomax(shape, scale)``, whose mean is
``scale / (shape - 1)`` and quantile ``scale * ((1 - u) ** (-1 / shape) - 1)``.

Two shape conventions exist for the predictive:

* ``"paper"`` (default): shape ``a0``, scale ``b0 + sum``. With ``a0 = K``
  this gives the predictive mean ``(b0 + sum) / (K - 1)``.
* ``"conjugate"``: the textbook shape ``a0 + K``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .exceptions import EmptyInput, ShapeTooSmall, TooFewResamples, ValidationError

__all__ = [
    "GammaExpModel",
    "GammaPosterior",
    "PredictiveSummary",
    "posterior",
    "predictive_mean_paper",
    "predictive_mean_conjugate",
    "predictive_interval",
    "lomax_quantile",
    "summarize",
    "diagnose",
    "empirical_bootstrap",
    "bayesian_bootstrap",
    "GammaExponentialDecay",
]

Convention = Literal["paper", "conjugate"]


def _values(estimates) -> np.ndarray:
    v = getattr(estimates, "values", estimates)
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if v.ndim != 1:
        raise ValidationError("estimates must be one-dimensional")
    if not np.all(np.isfinite(v)):
        raise ValidationError("estimates must be finite")
    if np.any(v < 0):
        raise ValidationError("decay estimates must be nonnegative")
    return v


@dataclass(frozen=True)
class GammaExpModel:
    """Prior ``Gamma(a0, b0)``; ``a0=None`` means "use the number of estimates"."""

    b0: float = 1.0
    a0: float | None = None

    def __post_init__(self):
        if not self.b0 > 0:
            raise ValidationError(f"b0={self.b0} must be > 0")
        if self.a0 is not None and not self.a0 > 0:
            raise ValidationError(f"a0={self.a0} must be > 0")

    def shape(self, K: int) -> float:
        a0 = float(K) if self.a0 is None else float(self.a0)
        if not a0 > 0:
            raise ShapeTooSmall("a0 defaults to K, which needs at least one estimate")
        return a0


@dataclass(frozen=True)
class GammaPosterior:
    """Gamma over the Exponential rate: ``shape`` and ``rate``."""

    shape: float
    rate: float

    @property
    def mean(self) -> float:
        return self.shape / self.rate

    @property
    def var(self) -> float:
        return self.shape / self.rate ** 2


def posterior(model: GammaExpModel, estimates) -> GammaPosterior:
    v = _values(estimates)
    if model.a0 is None and len(v) == 0:
        raise ShapeTooSmall("with no estimates a0 must be given explicitly")
    return GammaPosterior(model.shape(len(v)) + len(v), model.b0 + float(v.sum()))


def lomax_quantile(u, shape: float, scale: float):
    u = np.asarray(u, dtype=float)
    return scale * np.expm1(-np.log1p(-u) / shape)


def lomax_params(model: GammaExpModel, estimates, convention: Convention = "paper"):
    v = _values(estimates)
    if model.a0 is None and len(v) == 0:
        raise ShapeTooSmall("with no estimates a0 must be given explicitly")
    a0 = model.shape(len(v))
    scale = model.b0 + float(v.sum())
    if convention == "paper":
        return a0, scale
    if convention == "conjugate":
        return a0 + len(v), scale
    raise ValidationError(f"unknown predictive convention {convention!r}")


def predictive_mean_paper(model: GammaExpModel, estimates) -> float:
    """``(b0 + sum) / (a0 - 1)``."""
    shape, scale = lomax_params(model, estimates, "paper")
    if shape <= 1:
        raise ShapeTooSmall(f"predictive mean needs a0 > 1, got a0={shape}")
    return scale / (shape - 1)


def predictive_mean_conjugate(model: GammaExpModel, estimates) -> float:
    """``(b0 + sum) / (a0 + K - 1)``."""
    shape, scale = lomax_params(model, estimates, "conjugate")
    if shape <= 1:
        raise ShapeTooSmall(f"predictive mean needs a0 + K > 1, got {shape}")
    return scale / (shape - 1)


def predictive_mean(model, estimates, convention: Convention = "paper") -> float:
    if convention == "paper":
        return predictive_mean_paper(model, estimates)
    return predictive_mean_conjugate(model, estimates)


def predictive_interval(model: GammaExpModel, estimates, level: float = 0.95,
                        convention: Convention = "paper") -> tuple[float, float]:
    """Equal-tailed predictive credible interval at ``level``."""
    if not 0 < level < 1:
        raise ValidationError(f"level={level} must lie strictly between 0 and 1")
    shape, scale = lomax_params(model, estimates, convention)
    tail = 0.5 * (1 - level)
    lo, hi = lomax_quantile([tail, 1 - tail], shape, scale)
    return float(lo), float(hi)


@dataclass(frozen=True)
class PredictiveSummary:
    beta_prime: float
    ci: tuple
    shift: float
    K: int
    sum_estimates: float
    level: float = 0.95
    convention: str = "paper"
    a0: float = 0.0
    b0: float = 0.0
    beta_prime_conjugate: float | None = None

    def to_dict(self) -> dict:
        return {
            "beta_prime": self.beta_prime,
            "ci": [self.ci[0], self.ci[1]],
            "level": self.level,
            "shift": self.shift,
            "K": self.K,
            "sum_estimates": self.sum_estimates,
            "convention": self.convention,
            "a0": self.a0,
            "b0": self.b0,
            "beta_prime_paper": (self.beta_prime if self.convention == "paper"
                                 else None),
            "beta_prime_conjugate": self.beta_prime_conjugate,
        }


def summarize(model: GammaExpModel, estimates, level: float = 0.95,
              convention: Convention = "paper") -> PredictiveSummary:
    v = _values(estimates)
    bp = predictive_mean(model, v, convention)
    try:
        conj = predictive_mean_conjugate(model, v)
    except ShapeTooSmall:
        conj = None
    return PredictiveSummary(
        beta_prime=bp, ci=predictive_interval(model, v, level, convention),
        shift=model.b0 - bp, K=len(v), sum_estimates=float(v.sum()), level=level,
        convention=convention, a0=model.shape(len(v)), b0=model.b0,
        beta_prime_conjugate=conj)


# ---------------------------------------------------------------------------
# bootstrap


@dataclass(frozen=True)
class BootstrapSummary:
    estimate: float
    ci_low: float
    ci_high: float
    draws: np.ndarray
    method: str


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def empirical_bootstrap(samples, statistic: Callable = np.mean, level: float = 0.95,
                        resamples: int = 2000, seed: int = 0) -> BootstrapSummary:
    """Pivotal bootstrap interval ``[2 t - q_hi, 2 t - q_lo]``."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise EmptyInput("bootstrap needs at least one sample")
    if resamples < 2:
        raise TooFewResamples(f"resamples={resamples}; need at least 2")
    if not 0 < level < 1:
        raise ValidationError(f"level={level} must lie strictly between 0 and 1")
    theta = float(statistic(x))
    idx = _rng(seed).integers(0, x.shape[0], size=(resamples, x.shape[0]))
    draws = np.array([statistic(x[i]) for i in idx], dtype=float)
    tail = 50 * (1 - level)
    q_lo, q_hi = np.percentile(draws, [tail, 100 - tail])
    return BootstrapSummary(theta, 2 * theta - q_hi, 2 * theta - q_lo, draws, "empirical")


def weighted_mean(x, w):
    return float(np.dot(w, x))


def bayesian_bootstrap(samples, statistic: Callable = weighted_mean, draws: int = 2000,
                       seed: int = 0, level: float = 0.95) -> BootstrapSummary:
    """Flat-Dirichlet weighted bootstrap.

    ``statistic(samples, weights)`` must accept weights summing to one; the
    default is the weighted mean.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise EmptyInput("bootstrap needs at least one sample")
    if draws < 1:
        raise TooFewResamples(f"draws={draws}; need at least 1")
    w = _rng(seed).dirichlet(np.ones(x.shape[0]), size=draws)
    vals = np.array([statistic(x, wi) for wi in w], dtype=float)
    tail = 50 * (1 - level)
    lo, hi = np.percentile(vals, [tail, 100 - tail])
    mean = float(vals.mean())
    return BootstrapSummary(mean, float(min(lo, mean)), float(max(hi, mean)), vals, "bayesian")


@dataclass(frozen=True)
class Diagnosis:
    """``shift = b0 - beta'``: positive when the hypothesis over-estimates."""

    shift: float
    ci_low: float
    ci_high: float
    beta_prime: float
    b0: float

    @property
    def verdict(self) -> str:
        if self.ci_low > 0:
            return "over-estimate"
        if self.ci_high < 0:
            return "under-estimate"
        return "consistent"


def diagnose(model: GammaExpModel, estimates, convention: Convention = "paper",
             draws: int = 2000, seed: int = 0, level: float = 0.95) -> Diagnosis:
    """Shift of the predictive mean away from the hypothesis ``b0``.

    The interval comes from a Bayesian bootstrap over the estimates, each draw
    recomputing the predictive mean with Dirichlet-weighted estimates.
    """
    v = _values(estimates)
    if len(v) == 0:
        raise EmptyInput("diagnosis needs at least one estimate")
    bp = predictive_mean(model, v, convention)
    K = len(v)

    def shift_stat(x, w):
        return model.b0 - predictive_mean(model, K * w * x, convention)

    boot = bayesian_bootstrap(v, shift_stat, draws=draws, seed=seed, level=level)
    shift = model.b0 - bp
    return Diagnosis(shift, min(boot.ci_low, shift), max(boot.ci_high, shift), bp, model.b0)


# ---------------------------------------------------------------------------
# estimator API


class GammaExponentialDecay(BaseEstimator):
    """Conjugate decay model fitted on a sequence of decay estimates.

    Parameters
    ----------
    b0 : float
        Hypothesis on the decay.
    a0 : float or None
        Prior shape; the number of estimates when None.
    level : float
        Credible level for :meth:`predict_interval`.
    predictive : {"paper", "conjugate"}
    """

    def __init__(self, b0=1.0, a0=None, level=0.95, predictive="paper"):
        self.b0 = b0
        self.a0 = a0
        self.level = level
        self.predictive = predictive

    def fit(self, X, y=None):
        self.estimates_ = _values(X)
        self.model_ = GammaExpModel(b0=self.b0, a0=self.a0)
        self.posterior_ = posterior(self.model_, self.estimates_)
        self.summary_ = summarize(self.model_, self.estimates_, self.level, self.predictive)
        return self

    def _check(self):
        if not hasattr(self, "summary_"):
            raise NotFittedError("call fit first")

    def predict(self, X=None) -> float:
        """Predictive mean of the next decay estimate."""
        self._check()
        return self.summary_.beta_prime

    def predict_interval(self, level=None):
        self._check()
        return predictive_interval(self.model_, self.estimates_,
                                   self.level if level is None else level, self.predictive)
