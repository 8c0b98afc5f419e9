"""Single-changepoint model over a sequence of decay estimates.

Estimates ``x_1..x_K`` are Exponential with mean ``b1`` before index ``kappa``
and mean ``b2`` from ``kappa`` on, with ``b1 ~ Exponential(rate1)``,
``b2 ~ Exponential(rate2)`` and ``kappa`` uniform on ``1..K``. ``kappa = 1``
puts every estimate in the second segment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from . import _kernels
from .exceptions import DegenerateChain, NonPositiveEstimate, ValidationError

__all__ = [
    "ChangepointModel",
    "ChangepointPosterior",
    "ChangepointSummary",
    "mcmc",
    "exact_small_posterior",
    "summarize",
    "ChangepointSampler",
]


@dataclass(frozen=True)
class ChangepointModel:
    rate1: float = 1.0
    rate2: float = 0.7

    def __post_init__(self):
        if not (self.rate1 > 0 and self.rate2 > 0):
            raise ValidationError("hyper-prior rates must be > 0")


def _estimates(estimates) -> np.ndarray:
    x = np.atleast_1d(np.asarray(getattr(estimates, "values", estimates), dtype=float))
    if x.ndim != 1 or not np.all(np.isfinite(x)):
        raise ValidationError("estimates must be a finite 1-D sequence")
    if np.any(x <= 0):
        i = int(np.argmax(x <= 0))
        raise NonPositiveEstimate(f"estimate {i} = {x[i]} is not > 0")
    return x


@dataclass(frozen=True)
class ChangepointSummary:
    beta1_mean: float
    beta2_mean: float
    kappa_median: float
    kappa_fraction: float
    ordering: bool
    K: int

    def to_dict(self) -> dict:
        return {
            "beta1_mean": self.beta1_mean,
            "beta2_mean": self.beta2_mean,
            "kappa_median": self.kappa_median,
            "kappa_fraction": self.kappa_fraction,
            "ordering_beta1_lt_beta2": self.ordering,
            "K": self.K,
        }


@dataclass(frozen=True)
class ChangepointPosterior:
    b1: np.ndarray
    b2: np.ndarray
    kappa: np.ndarray
    acceptance: dict
    K: int
    seed: int = 0
    steps: tuple = field(default=(), repr=False)

    @property
    def n_samples(self) -> int:
        return self.b1.shape[0]

    def kappa_pmf(self) -> np.ndarray:
        """Empirical pmf over ``kappa = 1..K``."""
        counts = np.bincount(self.kappa.astype(np.int64), minlength=self.K + 1)[1:]
        return counts / counts.sum()

    def summary(self) -> ChangepointSummary:
        return summarize(self)


def mcmc(estimates, model: ChangepointModel = ChangepointModel(), n_samples: int = 20_000,
         burn_in: int | None = None, thin: int = 1, seed: int = 0) -> ChangepointPosterior:
    """Metropolis-within-Gibbs sampling of ``(b1, b2, kappa)``.

    ``b1`` and ``b2`` move by random-walk Metropolis on the log scale, with
    proposal scales tuned during burn-in; ``kappa`` is drawn from its exact
    full conditional. ``n_samples`` counts all iterations including burn-in
    (20% by default).

    Raises
    ------
    NonPositiveEstimate
        An estimate is zero or negative.
    DegenerateChain
        Post-burn-in acceptance of either mean fell below 1%.
    """
    x = _estimates(estimates)
    K = x.shape[0]
    if K == 1:
        raise ValidationError("the changepoint model needs K >= 2 estimates (or none)")
    if burn_in is None:
        burn_in = n_samples // 5
    if not 0 <= burn_in < n_samples:
        raise ValidationError(f"need 0 <= burn_in < n_samples, got {burn_in}, {n_samples}")
    if thin < 1:
        raise ValidationError("thin must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    normals = rng.standard_normal((n_samples, 2))
    uniforms = 1.0 - rng.random((n_samples, 3))
    start = math.log(float(np.mean(x))) if K else 0.0
    kappa0 = K // 2 + 1 if K else 1
    out, acc1, acc2, s1, s2 = _kernels.changepoint_chain(
        x, float(model.rate1), float(model.rate2), n_samples, burn_in, thin,
        normals, uniforms, 0.5, 0.5, start, start, kappa0)
    if min(acc1, acc2) < 0.01:
        raise DegenerateChain(f"post burn-in acceptance b1={acc1:.4f}, b2={acc2:.4f} below 1%")
    return ChangepointPosterior(
        b1=out[:, 0], b2=out[:, 1], kappa=out[:, 2].astype(np.int64),
        acceptance={"b1": acc1, "b2": acc2}, K=K, seed=seed, steps=(s1, s2))


def summarize(posterior: ChangepointPosterior) -> ChangepointSummary:
    """Posterior means of both decays, median changepoint and the ordering flag."""
    b1 = float(np.mean(posterior.b1))
    b2 = float(np.mean(posterior.b2))
    k = float(np.median(posterior.kappa))
    return ChangepointSummary(b1, b2, k, k / posterior.K if posterior.K else 0.0,
                              bool(b1 < b2), posterior.K)


def _log_segment_integral(n: int, s: float, rate: float, shift: int = 0) -> float:
    """``log of integral_0^inf rate e^{-rate b} b^{-(n - shift)} e^{-s/b} db``.

    Uses ``integral x^{v-1} e^{-a x - c/x} dx = 2 (c/a)^{v/2} K_v(2 sqrt(a c))``.
    """
    nu = shift + 1 - n
    if s <= 0:
        if nu <= 0:
            return math.inf
        return math.log(rate) + special.gammaln(nu) - nu * math.log(rate)
    z = 2.0 * math.sqrt(rate * s)
    return (math.log(rate) + math.log(2.0) + 0.5 * nu * math.log(s / rate)
            + math.log(special.kve(abs(nu), z)) - z)


@dataclass(frozen=True)
class ExactPosterior:
    kappa_pmf: np.ndarray
    b1_mean: float
    b2_mean: float
    b1_var: float
    b2_var: float


def exact_small_posterior(estimates, model: ChangepointModel = ChangepointModel()) -> ExactPosterior:
    """Exact changepoint posterior with both means integrated out.

    Each segment's marginal likelihood is a modified-Bessel closed form, so
    the ``kappa`` pmf and the moments of ``b1``, ``b2`` need no sampling.
    """
    x = _estimates(estimates)
    K = x.shape[0]
    if K < 2:
        raise ValidationError("exact posterior needs K >= 2")
    csum = np.concatenate([[0.0], np.cumsum(x)])
    logm = np.empty(K)
    m1 = np.empty((K, 2))
    m2 = np.empty((K, 2))
    for k in range(1, K + 1):
        n1, s1 = k - 1, csum[k - 1]
        n2, s2 = K - n1, csum[K] - s1
        l1 = _log_segment_integral(n1, s1, model.rate1)
        l2 = _log_segment_integral(n2, s2, model.rate2)
        logm[k - 1] = l1 + l2
        m1[k - 1] = [math.exp(_log_segment_integral(n1, s1, model.rate1, j) - l1) for j in (1, 2)]
        m2[k - 1] = [math.exp(_log_segment_integral(n2, s2, model.rate2, j) - l2) for j in (1, 2)]
    pmf = np.exp(logm - logm.max())
    pmf /= pmf.sum()
    e1, e2 = pmf @ m1[:, 0], pmf @ m2[:, 0]
    return ExactPosterior(pmf, float(e1), float(e2),
                          float(pmf @ m1[:, 1] - e1 ** 2), float(pmf @ m2[:, 1] - e2 ** 2))


class ChangepointSampler(BaseEstimator):
    """Estimator wrapper around :func:`mcmc`.

    ``fit`` takes a 1-D sequence of decay estimates; ``predict`` returns the
    posterior-mean decay for each index, switching at the median changepoint.
    """

    def __init__(self, rate1=1.0, rate2=0.7, n_samples=20_000, burn_in=None, thin=1,
                 random_state=0):
        self.rate1 = rate1
        self.rate2 = rate2
        self.n_samples = n_samples
        self.burn_in = burn_in
        self.thin = thin
        self.random_state = random_state

    def fit(self, X, y=None):
        self.posterior_ = mcmc(X, ChangepointModel(self.rate1, self.rate2), self.n_samples,
                               self.burn_in, self.thin, int(self.random_state or 0))
        self.summary_ = summarize(self.posterior_)
        return self

    def predict(self, X=None):
        if not hasattr(self, "summary_"):
            raise NotFittedError("call fit first")
        s = self.summary_
        k = np.arange(1, s.K + 1)
        return np.where(k < s.kappa_median, s.beta1_mean, s.beta2_mean)
