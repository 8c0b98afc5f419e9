"""Error and distance metrics shared by the experiments."""

import numpy as np
from scipy import stats

from .exceptions import EmptyInput


def rmse(estimates, truth) -> float:
    x = np.asarray(estimates, dtype=float)
    if x.size == 0:
        raise EmptyInput("rmse of an empty sample")
    return float(np.sqrt(np.mean((x - np.asarray(truth, dtype=float)) ** 2)))


def ks_two_sample(sample_a, sample_b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic ``sup |F_a - F_b|``."""
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise EmptyInput("K-S distance needs two non-empty samples")
    # only the statistic is used; skip the exact p-value and its warnings
    with np.errstate(divide="ignore"):
        return float(stats.ks_2samp(a, b, method="asymp").statistic)


def ks_exp1(gaps) -> float:
    """One-sample K-S statistic of rescaled gaps against Exp(1)."""
    g = np.asarray(gaps, dtype=float)
    if g.size == 0:
        raise EmptyInput("K-S distance needs a non-empty sample")
    return float(stats.kstest(g, "expon").statistic)


def ks_normal(values) -> float:
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        raise EmptyInput("need at least two values to standardize")
    sd = v.std(ddof=1)
    z = (v - v.mean()) / sd if sd > 0 else np.zeros_like(v)
    return float(stats.kstest(z, "norm").statistic)


def inter_event_times(stream) -> np.ndarray:
    return np.diff(np.asarray(stream.times, dtype=float), prepend=0.0)
