import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate
from sklearn.base import clone

from hawkes_decay.bayes import (
    GammaExpModel,
    GammaExponentialDecay,
    bayesian_bootstrap,
    diagnose,
    empirical_bootstrap,
    lomax_quantile,
    posterior,
    predictive_interval,
    predictive_mean_conjugate,
    predictive_mean_paper,
    summarize,
)
from sklearn.exceptions import NotFittedError

from hawkes_decay.exceptions import ShapeTooSmall, TooFewResamples, ValidationError

SUM120 = np.full(100, 1.2)


def test_posterior_update_example():
    post = posterior(GammaExpModel(b0=1.5, a0=100), SUM120)
    assert (post.shape, post.rate) == (200.0, pytest.approx(121.5))


def test_posterior_without_data_is_prior():
    post = posterior(GammaExpModel(b0=2.0, a0=3.0), [])
    assert (post.shape, post.rate) == (3.0, 2.0)


def test_posterior_without_data_needs_explicit_shape():
    with pytest.raises(ShapeTooSmall):
        posterior(GammaExpModel(b0=2.0), [])


def _quadrature_moments(a0, b0, x):
    # unnormalized log density of the rate, rescaled by its maximum
    def logf(lam):
        return (a0 - 1 + len(x)) * np.log(lam) - lam * (b0 + x.sum())

    mode = max((a0 - 1 + len(x)) / (b0 + x.sum()), 1e-3)
    lam = np.linspace(1e-9, 50.0, 1_000_001)
    w = np.exp(logf(lam) - logf(mode))
    z = integrate.trapezoid(w, lam)
    m1 = integrate.trapezoid(lam * w, lam) / z
    m2 = integrate.trapezoid(lam ** 2 * w, lam) / z
    return m1, m2 - m1 ** 2


def test_conjugacy_matches_quadrature():
    rng = np.random.default_rng(0)
    for _ in range(50):
        a0, b0 = rng.uniform(1.0, 6.0), rng.uniform(0.5, 5.0)
        x = rng.exponential(rng.uniform(0.5, 3.0), rng.integers(0, 6))
        post = posterior(GammaExpModel(b0=b0, a0=a0), x)
        m, v = _quadrature_moments(a0, b0, x)
        assert post.mean == pytest.approx(m, abs=1e-6)
        assert post.var == pytest.approx(v, abs=1e-6)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.0, 20.0), min_size=1, max_size=20), st.integers(1, 200),
       st.floats(0.1, 10.0))
def test_sequential_updates_chain(values, a0, b0):
    # integer shapes keep the repeated +1 exact in floating point
    full = posterior(GammaExpModel(b0=b0, a0=a0), values)
    a, b = a0, b0
    for v in values:
        step = posterior(GammaExpModel(b0=b, a0=a), [v])
        a, b = step.shape, step.rate
    assert a == full.shape
    assert b == pytest.approx(full.rate, rel=1e-12)


def test_predictive_means_example():
    m = GammaExpModel(b0=1.5, a0=100)
    assert predictive_mean_paper(m, SUM120) == pytest.approx(121.5 / 99)
    assert predictive_mean_paper(m, SUM120) == pytest.approx(1.22727, abs=5e-6)
    assert predictive_mean_conjugate(m, SUM120) == pytest.approx(121.5 / 199)
    assert predictive_mean_conjugate(m, SUM120) == pytest.approx(0.61055, abs=5e-6)


def test_predictive_means_without_data_agree():
    m = GammaExpModel(b0=1.7, a0=2.0)
    assert predictive_mean_paper(m, []) == pytest.approx(1.7)
    assert predictive_mean_conjugate(m, []) == pytest.approx(1.7)


def test_default_shape_is_count():
    m = GammaExpModel(b0=1.5)
    assert predictive_mean_paper(m, SUM120) == predictive_mean_paper(GammaExpModel(1.5, 100), SUM120)


def test_shape_too_small():
    with pytest.raises(ShapeTooSmall):
        predictive_mean_paper(GammaExpModel(b0=1.0, a0=1.0), [0.5, 0.7])
    with pytest.raises(ShapeTooSmall):
        predictive_mean_paper(GammaExpModel(b0=1.0), [0.5])


def test_prior_validation():
    with pytest.raises(ValidationError):
        GammaExpModel(b0=0.0)
    with pytest.raises(ValidationError):
        GammaExpModel(b0=1.0, a0=-1.0)
    with pytest.raises(ValidationError):
        posterior(GammaExpModel(b0=1.0), [1.0, -0.5])


def _predictive_draws(shape, scale, n, seed):
    # beta ~ Exp(lambda), lambda ~ Gamma(shape, rate=scale)
    rng = np.random.default_rng(seed)
    lam = rng.gamma(shape, 1.0 / scale, n)
    return rng.exponential(1.0 / lam)


def test_conjugate_mean_matches_monte_carlo():
    m = GammaExpModel(b0=1.5, a0=4.0)
    x = np.array([0.9, 1.3, 0.7, 1.1, 1.6, 0.8])
    draws = _predictive_draws(4.0 + 6, 1.5 + x.sum(), 1_000_000, 3)
    se = draws.std() / np.sqrt(draws.size)
    assert abs(draws.mean() - predictive_mean_conjugate(m, x)) <= 3 * se


@pytest.mark.parametrize("convention", ["paper", "conjugate"])
def test_interval_matches_monte_carlo_quantiles(convention):
    m = GammaExpModel(b0=1.5, a0=8.0)
    x = np.array([1.0, 1.4, 0.6, 1.2, 0.9])
    shape = 8.0 if convention == "paper" else 13.0
    # 4e6 draws keep the 2.5% quantile's own noise well inside the tolerance
    draws = _predictive_draws(shape, 1.5 + x.sum(), 4_000_000, 5)
    lo, hi = predictive_interval(m, x, 0.95, convention)
    q_lo, q_hi = np.quantile(draws, [0.025, 0.975])
    assert lo == pytest.approx(q_lo, rel=1e-2)
    assert hi == pytest.approx(q_hi, rel=1e-2)


def test_lomax_quantile_inverts_cdf():
    u = np.linspace(0.01, 0.99, 50)
    q = lomax_quantile(u, 3.5, 2.0)
    cdf = 1 - (1 + q / 2.0) ** -3.5
    assert np.allclose(cdf, u, atol=1e-12)


def test_median_below_mean():
    m = GammaExpModel(b0=1.5, a0=10.0)
    x = np.full(10, 1.0)
    lo, hi = predictive_interval(m, x)
    med = float(lomax_quantile(0.5, 10.0, 11.5))
    assert lo < med < predictive_mean_paper(m, x) < hi


def test_interval_level_bounds():
    m = GammaExpModel(b0=1.0, a0=5.0)
    for level in (0.0, 1.0, -0.1):
        with pytest.raises(ValidationError):
            predictive_interval(m, [1.0, 2.0], level)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.01, 10.0), min_size=3, max_size=30), st.floats(0.1, 10.0))
def test_interval_nesting(values, b0):
    m = GammaExpModel(b0=b0)
    lo50, hi50 = predictive_interval(m, values, 0.5)
    lo95, hi95 = predictive_interval(m, values, 0.95)
    assert lo95 < lo50 < hi50 < hi95


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.01, 10.0), min_size=3, max_size=30), st.floats(0.1, 10.0),
       st.floats(0.01, 100.0))
def test_scale_equivariance(values, b0, s):
    x = np.asarray(values)
    base, scaled = GammaExpModel(b0=b0), GammaExpModel(b0=b0 * s)
    assert predictive_mean_paper(scaled, s * x) == pytest.approx(
        s * predictive_mean_paper(base, x), rel=1e-12)
    for a, b in zip(predictive_interval(scaled, s * x), predictive_interval(base, x)):
        assert a == pytest.approx(s * b, rel=1e-12)


def test_summary_contents():
    s = summarize(GammaExpModel(b0=1.5, a0=100), SUM120)
    assert s.beta_prime == pytest.approx(121.5 / 99)
    assert s.shift == pytest.approx(1.5 - 121.5 / 99)
    assert s.beta_prime_conjugate == pytest.approx(121.5 / 199)
    assert s.ci[0] < s.ci[1]
    doc = s.to_dict()
    assert doc["K"] == 100 and doc["sum_estimates"] == pytest.approx(120.0)


def test_empirical_bootstrap_constant():
    b = empirical_bootstrap(np.full(30, 2.5), resamples=100, seed=1)
    assert b.ci_low == b.ci_high == 2.5


def test_empirical_bootstrap_needs_resamples():
    with pytest.raises(TooFewResamples):
        empirical_bootstrap([1.0, 2.0], resamples=1)


def test_empirical_bootstrap_coverage():
    covered = 0
    trials = 500
    for seed in range(trials):
        x = np.random.default_rng(10_000 + seed).normal(size=200)
        b = empirical_bootstrap(x, resamples=2000, seed=seed)
        covered += b.ci_low <= 0.0 <= b.ci_high
    sd = np.sqrt(trials * 0.95 * 0.05)
    assert abs(covered - 0.95 * trials) <= 3 * sd


def test_bayesian_bootstrap_constant_and_mean():
    c = bayesian_bootstrap(np.full(10, 0.3), draws=50, seed=0)
    assert np.allclose(c.draws, 0.3) and c.ci_low == pytest.approx(c.ci_high)
    x = np.random.default_rng(2).exponential(size=40)
    b = bayesian_bootstrap(x, draws=20_000, seed=4)
    se = b.draws.std() / np.sqrt(b.draws.size)
    assert abs(b.estimate - x.mean()) <= 4 * se


def test_bayesian_bootstrap_needs_draws():
    with pytest.raises(TooFewResamples):
        bayesian_bootstrap([1.0, 2.0], draws=0)


def test_diagnose_zero_shift():
    x = np.array([0.8, 1.2, 1.0, 1.4, 0.6])
    # b0 solving b0 = (b0 + S) / (K - 1)  ->  b0 = S / (K - 2)
    b0 = x.sum() / 3
    d = diagnose(GammaExpModel(b0=b0), x, draws=200)
    assert d.shift == pytest.approx(0.0, abs=1e-12)
    assert d.ci_low <= 0 <= d.ci_high


def test_diagnose_sign():
    positive = 0
    for seed in range(200):
        x = np.random.default_rng(seed).exponential(1.0, 100)
        positive += diagnose(GammaExpModel(b0=2.0), x, draws=200, seed=seed).shift > 0
    assert positive >= 198


def test_diagnose_verdicts():
    x = np.random.default_rng(1).normal(1.0, 0.05, 100).clip(0)
    assert diagnose(GammaExpModel(b0=2.0), x).verdict == "over-estimate"
    assert diagnose(GammaExpModel(b0=0.3), x).verdict == "under-estimate"


def test_estimator_api():
    est = GammaExponentialDecay(b0=1.5, a0=100)
    assert clone(est).get_params() == est.get_params()
    with pytest.raises(NotFittedError):
        est.predict()
    est.fit(SUM120)
    assert est.predict() == pytest.approx(121.5 / 99)
    lo, hi = est.predict_interval()
    assert lo < est.predict() < hi
    conj = GammaExponentialDecay(b0=1.5, a0=100, predictive="conjugate").fit(SUM120)
    assert conj.predict() == pytest.approx(121.5 / 199)
