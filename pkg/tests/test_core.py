import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hawkes_decay.core import (
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
from hawkes_decay.exceptions import (
    DimOutOfRange,
    EmptyInput,
    NegativeRate,
    NonFinite,
    NonMonotoneTime,
    ShapeMismatch,
)


def test_validate_paper_univariate_params():
    p = HawkesParams([0.1], [[0.5]], 1.2)
    assert validate(p) is True
    assert p.dims == 1 and p.shared_beta


@pytest.mark.parametrize("beta", [0.0, -1.0])
def test_nonpositive_beta_rejected(beta):
    with pytest.raises(NegativeRate, match="beta"):
        HawkesParams([0.1], [[0.5]], beta)


def test_shape_mismatch_names_alpha():
    with pytest.raises(ShapeMismatch, match="alpha"):
        HawkesParams([0.1], [[0.1, 0.2], [0.3, 0.4]], 1.0)


def test_nonfinite_and_negative_entries():
    with pytest.raises(NonFinite, match=r"alpha\[0, 1\]"):
        HawkesParams([0.1, 0.1], [[0.1, np.nan], [0.3, 0.4]], 1.0)
    with pytest.raises(NegativeRate, match=r"mu\[1\]"):
        HawkesParams([0.1, -0.1], [[0.1, 0.2], [0.3, 0.4]], 1.0)
    with pytest.raises(NegativeRate, match=r"beta\[1, 0\]"):
        HawkesParams([0.1, 0.1], np.zeros((2, 2)), [[1.0, 1.0], [0.0, 1.0]])


def test_beta_matrix_form_is_accepted():
    p = HawkesParams([0.1, 0.2], [[0.1, 0.2], [0.3, 0.4]], [[1.0, 2.0], [3.0, 4.0]])
    assert not p.shared_beta
    assert p.beta_matrix[1, 0] == 3.0


def test_params_are_immutable():
    p = HawkesParams([0.1], [[0.5]], 1.2)
    with pytest.raises(ValueError):
        p.mu[0] = 3.0


def test_spectral_radius_examples():
    assert spectral_radius(HawkesParams([0.1], [[0.5]], 1.2)) == pytest.approx(5 / 12, rel=1e-15)
    assert spectral_radius(HawkesParams([0.1, 0.1], np.zeros((2, 2)), 1.0)) == 0.0
    alpha = np.array([[0.1, 0.7], [0.7, 0.2]])
    # characteristic polynomial of alpha / beta: x^2 - tr x + det
    g = alpha / 1.2
    tr, det = np.trace(g), np.linalg.det(g)
    oracle = max(abs(np.roots([1.0, -tr, det])))
    rho = spectral_radius(HawkesParams([0.1, 0.5], alpha, 1.2))
    assert rho == pytest.approx(oracle, rel=1e-12)
    assert rho == pytest.approx(0.7098, abs=5e-5)


def test_spectral_radius_higher_dims_matches_eigvals():
    rng = np.random.default_rng(3)
    alpha = rng.uniform(0, 1, (4, 4))
    beta = rng.uniform(0.5, 3, (4, 4))
    p = HawkesParams(np.ones(4), alpha, beta)
    assert spectral_radius(p) == pytest.approx(max(abs(np.linalg.eigvals(alpha / beta))))


def test_is_stationary():
    assert is_stationary(HawkesParams([0.1], [[0.5]], 1.2))
    assert is_stationary(HawkesParams([0.1, 0.5], [[0.1, 0.7], [0.7, 0.2]], 1.2))
    assert not is_stationary(HawkesParams([0.1], [[1.5]], 1.0))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 4))
def test_spectral_radius_permutation_invariant(seed, m):
    rng = np.random.default_rng(seed)
    alpha = rng.uniform(0, 2, (m, m))
    beta = rng.uniform(0.2, 3, (m, m))
    perm = rng.permutation(m)
    p = HawkesParams(np.ones(m), alpha, beta)
    q = HawkesParams(np.ones(m), alpha[np.ix_(perm, perm)], beta[np.ix_(perm, perm)])
    assert spectral_radius(q) == pytest.approx(spectral_radius(p), rel=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 5.0), st.floats(0.01, 10.0))
def test_univariate_spectral_radius_is_ratio(a, b):
    assert spectral_radius(HawkesParams([1.0], [[a]], b)) == a / b


def test_intensity_examples():
    p = HawkesParams([0.1], [[0.5]], 1.2)
    empty = EventStream([], T=5.0)
    assert intensity_at(p, empty, 0, 3.0) == pytest.approx(0.1)
    s = EventStream([1.0], T=5.0)
    assert intensity_at(p, s, 0, 1.0) == pytest.approx(0.1)  # history excludes t
    assert intensity_at(p, s, 0, 2.0) == pytest.approx(0.1 + 0.5 * math.exp(-1.2))
    assert intensity_at(p, s, 0, 2.0) == pytest.approx(0.25060, abs=5e-6)


def test_intensity_jump_equals_alpha():
    p = HawkesParams([0.3, 0.2], [[0.4, 0.1], [0.2, 0.7]], 1.5)
    s = EventStream([0.5, 1.3, 2.0], dims=[0, 1, 1], T=3.0, n_dims=2)
    eps = 1e-9
    for t_i, d in zip(s.times, s.dims):
        for p_ in range(2):
            jump = intensity_at(p, s, p_, t_i + eps) - intensity_at(p, s, p_, t_i)
            assert jump == pytest.approx(p.alpha[p_, d], rel=1e-6)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.0, 50.0), min_size=0, max_size=30, unique=True), st.floats(0.0, 60.0))
def test_intensity_never_below_baseline(times, t):
    s = EventStream(sorted(times), T=60.0)
    p = HawkesParams([0.2], [[0.9]], 0.7)
    assert intensity_at(p, s, 0, t) >= 0.2


def test_influence_direction():
    alpha = np.array([[0.1, 0.7], [0.525, 0.2]])
    assert influence_direction(alpha, 0, 1) == "q->p"
    assert influence_direction(alpha, 1, 0) == "p->q"
    assert influence_direction([[0.0, 0.3], [0.3, 0.0]], 0, 1) == "tie"
    no_link = [[0.1, 0.0], [0.4, 0.1]]
    assert influence_direction(no_link, 0, 1) == "p->q"
    assert not granger_causes(no_link, 0, 1)
    assert granger_causes(no_link, 1, 0)


def test_event_stream_invariants():
    with pytest.raises(NonMonotoneTime):
        EventStream([1.0, 1.0, 2.0])
    with pytest.raises(NonMonotoneTime):
        EventStream([2.0, 1.0])
    with pytest.raises(DimOutOfRange):
        EventStream([1.0, 2.0], dims=[0, 2], n_dims=2)
    with pytest.raises(ValueError):
        EventStream([1.0, 2.0], T=1.5)
    s = EventStream([1.0, 2.0])
    assert s.T == 2.0 and len(s) == 2


def test_realization_set():
    with pytest.raises(EmptyInput):
        RealizationSet(())
    with pytest.raises(ShapeMismatch):
        RealizationSet((EventStream([1.0]), EventStream([1.0], n_dims=2)))
    rs = as_realizations([[0.5, 1.0], [0.2]])
    assert len(rs) == 2 and rs.n_events == 3
    assert as_realizations(np.array([0.1, 0.2])).n_events == 2
    assert len(rs[:1]) == 1
