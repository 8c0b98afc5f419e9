"""Decay estimation strategies and the convex baseline/excitation sub-fit.

All fitting paths use one decay shared by every (p, q) pair and pool the
given realizations into one likelihood.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy import optimize
from scipy.stats import qmc
from sklearn.base import BaseEstimator
from sklearn.exceptions import ConvergenceWarning, NotFittedError

from . import _kernels
from .core import EventStream, HawkesParams, RealizationSet, as_realizations
from .exceptions import (
    EmptyInput,
    InsufficientData,
    LikelihoodDecrease,
    ValidationError,
)
from .likelihood import LoglikOptions, PackedEvents, pack, pooled_loglik, pooled_loglik_grad

__all__ = [
    "FitConfig",
    "ProfileFit",
    "DecayFit",
    "DecayEstimates",
    "fit_mu_alpha",
    "fit_decay_nonlinear",
    "fit_decay_grid",
    "fit_decay_smbo",
    "fit_decay_em",
    "fit_decay",
    "sequential_estimates",
    "default_grid",
    "ExpHawkesEstimator",
    "SequentialDecayEstimator",
]

Method = Literal["nonlinear", "grid", "smbo", "em"]
METHODS = ("nonlinear", "grid", "smbo", "em")


def default_grid(count=10, log10_lo=-1.0, log10_hi=2.0):
    return 10.0 ** np.linspace(log10_lo, log10_hi, count)


@dataclass(frozen=True)
class FitConfig:
    method: Method = "nonlinear"
    bounds: tuple = (1e-3, 1e3)
    budget: int = 50
    grid_spec: tuple = (10, -1.0, 2.0)
    em: tuple = (500, 1e-8)
    init: float | None = None
    seed: int = 0
    n_starts: int = 4
    horizon_mode: str = "stream_T"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValidationError(f"unknown method {self.method!r}; choose from {METHODS}")
        lo, hi = self.bounds
        if not 0 < lo < hi:
            raise ValidationError(f"decay bounds {self.bounds} must satisfy 0 < lo < hi")
        if self.budget < 1:
            raise ValidationError("budget must be >= 1")
        if self.grid_spec[0] < 2:
            raise ValidationError("grid needs at least 2 points")
        if self.em[0] < 1 or not self.em[1] > 0:
            raise ValidationError("em needs max_iters >= 1 and tol > 0")
        if self.init is not None and not self.init > 0:
            raise ValidationError("init must be > 0")
        if self.n_starts < 1:
            raise ValidationError("n_starts must be >= 1")

    @property
    def start_beta(self) -> float:
        lo, hi = self.bounds
        return float(np.clip(1.0 if self.init is None else self.init, lo, hi))

    @property
    def options(self) -> LoglikOptions:
        return LoglikOptions(self.horizon_mode)


# ---------------------------------------------------------------------------
# convex sub-problem: mu, alpha at fixed decay


@dataclass(frozen=True)
class ProfileFit:
    mu: np.ndarray
    alpha: np.ndarray
    loglik: float
    converged: bool
    n_iter: int


def _design(packed: PackedEvents, beta: float):
    """Per-dimension design matrices ``X_p`` and linear costs ``c``.

    The pooled log-likelihood separates as ``sum_p sum log(X_p theta_p) - c . theta_p``
    with ``theta_p = (mu_p, alpha_p0, ..., alpha_p,M-1)``.
    """
    m = packed.n_dims
    R = _kernels.excitation_features(packed.times, packed.dims, packed.starts,
                                     np.full((m, m), beta))
    mass = (1.0 - np.exp(-beta * (packed.event_horizon - packed.times))) / beta
    cost = np.empty(m + 1)
    cost[0] = packed.total_horizon
    cost[1:] = np.bincount(packed.dims, weights=mass, minlength=m)
    designs = []
    for p in range(m):
        rows = R[packed.dims == p]
        designs.append(np.hstack([np.ones((rows.shape[0], 1)), rows]))
    return designs, cost


def _concave_objective(X, c, theta):
    lam = X @ theta
    if np.any(lam <= 0):
        return -np.inf
    return float(np.sum(np.log(lam)) - c @ theta)


def _projected_newton(X, c, theta0, tol=1e-9, max_iter=5000):
    """Maximize ``sum log(X theta) - c . theta`` over ``theta >= 0``.

    Projected ascent with backtracking along the projection arc; the ascent
    direction is Newton-scaled on the free coordinates.
    """
    n, k = X.shape
    if n == 0:
        return np.zeros(k), 0.0, True, 0
    theta = theta0.copy()
    f = _concave_objective(X, c, theta)
    for it in range(1, max_iter + 1):
        lam = X @ theta
        W = X / lam[:, None]
        g = W.sum(axis=0) - c
        hess = W.T @ W
        active = (theta <= 1e-12) & (g <= 0)
        free = ~active
        d = np.zeros(k)
        if free.any():
            Hf = hess[np.ix_(free, free)]
            Hf = Hf + 1e-12 * max(np.trace(Hf), 1.0) * np.eye(Hf.shape[0])
            try:
                d[free] = np.linalg.solve(Hf, g[free])
            except np.linalg.LinAlgError:
                d[free] = g[free]
        moved = False
        for direction in (d, np.where(active, 0.0, g)):
            if not np.any(direction):
                continue
            step = 1.0
            for _ in range(60):
                cand = np.maximum(theta + step * direction, 0.0)
                fc = _concave_objective(X, c, cand)
                if np.isfinite(fc) and fc >= f + 1e-4 * (g @ (cand - theta)) and fc >= f:
                    moved = True
                    break
                step *= 0.5
            if moved:
                break
        if not moved:
            return theta, f, True, it
        change = abs(fc - f)
        theta, f = cand, fc
        if change <= tol * max(1.0, abs(f)):
            return theta, f, True, it
    return theta, f, False, max_iter


def _fit_profile(packed: PackedEvents, beta: float, tol=1e-9, max_iter=5000) -> ProfileFit:
    m = packed.n_dims
    designs, cost = _design(packed, beta)
    counts = packed.counts()
    mu = np.zeros(m)
    alpha = np.zeros((m, m))
    total, converged, iters = 0.0, True, 0
    for p in range(m):
        theta0 = np.empty(m + 1)
        theta0[0] = max(0.5 * counts[p] / packed.total_horizon, 1e-6)
        theta0[1:] = 0.1 * beta / m
        theta, f, ok, it = _projected_newton(designs[p], cost, theta0, tol, max_iter)
        mu[p], alpha[p] = theta[0], theta[1:]
        total += f
        converged &= ok
        iters = max(iters, it)
    return ProfileFit(mu, alpha, total, converged, iters)


def _prepare(realizations, options=LoglikOptions(), min_events=1) -> PackedEvents:
    try:
        rs = as_realizations(realizations)
    except EmptyInput:
        raise EmptyInput("no realizations to fit") from None
    packed = pack(rs, options)
    if packed.n_events < min_events:
        raise InsufficientData(f"need at least {min_events} events, got {packed.n_events}")
    return packed


def fit_mu_alpha(realizations, beta: float, dims: int | None = None,
                 options: LoglikOptions = LoglikOptions(), tol=1e-9,
                 max_iter=5000) -> ProfileFit:
    """Maximum-likelihood baseline and excitation for a fixed shared decay.

    The problem is concave in ``(mu, alpha)``, so the returned point is the
    global optimum whenever ``converged`` is True. On non-convergence the
    best iterate is returned and a :class:`ConvergenceWarning` is issued.
    """
    if not beta > 0:
        raise ValidationError(f"beta={beta} must be > 0")
    rs = as_realizations(realizations, n_dims=dims)
    packed = _prepare(rs, options)
    fit = _fit_profile(packed, float(beta), tol, max_iter)
    if not fit.converged:
        warnings.warn(f"mu/alpha sub-fit did not converge in {max_iter} iterations",
                      ConvergenceWarning, stacklevel=2)
    return fit


# ---------------------------------------------------------------------------
# decay estimators


@dataclass(frozen=True)
class DecayFit:
    method: str
    beta: float
    mu: np.ndarray
    alpha: np.ndarray
    loglik: float
    converged: bool = True
    at_bound: bool = False
    n_evals: int = 0
    runtime_seconds: float = 0.0
    trace: tuple = field(default=(), repr=False)

    @property
    def params(self) -> HawkesParams:
        return HawkesParams(self.mu, self.alpha, self.beta)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "beta_hat": float(self.beta),
            "mu": self.mu.tolist(),
            "alpha": self.alpha.tolist(),
            "converged": bool(self.converged),
            "runtime_seconds": float(self.runtime_seconds),
        }


def _at_bound(beta, bounds):
    lo, hi = bounds
    return bool(beta <= lo * (1 + 1e-6) or beta >= hi * (1 - 1e-6))


def fit_decay_nonlinear(realizations, config: FitConfig = FitConfig()) -> DecayFit:
    """Joint maximum likelihood over ``(mu, alpha, beta)`` with L-BFGS-B.

    Gradients are exact in ``(mu, alpha)`` and central differences (relative
    step 1e-6) in ``beta``. The search starts from
    ``config.init`` and ``config.n_starts - 1`` randomly perturbed points;
    the best optimum wins.
    """
    t0 = time.perf_counter()
    packed = _prepare(realizations, config.options, min_events=2)
    _require_pairs(packed)
    m = packed.n_dims
    n = packed.n_events
    lo, hi = config.bounds
    n_par = m + m * m + 1
    lower = np.r_[np.full(m, 1e-10), np.zeros(m * m), lo]
    upper = np.r_[np.full(m + m * m, np.inf), hi]
    evals = [0]

    def loglik(x, beta):
        evals[0] += 1
        return pooled_loglik(packed, x[:m], x[m:m + m * m].reshape(m, m), beta)

    def negll_and_grad(x):
        evals[0] += 1
        mu, alpha, beta = x[:m], x[m:m + m * m].reshape(m, m), x[-1]
        ll, g_mu, g_alpha, _ = pooled_loglik_grad(packed, mu, alpha, beta)
        if not np.isfinite(ll):
            return 1e10, np.zeros(n_par)
        # central difference in the decay, one-sided at a box face
        h = 1e-6 * max(beta, 1e-3)
        up, down = min(beta + h, hi), max(beta - h, lo)
        f_up = loglik(x, up) if up > beta else ll
        f_down = loglik(x, down) if down < beta else ll
        g_beta = (f_up - f_down) / (up - down)
        if not np.isfinite(g_beta):
            g_beta = 0.0
        # scaled per event so tolerances do not depend on data size
        return -ll / n, -np.r_[g_mu, g_alpha.ravel(), g_beta] / n

    rng = np.random.Generator(np.random.PCG64(config.seed))
    beta0 = config.start_beta
    counts = packed.counts()
    base = np.r_[np.maximum(0.5 * counts / packed.total_horizon, 1e-3),
                 np.full(m * m, 0.5 * beta0 / m), beta0]
    starts = [base]
    for _ in range(config.n_starts - 1):
        x = base.copy()
        x[:-1] *= np.exp(rng.normal(0.0, 0.5, n_par - 1))
        x[-1] = np.clip(beta0 * math.exp(rng.normal(0.0, 1.0)), lo, hi)
        x[m:m + m * m] = 0.5 * x[-1] / m * np.exp(rng.normal(0.0, 0.5, m * m))
        starts.append(x)

    best = None
    for x0 in starts:
        res = optimize.minimize(negll_and_grad, x0, jac=True, method="L-BFGS-B",
                                bounds=list(zip(lower, np.where(np.isinf(upper), None, upper))),
                                options={"maxiter": 1000})
        if best is None or res.fun < best.fun:
            best = res
    x = best.x
    beta = float(np.clip(x[-1], lo, hi))
    return DecayFit(
        method="nonlinear", beta=beta, mu=x[:m].copy(), alpha=x[m:m + m * m].reshape(m, m).copy(),
        loglik=-best.fun * n, converged=bool(best.success), at_bound=_at_bound(beta, config.bounds),
        n_evals=evals[0], runtime_seconds=time.perf_counter() - t0)


def _require_pairs(packed: PackedEvents):
    lengths = np.diff(packed.starts)
    if not np.any(lengths >= 2):
        raise InsufficientData("every realization has fewer than two events; "
                               "the decay is not identifiable")


def _profile(packed, beta):
    return _fit_profile(packed, float(beta))


def fit_decay_grid(realizations, config: FitConfig = FitConfig(method="grid")) -> DecayFit:
    """Profile log-likelihood maximized over a log-spaced decay grid.

    Grid points outside ``config.bounds`` are dropped; ties go to the smaller decay.
    """
    t0 = time.perf_counter()
    packed = _prepare(realizations, config.options, min_events=2)
    _require_pairs(packed)
    count, lo10, hi10 = config.grid_spec
    grid = default_grid(int(count), lo10, hi10)
    lo, hi = config.bounds
    grid = grid[(grid >= lo * (1 - 1e-12)) & (grid <= hi * (1 + 1e-12))]
    if grid.size == 0:
        raise ValidationError("no grid point lies inside the decay bounds")
    best_beta, best = None, None
    trace = []
    converged = True
    for b in np.sort(grid):
        fit = _profile(packed, b)
        converged &= fit.converged
        trace.append((float(b), fit.loglik))
        if best is None or fit.loglik > best.loglik:
            best_beta, best = float(b), fit
    return DecayFit(
        method="grid", beta=best_beta, mu=best.mu, alpha=best.alpha, loglik=best.loglik,
        converged=converged, at_bound=_at_bound(best_beta, config.bounds), n_evals=len(trace),
        runtime_seconds=time.perf_counter() - t0, trace=tuple(trace))


def _tpe_propose(xs, ys, lo, hi, rng, n_candidates=24, gamma=0.25):
    """Pick the candidate maximizing l(x) / g(x) from Parzen densities of the
    top-``gamma`` fraction (l) and the rest (g)."""
    xs = np.asarray(xs)
    ys = np.asarray(ys)
    order = np.argsort(-ys, kind="stable")
    n_good = max(1, int(math.ceil(gamma * len(xs))))
    good, bad = xs[order[:n_good]], xs[order[n_good:]]
    width = hi - lo

    def bandwidth(pts):
        return width * max(0.05, 0.5 * len(pts) ** (-0.2) / math.sqrt(len(pts) + 1.0))

    def log_density(x, pts):
        # Parzen mixture with one uniform prior component
        comps = [np.full_like(x, -math.log(width))]
        if len(pts):
            bw = bandwidth(pts)
            z = (x[:, None] - pts[None, :]) / bw
            comps.append(np.log(np.mean(np.exp(-0.5 * z * z), axis=1) / (bw * math.sqrt(2 * math.pi))) +
                         math.log(len(pts)))
        stacked = np.logaddexp.reduce(np.vstack(comps), axis=0)
        return stacked - math.log(len(pts) + 1.0)

    bw = bandwidth(good)
    centers = rng.choice(good, size=n_candidates)
    cand = np.clip(centers + bw * rng.normal(size=n_candidates), lo, hi)
    score = log_density(cand, good) - log_density(cand, bad)
    return float(cand[int(np.argmax(score))])


def fit_decay_smbo(realizations, config: FitConfig = FitConfig(method="smbo")) -> DecayFit:
    """Sequential model-based search over ``log beta`` (TPE rule).

    The first evaluation is at ``config.init`` (1.0 by default), followed by
    scrambled-Sobol points up to 10 initial evaluations; the remaining budget
    is spent on TPE proposals. Ties keep the earliest evaluation.
    """
    t0 = time.perf_counter()
    packed = _prepare(realizations, config.options, min_events=2)
    _require_pairs(packed)
    rng = np.random.Generator(np.random.PCG64(config.seed))
    lo, hi = math.log(config.bounds[0]), math.log(config.bounds[1])
    n_init = min(10, config.budget)
    sobol = qmc.Sobol(d=1, scramble=True, seed=rng).random(16)[:, 0]
    init_pts = [math.log(config.start_beta)] + list(lo + (hi - lo) * sobol[:n_init - 1])
    xs, ys, fits = [], [], []
    converged = True

    def evaluate(u):
        nonlocal converged
        fit = _profile(packed, math.exp(u))
        converged &= fit.converged
        xs.append(u)
        ys.append(fit.loglik if np.isfinite(fit.loglik) else -1e300)
        fits.append(fit)

    for u in init_pts:
        evaluate(u)
    while len(xs) < config.budget:
        evaluate(_tpe_propose(xs, ys, lo, hi, rng))
    i = int(np.argmax(ys))
    beta = float(np.clip(math.exp(xs[i]), *config.bounds))
    best = fits[i]
    return DecayFit(
        method="smbo", beta=beta, mu=best.mu, alpha=best.alpha, loglik=best.loglik,
        converged=converged, at_bound=_at_bound(beta, config.bounds), n_evals=len(xs),
        runtime_seconds=time.perf_counter() - t0,
        trace=tuple((math.exp(u), y) for u, y in zip(xs, ys)))


def fit_decay_em(realizations, config: FitConfig = FitConfig(method="em")) -> DecayFit:
    """Branching-structure EM for ``(mu, alpha, beta)``.

    E-step: each event's probability of being a background event or a child
    of each earlier event. M-step: closed-form ``mu`` and, for any decay,
    closed-form ``alpha``; the decay then maximizes the expected complete
    log-likelihood (a one-dimensional bounded search), with the horizon
    truncation of the kernel mass kept exact. The observed log-likelihood is
    checked to be non-decreasing at every iteration.
    """
    t0 = time.perf_counter()
    packed = _prepare(realizations, config.options, min_events=2)
    _require_pairs(packed)
    m = packed.n_dims
    max_iters, tol = config.em
    lo, hi = config.bounds
    d = packed.dims
    counts = packed.counts()
    H = packed.total_horizon
    gap = packed.event_horizon - packed.times

    beta = config.start_beta
    mu = np.maximum(0.5 * counts / H, 1e-6)
    alpha = np.full((m, m), 0.5 * beta / m)
    ll = pooled_loglik(packed, mu, alpha, beta)
    trace = [ll]
    converged = False

    def mass_log(b):
        # log of the truncated kernel mass per source dimension
        mass = np.bincount(d, weights=-np.expm1(-b * gap), minlength=m) / b
        with np.errstate(divide="ignore"):
            return np.log(mass)

    for _ in range(int(max_iters)):
        R, D = _kernels.em_statistics(packed.times, d, packed.starts, m, beta)
        lam = mu[d] + np.sum(alpha[d] * R, axis=1)
        inv = 1.0 / lam
        p_bg = np.bincount(d, weights=mu[d] * inv, minlength=m)
        p_child = np.zeros((m, m))
        for p in range(m):
            rows = d == p
            p_child[p] = alpha[p] * (R[rows] * inv[rows, None]).sum(axis=0)
        lag = float(np.sum(alpha[d] * D * inv[:, None]))
        by_source = p_child.sum(axis=0)
        used = by_source > 0

        def q_loss(log_b):
            b = math.exp(log_b)
            return float(np.sum(by_source[used] * mass_log(b)[used]) + b * lag)

        new_beta = beta
        if used.any():
            res = optimize.minimize_scalar(q_loss, bounds=(math.log(lo), math.log(hi)),
                                           method="bounded", options={"xatol": 1e-10})
            if res.fun < q_loss(math.log(beta)):
                new_beta = float(math.exp(res.x))
        beta = new_beta
        mu = p_bg / H
        mass = np.exp(mass_log(beta))
        alpha = np.where(p_child > 0, p_child / np.where(mass > 0, mass, 1.0)[None, :], 0.0)
        new_ll = pooled_loglik(packed, mu, alpha, beta)
        if new_ll < ll - 1e-10 * max(1.0, abs(ll)):
            raise LikelihoodDecrease(f"EM log-likelihood fell from {ll!r} to {new_ll!r}")
        trace.append(new_ll)
        done = abs(new_ll - ll) <= tol * max(1.0, abs(ll))
        ll = new_ll
        if done:
            converged = True
            break
    return DecayFit(
        method="em", beta=beta, mu=mu, alpha=alpha, loglik=ll, converged=converged,
        at_bound=_at_bound(beta, config.bounds), n_evals=len(trace),
        runtime_seconds=time.perf_counter() - t0, trace=tuple(trace))


_DISPATCH = {
    "nonlinear": fit_decay_nonlinear,
    "grid": fit_decay_grid,
    "smbo": fit_decay_smbo,
    "em": fit_decay_em,
}


def fit_decay(realizations, config: FitConfig = FitConfig()) -> DecayFit:
    fit = _DISPATCH[config.method](realizations, config)
    if not fit.converged:
        warnings.warn(f"{config.method} fit did not report convergence", ConvergenceWarning,
                      stacklevel=2)
    return fit


# ---------------------------------------------------------------------------
# sequences of estimates


@dataclass(frozen=True)
class DecayEstimates:
    """Ordered decay estimates; ``n_realizations[k]`` realizations went into ``values[k]``."""

    values: np.ndarray
    method: str = "unknown"
    n_realizations: tuple = ()
    mode: str = "pooled"

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.values, dtype=float))
        if v.ndim != 1:
            raise ValidationError("estimates must be a flat sequence")
        if not np.all(np.isfinite(v)):
            raise ValidationError("estimates must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        counts = tuple(int(c) for c in self.n_realizations)
        if counts and len(counts) != v.shape[0]:
            raise ValidationError("one realization count per estimate is required")
        object.__setattr__(self, "n_realizations", counts)

    def __len__(self):
        return self.values.shape[0]

    def to_dict(self) -> dict:
        doc = {"values": [float(v) for v in self.values], "method": self.method,
               "mode": self.mode}
        if self.n_realizations:
            doc["n_realizations"] = list(self.n_realizations)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "DecayEstimates":
        if "values" not in doc:
            raise ValidationError("decay estimates document needs a 'values' list")
        return cls(doc["values"], doc.get("method", "unknown"),
                   tuple(doc.get("n_realizations", ())), doc.get("mode", "pooled"))


def sequential_estimates(realizations, config: FitConfig = FitConfig(),
                         mode: Literal["pooled", "iid"] = "pooled") -> DecayEstimates:
    """Refit the decay as realizations arrive.

    In ``pooled`` mode estimate ``k`` uses realizations ``1..k`` together; in
    ``iid`` mode it uses realization ``k`` alone.
    """
    if mode not in ("pooled", "iid"):
        raise ValidationError(f"unknown mode {mode!r}")
    rs = as_realizations(realizations)
    fit = _DISPATCH[config.method]
    values, counts = [], []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        for k in range(1, len(rs) + 1):
            data = rs[:k] if mode == "pooled" else rs[k - 1:k]
            values.append(fit(data, config).beta)
            counts.append(len(data))
    return DecayEstimates(np.array(values), config.method, tuple(counts), mode)


# ---------------------------------------------------------------------------
# estimator API


class ExpHawkesEstimator(BaseEstimator):
    """Exponential-kernel Hawkes model fitted with a selectable decay strategy.

    Parameters
    ----------
    method : {"nonlinear", "grid", "smbo", "em"}
    beta_bounds : (float, float)
        Box for the decay.
    budget : int
        Profile evaluations for ``smbo``.
    grid : (int, float, float)
        ``(count, log10_lo, log10_hi)`` for ``grid``.
    em_max_iter, em_tol :
        EM stopping rule.
    init : float or None
        Starting decay (1.0 when None).
    n_starts : int
        Multi-start count for ``nonlinear``.
    horizon_mode : {"stream_T", "last_event"}
    random_state : int

    Attributes
    ----------
    mu_, alpha_, beta_ : fitted parameters
    loglik_ : pooled log-likelihood at the fit
    converged_ : bool
    fit_ : DecayFit
    """

    def __init__(self, method="nonlinear", beta_bounds=(1e-3, 1e3), budget=50,
                 grid=(10, -1.0, 2.0), em_max_iter=500, em_tol=1e-8, init=None,
                 n_starts=4, horizon_mode="stream_T", random_state=0):
        self.method = method
        self.beta_bounds = beta_bounds
        self.budget = budget
        self.grid = grid
        self.em_max_iter = em_max_iter
        self.em_tol = em_tol
        self.init = init
        self.n_starts = n_starts
        self.horizon_mode = horizon_mode
        self.random_state = random_state

    def _config(self) -> FitConfig:
        return FitConfig(method=self.method, bounds=tuple(self.beta_bounds), budget=self.budget,
                         grid_spec=tuple(self.grid), em=(self.em_max_iter, self.em_tol),
                         init=self.init, seed=int(self.random_state or 0),
                         n_starts=self.n_starts, horizon_mode=self.horizon_mode)

    def fit(self, X, y=None):
        rs = as_realizations(X)
        self.fit_ = fit_decay(rs, self._config())
        self.mu_ = self.fit_.mu
        self.alpha_ = self.fit_.alpha
        self.beta_ = self.fit_.beta
        self.loglik_ = self.fit_.loglik
        self.converged_ = self.fit_.converged
        self.n_dims_ = rs.n_dims
        return self

    def _check_fitted(self):
        if not hasattr(self, "fit_"):
            raise NotFittedError("call fit before using this estimator")

    @property
    def params_(self) -> HawkesParams:
        self._check_fitted()
        return self.fit_.params

    def score(self, X, y=None) -> float:
        """Pooled log-likelihood of ``X`` under the fitted parameters."""
        self._check_fitted()
        packed = pack(as_realizations(X, n_dims=self.n_dims_), LoglikOptions(self.horizon_mode))
        return pooled_loglik(packed, self.mu_, self.alpha_, self.beta_)

    def sample(self, T=None, n_events=None, random_state=0) -> EventStream:
        from .sim import SimSpec, simulate

        self._check_fitted()
        return simulate(SimSpec(self.params_, T=T, n_events=n_events, seed=random_state))


class SequentialDecayEstimator(BaseEstimator):
    """Collects one decay estimate per arriving realization.

    ``transform`` returns the estimates as a 1-D array, ready for
    :class:`hawkes_decay.bayes.GammaExponentialDecay` or the changepoint sampler.
    """

    def __init__(self, estimator=None, mode="pooled"):
        self.estimator = estimator
        self.mode = mode

    def fit(self, X, y=None):
        est = self.estimator if self.estimator is not None else ExpHawkesEstimator()
        self.estimates_ = sequential_estimates(X, est._config(), self.mode)
        return self

    def transform(self, X=None):
        if not hasattr(self, "estimates_"):
            raise NotFittedError("call fit before transform")
        return np.asarray(self.estimates_.values)

    def fit_transform(self, X, y=None):
        return self.fit(X).transform()
