"""Scripted synthetic studies.

Each ``exp_*`` function is a pure function of its config (seed included) and
returns an :class:`ExperimentReport`: the config echo, plot-ready tables, a
summary dict, the seeds used and the wall-clock runtime. Every mean in a
summary carries a bootstrap interval and names the bootstrap that made it.

``desk`` configs shrink the number of outer repetitions (and, for the
two-dimensional studies, the number of realizations) while keeping the length
of each realization, since that is what shapes the likelihood basin.
"""

from __future__ import annotations

import csv
import io
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import bayes, changepoint
from .core import HawkesParams, RealizationSet, is_stationary, spectral_radius
from .estimators import ConvergenceWarning, FitConfig, fit_decay, fit_mu_alpha, sequential_estimates
from .exceptions import EmptyInput, NonStationary, SafetyCapExceeded, ValidationError
from .likelihood import loglik_multi, loglik_scan
from .metrics import inter_event_times, ks_exp1, ks_normal, ks_two_sample, rmse
from .sim import SimSpec, simulate, simulate_batch

__all__ = [
    "ExperimentReport",
    "EstimateDistConfig",
    "LoglikScanConfig",
    "InfluenceConfig",
    "DiagnosisConfig",
    "ChangepointConfig",
    "BenchConfig",
    "exp_estimate_distribution",
    "exp_loglik_scan",
    "exp_influence_direction",
    "exp_diagnosis",
    "exp_changepoint",
    "exp_estimator_bench",
    "EXPERIMENTS",
    "run",
    "metric_rmse",
    "metric_ks",
]

metric_rmse = rmse


def metric_ks(sample_a, sample_b=None) -> float:
    """Two-sample K-S statistic, or one-sample against Exp(1) when ``sample_b`` is None."""
    if sample_b is None:
        return ks_exp1(sample_a)
    return ks_two_sample(sample_a, sample_b)


def subseed(seed: int, *keys: int) -> int:
    """Independent child seed for ``keys`` under the master ``seed``."""
    return int(np.random.SeedSequence([int(seed), *map(int, keys)]).generate_state(1, np.uint64)[0])


def _pmap(fn, items, n_jobs: int = 1):
    items = list(items)
    if n_jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# report


@dataclass
class Table:
    columns: tuple
    rows: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_cell(v) for v in row])
        return buf.getvalue()

    def column(self, name) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


@dataclass
class ExperimentReport:
    name: str
    config: dict
    tables: dict
    summary: dict
    seeds: dict
    bootstrap: str
    runtime_seconds: float = 0.0
    timing: dict = field(default_factory=dict)

    # wall-clock entries of to_dict(); everything else is reproducible
    VOLATILE = ("runtime_seconds", "timing")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            # worker count never changes results, so it stays out of the record
            "config": {k: v for k, v in self.config.items() if k != "n_jobs"},
            "summary": self.summary,
            "seeds": self.seeds,
            "bootstrap": self.bootstrap,
            "tables": sorted(self.tables),
            "runtime_seconds": self.runtime_seconds,
            "timing": self.timing,
        }


def _interval(values, method: str, seed: int, level: float = 0.95) -> dict:
    """Mean and bootstrap interval of ``values``; ``method`` is 'bayesian' or 'empirical'."""
    x = np.asarray(values, dtype=float)
    if method == "bayesian":
        b = bayes.bayesian_bootstrap(x, draws=2000, seed=seed, level=level)
    else:
        b = bayes.empirical_bootstrap(x, resamples=2000, seed=seed, level=level)
    mean = float(x.mean())
    return {"mean": mean, "ci_low": float(min(b.ci_low, mean)),
            "ci_high": float(max(b.ci_high, mean)), "n": int(x.size)}


def _check_config(cfg):
    if getattr(cfg, "n_reps", 1) < 1:
        raise EmptyInput("need at least one repetition")


# ---------------------------------------------------------------------------
# distribution of per-realization estimates


@dataclass(frozen=True)
class EstimateDistConfig:
    mu: float = 0.1
    alpha: float = 0.5
    beta: float = 1.2
    T: float = 1000.0
    n_realizations: int = 100
    increment: float = 1.0
    method: str = "nonlinear"
    seed: int = 0

    @classmethod
    def for_scale(cls, scale="desk", seed=0):
        return cls(seed=seed)


def exp_estimate_distribution(cfg: EstimateDistConfig = EstimateDistConfig()) -> ExperimentReport:
    """Standardized spread of single-realization decay fits, with and without a break.

    Case ``single`` fits every realization of one process. Case ``break``
    draws the second half from the same process with the decay raised by
    ``increment``. Each set of fits is standardized and compared with the
    standard normal by the K-S statistic.
    """
    t0 = time.perf_counter()
    K = cfg.n_realizations
    if K < 2:
        raise EmptyInput("need at least two realizations to standardize")
    base = HawkesParams.univariate(cfg.mu, cfg.alpha, cfg.beta)
    shifted = base.with_beta(cfg.beta + cfg.increment)
    fit_cfg = FitConfig(method=cfg.method, seed=cfg.seed)
    s_single = subseed(cfg.seed, 1)
    s_break = subseed(cfg.seed, 2)
    single = simulate_batch(SimSpec(base, T=cfg.T), K, base_seed=s_single)
    half = K // 2
    broken = RealizationSet(tuple(
        simulate(SimSpec(base if k < half else shifted, T=cfg.T, seed=s_break + k), realization_id=k)
        for k in range(K)))
    est_single = sequential_estimates(single, fit_cfg, mode="iid").values
    est_break = sequential_estimates(broken, fit_cfg, mode="iid").values
    table = Table(("k", "case", "beta_hat", "z"))
    for case, v in (("single", est_single), ("break", est_break)):
        sd = v.std(ddof=1)
        z = (v - v.mean()) / sd if sd > 0 else np.zeros_like(v)
        table.rows += [(k + 1, case, float(b), float(zz)) for k, (b, zz) in enumerate(zip(v, z))]
    summary = {
        "ks_single": ks_normal(est_single),
        "ks_break": ks_normal(est_break),
        "beta_hat_single": _interval(est_single, "empirical", subseed(cfg.seed, 3)),
        "beta_hat_break": _interval(est_break, "empirical", subseed(cfg.seed, 4)),
    }
    summary["break_is_less_gaussian"] = summary["ks_break"] >= summary["ks_single"]
    return ExperimentReport("estimate-dist", asdict(cfg), {"estimates": table}, summary,
                            {"single": s_single, "break": s_break}, "empirical",
                            time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# log-likelihood scans


@dataclass(frozen=True)
class LoglikScanConfig:
    mu: float = 0.1
    alpha: float = 0.5
    beta: float = 1.2
    T: float = 1000.0
    n_realizations: int = 100
    n_points: int = 60
    large: tuple = (0.1, 100.0)
    medium: tuple = (0.6, 2.4)
    small: tuple = (1.1, 1.3)
    resamples: int = 1000
    seed: int = 0

    @classmethod
    def for_scale(cls, scale="desk", seed=0):
        return cls(seed=seed)

    def grids(self) -> dict:
        lo, hi = self.large
        return {
            "large": 10.0 ** np.linspace(np.log10(lo), np.log10(hi), self.n_points),
            "medium": np.linspace(*self.medium, self.n_points),
            "small": np.linspace(*self.small, self.n_points),
        }


def _sign_changes(y) -> int:
    d2 = np.sign(np.diff(np.asarray(y, dtype=float), 2))
    d2 = d2[d2 != 0]
    return int(np.count_nonzero(d2[1:] != d2[:-1]))


def exp_loglik_scan(cfg: LoglikScanConfig = LoglikScanConfig()) -> ExperimentReport:
    """Negative log-likelihood against the decay on three zoom levels.

    Each range gets its own set of realizations. The summary records the
    curvature sign changes of the large-range curve, the share of
    realizations whose own minimizer on the medium grid is not the grid
    point nearest the true decay, and the large-decay Poisson limit.
    """
    t0 = time.perf_counter()
    truth = HawkesParams.univariate(cfg.mu, cfg.alpha, cfg.beta)
    tables, seeds, summary = {}, {}, {}
    for i, (name, grid) in enumerate(cfg.grids().items()):
        seeds[name] = subseed(cfg.seed, 10 + i)
        rs = simulate_batch(SimSpec(truth, T=cfg.T), cfg.n_realizations, base_seed=seeds[name])
        scan = loglik_scan(truth, rs, grid, resamples=cfg.resamples, seed=subseed(cfg.seed, 20 + i))
        tables[name] = Table(("beta", "mean_negloglik", "ci_low", "ci_high"),
                             [tuple(map(float, r)) for r in zip(scan.beta_grid, scan.mean_negloglik,
                                                                scan.ci_low, scan.ci_high)])
        nearest = int(np.argmin(np.abs(grid - cfg.beta)))
        per_arg = np.argmin(scan.per_realization, axis=1)
        entry = {
            "argmin_beta": float(grid[int(np.argmin(scan.mean_negloglik))]),
            "second_difference_sign_changes": _sign_changes(scan.mean_negloglik),
            "fraction_argmin_not_at_truth": float(np.mean(per_arg != nearest)),
        }
        if name == "large":
            n = np.array([len(s) for s in rs], dtype=float)
            H = np.array([s.T for s in rs])
            entry["poisson_limit_negloglik"] = float(np.mean(cfg.mu * H - n * np.log(cfg.mu)))
            entry["negloglik_at_max_beta"] = float(scan.mean_negloglik[-1])
        summary[name] = entry
    summary["large_nonconvex"] = summary["large"]["second_difference_sign_changes"] > 0
    summary["medium_argmin_spread"] = summary["medium"]["fraction_argmin_not_at_truth"] > 0.2
    cfg_doc = asdict(cfg)
    cfg_doc["grids"] = {k: v.tolist() for k, v in cfg.grids().items()}
    return ExperimentReport("loglik-scan", cfg_doc, tables, summary, seeds,
                            "percentile over realizations", time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# influence direction under decay uncertainty


@dataclass(frozen=True)
class InfluenceConfig:
    mu: tuple = (0.1, 0.5)
    alpha11: float = 0.1
    alpha22: float = 0.2
    alpha21: float = 0.7
    c_values: tuple = tuple(np.linspace(0.75, 1.25, 10).tolist())
    beta: float = 1.2
    T: float = 1000.0
    n_realizations: int = 100
    b0: float = 1.5
    n_sweep: int = 100
    level: float = 0.95
    method: str = "nonlinear"
    mode: str = "pooled"
    seed: int = 0
    n_jobs: int = 1

    @classmethod
    def for_scale(cls, scale="desk", seed=0):
        if scale == "paper":
            return cls(seed=seed)
        return cls(n_realizations=20, seed=seed)

    def params(self, c: float) -> HawkesParams:
        alpha = [[self.alpha11, self.alpha21 * c], [self.alpha21, self.alpha22]]
        return HawkesParams(list(self.mu), alpha, self.beta)


def _influence_condition(args):
    cfg, i, c = args
    p = cfg.params(c)
    seed = subseed(cfg.seed, 100 + i)
    rs = simulate_batch(SimSpec(p, T=cfg.T), cfg.n_realizations, base_seed=seed)
    est = sequential_estimates(rs, FitConfig(method=cfg.method, seed=cfg.seed), mode=cfg.mode)
    model = bayes.GammaExpModel(b0=cfg.b0)
    lo, hi = bayes.predictive_interval(model, est, cfg.level)
    sweep = np.linspace(lo, hi, cfg.n_sweep)
    truth = np.sign(p.alpha[0, 1] - p.alpha[1, 0])
    correct = np.empty(cfg.n_sweep)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        for j, b in enumerate(sweep):
            a = fit_mu_alpha(rs, float(b)).alpha
            correct[j] = float(np.sign(a[0, 1] - a[1, 0]) == truth)
    ci = _interval(correct, "bayesian", subseed(cfg.seed, 200 + i))
    return {"c": float(c), "alpha12": float(p.alpha[0, 1]), "rho": spectral_radius(p),
            "beta_prime_low": float(lo), "beta_prime_high": float(hi),
            "beta_hat_last": float(est.values[-1]), "accuracy": ci["mean"],
            "ci_low": ci["ci_low"], "ci_high": ci["ci_high"], "seed": seed}


def exp_influence_direction(cfg: InfluenceConfig = InfluenceConfig()) -> ExperimentReport:
    """Recovery of the dominant cross-excitation over a credible range of decays.

    For each ratio ``c = alpha12 / alpha21``: simulate, fit the decay
    sequentially, take the predictive credible interval under the prior
    mean ``b0``, refit baseline and excitation at evenly spaced decays inside
    it and score how often the sign of ``alpha12 - alpha21`` comes out right.

    Raises
    ------
    NonStationary
        Some configuration has spectral radius >= 1; nothing is simulated.
    """
    t0 = time.perf_counter()
    if not cfg.c_values:
        raise EmptyInput("no c values")
    for c in cfg.c_values:
        p = cfg.params(c)
        if not is_stationary(p):
            raise NonStationary(f"c={c}: spectral radius {spectral_radius(p):.6g} >= 1")
    rows = _pmap(_influence_condition, [(cfg, i, c) for i, c in enumerate(cfg.c_values)], cfg.n_jobs)
    cols = ("c", "alpha12", "rho", "beta_prime_low", "beta_prime_high", "beta_hat_last",
            "accuracy", "ci_low", "ci_high")
    table = Table(cols, [tuple(r[k] for k in cols) for r in rows])
    c = np.asarray(cfg.c_values)
    near = int(np.argmin(np.abs(c - 1.0)))
    width = [r["ci_high"] - r["ci_low"] for r in rows]
    ends = [0, len(rows) - 1]
    summary = {
        "c_nearest_one": float(c[near]),
        "accuracy_near_one": rows[near]["accuracy"],
        "accuracy_endpoints": [rows[i]["accuracy"] for i in ends],
        "ci_width_near_one": width[near],
        "ci_width_endpoints": [width[i] for i in ends],
    }
    summary["endpoints_at_least_as_accurate"] = all(
        rows[i]["accuracy"] >= rows[near]["accuracy"] for i in ends)
    summary["near_one_ci_at_least_as_wide"] = all(width[near] >= width[i] for i in ends)
    return ExperimentReport("influence", asdict(cfg), {"accuracy": table}, summary,
                            {f"c{i}": r["seed"] for i, r in enumerate(rows)}, "bayesian",
                            time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# diagnosis of a wrong hypothesis


ESTIMATORS = ("nonlinear", "grid", "smbo")


@dataclass(frozen=True)
class DiagnosisConfig:
    mu: float = 1.2
    alpha: float = 0.6
    beta: float = 0.8
    n_realizations: int = 100
    n_events: int = 100
    estimators: tuple = ESTIMATORS
    b0: float = 1.0
    a0: float | None = None
    mode: str = "pooled"
    n_reps: int = 10
    seed: int = 0
    n_jobs: int = 1

    @classmethod
    def for_scale(cls, scale="desk", seed=0):
        return cls(n_reps=100 if scale == "paper" else 10, seed=seed)


def _diagnosis_rep(args):
    cfg, rep = args
    truth = HawkesParams.univariate(cfg.mu, cfg.alpha, cfg.beta)
    seed = subseed(cfg.seed, 300, rep)
    rs = simulate_batch(SimSpec(truth, n_events=cfg.n_events), cfg.n_realizations, base_seed=seed)
    model = bayes.GammaExpModel(b0=cfg.b0, a0=cfg.a0)
    out = []
    for m in cfg.estimators:
        est = sequential_estimates(rs, FitConfig(method=m, seed=subseed(cfg.seed, 301, rep)),
                                   mode=cfg.mode)
        bp = bayes.predictive_mean(model, est)
        out.append((rep, m, float(bp), float(cfg.b0 - bp), float(est.values[-1])))
    return seed, out


def exp_diagnosis(cfg: DiagnosisConfig = DiagnosisConfig()) -> ExperimentReport:
    """Shift ``b0 - beta'`` of the predictive mean under a wrong hypothesis ``b0``.

    RMSE of ``beta'`` against the true decay and the mean shift (with a
    Bayesian-bootstrap interval over repetitions) are reported per estimator.
    """
    t0 = time.perf_counter()
    _check_config(cfg)
    results = _pmap(_diagnosis_rep, [(cfg, r) for r in range(cfg.n_reps)], cfg.n_jobs)
    table = Table(("rep", "estimator", "beta_prime", "shift", "beta_hat_last"))
    for _, rows in results:
        table.rows += rows
    summary = {}
    for i, m in enumerate(cfg.estimators):
        bp = np.array([r[2] for r in table.rows if r[1] == m])
        sh = np.array([r[3] for r in table.rows if r[1] == m])
        summary[m] = {"rmse": rmse(bp, cfg.beta),
                      "shift": _interval(sh, "bayesian", subseed(cfg.seed, 390, i)),
                      "beta_prime": _interval(bp, "bayesian", subseed(cfg.seed, 391, i))}
    return ExperimentReport("diagnosis", asdict(cfg), {"repetitions": table}, summary,
                            {f"rep{r}": s for r, (s, _) in enumerate(results)}, "bayesian",
                            time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# changepoint recovery


@dataclass(frozen=True)
class ChangepointConfig:
    mu: float = 1.2
    alpha: float = 0.6
    beta: float = 0.8
    increment: float = 1.0
    k_star: int = 50
    n_realizations: int = 100
    n_events: int = 100
    estimators: tuple = ESTIMATORS
    rate1: float = 1.0
    rate2: float = 0.7
    mode: str = "iid"
    n_samples: int = 20_000
    n_reps: int = 20
    seed: int = 0
    n_jobs: int = 1

    @classmethod
    def for_scale(cls, scale="desk", seed=0):
        return cls(n_reps=100 if scale == "paper" else 20, seed=seed)


def changepoint_streams(cfg: ChangepointConfig, seed: int) -> RealizationSet:
    """Realizations ``1..K`` with the decay raised from index ``k_star`` on."""
    before = HawkesParams.univariate(cfg.mu, cfg.alpha, cfg.beta)
    after = before.with_beta(cfg.beta + cfg.increment)
    return RealizationSet(tuple(
        simulate(SimSpec(before if k + 1 < cfg.k_star else after, n_events=cfg.n_events,
                         seed=seed + k), realization_id=k)
        for k in range(cfg.n_realizations)))


def _changepoint_rep(args):
    cfg, rep = args
    seed = subseed(cfg.seed, 400, rep)
    rs = changepoint_streams(cfg, seed)
    model = changepoint.ChangepointModel(cfg.rate1, cfg.rate2)
    out = []
    for m in cfg.estimators:
        est = sequential_estimates(rs, FitConfig(method=m, seed=subseed(cfg.seed, 401, rep)),
                                   mode=cfg.mode)
        post = changepoint.mcmc(est, model, cfg.n_samples, seed=subseed(cfg.seed, 402, rep))
        s = post.summary()
        out.append((rep, m, s.beta1_mean, s.beta2_mean, s.kappa_median, s.ordering,
                    post.acceptance["b1"], post.acceptance["b2"]))
    return seed, out


def exp_changepoint(cfg: ChangepointConfig = ChangepointConfig()) -> ExperimentReport:
    """Changepoint posterior over sequential estimates with a decay break at ``k_star``.

    Reports, per estimator, RMSE of ``(b1_mean, b2_mean, kappa_median / K)``
    against ``(beta, beta + increment, k_star / K)``, the ordering accuracy
    ``b1_mean < b2_mean`` and the share of runs with the median changepoint
    within ``K / 10`` of ``k_star``.
    """
    t0 = time.perf_counter()
    _check_config(cfg)
    if not 2 <= cfg.k_star <= cfg.n_realizations:
        raise ValidationError("k_star must lie in 2..n_realizations")
    results = _pmap(_changepoint_rep, [(cfg, r) for r in range(cfg.n_reps)], cfg.n_jobs)
    table = Table(("rep", "estimator", "beta1_mean", "beta2_mean", "kappa_median", "ordering",
                   "accept_b1", "accept_b2"))
    for _, rows in results:
        table.rows += rows
    K = cfg.n_realizations
    window = K / 10
    summary = {}
    for i, m in enumerate(cfg.estimators):
        rows = [r for r in table.rows if r[1] == m]
        b1 = np.array([r[2] for r in rows])
        b2 = np.array([r[3] for r in rows])
        kap = np.array([r[4] for r in rows])
        order = np.array([float(r[5]) for r in rows])
        near = (np.abs(kap - cfg.k_star) <= window).astype(float)
        summary[m] = {
            "rmse_beta1": rmse(b1, cfg.beta),
            "rmse_beta2": rmse(b2, cfg.beta + cfg.increment),
            "rmse_kappa_fraction": rmse(kap / K, cfg.k_star / K),
            "ordering_accuracy": _interval(order, "bayesian", subseed(cfg.seed, 490, i)),
            "kappa_near_fraction": _interval(near, "bayesian", subseed(cfg.seed, 491, i)),
            "kappa_median_of_runs": float(np.median(kap)),
        }
    return ExperimentReport("changepoint", asdict(cfg), {"repetitions": table}, summary,
                            {f"rep{r}": s for r, (s, _) in enumerate(results)}, "bayesian",
                            time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# estimator bench on random two-dimensional processes


BASELINES = (("given", 1.0), ("wrong", 2.0), ("wrong+", 10.0), ("wrong++", 100.0))


@dataclass(frozen=True)
class BenchConfig:
    n_processes: int = 10
    n_realizations: int = 5
    T: float = 500.0
    dims: int = 2
    mu_range: tuple = (0.05, 1.0)
    alpha_range: tuple = (0.0, 1.0)
    beta_range: tuple = (0.5, 5.0)
    max_rho: float = 0.95
    methods: tuple = ("nonlinear", "grid", "smbo", "em")
    seed: int = 0
    n_jobs: int = 1

    @classmethod
    def for_scale(cls, scale="desk", seed=0):
        if scale == "paper":
            return cls(n_processes=100, n_realizations=10, T=1000.0, seed=seed)
        return cls(seed=seed)


def random_stationary_params(rng: np.random.Generator, cfg: BenchConfig) -> HawkesParams:
    """Rejection-sample uniform parameters until the spectral radius is below ``max_rho``."""
    M = cfg.dims
    while True:
        p = HawkesParams(rng.uniform(*cfg.mu_range, M), rng.uniform(*cfg.alpha_range, (M, M)),
                         float(rng.uniform(*cfg.beta_range)))
        if spectral_radius(p) < cfg.max_rho:
            return p


def _ks_against(params: HawkesParams, held, seed: int) -> float:
    try:
        sim = simulate(SimSpec(params, T=held.T, seed=seed), safety_cap=max(100 * len(held), 10_000))
    except SafetyCapExceeded:
        return 1.0
    if len(sim) == 0:
        return 1.0
    return ks_two_sample(inter_event_times(sim), inter_event_times(held))


def _bench_process(args):
    cfg, i = args
    seed = subseed(cfg.seed, 500, i)
    p = random_stationary_params(np.random.Generator(np.random.PCG64(seed)), cfg)
    train = simulate_batch(SimSpec(p, T=cfg.T), cfg.n_realizations, base_seed=seed + 1)
    held = simulate(SimSpec(p, T=cfg.T, seed=seed + cfg.n_realizations + 1),
                    realization_id=cfg.n_realizations)
    rows, clock = [], {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        candidates = []
        for m in cfg.methods:
            t = time.perf_counter()
            f = fit_decay(train, FitConfig(method=m, seed=seed))
            clock[m] = time.perf_counter() - t
            candidates.append((m, f.params))
        for name, factor in BASELINES:
            t = time.perf_counter()
            b = p.beta * factor
            f = fit_mu_alpha(train, b)
            clock[name] = time.perf_counter() - t
            candidates.append((name, HawkesParams(f.mu, f.alpha, b)))
    for m, q in candidates:
        ll = loglik_multi(q, held) / max(len(held), 1)
        ks = _ks_against(q, held, seed + 10_000)
        rows.append((i, m, float(p.beta), float(q.beta), float(ll), float(ks),
                     float(spectral_radius(p))))
    return seed, rows, clock


def exp_estimator_bench(cfg: BenchConfig = BenchConfig()) -> ExperimentReport:
    """All decay estimators and fixed-decay baselines on random stationary processes.

    Held-out log-likelihood is per event on one realization not used for
    fitting; K-S compares inter-event times of a stream simulated from the
    fit with those of the held-out stream. Fitting times are wall-clock and
    therefore only reported in the summary, never in the tables.
    """
    t0 = time.perf_counter()
    if cfg.n_processes < 1:
        raise EmptyInput("need at least one process")
    results = _pmap(_bench_process, [(cfg, i) for i in range(cfg.n_processes)], cfg.n_jobs)
    table = Table(("process", "method", "beta_true", "beta_fit", "heldout_loglik_per_event",
                   "ks", "rho_true"))
    for _, rows, _ in results:
        table.rows += rows
    names = list(cfg.methods) + [b for b, _ in BASELINES]
    summary = {}
    for j, m in enumerate(names):
        rows = [r for r in table.rows if r[1] == m]
        bt = np.array([r[2] for r in rows])
        bf = np.array([r[3] for r in rows])
        summary[m] = {
            "rmse_beta": float(np.sqrt(np.mean((bf - bt) ** 2))),
            "heldout_loglik_per_event": _interval([r[4] for r in rows], "bayesian",
                                                  subseed(cfg.seed, 590, j)),
            "ks": _interval([r[5] for r in rows], "bayesian", subseed(cfg.seed, 591, j)),
        }
    timing = {m: float(np.mean([c[m] for _, _, c in results])) for m in names}
    return ExperimentReport("bench", asdict(cfg), {"methods": table}, summary,
                            {f"process{i}": s for i, (s, _, _) in enumerate(results)}, "bayesian",
                            time.perf_counter() - t0, {"fit_seconds_mean": timing})


EXPERIMENTS = {
    "estimate-dist": (EstimateDistConfig, exp_estimate_distribution),
    "loglik-scan": (LoglikScanConfig, exp_loglik_scan),
    "influence": (InfluenceConfig, exp_influence_direction),
    "diagnosis": (DiagnosisConfig, exp_diagnosis),
    "changepoint": (ChangepointConfig, exp_changepoint),
    "bench": (BenchConfig, exp_estimator_bench),
}


def run(name: str, scale: str = "desk", seed: int = 0, n_jobs: int = 1, **overrides) -> ExperimentReport:
    """Run a named experiment at ``desk`` or ``paper`` scale."""
    if name not in EXPERIMENTS:
        raise ValidationError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
    if scale not in ("desk", "paper"):
        raise ValidationError(f"unknown scale {scale!r}")
    cls, fn = EXPERIMENTS[name]
    cfg = cls.for_scale(scale, seed)
    if "n_jobs" in cls.__dataclass_fields__:
        overrides["n_jobs"] = n_jobs
    return fn(replace(cfg, **overrides))
