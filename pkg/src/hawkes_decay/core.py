"""Parameter and event-stream types, stationarity and intensity evaluation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .exceptions import (
    DimOutOfRange,
    EmptyInput,
    NegativeRate,
    NonFinite,
    NonMonotoneTime,
    ShapeMismatch,
    ValidationError,
)

__all__ = [
    "HawkesParams",
    "EventStream",
    "RealizationSet",
    "validate",
    "spectral_radius",
    "is_stationary",
    "intensity_at",
    "influence_direction",
]


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class HawkesParams:
    """Exponential-kernel Hawkes parameters.

    Parameters
    ----------
    mu : array-like, shape (M,)
        Baseline intensities.
    alpha : array-like, shape (M, M)
        ``alpha[p, q]`` is the jump in the intensity of ``p`` caused by an
        event in ``q``.
    beta : float or array-like of shape (M, M)
        Decay rate shared by all pairs, or one rate per pair. Only the shared
        form can be fitted.
    """

    mu: np.ndarray
    alpha: np.ndarray
    beta: float | np.ndarray

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        alpha = np.asarray(self.alpha, dtype=float)
        if alpha.ndim == 0 and mu.shape == (1,):
            alpha = alpha.reshape(1, 1)
        beta = self.beta
        if np.ndim(beta) == 0:
            beta = float(beta)
        else:
            beta = _frozen(beta)
        object.__setattr__(self, "mu", _frozen(mu))
        object.__setattr__(self, "alpha", _frozen(alpha))
        object.__setattr__(self, "beta", beta)
        validate(self)

    @classmethod
    def univariate(cls, mu, alpha, beta):
        return cls([mu], [[alpha]], beta)

    @property
    def dims(self) -> int:
        return self.mu.shape[0]

    @property
    def shared_beta(self) -> bool:
        return isinstance(self.beta, float)

    @property
    def beta_matrix(self) -> np.ndarray:
        if self.shared_beta:
            return np.full((self.dims, self.dims), self.beta)
        return self.beta

    def with_beta(self, beta) -> "HawkesParams":
        return HawkesParams(self.mu, self.alpha, beta)

    def to_dict(self) -> dict:
        beta = self.beta if self.shared_beta else self.beta.tolist()
        return {"mu": self.mu.tolist(), "alpha": self.alpha.tolist(), "beta": beta}

    @classmethod
    def from_dict(cls, doc: dict) -> "HawkesParams":
        try:
            return cls(doc["mu"], doc["alpha"], doc["beta"])
        except KeyError as exc:
            raise ShapeMismatch(f"missing parameter field {exc.args[0]!r}") from None

    def __repr__(self):
        beta = self.beta if self.shared_beta else self.beta.tolist()
        return (f"HawkesParams(mu={self.mu.tolist()}, alpha={self.alpha.tolist()}, "
                f"beta={beta})")

    def __eq__(self, other):
        if not isinstance(other, HawkesParams):
            return NotImplemented
        return (np.array_equal(self.mu, other.mu)
                and np.array_equal(self.alpha, other.alpha)
                and np.array_equal(self.beta_matrix, other.beta_matrix))

    __hash__ = None


def validate(params: HawkesParams) -> bool:
    """Check every invariant of ``params``; raise on the first violation.

    Returns True when the parameters are valid.
    """
    mu, alpha = params.mu, params.alpha
    if mu.ndim != 1 or mu.shape[0] < 1:
        raise ShapeMismatch(f"mu must be a non-empty vector, got shape {mu.shape}")
    m = mu.shape[0]
    if alpha.shape != (m, m):
        raise ShapeMismatch(f"alpha has shape {alpha.shape}, expected {(m, m)} to match mu")
    if params.shared_beta:
        beta = np.array([[params.beta]])
    else:
        beta = params.beta
        if beta.shape != (m, m):
            raise ShapeMismatch(f"beta has shape {beta.shape}, expected {(m, m)}")
    for name, arr in (("mu", mu), ("alpha", alpha), ("beta", beta)):
        bad = np.argwhere(~np.isfinite(arr))
        if bad.size:
            raise NonFinite(f"{name}[{', '.join(str(int(i)) for i in bad[0])}] is not finite")
    bad = np.argwhere(mu < 0)
    if bad.size:
        raise NegativeRate(f"mu[{bad[0][0]}] = {mu[bad[0][0]]} < 0")
    bad = np.argwhere(alpha < 0)
    if bad.size:
        i, j = bad[0]
        raise NegativeRate(f"alpha[{i}, {j}] = {alpha[i, j]} < 0")
    bad = np.argwhere(beta <= 0)
    if bad.size:
        if params.shared_beta:
            raise NegativeRate(f"beta = {params.beta} must be > 0")
        i, j = bad[0]
        raise NegativeRate(f"beta[{i}, {j}] = {beta[i, j]} must be > 0")
    return True


def spectral_radius(params: HawkesParams) -> float:
    """Largest eigenvalue magnitude of the branching matrix ``alpha / beta``."""
    g = params.alpha / params.beta_matrix
    m = g.shape[0]
    if m == 1:
        return float(g[0, 0])
    if m == 2:
        # nonnegative entries keep the discriminant >= 0
        half_tr = 0.5 * (g[0, 0] + g[1, 1])
        disc = 0.25 * (g[0, 0] - g[1, 1]) ** 2 + g[0, 1] * g[1, 0]
        root = math.sqrt(max(disc, 0.0))
        return float(max(abs(half_tr + root), abs(half_tr - root)))
    return float(np.max(np.abs(np.linalg.eigvals(g))))


def is_stationary(params: HawkesParams) -> bool:
    return spectral_radius(params) < 1.0


@dataclass(frozen=True, eq=False)
class EventStream:
    """One realization: strictly increasing event times with dimension labels.

    ``T`` defaults to the last event time. Ties, decreasing times, negative
    times and out-of-range dimensions are rejected at construction.
    """

    times: np.ndarray
    dims: np.ndarray | None = None
    T: float | None = None
    n_dims: int = 1
    realization_id: str | int = 0

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).ravel()
        if self.dims is None:
            dims = np.zeros(times.shape[0], dtype=np.int64)
        else:
            dims = np.asarray(self.dims).ravel()
            if dims.size and not np.all(np.equal(np.mod(dims, 1), 0)):
                raise DimOutOfRange("dimension labels must be integers")
            dims = dims.astype(np.int64)
        if dims.shape != times.shape:
            raise ShapeMismatch(f"{times.shape[0]} times but {dims.shape[0]} dimension labels")
        if not np.all(np.isfinite(times)):
            raise NonFinite("event times must be finite")
        if times.size and times[0] < 0:
            raise ValidationError(f"event time {times[0]} is negative")
        steps = np.diff(times)
        if np.any(steps <= 0):
            i = int(np.argmax(steps <= 0)) + 1
            raise NonMonotoneTime(
                f"event {i} at t={times[i]} does not follow t={times[i - 1]} strictly")
        if self.n_dims < 1:
            raise ShapeMismatch("n_dims must be >= 1")
        if dims.size and (dims.min() < 0 or dims.max() >= self.n_dims):
            bad = int(dims[(dims < 0) | (dims >= self.n_dims)][0])
            raise DimOutOfRange(f"dimension {bad} outside 0..{self.n_dims - 1}")
        last = float(times[-1]) if times.size else 0.0
        T = last if self.T is None else float(self.T)
        if not math.isfinite(T):
            raise NonFinite("horizon T must be finite")
        if T < last:
            raise ValidationError(f"horizon T={T} precedes the last event at {last}")
        if T <= 0 and times.size == 0:
            raise ValidationError("an empty stream needs a positive horizon T")
        object.__setattr__(self, "times", _frozen(times))
        object.__setattr__(self, "dims", _frozen(dims, dtype=np.int64))
        object.__setattr__(self, "T", T)

    def __len__(self):
        return self.times.shape[0]

    @property
    def last_time(self) -> float:
        return float(self.times[-1]) if len(self) else 0.0

    def times_of(self, p: int) -> np.ndarray:
        return self.times[self.dims == p]

    def __eq__(self, other):
        if not isinstance(other, EventStream):
            return NotImplemented
        return (np.array_equal(self.times, other.times)
                and np.array_equal(self.dims, other.dims)
                and self.T == other.T and self.n_dims == other.n_dims
                and str(self.realization_id) == str(other.realization_id))

    __hash__ = None


@dataclass(frozen=True)
class RealizationSet:
    """Non-empty ordered collection of streams sharing the same dimension count."""

    streams: tuple = field(default_factory=tuple)

    def __post_init__(self):
        streams = tuple(self.streams)
        if not streams:
            raise EmptyInput("a realization set needs at least one stream")
        m = streams[0].n_dims
        for s in streams:
            if not isinstance(s, EventStream):
                raise ValidationError(f"expected EventStream, got {type(s).__name__}")
            if s.n_dims != m:
                raise ShapeMismatch(
                    f"stream {s.realization_id!r} has {s.n_dims} dimensions, expected {m}")
        object.__setattr__(self, "streams", streams)

    @property
    def n_dims(self) -> int:
        return self.streams[0].n_dims

    def __len__(self):
        return len(self.streams)

    def __iter__(self):
        return iter(self.streams)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return RealizationSet(self.streams[idx])
        return self.streams[idx]

    @property
    def n_events(self) -> int:
        return sum(len(s) for s in self.streams)


def as_realizations(X, n_dims: int | None = None) -> RealizationSet:
    """Coerce ``X`` into a :class:`RealizationSet`.

    Accepts a RealizationSet, a single EventStream, a 1-D array of univariate
    times, or a sequence of EventStreams / univariate time arrays.
    """
    if isinstance(X, RealizationSet):
        out = X
    elif isinstance(X, EventStream):
        out = RealizationSet((X,))
    else:
        if isinstance(X, np.ndarray) and X.ndim == 1 and X.dtype != object:
            X = [X]
        items = list(X) if isinstance(X, Iterable) else None
        if items is None:
            raise ValidationError(f"cannot interpret {type(X).__name__} as event streams")
        if items and all(np.ndim(x) == 0 for x in items):
            items = [np.asarray(items, dtype=float)]
        streams = []
        for k, x in enumerate(items):
            if isinstance(x, EventStream):
                streams.append(x)
            else:
                streams.append(EventStream(np.asarray(x, dtype=float), realization_id=k))
        out = RealizationSet(tuple(streams))
    if n_dims is not None and out.n_dims != n_dims:
        raise ShapeMismatch(f"data has {out.n_dims} dimensions, model has {n_dims}")
    return out


def intensity_at(params: HawkesParams, stream: EventStream, p: int, t: float) -> float:
    """Conditional intensity of dimension ``p`` at time ``t``.

    Only events strictly before ``t`` contribute, so the jump caused by an
    event is visible immediately after it, not at it.
    """
    if t < 0:
        raise ValidationError(f"t={t} must be >= 0")
    if not 0 <= p < params.dims:
        raise DimOutOfRange(f"dimension {p} outside 0..{params.dims - 1}")
    if stream.n_dims != params.dims:
        raise ShapeMismatch(f"stream has {stream.n_dims} dimensions, params have {params.dims}")
    mask = stream.times < t
    past_t = stream.times[mask]
    past_q = stream.dims[mask]
    a = params.alpha[p, past_q]
    b = params.beta_matrix[p, past_q]
    return float(params.mu[p] + np.sum(a * np.exp(-b * (t - past_t))))


def influence_direction(alpha: Sequence, p: int, q: int) -> str:
    """Which of two dimensions excites the other more strongly.

    Returns ``"q->p"`` when ``alpha[p][q] > alpha[q][p]`` (q influences p more
    strongly), ``"p->q"`` for the reverse, and ``"tie"`` when equal.
    """
    if p == q:
        raise ValidationError("influence direction needs two distinct dimensions")
    alpha = np.asarray(alpha, dtype=float)
    if alpha[p, q] > alpha[q, p]:
        return "q->p"
    if alpha[p, q] < alpha[q, p]:
        return "p->q"
    return "tie"


def granger_causes(alpha: Sequence, p: int, q: int) -> bool:
    """True when dimension ``q`` Granger-causes dimension ``p`` (``alpha[p][q] > 0``)."""
    return bool(np.asarray(alpha, dtype=float)[p, q] > 0)
