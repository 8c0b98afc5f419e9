"""Ogata thinning simulation of exponential-kernel Hawkes processes.

Random numbers come from ``numpy.random.Generator(PCG64(seed))``. Batch
realization ``k`` uses ``seed = base_seed + k``, so a batch does not depend on
the order in which realizations are produced.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import EventStream, HawkesParams, RealizationSet
from .exceptions import EmptyInput, SafetyCapExceeded, ValidationError

SAFETY_CAP = 10_000_000
_CHUNK = 4096


@dataclass(frozen=True)
class SimSpec:
    """What to simulate and when to stop.

    Exactly one of ``T`` (time horizon) and ``n_events`` must be given.
    Non-stationary parameters are allowed; the event cap guards them.
    """

    params: HawkesParams
    T: float | None = None
    n_events: int | None = None
    seed: int = 0

    def __post_init__(self):
        if (self.T is None) == (self.n_events is None):
            raise ValidationError("give exactly one of T and n_events")
        if self.T is not None and not self.T > 0:
            raise ValidationError(f"T={self.T} must be > 0")
        if self.n_events is not None and self.n_events < 1:
            raise ValidationError(f"n_events={self.n_events} must be >= 1")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValidationError("seed must fit in 64 unsigned bits")


def simulate(spec: SimSpec, realization_id=0, safety_cap: int = SAFETY_CAP) -> EventStream:
    """Draw one realization by thinning.

    The dominating rate is the total intensity right after the latest
    candidate, which is an upper bound until the next candidate because the
    kernel only decays between events.
    """
    params = spec.params
    m = params.dims
    rng = np.random.Generator(np.random.PCG64(int(spec.seed)))
    horizon = -1.0 if spec.T is None else float(spec.T)
    max_events = spec.n_events if spec.n_events is not None else safety_cap + 1
    max_events = min(max_events, safety_cap + 1)

    mu = np.ascontiguousarray(params.mu)
    alpha = np.ascontiguousarray(params.alpha)
    beta = np.ascontiguousarray(params.beta_matrix)
    state = np.zeros((m, m))
    cap = 1024 if spec.n_events is None else min(spec.n_events, safety_cap + 1)
    out_t = np.empty(cap)
    out_d = np.empty(cap, dtype=np.int64)
    uniforms = rng.random(_CHUNK)
    pos, now, count = 0, 0.0, 0
    while True:
        status, pos, now, count = _kernels.thinning_step(
            mu, alpha, beta, state, now, horizon, max_events,
            uniforms, pos, out_t, out_d, count)
        if count > safety_cap:
            raise SafetyCapExceeded(
                f"more than {safety_cap} events generated; spectral radius may be >= 1")
        if status == 0:
            break
        if status == 1:
            uniforms = np.concatenate([uniforms[pos:], rng.random(_CHUNK)])
            pos = 0
        else:
            new_cap = min(2 * out_t.shape[0], safety_cap + 1)
            out_t = np.concatenate([out_t, np.empty(new_cap - out_t.shape[0])])
            out_d = np.concatenate([out_d, np.empty(new_cap - out_d.shape[0], dtype=np.int64)])

    times, dims = out_t[:count].copy(), out_d[:count].copy()
    if spec.n_events is not None:
        if count < spec.n_events:
            # only possible when every rate is zero
            raise ValidationError("process produced no further events (all rates zero)")
        T = float(times[-1])
    else:
        T = float(spec.T)
    return EventStream(times, dims, T=T, n_dims=m, realization_id=realization_id)


def simulate_batch(spec: SimSpec, reps: int, base_seed: int | None = None) -> RealizationSet:
    """``reps`` independent realizations with ids ``0..reps-1``."""
    if reps < 1:
        raise EmptyInput("reps must be >= 1")
    base = spec.seed if base_seed is None else int(base_seed)
    streams = []
    for k in range(reps):
        sub = SimSpec(spec.params, T=spec.T, n_events=spec.n_events, seed=base + k)
        streams.append(simulate(sub, realization_id=k))
    return RealizationSet(tuple(streams))
