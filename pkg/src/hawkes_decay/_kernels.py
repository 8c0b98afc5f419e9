"""Compiled inner loops.

All kernels take events packed back to back: ``starts[k]`` is the index of the
first event of stream ``k`` and ``starts[-1] == len(times)``. Decay state is
reset at every stream boundary.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def ozaki_loglik(times, mu, alpha, beta, horizon):
    """Univariate log-likelihood in O(n) via the Ozaki recursion."""
    n = times.shape[0]
    comp = mu * horizon
    logsum = 0.0
    a = 0.0
    for i in range(n):
        if i > 0:
            a = math.exp(-beta * (times[i] - times[i - 1])) * (1.0 + a)
        lam = mu + alpha * a
        if lam <= 0.0:
            return -np.inf
        logsum += math.log(lam)
        comp += (alpha / beta) * (1.0 - math.exp(-beta * (horizon - times[i])))
    return logsum - comp


@njit(cache=True)
def excitation_features(times, dims, starts, beta_mat):
    """``R[i, q] = sum over earlier q-events j of exp(-beta[d_i, q] (t_i - t_j))``."""
    n = times.shape[0]
    m = beta_mat.shape[0]
    out = np.zeros((n, m))
    state = np.zeros((m, m))
    for k in range(starts.shape[0] - 1):
        state[:, :] = 0.0
        for i in range(starts[k], starts[k + 1]):
            if i > starts[k]:
                dt = times[i] - times[i - 1]
                for p in range(m):
                    for q in range(m):
                        state[p, q] *= math.exp(-beta_mat[p, q] * dt)
            d = dims[i]
            for q in range(m):
                out[i, q] = state[d, q]
            for p in range(m):
                state[p, d] += 1.0
    return out


@njit(cache=True)
def pooled_loglik(times, dims, starts, horizons, mu, alpha, beta_mat):
    """Summed log-likelihood of concatenated streams, one pass."""
    m = mu.shape[0]
    state = np.zeros((m, m))
    ll = 0.0
    total_h = 0.0
    for k in range(starts.shape[0] - 1):
        state[:, :] = 0.0
        H = horizons[k]
        total_h += H
        for i in range(starts[k], starts[k + 1]):
            if i > starts[k]:
                dt = times[i] - times[i - 1]
                for p in range(m):
                    for q in range(m):
                        state[p, q] *= math.exp(-beta_mat[p, q] * dt)
            d = dims[i]
            lam = mu[d]
            for q in range(m):
                lam += alpha[d, q] * state[d, q]
            if lam <= 0.0:
                return -np.inf
            ll += math.log(lam)
            for p in range(m):
                state[p, d] += 1.0
                b = beta_mat[p, d]
                ll -= alpha[p, d] / b * (1.0 - math.exp(-b * (H - times[i])))
    for p in range(m):
        ll -= mu[p] * total_h
    return ll


@njit(cache=True)
def pooled_loglik_grad(times, dims, starts, horizons, mu, alpha, beta):
    """Shared-decay log-likelihood with its gradient in ``(mu, alpha, beta)``.

    Returns ``(ll, d_mu, d_alpha, d_beta)``; ``ll = -inf`` flags a
    non-positive intensity, in which case the gradient is meaningless.
    """
    m = mu.shape[0]
    s = np.zeros(m)
    w = np.zeros(m)
    d_mu = np.zeros(m)
    d_alpha = np.zeros((m, m))
    col = np.zeros(m)
    ll = 0.0
    d_beta = 0.0
    total_h = 0.0
    for k in range(starts.shape[0] - 1):
        s[:] = 0.0
        w[:] = 0.0
        H = horizons[k]
        total_h += H
        for i in range(starts[k], starts[k + 1]):
            if i > starts[k]:
                dt = times[i] - times[i - 1]
                f = math.exp(-beta * dt)
                for q in range(m):
                    w[q] = f * (w[q] + dt * s[q])
                    s[q] = f * s[q]
            d = dims[i]
            lam = mu[d]
            lag = 0.0
            for q in range(m):
                lam += alpha[d, q] * s[q]
                lag += alpha[d, q] * w[q]
            if lam <= 0.0:
                return -np.inf, d_mu, d_alpha, 0.0
            ll += math.log(lam)
            inv = 1.0 / lam
            d_mu[d] += inv
            for q in range(m):
                d_alpha[d, q] += s[q] * inv
            d_beta -= lag * inv
            s[d] += 1.0
            tau = H - times[i]
            e = math.exp(-beta * tau)
            g = (1.0 - e) / beta
            col[d] += g
            dg = tau * e / beta - g / beta
            for p in range(m):
                ll -= alpha[p, d] * g
                d_beta -= alpha[p, d] * dg
    for p in range(m):
        ll -= mu[p] * total_h
        d_mu[p] -= total_h
        for q in range(m):
            d_alpha[p, q] -= col[q]
    return ll, d_mu, d_alpha, d_beta


@njit(cache=True)
def em_statistics(times, dims, starts, m, beta):
    """Features ``R`` and lag-weighted features ``D`` for a shared decay.

    ``D[i, q] = sum over earlier q-events j of (t_i - t_j) exp(-beta (t_i - t_j))``.
    """
    n = times.shape[0]
    R = np.zeros((n, m))
    D = np.zeros((n, m))
    s = np.zeros(m)
    w = np.zeros(m)
    for k in range(starts.shape[0] - 1):
        s[:] = 0.0
        w[:] = 0.0
        for i in range(starts[k], starts[k + 1]):
            if i > starts[k]:
                dt = times[i] - times[i - 1]
                f = math.exp(-beta * dt)
                for q in range(m):
                    w[q] = f * (w[q] + dt * s[q])
                    s[q] = f * s[q]
            for q in range(m):
                R[i, q] = s[q]
                D[i, q] = w[q]
            s[dims[i]] += 1.0
    return R, D


@njit(cache=True)
def thinning_step(mu, alpha, beta_mat, state, now, horizon, max_events,
                  uniforms, pos, out_t, out_d, count):
    """Advance an Ogata thinning run until done or out of buffer space.

    ``state[p, q]`` holds the excitation of ``p`` from past ``q`` events at
    time ``now``. Returns ``(status, pos, now, count)`` where status is 0 when
    the run finished, 1 when more uniforms are needed and 2 when the output
    arrays are full. ``horizon < 0`` means stop on ``max_events`` only.
    """
    m = mu.shape[0]
    cap = out_t.shape[0]
    mu_total = 0.0
    for p in range(m):
        mu_total += mu[p]
    while True:
        if count >= max_events:
            return 0, pos, now, count
        if count >= cap:
            return 2, pos, now, count
        if pos + 3 > uniforms.shape[0]:
            return 1, pos, now, count
        lam_bar = mu_total
        for p in range(m):
            for q in range(m):
                lam_bar += state[p, q]
        if lam_bar <= 0.0:
            return 0, pos, now, count
        w = -math.log(1.0 - uniforms[pos]) / lam_bar
        u_accept = uniforms[pos + 1]
        pos += 2
        now += w
        if horizon >= 0.0 and now > horizon:
            return 0, pos, now, count
        lam_t = mu_total
        for p in range(m):
            for q in range(m):
                state[p, q] *= math.exp(-beta_mat[p, q] * w)
                lam_t += state[p, q]
        if u_accept * lam_bar <= lam_t:
            d = 0
            if m > 1:
                target = uniforms[pos] * lam_t
                pos += 1
                acc = 0.0
                d = m - 1
                for p in range(m):
                    acc += mu[p]
                    for q in range(m):
                        acc += state[p, q]
                    if target < acc:
                        d = p
                        break
            out_t[count] = now
            out_d[count] = d
            count += 1
            for p in range(m):
                state[p, d] += alpha[p, d]


@njit(cache=True)
def _segment_logpost(u, n, s, rate):
    # log density of u = log b: Exponential(rate) prior on b, Exponential(mean b)
    # likelihood for n points summing to s, Jacobian b
    b = math.exp(u)
    return math.log(rate) - rate * b + u - n * u - s / b


@njit(cache=True)
def changepoint_chain(x, rate1, rate2, n_iter, burn_in, thin, normals, uniforms,
                      step1, step2, u1, u2, kappa):
    """Metropolis-within-Gibbs for the single-changepoint Exponential model.

    Segment 1 holds ``x[:kappa-1]`` (mean ``exp(u1)``), segment 2 the rest
    (mean ``exp(u2)``). ``normals`` has shape (n_iter, 2) and ``uniforms``
    (n_iter, 3). Proposal scales adapt during burn-in towards 30-45%
    acceptance and stay fixed afterwards.
    """
    K = x.shape[0]
    n_keep = 0
    for it in range(burn_in, n_iter):
        if (it - burn_in) % thin == 0:
            n_keep += 1
    out = np.empty((n_keep, 3))
    csum = np.zeros(K + 1)
    for k in range(K):
        csum[k + 1] = csum[k] + x[k]
    total = csum[K]
    logp = np.empty(max(K, 1))
    acc1 = 0
    acc2 = 0
    win1 = 0
    win2 = 0
    kept = 0
    for it in range(n_iter):
        n1 = kappa - 1
        s1 = csum[n1]
        n2 = K - n1
        s2 = total - s1
        prop = u1 + step1 * normals[it, 0]
        if math.log(uniforms[it, 0]) < (_segment_logpost(prop, n1, s1, rate1)
                                         - _segment_logpost(u1, n1, s1, rate1)):
            u1 = prop
            win1 += 1
            if it >= burn_in:
                acc1 += 1
        prop = u2 + step2 * normals[it, 1]
        if math.log(uniforms[it, 1]) < (_segment_logpost(prop, n2, s2, rate2)
                                         - _segment_logpost(u2, n2, s2, rate2)):
            u2 = prop
            win2 += 1
            if it >= burn_in:
                acc2 += 1
        if K > 0:
            # exact full conditional over kappa in 1..K
            b1 = math.exp(u1)
            b2 = math.exp(u2)
            top = -np.inf
            for k in range(1, K + 1):
                m = k - 1
                v = (-m * u1 - csum[m] / b1) + (-(K - m) * u2 - (total - csum[m]) / b2)
                logp[k - 1] = v
                if v > top:
                    top = v
            norm = 0.0
            for k in range(K):
                logp[k] = math.exp(logp[k] - top)
                norm += logp[k]
            target = uniforms[it, 2] * norm
            acc = 0.0
            kappa = K
            for k in range(K):
                acc += logp[k]
                if target < acc:
                    kappa = k + 1
                    break
        if it < burn_in and (it + 1) % 50 == 0:
            r1 = win1 / 50.0
            r2 = win2 / 50.0
            if r1 < 0.30:
                step1 *= 0.8
            elif r1 > 0.45:
                step1 *= 1.25
            if r2 < 0.30:
                step2 *= 0.8
            elif r2 > 0.45:
                step2 *= 1.25
            win1 = 0
            win2 = 0
        if it >= burn_in and (it - burn_in) % thin == 0:
            out[kept, 0] = math.exp(u1)
            out[kept, 1] = math.exp(u2)
            out[kept, 2] = kappa
            kept += 1
    n_post = n_iter - burn_in
    return out, acc1 / n_post, acc2 / n_post, step1, step2
