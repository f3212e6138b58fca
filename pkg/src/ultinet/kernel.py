"""Compiled game loop.

Array twin of :func:`ultinet.runner.reference_loop`: the same operations in
the same order, drawing from the same generators, so both produce identical
traces for identical inputs.  Only the data layout differs (padded adjacency
arrays here, Python lists there).
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .automaton import cala_step

FIXED = 2
NO_TARGET = -1
LAST_LINK = -2


@njit(cache=True)
def _clamp(v):
    if v < 0.0:
        return 0.0
    if v > 10.0:
        return 10.0
    return v


@njit(cache=True)
def _slot(nbr, deg, u, v):
    for s in range(deg[u]):
        if nbr[u, s] == v:
            return s
    return -1


@njit(cache=True)
def _estimate(beliefs, use_beliefs, i, j, default):
    if use_beliefs:
        b = beliefs[i, j]
        if not np.isnan(b):
            return b
    return default


@njit(cache=True)
def _pick_partner(i, nbr, deg, mu, beliefs, use_beliefs, default, g):
    s_i = _clamp(mu[i])
    total = 0.0
    for s in range(deg[i]):
        w = _estimate(beliefs, use_beliefs, i, nbr[i, s], default) - s_i
        if w > 0.0:
            total += w
    if total > 0.0:
        u = g.random() * total
        acc = 0.0
        last = -1
        for s in range(deg[i]):
            w = _estimate(beliefs, use_beliefs, i, nbr[i, s], default) - s_i
            if w > 0.0:
                acc += w
                last = nbr[i, s]
                if u < acc:
                    return last
        return last
    return nbr[i, g.integers(0, deg[i])]


@njit(cache=True)
def _rewire_target(i, j, nbr, deg, g):
    if deg[i] <= 1 or deg[j] <= 1:
        return LAST_LINK
    count = 0
    for s in range(deg[j]):
        k = nbr[j, s]
        if k != i and _slot(nbr, deg, i, k) < 0:
            count += 1
    if count == 0:
        return NO_TARGET
    pick = g.integers(0, count)
    for s in range(deg[j]):
        k = nbr[j, s]
        if k != i and _slot(nbr, deg, i, k) < 0:
            if pick == 0:
                return k
            pick -= 1
    return NO_TARGET


@njit(cache=True)
def _unlink(nbr, nbr_eid, deg, u, v):
    s = _slot(nbr, deg, u, v)
    last = deg[u] - 1
    nbr[u, s] = nbr[u, last]
    nbr_eid[u, s] = nbr_eid[u, last]
    nbr[u, last] = -1
    nbr_eid[u, last] = -1
    deg[u] = last


@njit(cache=True)
def _grow(nbr, nbr_eid):
    n, cap = nbr.shape
    new_nbr = np.full((n, 2 * cap), -1, dtype=nbr.dtype)
    new_eid = np.full((n, 2 * cap), -1, dtype=nbr_eid.dtype)
    new_nbr[:, :cap] = nbr
    new_eid[:, :cap] = nbr_eid
    return new_nbr, new_eid


@njit(cache=True)
def _try_rewire(i, j, edges, nbr, nbr_eid, deg, g):
    """Returns (target or negative status, nbr, nbr_eid)."""
    k = _rewire_target(i, j, nbr, deg, g)
    if k < 0:
        return k, nbr, nbr_eid
    if deg[i] >= nbr.shape[1] or deg[k] >= nbr.shape[1]:
        nbr, nbr_eid = _grow(nbr, nbr_eid)
    e = nbr_eid[i, _slot(nbr, deg, i, j)]
    _unlink(nbr, nbr_eid, deg, i, j)
    _unlink(nbr, nbr_eid, deg, j, i)
    nbr[i, deg[i]] = k
    nbr_eid[i, deg[i]] = e
    deg[i] += 1
    nbr[k, deg[k]] = i
    nbr_eid[k, deg[k]] = e
    deg[k] += 1
    edges[e, 0] = i
    edges[e, 1] = k
    return k, nbr, nbr_eid


@njit(cache=True)
def _hop_distances(indptr, indices, source, max_h, dist, queue):
    dist[:] = -1
    dist[source] = 0
    head = 0
    tail = 1
    queue[0] = source
    while head < tail:
        u = queue[head]
        head += 1
        if dist[u] >= max_h:
            continue
        for q in range(indptr[u], indptr[u + 1]):
            v = indices[q]
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue[tail] = v
                tail += 1


@njit(cache=True)
def _learn(mu, sigma, a, responder, x, beta_mu, beta_x, lam, big_k, sigma_floor,
           zfa, limit_update, clamp_mean):
    if zfa and beta_mu == 0.0 and beta_x == 0.0:
        if responder:
            beta_mu = x - mu[a]
        else:
            beta_mu = mu[a] - x
    m, s = cala_step(mu[a], sigma[a], x, beta_mu, beta_x, lam, big_k, sigma_floor, limit_update)
    if clamp_mean:
        m = _clamp(m)
    mu[a] = m
    sigma[a] = s


@njit(cache=True)
def run_loop(kind, mu, sigma, edges, nbr, nbr_eid, deg, rep_indptr, rep_indices, beliefs,
             iterations, lam, big_k, sigma_floor, stake, hops, forced_prob,
             rewiring, reputation, volunteering, preference, zfa, limit_update, clamp_mean,
             feedback_scale, g_game, g_rewire, g_rep, g_vol, trace):
    """Run ``iterations`` games in place; returns counters and the grown adjacency.

    Counters: (rewires, rewire_attempts, games_played, reputation_rewires).
    """
    n = mu.shape[0]
    n_edges = edges.shape[0]
    total = 0.0
    for a in range(n):
        total += _clamp(mu[a])
    dist = np.empty(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    recipients = np.empty(n, dtype=np.int64)
    rewires = 0
    attempts = 0
    played_games = 0
    rep_rewires = 0

    for t in range(iterations):
        if preference == 1:
            a = g_game.integers(0, n)
            b = _pick_partner(a, nbr, deg, mu, beliefs, reputation, total / n, g_game)
        elif preference == 2:
            a = g_game.integers(0, n)
            b = nbr[a, g_game.integers(0, deg[a])]
        else:
            e = g_game.integers(0, n_edges)
            a = edges[e, 0]
            b = edges[e, 1]
        if g_game.random() < 0.5:
            p = a
            r = b
        else:
            p = b
            r = a

        play = True
        if volunteering:
            default = total / n
            agree_p = _estimate(beliefs, reputation, p, r, default) >= _clamp(mu[p])
            agree_r = _estimate(beliefs, reputation, r, p, default) >= _clamp(mu[r])
            if not (agree_p and agree_r):
                play = g_vol.random() < forced_prob

        if play:
            played_games += 1
            p_fixed = kind[p] == FIXED
            r_fixed = kind[r] == FIXED
            old_p = _clamp(mu[p])
            old_r = _clamp(mu[r])
            if p_fixed:
                p_x = old_p
            else:
                p_x = g_game.normal(mu[p], max(sigma[p], sigma_floor))
            if r_fixed:
                r_x = old_r
            else:
                r_x = g_game.normal(mu[r], max(sigma[r], sigma_floor))
            p_xp = _clamp(p_x)
            r_xp = _clamp(r_x)
            if old_p >= old_r:
                pb_mu = stake - old_p
                rb_mu = old_p
            else:
                pb_mu = 0.0
                rb_mu = 0.0
            if p_xp >= r_xp:
                pb_x = stake - p_xp
                rb_x = p_xp
            else:
                pb_x = 0.0
                rb_x = 0.0
            pb_mu /= feedback_scale
            pb_x /= feedback_scale
            rb_mu /= feedback_scale
            rb_x /= feedback_scale
            if not p_fixed:
                _learn(mu, sigma, p, False, p_x, pb_mu, pb_x, lam, big_k, sigma_floor,
                       zfa, limit_update, clamp_mean)
            if not r_fixed:
                _learn(mu, sigma, r, True, r_x, rb_mu, rb_x, lam, big_k, sigma_floor,
                       zfa, limit_update, clamp_mean)
            total += _clamp(mu[p]) - old_p
            total += _clamp(mu[r]) - old_r

            n_rec = 0
            if reputation:
                offer = old_p
                beliefs[r, p] = offer
                _hop_distances(rep_indptr, rep_indices, r, hops - 1, dist, queue)
                for v in range(n):
                    if v == r or v == p:
                        continue
                    d = dist[v]
                    if d < 1:
                        continue
                    if g_rep.random() < 1.0 - d / hops:
                        beliefs[v, p] = offer
                        recipients[n_rec] = v
                        n_rec += 1

            if rewiring:
                prob = max(0.0, (_clamp(mu[r]) - _clamp(mu[p])) / stake)
                if prob > 0.0 and g_rewire.random() < prob:
                    attempts += 1
                    k, nbr, nbr_eid = _try_rewire(r, p, edges, nbr, nbr_eid, deg, g_rewire)
                    if k >= 0:
                        rewires += 1
                if reputation:
                    offer = old_p
                    for q in range(n_rec):
                        v = recipients[q]
                        if _slot(nbr, deg, v, p) < 0:
                            continue
                        prob = max(0.0, (_clamp(mu[v]) - offer) / stake)
                        if prob > 0.0 and g_rewire.random() < prob:
                            attempts += 1
                            k, nbr, nbr_eid = _try_rewire(v, p, edges, nbr, nbr_eid, deg, g_rewire)
                            if k >= 0:
                                rewires += 1
                                rep_rewires += 1

        trace[t] = total / n

    return rewires, attempts, played_games, rep_rewires, nbr, nbr_eid
