"""Property suites that can be run from the command line.

Each check returns a :class:`Check`; nothing here raises on a failed
property, so a caller can report every result at once.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from . import analysis
from .automaton import Cala, cala_step, phi
from .game import apply_zfa, payoff
from .network import generate_ba, preferential_targets, rewire


class Check(NamedTuple):
    name: str
    passed: bool
    detail: str


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


# --- automaton ----------------------------------------------------------------

def check_variance_floor(seed: int = 0) -> Check:
    rng = _rng(seed)
    for _ in range(10_000):
        # x == mu with beta_x > beta_mu pushes sigma down by a full lambda
        mu, sigma = rng.uniform(0, 10), 10.0 ** rng.uniform(-8, 0)
        lam = rng.uniform(0.5, 1.0)
        _, new_sigma = cala_step(mu, sigma, mu, 0.0, 10.0, lam, 0.5, 1e-7)
        if new_sigma < 1e-7:
            return Check("variance floor", False, f"sigma fell to {new_sigma!r}")
    return Check("variance floor", True, "10000 cases")


def check_stationarity(seed: int = 0) -> Check:
    rng = _rng(seed)
    for _ in range(1000):
        mu, sigma = rng.uniform(-5, 5), rng.uniform(1e-3, 3)
        x, b = rng.normal(mu, sigma), rng.uniform(-10, 10)
        new_mu, _ = cala_step(mu, sigma, x, b, b, 0.02, 0.001, 1e-7)
        if new_mu != mu:
            return Check("zero-difference stationarity", False, f"mu moved {mu} -> {new_mu}")
    return Check("zero-difference stationarity", True, "1000 cases")


def check_sign(seed: int = 0) -> Check:
    rng = _rng(seed)
    for _ in range(1000):
        mu, sigma = rng.uniform(-5, 5), rng.uniform(1e-3, 3)
        x = mu + rng.choice([-1, 1]) * rng.uniform(1e-3, 3)
        bm, bx = rng.uniform(0, 10, size=2)
        new_mu, _ = cala_step(mu, sigma, x, bm, bx, 0.02, 0.001, 1e-7)
        want = np.sign(bx - bm) * np.sign(x - mu)
        if want != 0 and np.sign(new_mu - mu) != want:
            return Check("sign property", False, f"mu={mu} x={x} bm={bm} bx={bx}")
    return Check("sign property", True, "1000 cases")


def check_quadratic(seed: int = 0, c: float = 3.0, iterations: int = 50_000) -> Check:
    rng = _rng(seed)
    cala = Cala(mu=0.0, sigma=1.0)
    f = lambda v: -(v - c) ** 2  # noqa: E731
    for _ in range(iterations):
        x = cala.sample(rng)
        cala = cala.update(x, f(cala.mu), f(x))
    ok = abs(cala.mu - c) < 0.1
    return Check("quadratic convergence", ok, f"|mu - c| = {abs(cala.mu - c):.4f}")


# --- game ---------------------------------------------------------------------

def check_payoff_conservation(seed: int = 0, plays: int = 1_000_000) -> Check:
    rng = _rng(seed)
    offers = rng.uniform(0, 10, plays)
    thresholds = rng.uniform(0, 10, plays)
    # vectorised twin of payoff(); spot-check a slice against the scalar one
    accepted = offers >= thresholds
    total = np.where(accepted, (10.0 - offers) + offers, 0.0)
    for i in range(1000):
        o = payoff(offers[i], thresholds[i])
        if o.proposer_payoff + o.responder_payoff != total[i]:
            return Check("payoff conservation", False, f"scalar/vector mismatch at {i}")
    bad = ~(np.isclose(total, 10.0) | (total == 0.0))
    return Check("payoff conservation", not bad.any(), f"{plays} plays, {int(bad.sum())} violations")


def check_zfa_direction(seed: int = 0, cases: int = 10_000) -> Check:
    rng = _rng(seed)
    for _ in range(cases):
        mu, sigma = rng.uniform(0, 10), rng.uniform(0.01, 2)
        x = rng.normal(mu, sigma)
        if x == mu:
            continue
        for role, sign in (("proposer", 1.0), ("responder", -1.0)):
            bm = apply_zfa(role, mu, x)
            new_mu, _ = cala_step(mu, sigma, x, bm, 0.0, 0.02, 0.001, 1e-7)
            if np.sign(new_mu - mu) != sign:
                return Check("ZFA direction", False, f"{role} mu={mu} x={x}")
    return Check("ZFA direction", True, f"{cases} cases")


# --- network ------------------------------------------------------------------

def check_rewire_invariants(seed: int = 0, n: int = 500, rewires: int = 100_000) -> Check:
    rng = _rng(seed)
    g = generate_ba(n, rng)
    e0 = g.edge_count
    for _ in range(rewires):
        i, j = g.edges[int(rng.integers(g.edge_count))]
        if rng.random() < 0.5:
            i, j = j, i
        rewire(g, i, j, rng)
    try:
        g.check()
    except AssertionError as exc:
        return Check("rewire invariants", False, str(exc))
    ok = g.edge_count == e0 and bool(min(g.degrees()) >= 1)
    return Check("rewire invariants", ok, f"{rewires} rewires, edges {e0} -> {g.edge_count}")


def check_attachment_frequency(seed: int = 0, draws: int = 100_000) -> Check:
    rng = _rng(seed)
    stubs = [0, 1, 2, 2]  # degrees {1, 1, 2}
    hits = sum(preferential_targets(stubs, 1, rng)[0] == 2 for _ in range(draws))
    freq = hits / draws
    return Check("attachment frequency", abs(freq - 0.5) <= 0.01, f"P(deg-2 node) = {freq:.4f}")


# --- analysis -----------------------------------------------------------------

def brute_force_convergence(trace, threshold: float = analysis.CONVERGENCE_THRESHOLD) -> int:
    a = np.asarray(trace, dtype=float)
    for t in range(a.size):
        if a[t:].std() <= threshold:
            return t + 1
    return a.size


def check_convergence_oracle(seed: int = 0, traces: int = 100, max_len: int = 10_000) -> Check:
    rng = _rng(seed)
    for k in range(traces):
        T = int(rng.integers(1, max_len + 1))
        decay = np.exp(-rng.uniform(1, 12) * np.arange(T) / T)
        walk = rng.uniform(0, 10) + rng.normal(0, 0.02, T) * decay
        t = analysis.detect_convergence(walk, 1).t
        want = brute_force_convergence(walk)
        if t != want:
            return Check("convergence oracle", False, f"trace {k}: {t} != {want}")
    return Check("convergence oracle", True, f"{traces} traces")


SUITES: dict[str, list[Callable[..., Check]]] = {
    "automaton": [check_variance_floor, check_stationarity, check_sign, check_quadratic],
    "game": [check_payoff_conservation, check_zfa_direction],
    "network": [check_rewire_invariants, check_attachment_frequency],
    "analysis": [check_convergence_oracle],
}


def run_suites(names=None, seed: int = 0) -> list[Check]:
    names = list(SUITES) if names is None else names
    return [check(seed) for name in names for check in SUITES[name]]
