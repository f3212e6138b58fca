"""Continuous action learning automaton (CALA).

A CALA keeps a Gaussian N(mu, sigma) over a one-dimensional action space.
Every round it is told the feedback for two actions, its mean ``mu`` and a
sample ``x``, and moves both parameters accordingly::

    r      = clamp((beta_x - beta_mu) / phi(sigma), -1, 1)
    mu    += lam * r * (x - mu) / phi(sigma)
    sigma += lam * r * (((x - mu) / phi(sigma)) ** 2 - 1) - lam * K * (sigma - sigma_L)

with ``phi(sigma) = max(sigma, sigma_L)``.  The clamp on ``r`` is the strategy
update limitation; it can be switched off for ablation.

The scalar kernels are compiled with numba so the simulation loop and the
object API run exactly the same arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numba import njit

DEFAULT_LAMBDA = 0.02
DEFAULT_K = 0.001
DEFAULT_SIGMA_FLOOR = 1e-7
DEFAULT_SIGMA0 = 1.0


@njit(cache=True)
def phi(sigma, sigma_floor=DEFAULT_SIGMA_FLOOR):
    return max(sigma, sigma_floor)


@njit(cache=True)
def clamped_ratio(beta_mu, beta_x, sigma, sigma_floor=DEFAULT_SIGMA_FLOOR):
    """Normalised feedback difference, clamped to [-1, 1] (direction kept)."""
    r = (beta_x - beta_mu) / phi(sigma, sigma_floor)
    if r > 1.0:
        return 1.0
    if r < -1.0:
        return -1.0
    return r


@njit(cache=True)
def cala_step(mu, sigma, x, beta_mu, beta_x, lam, big_k, sigma_floor, limit_update=True):
    """One CALA update; returns the new ``(mu, sigma)`` pair.

    ``sigma`` is floored at ``sigma_floor`` on the way out.
    """
    if not (math.isfinite(mu) and math.isfinite(sigma) and math.isfinite(x)
            and math.isfinite(beta_mu) and math.isfinite(beta_x)):
        raise ValueError("non-finite input to CALA update")
    s = phi(sigma, sigma_floor)
    if limit_update:
        r = clamped_ratio(beta_mu, beta_x, sigma, sigma_floor)
        if abs(r) > 1.0:
            raise AssertionError("feedback ratio escaped the update limit")
    else:
        r = (beta_x - beta_mu) / s
    z = (x - mu) / s
    new_mu = mu + lam * r * z
    new_sigma = sigma + lam * r * (z * z - 1.0) - lam * big_k * (sigma - sigma_floor)
    if new_sigma < sigma_floor:
        new_sigma = sigma_floor
    return new_mu, new_sigma


@dataclass(frozen=True)
class Cala:
    """Immutable automaton state; :meth:`update` returns a new instance."""

    mu: float
    sigma: float = DEFAULT_SIGMA0
    lam: float = DEFAULT_LAMBDA
    big_k: float = DEFAULT_K
    sigma_floor: float = DEFAULT_SIGMA_FLOOR

    def __post_init__(self):
        for name in ("lam", "big_k", "sigma_floor"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma)):
            raise ValueError("mu and sigma must be finite")

    @property
    def spread(self) -> float:
        return phi(self.sigma, self.sigma_floor)

    def phi(self, sigma: float) -> float:
        return phi(sigma, self.sigma_floor)

    def sample(self, rng: np.random.Generator) -> float:
        return float(rng.normal(self.mu, self.spread))

    def update(self, x: float, beta_mu: float, beta_x: float, limit_update: bool = True) -> "Cala":
        mu, sigma = cala_step(self.mu, self.sigma, x, beta_mu, beta_x,
                              self.lam, self.big_k, self.sigma_floor, limit_update)
        return replace(self, mu=mu, sigma=sigma)


def sample(cala: Cala, rng: np.random.Generator) -> float:
    return cala.sample(rng)


def update(cala: Cala, x: float, beta_mu: float, beta_x: float, limit_update: bool = True) -> Cala:
    return cala.update(x, beta_mu, beta_x, limit_update)
