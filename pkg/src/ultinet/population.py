"""Agent taxonomy and population construction."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .automaton import DEFAULT_K, DEFAULT_LAMBDA, DEFAULT_SIGMA0, DEFAULT_SIGMA_FLOOR, Cala

STRATEGY_MIN = 0.0
STRATEGY_MAX = 10.0
FIXED_OFFER = 4.5
RATIONAL_START = 0.01
HUMAN_START = 4.5


class AgentKind(enum.IntEnum):
    # integer codes are shared with the compiled kernel
    DYNAMIC_RATIONAL = 0
    DYNAMIC_HUMAN = 1
    FIXED = 2

    @property
    def label(self) -> str:
        return {0: "DS_r", 1: "DS_h", 2: "FS"}[int(self)]


def clamp_strategy(v: float) -> float:
    """Round a strategy off to the nearest value in [0, 10]."""
    if not math.isfinite(v):
        raise ValueError(f"strategy must be finite, got {v!r}")
    return min(max(v, STRATEGY_MIN), STRATEGY_MAX)


@dataclass
class Agent:
    id: int
    kind: AgentKind
    cala: Cala | None = None
    fixed_value: float = FIXED_OFFER

    def __post_init__(self):
        if (self.kind == AgentKind.FIXED) != (self.cala is None):
            raise ValueError("fixed-strategy agents have no automaton; learners need one")

    @property
    def is_fixed(self) -> bool:
        return self.kind == AgentKind.FIXED


def current_strategy(agent: Agent) -> float:
    if agent.is_fixed:
        return clamp_strategy(agent.fixed_value)
    return clamp_strategy(agent.cala.mu)


@dataclass
class Population:
    agents: list[Agent] = field(default_factory=list)

    def __post_init__(self):
        for idx, agent in enumerate(self.agents):
            if agent.id != idx:
                raise ValueError("agent ids must be 0..n-1 in order")

    def __len__(self) -> int:
        return len(self.agents)

    def __iter__(self) -> Iterator[Agent]:
        return iter(self.agents)

    def __getitem__(self, i: int) -> Agent:
        return self.agents[i]

    @property
    def counts(self) -> dict[AgentKind, int]:
        out = {k: 0 for k in AgentKind}
        for a in self.agents:
            out[a.kind] += 1
        return out

    def strategies(self) -> np.ndarray:
        return np.array([current_strategy(a) for a in self.agents])

    # Array views used by the compiled engine.
    def to_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        n = len(self.agents)
        kind = np.empty(n, dtype=np.int8)
        mu = np.empty(n)
        sigma = np.empty(n)
        for a in self.agents:
            kind[a.id] = int(a.kind)
            if a.is_fixed:
                mu[a.id], sigma[a.id] = a.fixed_value, 0.0
            else:
                mu[a.id], sigma[a.id] = a.cala.mu, a.cala.sigma
        return kind, mu, sigma

    def load_arrays(self, mu: np.ndarray, sigma: np.ndarray) -> None:
        for a in self.agents:
            if not a.is_fixed:
                a.cala = Cala(float(mu[a.id]), float(sigma[a.id]), a.cala.lam,
                              a.cala.big_k, a.cala.sigma_floor)


def kind_counts(n: int, frac_fs: float, frac_dsh: float, frac_dsr: float) -> tuple[int, int, int]:
    """Split ``n`` agents into (FS, DS_h, DS_r) counts.

    FS and DS_h counts are rounded half-to-even; DS_r takes whatever is left.
    """
    if n < 2:
        raise ValueError("population needs at least two agents")
    fracs = (frac_fs, frac_dsh, frac_dsr)
    if any(f < 0 for f in fracs):
        raise ValueError("fractions must be non-negative")
    if abs(sum(fracs) - 1.0) > 1e-6:
        raise ValueError(f"fractions must sum to 1, got {sum(fracs)}")
    n_fs = round(n * frac_fs)
    n_dsh = min(round(n * frac_dsh), n - n_fs)
    return n_fs, n_dsh, n - n_fs - n_dsh


def init_population(
    n: int,
    frac_fs: float,
    frac_dsh: float,
    frac_dsr: float,
    rng: np.random.Generator,
    *,
    sigma0: float = DEFAULT_SIGMA0,
    lam: float = DEFAULT_LAMBDA,
    big_k: float = DEFAULT_K,
    sigma_floor: float = DEFAULT_SIGMA_FLOOR,
) -> Population:
    """Build a population with kinds shuffled over the ids.

    Kind labels are permuted uniformly (graph ids are age-ordered, so a fixed
    layout would put one kind on the hubs).  Learner means are then drawn in
    id order from N(4.5, 1) (DS_h) or N(0.01, 1) (DS_r) and clamped to [0, 10].
    """
    n_fs, n_dsh, n_dsr = kind_counts(n, frac_fs, frac_dsh, frac_dsr)
    labels = np.array([AgentKind.FIXED] * n_fs + [AgentKind.DYNAMIC_HUMAN] * n_dsh
                      + [AgentKind.DYNAMIC_RATIONAL] * n_dsr, dtype=np.int8)
    labels = rng.permutation(labels)
    agents: list[Agent] = []
    for i, code in enumerate(labels):
        kind = AgentKind(int(code))
        if kind == AgentKind.FIXED:
            agents.append(Agent(i, kind))
            continue
        start = HUMAN_START if kind == AgentKind.DYNAMIC_HUMAN else RATIONAL_START
        mu = clamp_strategy(float(rng.normal(start, 1.0)))
        agents.append(Agent(i, kind, Cala(mu, sigma0, lam, big_k, sigma_floor)))
    return Population(agents)
