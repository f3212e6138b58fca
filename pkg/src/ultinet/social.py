"""Reputation spreading, partner preference and volunteering.

Reputation is a static second scale-free graph.  After a game the responder
broadcasts the proposer's offer; a node ``d`` hops away hears it with
probability ``1 - d/H``.  What an agent has heard (or seen itself) is kept
in a :class:`BeliefStore`; for agents it knows nothing about, it falls back
to the current population average.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .analysis import population_average
from .network import InteractionGraph, RewireResult, RewireStatus, hop_distances, rewire, rewire_probability
from .population import Population

HOPS = 5
FORCED_PLAY = 0.1


class BeliefStore:
    """Latest offer each agent has observed from each other agent."""

    def __init__(self):
        self._data: dict[int, dict[int, float]] = {}

    def get(self, holder: int, subject: int) -> float | None:
        return self._data.get(holder, {}).get(subject)

    def set(self, holder: int, subject: int, offer: float) -> None:
        self._data.setdefault(holder, {})[subject] = offer

    def __len__(self) -> int:
        return sum(len(d) for d in self._data.values())

    def items(self):
        for holder, row in self._data.items():
            for subject, offer in row.items():
                yield holder, subject, offer

    def to_dense(self, n: int) -> np.ndarray:
        out = np.full((n, n), np.nan)
        for holder, subject, offer in self.items():
            out[holder, subject] = offer
        return out


def delivery_probability(d: float, hops: int = HOPS) -> float:
    if d < 1:
        return 0.0
    return max(0.0, 1.0 - d / hops)


def broadcast_offer(
    rep_graph: InteractionGraph,
    sender: int,
    subject: int,
    offer: float,
    beliefs: BeliefStore,
    rng: np.random.Generator,
    hops: int = HOPS,
) -> list[int]:
    """Spread ``(subject, offer)`` from ``sender``; returns who received it.

    Candidates are visited in id order, one uniform draw each; nodes at
    ``hops`` or more are never reached and cost no draw.
    """
    dist = hop_distances(rep_graph, sender, hops - 1)
    received = []
    for v in range(rep_graph.n):
        if v == sender or v == subject or dist[v] < 1:
            continue
        if rng.random() < 1.0 - dist[v] / hops:
            beliefs.set(v, subject, offer)
            received.append(v)
    return received


def _own(population, i: int) -> float:
    if isinstance(population, Population):
        from .population import current_strategy
        return current_strategy(population[i])
    return float(population[i])


def estimate_strategy(i: int, j: int, beliefs: BeliefStore | None, population,
                      default: float | None = None) -> float:
    """What ``i`` believes ``j`` plays; the population average if unknown."""
    if beliefs is not None:
        b = beliefs.get(i, j)
        if b is not None:
            return b
    if default is None:
        default = population_average(population)
    return default


def preference_weights(i: int, neighbors: Sequence[int], beliefs: BeliefStore | None,
                       population, default: float | None = None) -> np.ndarray:
    """Selection probabilities over ``neighbors`` (relative cooperators first).

    Weight ``max(0, estimate - own strategy)``, normalised; uniform when no
    neighbour looks more generous than ``i``.
    """
    if default is None:
        default = population_average(population)
    s_i = _own(population, i)
    w = np.array([max(0.0, estimate_strategy(i, j, beliefs, population, default) - s_i)
                  for j in neighbors])
    if w.sum() > 0:
        return w / w.sum()
    return np.full(len(neighbors), 1.0 / len(neighbors))


def raw_preference_weights(i: int, neighbors: Sequence[int], beliefs: BeliefStore | None,
                           population, default: float | None = None) -> np.ndarray:
    """The unnormalised, possibly negative literal form; for comparison only."""
    if default is None:
        default = population_average(population)
    s_i = _own(population, i)
    est = np.array([estimate_strategy(i, j, beliefs, population, default) for j in neighbors])
    return (est - s_i) / est.sum()


def partner_preference(i: int, neighbors: Sequence[int], beliefs: BeliefStore | None,
                       population, rng: np.random.Generator,
                       default: float | None = None) -> int:
    if not neighbors:
        raise ValueError(f"agent {i} has no neighbours")
    if default is None:
        default = population_average(population)
    s_i = _own(population, i)
    weights = [estimate_strategy(i, j, beliefs, population, default) - s_i for j in neighbors]
    total = 0.0
    for w in weights:
        if w > 0.0:
            total += w
    if total > 0.0:
        # cumulative scan, same arithmetic order as the compiled kernel
        u = rng.random() * total
        acc = 0.0
        last = -1
        for j, w in zip(neighbors, weights):
            if w > 0.0:
                acc += w
                last = j
                if u < acc:
                    return j
        return last
    return neighbors[int(rng.integers(0, len(neighbors)))]


def volunteer(i: int, j: int, beliefs: BeliefStore | None, population,
              rng: np.random.Generator, default: float | None = None,
              forced_prob: float = FORCED_PLAY) -> bool:
    """Whether ``i`` and ``j`` play.

    Each side agrees when it believes the other offers at least as much as
    itself.  Without mutual agreement one draw decides a forced game.
    """
    if default is None:
        default = population_average(population)
    agree_i = estimate_strategy(i, j, beliefs, population, default) >= _own(population, i)
    agree_j = estimate_strategy(j, i, beliefs, population, default) >= _own(population, j)
    if agree_i and agree_j:
        return True
    return bool(rng.random() < forced_prob)


def reputation_triggered_rewire(i: int, j: int, offer_info: float, graph: InteractionGraph,
                                population, rng: np.random.Generator) -> RewireResult | None:
    """``i`` heard that neighbour ``j`` offered ``offer_info``; maybe drop ``j``.

    Returns None when no attempt was made (not neighbours, or the draw failed).
    """
    if not graph.has_edge(i, j):
        return None
    prob = rewire_probability(_own(population, i), offer_info)
    if prob > 0.0 and rng.random() < prob:
        return rewire(graph, i, j, rng)
    return None


__all__ = [
    "BeliefStore", "HOPS", "FORCED_PLAY", "RewireStatus", "broadcast_offer", "delivery_probability",
    "estimate_strategy", "preference_weights", "raw_preference_weights", "partner_preference",
    "volunteer", "reputation_triggered_rewire",
]
