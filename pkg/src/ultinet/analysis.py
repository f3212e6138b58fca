"""Run measurements: convergence point, learned strategy, performance, degrees."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .network import InteractionGraph
from .population import Population

CONVERGENCE_THRESHOLD = 1e-3
RESPONDER_SLACK = 0.99


@dataclass(frozen=True)
class BoxStats:
    min: float
    q1: float
    median: float
    q3: float
    max: float
    mean: float

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


class Convergence(NamedTuple):
    t: int
    games_per_agent: float
    learned_strategy: float
    converged: bool


class Performance(NamedTuple):
    performance: float
    played_fraction: float
    played_performance: float


def population_average(population: Population | Sequence[float]) -> float:
    """Mean current strategy over all agents, fixed-strategy ones included."""
    if isinstance(population, Population):
        values = population.strategies()
    else:
        values = np.asarray(population, dtype=float)
    if values.size == 0:
        raise ValueError("empty population")
    return float(values.mean())


def suffix_std(trace: np.ndarray) -> np.ndarray:
    """Population std of ``trace[t:]`` for every ``t``, in O(T).

    Values are shifted by the last entry before the backward running sums,
    which keeps the cancellation error tiny once the trace has settled.
    """
    a = np.asarray(trace, dtype=float)
    shifted = a - a[-1]
    s1 = np.cumsum(shifted[::-1])[::-1]
    s2 = np.cumsum((shifted * shifted)[::-1])[::-1]
    count = np.arange(a.size, 0, -1, dtype=float)
    mean = s1 / count
    var = s2 / count - mean * mean
    return np.sqrt(np.maximum(var, 0.0))


def detect_convergence(trace: Sequence[float], n: int,
                       threshold: float = CONVERGENCE_THRESHOLD) -> Convergence:
    """Earliest 1-based ``t`` whose trace suffix has std <= ``threshold``.

    ``converged`` requires the settled suffix to span at least ``n``
    iterations (one game per agent); otherwise the population average only
    looked flat because the trace ran out.
    """
    a = np.asarray(trace, dtype=float)
    if a.size == 0:
        raise ValueError("empty trace")
    ok = np.flatnonzero(suffix_std(a) <= threshold)
    idx = int(ok[0])
    t = idx + 1
    return Convergence(t, t / n, float(a[idx]), a.size - t >= n)


def measure_performance(
    population: Population | Sequence[float],
    graph: InteractionGraph,
    gate: Callable[[int, int], bool] | None = None,
) -> Performance:
    """Frozen-strategy agreement rate over every directed neighbour pair.

    Each agent proposes its strategy to each neighbour, who accepts iff the
    offer is at least 99% of its own strategy.  ``gate(proposer, responder)``
    (volunteering) may veto a game; vetoed games count as played=False.
    ``performance`` divides successes by all ``2 * edges`` games, while
    ``played_performance`` divides by the games actually played.
    """
    if isinstance(population, Population):
        s = population.strategies()
    else:
        s = np.asarray(population, dtype=float)
    total = 2 * graph.edge_count
    if total == 0:
        return Performance(1.0, 1.0, 1.0)
    success = played = 0
    for u, v in graph.edges:
        for prop, resp in ((u, v), (v, u)):
            if gate is not None and not gate(prop, resp):
                continue
            played += 1
            if s[prop] >= RESPONDER_SLACK * s[resp]:
                success += 1
    played_perf = success / played if played else float("nan")
    return Performance(success / total, played / total, played_perf)


def box_stats(values: Sequence[float]) -> BoxStats:
    """Order statistics with linearly interpolated quartiles, plus the mean."""
    a = np.asarray(values, dtype=float)
    if a.size == 0:
        raise ValueError("no values to summarise")
    q1, med, q3 = np.percentile(a, [25, 50, 75])
    return BoxStats(float(a.min()), float(q1), float(med), float(q3), float(a.max()), float(a.mean()))


def degree_summary(graph: InteractionGraph) -> BoxStats:
    return box_stats(graph.degrees())


def summarize_runs(values: Sequence[float]) -> BoxStats:
    return box_stats(values)
