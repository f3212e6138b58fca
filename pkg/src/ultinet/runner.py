"""Experiment orchestration: configs, seeding, runs, repetitions and sweeps.

Seeding
-------
Repetition ``k`` of an experiment with master seed ``M`` runs with::

    run_seed = SeedSequence(M, spawn_key=(k,)).generate_state(1, uint64)[0]

Inside a run every consumer gets its own PCG64 stream::

    Generator(PCG64(SeedSequence(run_seed, spawn_key=(STREAMS[name],))))

so switching a mechanism on or off never shifts another mechanism's draws.
Both rules only use numpy's documented, platform-independent seeding.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import analysis
from .automaton import DEFAULT_K, DEFAULT_LAMBDA, DEFAULT_SIGMA0, DEFAULT_SIGMA_FLOOR
from .game import play_pairwise
from .kernel import run_loop
from .network import InteractionGraph, generate_ba, rewire, rewire_probability
from .population import Population, current_strategy, init_population
from .social import BeliefStore, broadcast_offer, partner_preference, reputation_triggered_rewire, volunteer

STREAMS = {
    "population-init": 0,
    "interaction-graph": 1,
    "reputation-graph": 2,
    "game-loop": 3,
    "rewiring": 4,
    "reputation": 5,
    "volunteering": 6,
    "measurement": 7,
}

RUN_COLUMNS = [
    "run_id", "seed", "n", "frac_fs", "rewiring", "reputation", "volunteering",
    "games_per_agent", "learned_strategy", "performance", "played_fraction",
    "max_degree", "mean_degree", "rewire_count", "converged",
]
SUMMARY_COLUMNS = ["axis_value", "min", "q1", "median", "q3", "max", "mean"]
SUMMARY_METRICS = [
    "games_per_agent", "learned_strategy", "performance", "played_fraction",
    "played_performance", "max_degree", "mean_degree", "rewire_count",
]
MAX_TRACE_ROWS = 100_000


PAIR_MODES = {"auto": -1, "edge-uniform": 0, "preference": 1, "agent-neighbor": 2}


@dataclass
class ExperimentConfig:
    n: int = 50
    frac_fs: float = 1 / 3
    frac_dsh: float = 1 / 3
    frac_dsr: float = 1 / 3
    iterations_per_agent: int = 3000
    repetitions: int = 50
    rewiring: bool = False
    reputation: bool = False
    volunteering: bool = False
    lam: float = DEFAULT_LAMBDA
    big_k: float = DEFAULT_K
    sigma_floor: float = DEFAULT_SIGMA_FLOOR
    sigma0: float = DEFAULT_SIGMA0
    stake: float = 10.0
    hops: int = 5
    forced_play_prob: float = 0.1
    master_seed: int = 0
    # "auto" = preference iff reputation is on
    pair_selection: str = "auto"
    zfa: bool = True
    limit_update: bool = True
    clamp_mean: bool = False
    feedback_scale: float = 1.0
    convergence_threshold: float = analysis.CONVERGENCE_THRESHOLD

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.iterations_per_agent <= 0:
            raise ValueError("iterations_per_agent must be positive")
        if self.repetitions <= 0:
            raise ValueError("repetitions must be positive")
        fr = (self.frac_fs, self.frac_dsh, self.frac_dsr)
        if min(fr) < 0 or abs(sum(fr) - 1.0) > 1e-6:
            raise ValueError(f"fractions must be non-negative and sum to 1, got {fr}")
        if self.pair_selection not in PAIR_MODES:
            raise ValueError(f"unknown pair_selection {self.pair_selection!r}")
        if self.hops < 1:
            raise ValueError("hops must be at least 1")

    @property
    def pair_mode(self) -> str:
        if self.pair_selection == "auto":
            return "preference" if self.reputation else "edge-uniform"
        return self.pair_selection

    @property
    def iterations(self) -> int:
        return self.iterations_per_agent * self.n

    def with_fs(self, frac_fs: float) -> "ExperimentConfig":
        """Same config with ``frac_fs`` FS agents, rest split evenly DS_h/DS_r."""
        rest = (1.0 - frac_fs) / 2
        return dataclasses.replace(self, frac_fs=frac_fs, frac_dsh=rest, frac_dsr=1.0 - frac_fs - rest)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class RunMetrics:
    convergence_games_per_agent: float
    learned_strategy: float
    performance: float
    played_fraction: float
    played_performance: float
    max_degree: int
    mean_degree: float
    rewire_count: int
    converged: bool
    convergence_t: int
    rewire_attempts: int = 0
    reputation_rewires: int = 0
    games_played: int = 0


@dataclass
class RunResult:
    run_id: int
    seed: int
    config: ExperimentConfig
    metrics: RunMetrics
    final_strategies: np.ndarray = field(repr=False, default=None)
    trace: np.ndarray | None = field(repr=False, default=None)

    def row(self) -> dict[str, Any]:
        m, c = self.metrics, self.config
        return {
            "run_id": self.run_id, "seed": self.seed, "n": c.n, "frac_fs": c.frac_fs,
            "rewiring": c.rewiring, "reputation": c.reputation, "volunteering": c.volunteering,
            "games_per_agent": m.convergence_games_per_agent,
            "learned_strategy": m.learned_strategy, "performance": m.performance,
            "played_fraction": m.played_fraction, "max_degree": m.max_degree,
            "mean_degree": m.mean_degree, "rewire_count": m.rewire_count,
            "converged": m.converged,
        }

    def metric(self, name: str) -> float:
        if name == "games_per_agent":
            return self.metrics.convergence_games_per_agent
        return float(getattr(self.metrics, name))


def run_seed(master_seed: int, repetition: int) -> int:
    ss = np.random.SeedSequence(master_seed, spawn_key=(repetition,))
    return int(ss.generate_state(1, np.uint64)[0])


def stream(seed: int, name: str) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(STREAMS[name],))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass
class RunState:
    """Everything a run mutates, in object form."""

    population: Population
    graph: InteractionGraph
    rep_graph: InteractionGraph | None
    beliefs: BeliefStore | None
    initial_edge_count: int


def build_run(config: ExperimentConfig, seed: int) -> RunState:
    population = init_population(
        config.n, config.frac_fs, config.frac_dsh, config.frac_dsr, stream(seed, "population-init"),
        sigma0=config.sigma0, lam=config.lam, big_k=config.big_k, sigma_floor=config.sigma_floor)
    graph = generate_ba(config.n, stream(seed, "interaction-graph"))
    rep_graph = generate_ba(config.n, stream(seed, "reputation-graph")) if config.reputation else None
    beliefs = BeliefStore() if config.reputation else None
    return RunState(population, graph, rep_graph, beliefs, graph.edge_count)


def reference_loop(config: ExperimentConfig, state: RunState, seed: int) -> tuple[np.ndarray, dict]:
    """Game loop written with the module-level operations.

    Slow; it exists to pin down the protocol and to check the compiled loop.
    """
    pop, graph, rep, beliefs = state.population, state.graph, state.rep_graph, state.beliefs
    g_game = stream(seed, "game-loop")
    g_rew = stream(seed, "rewiring")
    g_rep = stream(seed, "reputation")
    g_vol = stream(seed, "volunteering")
    n = len(pop)
    total = 0.0
    for a in pop:
        total += current_strategy(a)
    trace = np.empty(config.iterations)
    counts = {"rewires": 0, "attempts": 0, "played": 0, "reputation_rewires": 0}

    for t in range(config.iterations):
        if config.pair_mode == "preference":
            a = int(g_game.integers(0, n))
            b = partner_preference(a, graph.adj[a], beliefs, pop, g_game, default=total / n)
        elif config.pair_mode == "agent-neighbor":
            a = int(g_game.integers(0, n))
            b = graph.adj[a][int(g_game.integers(0, graph.degree(a)))]
        else:
            a, b = graph.edges[int(g_game.integers(0, graph.edge_count))]
        p, r = (a, b) if g_game.random() < 0.5 else (b, a)

        play = True
        if config.volunteering:
            play = volunteer(p, r, beliefs, pop, g_vol, default=total / n,
                             forced_prob=config.forced_play_prob)
        if play:
            counts["played"] += 1
            old_p = current_strategy(pop[p])
            old_r = current_strategy(pop[r])
            play_pairwise(pop[p], pop[r], g_game, zfa=config.zfa,
                          limit_update=config.limit_update, clamp_mean=config.clamp_mean,
                          feedback_scale=config.feedback_scale)
            total += current_strategy(pop[p]) - old_p
            total += current_strategy(pop[r]) - old_r

            heard: list[int] = []
            if config.reputation:
                beliefs.set(r, p, old_p)
                heard = broadcast_offer(rep, r, p, old_p, beliefs, g_rep, config.hops)

            if config.rewiring:
                prob = rewire_probability(current_strategy(pop[r]), current_strategy(pop[p]), config.stake)
                if prob > 0.0 and g_rew.random() < prob:
                    counts["attempts"] += 1
                    if rewire(graph, r, p, g_rew).rewired:
                        counts["rewires"] += 1
                for v in heard:
                    if not graph.has_edge(v, p):
                        continue
                    res = reputation_triggered_rewire(v, p, old_p, graph, pop, g_rew)
                    if res is not None:
                        counts["attempts"] += 1
                        if res.rewired:
                            counts["rewires"] += 1
                            counts["reputation_rewires"] += 1
        trace[t] = total / n
    return trace, counts


def fast_loop(config: ExperimentConfig, state: RunState, seed: int) -> tuple[np.ndarray, dict]:
    pop, n = state.population, len(state.population)
    kind, mu, sigma = pop.to_arrays()
    edges, nbr, nbr_eid, deg = state.graph.to_arrays()
    if state.rep_graph is not None:
        rep_indptr, rep_indices = state.rep_graph.csr()
        beliefs = state.beliefs.to_dense(n)
    else:
        rep_indptr = np.zeros(1, dtype=np.int32)
        rep_indices = np.zeros(0, dtype=np.int32)
        beliefs = np.full((1, 1), np.nan)
    trace = np.empty(config.iterations)
    rewires, attempts, played, rep_rewires, nbr, nbr_eid = run_loop(
        kind, mu, sigma, edges, nbr, nbr_eid, deg, rep_indptr, rep_indices, beliefs,
        config.iterations, config.lam, config.big_k, config.sigma_floor, config.stake,
        config.hops, config.forced_play_prob, config.rewiring, config.reputation,
        config.volunteering, PAIR_MODES[config.pair_mode], config.zfa, config.limit_update,
        config.clamp_mean, config.feedback_scale, stream(seed, "game-loop"), stream(seed, "rewiring"),
        stream(seed, "reputation"), stream(seed, "volunteering"), trace)
    pop.load_arrays(mu, sigma)
    state.graph = InteractionGraph.from_arrays(n, edges, nbr, deg)
    if state.beliefs is not None:
        store = BeliefStore()
        for i, j in zip(*np.nonzero(~np.isnan(beliefs))):
            store.set(int(i), int(j), float(beliefs[i, j]))
        state.beliefs = store
    return trace, {"rewires": rewires, "attempts": attempts, "played": played,
                   "reputation_rewires": rep_rewires}


def measure(config: ExperimentConfig, state: RunState, trace: np.ndarray, counts: dict,
            seed: int) -> RunMetrics:
    conv = analysis.detect_convergence(trace, config.n, config.convergence_threshold)
    gate = None
    if config.volunteering:
        strategies = state.population.strategies()
        default = float(trace[-1])
        g = stream(seed, "measurement")
        gate = lambda i, j: volunteer(i, j, state.beliefs, strategies, g, default=default,  # noqa: E731
                                      forced_prob=config.forced_play_prob)
    perf = analysis.measure_performance(state.population, state.graph, gate)
    degrees = analysis.degree_summary(state.graph)
    return RunMetrics(
        convergence_games_per_agent=conv.games_per_agent,
        learned_strategy=conv.learned_strategy,
        performance=perf.performance,
        played_fraction=perf.played_fraction,
        played_performance=perf.played_performance,
        max_degree=int(degrees.max),
        mean_degree=degrees.mean,
        rewire_count=int(counts["rewires"]),
        converged=conv.converged,
        convergence_t=conv.t,
        rewire_attempts=int(counts["attempts"]),
        reputation_rewires=int(counts["reputation_rewires"]),
        games_played=int(counts["played"]),
    )


def run_simulation(config: ExperimentConfig, seed: int, run_id: int = 0, *,
                   engine: str = "fast", keep_trace: bool = False) -> RunResult:
    """One complete run: build, play ``3000 n`` games, measure."""
    state = build_run(config, seed)
    if engine == "fast":
        trace, counts = fast_loop(config, state, seed)
    elif engine == "reference":
        trace, counts = reference_loop(config, state, seed)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    if state.graph.edge_count != state.initial_edge_count:
        raise RuntimeError("edge count changed during the run")
    metrics = measure(config, state, trace, counts, seed)
    return RunResult(run_id, seed, config, metrics, state.population.strategies(),
                     trace if keep_trace else None)


def _run_one(args):
    config, rep = args
    return run_simulation(config, run_seed(config.master_seed, rep), rep)


def default_workers() -> int:
    return os.cpu_count() or 1


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    runs: list[RunResult]

    def values(self, metric: str) -> list[float]:
        return [r.metric(metric) for r in self.runs]

    def summary(self, metric: str) -> analysis.BoxStats:
        return analysis.summarize_runs(self.values(metric))

    @property
    def summaries(self) -> dict[str, analysis.BoxStats]:
        return {m: self.summary(m) for m in SUMMARY_METRICS}


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """All repetitions of one config, ordered by repetition index."""
    jobs = [(config, k) for k in range(config.repetitions)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_run_one, jobs))
    else:
        runs = [_run_one(j) for j in jobs]
    return ExperimentResult(config, runs)


AXES = ("population-size", "fs-fraction")


def config_for(template: ExperimentConfig, axis: str, value) -> ExperimentConfig:
    if axis == "population-size":
        return dataclasses.replace(template, n=int(value))
    if axis == "fs-fraction":
        return template.with_fs(float(value))
    raise ValueError(f"unknown sweep axis {axis!r}; expected one of {AXES}")


def sweep(template: ExperimentConfig, axis: str, values: Iterable, workers: int = 1
          ) -> list[tuple[Any, ExperimentResult]]:
    if axis not in AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; expected one of {AXES}")
    return [(v, run_experiment(config_for(template, axis, v), workers)) for v in values]


def sweep_table(results: Sequence[tuple[Any, ExperimentResult]]) -> list[dict[str, Any]]:
    """One row per (axis value, metric) with the box statistics."""
    rows = []
    for value, exp in results:
        for metric in SUMMARY_METRICS:
            rows.append({"axis_value": value, "metric": metric, **exp.summary(metric).as_dict()})
    return rows


# --- serialisation -----------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def runs_csv(runs: Sequence[RunResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RUN_COLUMNS)
    for r in runs:
        row = r.row()
        w.writerow([_fmt(row[c]) for c in RUN_COLUMNS])
    return buf.getvalue()


def summary_csv(results: Sequence[tuple[Any, ExperimentResult]], metric: str) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for value, exp in results:
        s = exp.summary(metric)
        w.writerow([_fmt(value)] + [_fmt(getattr(s, c)) for c in SUMMARY_COLUMNS[1:]])
    return buf.getvalue()


def trace_csv(trace: np.ndarray, max_rows: int = MAX_TRACE_ROWS) -> str:
    """``t,avg`` rows (t is 1-based), evenly decimated to at most ``max_rows``."""
    T = len(trace)
    step = max(1, -(-T // max_rows))
    idx = np.arange(0, T, step)
    buf = io.StringIO()
    buf.write("t,avg\n")
    for i in idx:
        buf.write(f"{i + 1},{float(trace[i])!r}\n")
    return buf.getvalue()


def result_json(results: Sequence[tuple[Any, ExperimentResult]]) -> str:
    doc = []
    for value, exp in results:
        doc.append({
            "axis_value": value,
            "config": exp.config.to_dict(),
            "runs": [{**r.row(), **dataclasses.asdict(r.metrics)} for r in exp.runs],
            "summary": {m: s.as_dict() for m, s in exp.summaries.items()},
        })
    return json.dumps(doc, indent=2, sort_keys=True)


def write_outputs(results: Sequence[tuple[Any, ExperimentResult]], out: str | Path,
                  fmt: str = "csv") -> list[Path]:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt == "json":
        p = out / "results.json"
        p.write_text(result_json(results))
        return [p]
    runs = [r for _, exp in results for r in exp.runs]
    p = out / "runs.csv"
    p.write_text(runs_csv(runs))
    written.append(p)
    for metric in SUMMARY_METRICS:
        p = out / f"summary_{metric}.csv"
        p.write_text(summary_csv(results, metric))
        written.append(p)
    return written
