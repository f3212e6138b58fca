"""Learning automata reaching agreement in a networked continuous Ultimatum Game."""

from .automaton import Cala
from .network import InteractionGraph, generate_ba
from .population import AgentKind, Population, init_population
from .runner import ExperimentConfig, RunResult, run_experiment, run_simulation, sweep

__all__ = [
    "AgentKind", "Cala", "ExperimentConfig", "InteractionGraph", "Population", "RunResult",
    "generate_ba", "init_population", "run_experiment", "run_simulation", "sweep",
]
__version__ = "0.1.0"
