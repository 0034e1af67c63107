from .base import SolverConfig
from .construct import greedy_initial_tour
from .eax import ab_cycles, eax_crossover
from .exact import MAX_EXACT_N, held_karp_exact
from .ga import population_entropy, solve_ga
from .ils import solve_ils
from .ipt import partition_crossover_ipt
from .localsearch import double_bridge, local_search_2opt_oropt
from .trajectory import (IncumbentEvent, Recorder, RunClock, Trajectory, EventLog, record_incumbent,
                         replay_events)

# preset variants mirroring the solver families compared in the study
PRESETS = {
    "lkh+r": SolverConfig("ils", crossover="ipt", restart=True),
    "lkh+r-noxover": SolverConfig("ils", crossover="none", restart=True),
    "eax+r": SolverConfig("ga", crossover="eax", restart=True),
    "eax+r-ipt": SolverConfig("ga", crossover="ipt", restart=True),
}


def solve(inst, cfg: SolverConfig, cutoff: int, recorder=None, **kwargs) -> Trajectory:
    fn = solve_ils if cfg.family == "ils" else solve_ga
    return fn(inst, cfg, cutoff, recorder, **kwargs)


__all__ = [
    "SolverConfig", "PRESETS", "solve", "solve_ils", "solve_ga", "greedy_initial_tour",
    "local_search_2opt_oropt", "double_bridge", "partition_crossover_ipt", "eax_crossover", "ab_cycles",
    "held_karp_exact", "MAX_EXACT_N", "population_entropy", "IncumbentEvent", "Recorder", "RunClock",
    "Trajectory", "EventLog", "record_incumbent", "replay_events",
]
