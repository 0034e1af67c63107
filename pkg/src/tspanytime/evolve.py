"""(mu + 1) EA that evolves instances easy for one solver and hard for another."""

from __future__ import annotations

import logging
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analysis.estimators import first_hitting_time, par_score
from .core import Instance
from .errors import InvalidConfigError
from .generators import DEFAULT_OPS, GeneratorConfig, MutationOp, gen_rue, mutate_coords
from .runner import derive_seed
from .solvers import SolverConfig, solve

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvolutionConfig:
    """Settings for :func:`evolve_instance`.

    ``direction="A"`` searches for instances easy for ``solver_a`` (minimizes
    PAR_A / PAR_B); ``"B"`` the reverse. ``cutoff`` is per run, in the units
    of ``time_mode``.
    """

    solver_a: SolverConfig
    solver_b: SolverConfig
    n: int = 50
    seed: int = 0
    pop_size: int = 5
    generations: int = 30
    penalty: float = 10.0
    runs: int = 3
    cutoff: int = 20_000
    time_mode: str = "evals"
    direction: str = "A"
    bound: float = 1e6
    ops: tuple[MutationOp, ...] = DEFAULT_OPS
    jobs: int = 1
    names: tuple[str, str] = ("A", "B")

    def __post_init__(self):
        if self.penalty < 1:
            raise InvalidConfigError("penalty factor f must be >= 1")
        if self.runs < 1:
            raise InvalidConfigError("runs per evaluation must be >= 1")
        if self.generations < 0 or self.pop_size < 1:
            raise InvalidConfigError("generations must be >= 0 and pop_size >= 1")
        if self.direction not in ("A", "B"):
            raise InvalidConfigError("direction must be 'A' or 'B'")


@dataclass
class Fitness:
    value: float
    par_a: float
    par_b: float
    ref: float
    degenerate: bool = False


def _one_run(task):
    inst, cfg, seed, cutoff, mode = task
    return solve(inst, cfg.with_seed(seed), cutoff, time_mode=mode)


def evaluate_fitness(inst: Instance, ecfg: EvolutionConfig, tag: tuple, pool=None) -> Fitness:
    """PAR ratio of the favored solver over its competitor on ``inst``.

    The reference is the best tour either solver finds during this
    evaluation; a run's time-to-target is its first hitting time of that
    reference (floored at 1 so PAR stays positive).
    """
    tasks = []
    for name, cfg in zip(ecfg.names, (ecfg.solver_a, ecfg.solver_b)):
        for r in range(ecfg.runs):
            seed = derive_seed(ecfg.seed, "/".join(map(str, tag)), name, r)
            tasks.append((inst, cfg, seed, ecfg.cutoff, ecfg.time_mode))
    trajs = list(pool.map(_one_run, tasks)) if pool is not None else [_one_run(t) for t in tasks]
    ref = min(t.final_length for t in trajs)
    pars = []
    for block in (trajs[: ecfg.runs], trajs[ecfg.runs:]):
        times = [first_hitting_time(t, 0.0, ref) for t in block]
        times = [None if t is None else max(t, 1) for t in times]
        pars.append(par_score(times, ecfg.cutoff, ecfg.penalty))
    par_a, par_b = pars
    value = par_a / par_b if ecfg.direction == "A" else par_b / par_a
    # no run got past its construction: the ratio carries no information
    degenerate = all(len(t.events) <= 1 for t in trajs)
    if degenerate:
        warnings.warn("degenerate fitness: cutoff too small for any run to improve its first tour",
                      RuntimeWarning, stacklevel=2)
    return Fitness(value, par_a, par_b, ref, degenerate)


def evolve_instance(ecfg: EvolutionConfig, seed_instance: Instance | None = None) -> Instance:
    """Evolve an instance by repeated single-operator mutation.

    The population starts as ``pop_size`` copies of the seed instance. Each
    generation mutates a uniformly chosen member once and the child replaces
    the worst member if it is no worse. The fittest member is returned.
    """
    seed_instance = seed_instance or gen_rue(GeneratorConfig(ecfg.seed, ecfg.n, ecfg.bound))
    rng = np.random.default_rng([ecfg.seed, 7])
    pool = ProcessPoolExecutor(ecfg.jobs) if ecfg.jobs > 1 else None
    try:
        seed_fit = evaluate_fitness(seed_instance, ecfg, (0, 0), pool)
        pop = [(seed_fit, seed_instance.coords) for _ in range(ecfg.pop_size)]
        history = [seed_fit.value]
        for gen in range(1, ecfg.generations + 1):
            parent = pop[int(rng.integers(len(pop)))][1]
            child = mutate_coords(parent, ecfg.ops, rng, ecfg.bound)
            cand = Instance(f"{seed_instance.id}-g{gen}", child, "custom", seed_instance.metric)
            fit = evaluate_fitness(cand, ecfg, (gen, 1), pool)
            worst = max(range(len(pop)), key=lambda j: (pop[j][0].value, j))
            if fit.value <= pop[worst][0].value:
                pop[worst] = (fit, child)
            history.append(min(p[0].value for p in pop))
            log.debug("generation %d best fitness %.4f", gen, history[-1])
    finally:
        if pool is not None:
            pool.shutdown()
    best_fit, coords = min(pop, key=lambda p: p[0].value)
    group = "evolved-easy-A" if ecfg.direction == "A" else "evolved-easy-B"
    meta = {"generator": "evolved", "seed": ecfg.seed, "n": ecfg.n, "direction": ecfg.direction,
            "generations": ecfg.generations, "fitness": best_fit.value, "seed_fitness": seed_fit.value,
            "par_a": best_fit.par_a, "par_b": best_fit.par_b, "penalty": ecfg.penalty,
            "history": history, "bound": ecfg.bound}
    return Instance(f"evolved-{ecfg.direction}-n{ecfg.n}-s{ecfg.seed}", coords, group, seed_instance.metric, meta)
