"""EAX genetic algorithm with entropy tie-breaking and cold restarts."""

from __future__ import annotations

import math
from collections import Counter

import numpy as np

from ..core import Instance, tour_edges
from ..errors import InvalidConfigError
from .base import Incumbent, SolverConfig
from .construct import greedy_initial_tour
from .eax import eax_lists
from .ipt import ipt_lists
from .localsearch import _LocalSearch
from .trajectory import Recorder, RunClock, Trajectory

EPS = 1e-7


def population_entropy(pop: list, mu: int | None = None) -> float:
    """Edge entropy ``-sum_e (c_e/mu) ln(c_e/mu)`` of a population of tours."""
    mu = mu or len(pop)
    counts = Counter()
    for order in pop:
        counts.update(tour_edges(order))
    return -sum((c / mu) * math.log(c / mu) for c in counts.values())


def _h(c, mu):
    return 0.0 if c <= 0 else -(c / mu) * math.log(c / mu)


def entropy_delta(counts: Counter, old_edges: set, new_edges: set, mu: int) -> float:
    delta = 0.0
    for e in old_edges - new_edges:
        c = counts[e]
        delta += _h(c - 1, mu) - _h(c, mu)
    for e in new_edges - old_edges:
        c = counts[e]
        delta += _h(c + 1, mu) - _h(c, mu)
    return delta


class _Population:
    def __init__(self, mu):
        self.mu = mu
        self.members: list[tuple[float, list]] = []
        self.edges: list[set] = []
        self.counts = Counter()

    def add(self, length, order):
        e = tour_edges(order)
        self.members.append((length, order))
        self.edges.append(e)
        self.counts.update(e)

    def replace(self, i, length, order, edges=None):
        edges = edges if edges is not None else tour_edges(order)
        self.counts.subtract(self.edges[i])
        self.counts.update(edges)
        self.members[i] = (length, order)
        self.edges[i] = edges

    def reorder(self, perm):
        self.members = [self.members[j] for j in perm]
        self.edges = [self.edges[j] for j in perm]

    def best(self) -> int:
        return min(range(len(self.members)), key=lambda j: self.members[j][0])


def solve_ga(inst: Instance, cfg: SolverConfig, cutoff: int, recorder: Recorder | None = None, *,
             time_mode: str = "wall", target: float | None = None, solver_id: str = "ga") -> Trajectory:
    """(mu + lambda) EAX GA.

    Each generation shuffles the population and crosses ``p[i]`` with
    ``p[i+1]``. The shortest offspring replaces ``p[i]`` when strictly
    shorter; equal-length offspring are ranked by the population edge entropy
    they would produce. ``crossover == "ipt"`` recombines the accepted child
    once more with the replaced parent. With ``restart`` set, a stall of
    ``stall_generations`` reinitializes everyone except the best.
    """
    if cfg.family != "ga":
        raise InvalidConfigError(f"solve_ga needs family 'ga', got {cfg.family!r}")
    clock = RunClock(cutoff, time_mode)
    recorder = recorder or Recorder()
    rng = np.random.default_rng(cfg.seed)
    D = inst.dist_rows
    n = inst.n
    mu = cfg.pop_size
    neigh = inst.neighbors(cfg.k).lists
    ls = _LocalSearch(D, inst.neighbors(cfg.k), clock)
    inc = Incumbent(inst, clock, recorder, target)
    counter = [0]

    def fresh(tries=3):
        # greedy + local search; a duplicate of a current member is rebuilt
        # from a random permutation (nearest neighbor has only n start cities)
        t = greedy_initial_tour(inst, rng)
        clock.tick(n)
        inc.offer(t.length, t.order)
        order, L = list(t.order), t.length
        for attempt in range(tries + 1):
            L, _ = ls.run(order, L)
            inc.offer(L, order)
            if attempt == tries or tour_edges(order) not in pop.edges or inc.stop():
                break
            order = [int(c) for c in rng.permutation(n)]
            clock.tick(n)
            L = sum(D[order[j - 1]][order[j]] for j in range(n))
        return L, order

    pop = _Population(mu)
    for _ in range(mu):
        pop.add(*fresh())
        if inc.stop():
            break
    while len(pop.members) < mu:
        # budget ran out mid-initialization; pad so the population contract holds
        pop.add(*pop.members[len(pop.members) % max(1, len(pop.members))])

    best_len = min(L for L, _ in pop.members)
    stall = 0
    while not inc.stop():
        pop.reorder(rng.permutation(mu).tolist())
        for i in range(mu):
            if inc.stop():
                break
            la, pa = pop.members[i]
            _, pb = pop.members[(i + 1) % mu]
            counter[0] = 0
            kids = eax_lists(pa, pb, la, D, neigh, cfg.n_children, rng, counter)
            clock.tick(counter[0])
            if not kids:
                continue
            kid_len = min(k[0] for k in kids)
            if not kid_len < la - EPS:
                continue
            ties = [k for k in kids if k[0] <= kid_len + EPS]
            if len(ties) > 1:
                scored = []
                for length, order in ties:
                    e = tour_edges(order)
                    scored.append((entropy_delta(pop.counts, pop.edges[i], e, mu), length, order, e))
                # highest entropy first; stable on generation order
                _, length, order, edges = max(scored, key=lambda s: s[0])
            else:
                length, order = ties[0]
                edges = None
            if cfg.crossover == "ipt":
                child = ipt_lists(order, pa, D)
                clock.tick(n * n)
                Lc = sum(D[child[j - 1]][child[j]] for j in range(n))
                if Lc < length:
                    length, order, edges = Lc, child, None
            pop.replace(i, length, order, edges)
            inc.offer(length, order)
        gen_best = min(L for L, _ in pop.members)
        if gen_best < best_len - EPS:
            best_len = gen_best
            stall = 0
        else:
            stall += 1
        if cfg.restart and stall >= cfg.stall_generations:
            keep = pop.best()
            for j in range(mu):
                if j != keep and not inc.stop():
                    pop.replace(j, *fresh())
            stall = 0
    return Trajectory(inst.id, solver_id, cfg.seed, cutoff, recorder.events, time_mode, clock.overshoot())
