"""Multi-trial iterated local search in the style of LKH with cold restarts."""

from __future__ import annotations

import numpy as np

from ..core import Instance
from ..errors import InvalidConfigError
from .base import Incumbent, SolverConfig
from .construct import greedy_initial_tour
from .ipt import ipt_lists
from .localsearch import _bridge_cuts, _LocalSearch
from .trajectory import Recorder, RunClock, Trajectory


def _kick(order: list, L: float, D, rng) -> tuple[list, float, tuple]:
    n = len(order)
    if n < 8:
        new = [order[i] for i in rng.permutation(n)]
        return new, sum(D[new[i - 1]][new[i]] for i in range(n)), tuple(new)
    r = int(rng.integers(n))
    order = order[r:] + order[:r]
    p1, p2, p3 = _bridge_cuts(n, rng)
    a, b, c, d = order[:p1], order[p1:p2], order[p2:p3], order[p3:]
    L += (D[a[-1]][d[0]] + D[d[-1]][c[0]] + D[c[-1]][b[0]] + D[b[-1]][a[0]]
          - D[a[-1]][b[0]] - D[b[-1]][c[0]] - D[c[-1]][d[0]] - D[d[-1]][a[0]])
    ends = (a[0], a[-1], b[0], b[-1], c[0], c[-1], d[0], d[-1])
    return a + d + c + b, L, ends


def solve_ils(inst: Instance, cfg: SolverConfig, cutoff: int, recorder: Recorder | None = None, *,
              time_mode: str = "wall", target: float | None = None,
              solver_id: str = "ils") -> Trajectory:
    """Run the ILS until ``cutoff`` (ms or evaluations) and return its incumbent trajectory.

    A trial kicks its tour with double bridges, each followed by local search,
    until ``kicks_per_trial`` consecutive kicks fail to improve. With
    ``crossover == "ipt"`` the trial result is recombined with the best tour
    of the current restart epoch. After ``restart_trials`` trials without a
    new epoch best (and ``restart`` set) the search starts cold.
    ``target`` stops the run early once reached.
    """
    if cfg.family != "ils":
        raise InvalidConfigError(f"solve_ils needs family 'ils', got {cfg.family!r}")
    clock = RunClock(cutoff, time_mode)
    recorder = recorder or Recorder()
    rng = np.random.default_rng(cfg.seed)
    D = inst.dist_rows
    n = inst.n
    ls = _LocalSearch(D, inst.neighbors(cfg.k), clock)
    inc = Incumbent(inst, clock, recorder, target)

    first = True
    while first or not inc.stop():
        # cold start
        t = greedy_initial_tour(inst, rng)
        clock.tick(n)
        inc.offer(t.length, t.order)
        first = False
        epoch_len, epoch_order = float("inf"), None
        stale = 0
        while not inc.stop():
            if epoch_order is None:
                cur, L = list(t.order), t.length
            else:
                t = greedy_initial_tour(inst, rng)
                clock.tick(n)
                cur, L = list(t.order), t.length
            L, _ = ls.run(cur, L)
            inc.offer(L, cur)
            fails = 0
            while fails < cfg.kicks_per_trial and not inc.stop():
                nxt, Ln, ends = _kick(cur, L, D, rng)
                clock.tick(8)
                Ln, _ = ls.run(nxt, Ln, queue_cities=ends, verify=False)
                if Ln < L:
                    cur, L = nxt, Ln
                    inc.offer(L, cur)
                    fails = 0
                else:
                    fails += 1
            if cfg.crossover == "ipt" and epoch_order is not None and L < float("inf"):
                base, other = (cur, epoch_order) if L <= epoch_len else (epoch_order, cur)
                child = ipt_lists(base, other, D)
                clock.tick(n * n)
                Lc = sum(D[child[i - 1]][child[i]] for i in range(n))
                if Lc < min(L, epoch_len):
                    cur, L = child, Lc
                    inc.offer(L, cur)
            if L < epoch_len:
                epoch_len, epoch_order = L, list(cur)
                stale = 0
            else:
                stale += 1
            if cfg.restart and stale >= cfg.restart_trials:
                break
    return Trajectory(inst.id, solver_id, cfg.seed, cutoff, recorder.events, time_mode, clock.overshoot())
