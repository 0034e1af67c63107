from __future__ import annotations

import numpy as np

from ..core import Instance, Tour


def greedy_initial_tour(inst: Instance, seed=None, start: int | None = None) -> Tour:
    """Nearest-neighbor tour from a seeded random start city (ties to the lower index)."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = inst.n
    cur = int(rng.integers(n)) if start is None else int(start)
    D = inst.dist
    visited = np.zeros(n, dtype=bool)
    order = [cur]
    visited[cur] = True
    length = 0.0
    for _ in range(n - 1):
        row = np.where(visited, np.inf, D[cur])
        nxt = int(np.argmin(row))
        length += D[cur, nxt]
        visited[nxt] = True
        order.append(nxt)
        cur = nxt
    length += D[cur, order[0]]
    return Tour(tuple(order), float(length))
