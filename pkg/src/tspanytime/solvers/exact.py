from __future__ import annotations

import numpy as np

from ..core import Instance, Tour
from ..errors import SizeLimitError

MAX_EXACT_N = 16


def held_karp_exact(inst: Instance) -> tuple[Tour, float]:
    """Optimal tour by dynamic programming over subsets, for n <= 16.

    City 0 is fixed as the start; ``cost[mask, j]`` is the shortest path from
    0 through the cities of ``mask`` (over cities 1..n-1) ending at ``j``.
    Each popcount layer is relaxed with one vectorized min per end city.
    """
    n = inst.n
    if n > MAX_EXACT_N:
        raise SizeLimitError(f"held_karp_exact supports n <= {MAX_EXACT_N}, got {n}")
    D = np.asarray(inst.dist, dtype=np.float64)
    m = n - 1
    full = 1 << m
    cost = np.full((full, m), np.inf)
    parent = np.full((full, m), -1, dtype=np.int8)
    for j in range(m):
        cost[1 << j, j] = D[0, j + 1]
    masks = np.arange(full)
    popcount = np.zeros(full, dtype=np.int64)
    for j in range(m):
        popcount += (masks >> j) & 1
    sub = D[1:, 1:]
    for size in range(2, m + 1):
        layer = masks[popcount == size]
        for j in range(m):
            sel = layer[(layer >> j) & 1 == 1]
            prev = sel ^ (1 << j)
            cand = cost[prev] + sub[:, j]  # (len(sel), m)
            k = np.argmin(cand, axis=1)
            cost[sel, j] = cand[np.arange(len(sel)), k]
            parent[sel, j] = k
    closing = cost[full - 1] + D[1:, 0]
    last = int(np.argmin(closing))
    best = float(closing[last])

    order = []
    mask, j = full - 1, last
    while j >= 0:
        order.append(j + 1)
        pj = int(parent[mask, j])
        mask ^= 1 << j
        j = pj
    order.append(0)
    order.reverse()
    return Tour(tuple(order), best), best

