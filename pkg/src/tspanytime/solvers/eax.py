"""Edge assembly crossover with the single-AB-cycle E-set strategy."""

from __future__ import annotations

import numpy as np

from ..core import Instance, Tour, tour_length, validate_tour


def _adjacency(order) -> list[list[int]]:
    n = len(order)
    adj = [None] * n
    for i, c in enumerate(order):
        adj[c] = [order[i - 1], order[(i + 1) % n]]
    return adj


def ab_cycles(a, b, rng: np.random.Generator) -> list[list[int]]:
    """Decompose the symmetric difference of two tours' edge sets into AB-cycles.

    Each cycle is a closed vertex walk ``[v0, v1, ..., v0]``; the edge from
    position ``i`` to ``i + 1`` belongs to ``a`` for even ``i`` and to ``b``
    for odd ``i``.
    """
    n = len(a)
    adj_a, adj_b = _adjacency(a), _adjacency(b)
    rem_a = [[y for y in adj_a[x] if y not in adj_b[x]] for x in range(n)]
    rem_b = [[y for y in adj_b[x] if y not in adj_a[x]] for x in range(n)]

    def take(rem, x):
        opts = rem[x]
        y = opts[int(rng.integers(len(opts)))] if len(opts) > 1 else opts[0]
        opts.remove(y)
        rem[y].remove(x)
        return y

    cycles = []
    for start in range(n):
        while rem_a[start]:
            path = [start]
            even_pos = {start: 0}
            while True:
                cur = path[-1]
                if (len(path) - 1) % 2 == 0:
                    path.append(take(rem_a, cur))
                    continue
                y = take(rem_b, cur)
                path.append(y)
                k = even_pos.get(y)
                if k is None:
                    even_pos[y] = len(path) - 1
                    continue
                cycles.append(path[k:])
                for idx in range(k + 2, len(path) - 1, 2):
                    even_pos.pop(path[idx], None)
                del path[k + 1:]
                if len(path) == 1 and not rem_a[start]:
                    break
    return cycles


def _components(adj, n):
    comp = [-1] * n
    members = {}
    cid = 0
    for s in range(n):
        if comp[s] >= 0:
            continue
        group = [s]
        comp[s] = cid
        prev, cur = s, adj[s][0]
        while cur != s:
            comp[cur] = cid
            group.append(cur)
            nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
            prev, cur = cur, nxt
        members[cid] = group
        cid += 1
    return comp, members


def _merge_subtours(adj, D, neigh, n, counter) -> float:
    """Join subtours greedily: smallest first, cheapest 2-edge exchange into another subtour."""
    comp, members = _components(adj, n)
    delta = 0.0
    while len(members) > 1:
        u_id = min(members, key=lambda c: (len(members[c]), c))
        best = None
        for fallback in (False, True):
            for u in members[u_id]:
                cands = range(n) if fallback else neigh[u]
                for u2 in adj[u]:
                    duu2 = D[u][u2]
                    for v in cands:
                        if comp[v] == u_id:
                            continue
                        for v2 in adj[v]:
                            counter[0] += 2
                            base = duu2 + D[v][v2]
                            d1 = D[u][v] + D[u2][v2] - base
                            if best is None or d1 < best[0]:
                                best = (d1, u, u2, v, v2)
                            d2 = D[u][v2] + D[u2][v] - base
                            if d2 < best[0]:
                                best = (d2, u, u2, v2, v)
            if best is not None:
                break
        d, u, u2, v, v2 = best
        # remove (u, u2), (v, v2); add (u, v), (u2, v2)
        adj[u][adj[u].index(u2)] = v
        adj[u2][adj[u2].index(u)] = v2
        adj[v][adj[v].index(v2)] = u
        adj[v2][adj[v2].index(v)] = u2
        v_id = comp[v]
        for x in members[u_id]:
            comp[x] = v_id
        members[v_id].extend(members.pop(u_id))
        delta += d
    return delta


def _walk(adj, n) -> list[int]:
    order = [0]
    prev, cur = 0, adj[0][0]
    while cur != 0 and len(order) <= n:
        order.append(cur)
        nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
        prev, cur = cur, nxt
    return order


def eax_lists(a: list, b: list, len_a: float, D, neigh, n_children: int, rng, counter=None):
    """Offspring as ``(length, order)`` pairs, unsorted; ``counter[0]`` accumulates evaluations."""
    n = len(a)
    counter = counter if counter is not None else [0]
    cycles = ab_cycles(a, b, rng)
    counter[0] += n
    if not cycles:
        return []
    adj_a = _adjacency(a)
    picks = rng.permutation(len(cycles))[:n_children]
    out = []
    for ci in picks:
        cyc = cycles[int(ci)]
        adj = [list(p) for p in adj_a]
        delta = 0.0
        for i in range(0, len(cyc) - 1, 2):
            x, y = cyc[i], cyc[i + 1]
            adj[x].remove(y)
            adj[y].remove(x)
            delta -= D[x][y]
        for i in range(1, len(cyc) - 1, 2):
            x, y = cyc[i], cyc[i + 1]
            adj[x].append(y)
            adj[y].append(x)
            delta += D[x][y]
        delta += _merge_subtours(adj, D, neigh, n, counter)
        order = _walk(adj, n)
        counter[0] += len(cyc)
        if len(order) == n and len(set(order)) == n:
            out.append((len_a + delta, order))
    return out


def eax_crossover(inst: Instance, a: Tour, b: Tour, n_children: int = 30, seed=None,
                  k: int = 8) -> list[Tour]:
    """EAX offspring of ``a`` and ``b``, each valid, sorted by length.

    Builds the AB-cycles of the two parents; every offspring applies one
    distinct random AB-cycle (the E-set) to ``a`` and then repairs the
    resulting subtours by cheapest 2-edge exchanges over candidate-list
    neighbors. Identical parents yield no AB-cycles and an empty list.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    len_a = a.length if a.length is not None else tour_length(inst, a.order)
    kids = eax_lists(list(a.order), list(b.order), len_a, inst.dist_rows, inst.neighbors(k).lists,
                     n_children, rng)
    tours = []
    for length, order in sorted(kids, key=lambda x: x[0]):
        if validate_tour(inst, order).ok:
            tours.append(Tour(tuple(order), length))
    return tours

