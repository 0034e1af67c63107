"""Iterative partial transcription: swap in the parent's shorter traversal of shared subchains."""

from __future__ import annotations

import numpy as np

from ..core import Instance, Tour, tour_length

EPS = 1e-7


def _keys(n: int) -> list[int]:
    rng = np.random.default_rng(0x1B7)
    return [int(v) for v in rng.integers(1, 2**62, size=n, dtype=np.int64)]


def _prefix(seq, keys):
    out = [0]
    acc = 0
    for c in seq:
        acc += keys[c]
        out.append(acc)
    return out


def _edge_prefix(seq, D):
    out = [0.0]
    acc = 0.0
    for x, y in zip(seq, seq[1:]):
        acc += D[x][y]
        out.append(acc)
    return out


def _scan(a: list, b: list, D, keys) -> list[tuple[float, int, int, list]]:
    """Improving transcriptions of ``b``'s subchains into ``a``.

    A candidate is a run of ``a`` from position i spanning L cities whose city
    set and endpoints coincide with a run of ``b``; the ``b`` run is returned
    oriented to fit.
    """
    n = len(a)
    a2 = a + a
    b2 = b + b
    posb = [0] * n
    for i, c in enumerate(b):
        posb[c] = i
    ha = _prefix(a2, keys)
    hb = _prefix(b2, keys)
    la = _edge_prefix(a2, D)
    lb = _edge_prefix(b2, D)
    found = []
    for i in range(n):
        u = a[i]
        pu = posb[u]
        for L in range(3, n - 1):
            j = i + L - 1
            v = a2[j]
            h = ha[j + 1] - ha[i]
            inner_a = la[j] - la[i]
            pv = posb[v]
            # b traverses u .. v forward
            if b2[pu + L - 1] == v and hb[pu + L] - hb[pu] == h:
                inner_b = lb[pu + L - 1] - lb[pu]
                if inner_b < inner_a - EPS and set(b2[pu:pu + L]) == set(a2[i:j + 1]):
                    found.append((inner_a - inner_b, i, L, b2[pu:pu + L]))
            # b traverses v .. u forward, i.e. u .. v backward
            elif b2[pv + L - 1] == u and hb[pv + L] - hb[pv] == h:
                inner_b = lb[pv + L - 1] - lb[pv]
                if inner_b < inner_a - EPS and set(b2[pv:pv + L]) == set(a2[i:j + 1]):
                    found.append((inner_a - inner_b, i, L, b2[pv:pv + L][::-1]))
    return found


def ipt_lists(a: list, b: list, D, keys=None) -> list:
    n = len(a)
    keys = keys or _keys(n)
    a = list(a)
    while True:
        found = _scan(a, b, D, keys)
        if not found:
            return a
        found.sort(key=lambda f: (-f[0], f[1], f[2]))
        taken = [False] * n
        for gain, i, L, run in found:
            span = [(i + k) % n for k in range(L)]
            if any(taken[p] for p in span):
                continue
            for p in span:
                taken[p] = True
            for p, c in zip(span, run):
                a[p] = c


def partition_crossover_ipt(inst: Instance, a: Tour, b: Tour) -> Tour:
    """Recombine two tours; the offspring is never longer than the shorter parent.

    The shorter parent is the base. Every maximal-gain subchain that both
    parents traverse over the same city set between the same two endpoints is
    rewritten with the shorter of the two traversals; scanning repeats until
    no such subchain improves the base.
    """
    la = a.length if a.length is not None else tour_length(inst, a)
    lb = b.length if b.length is not None else tour_length(inst, b)
    base, other = (a, b) if la <= lb else (b, a)
    if base.order == other.order:
        return Tour(base.order, min(la, lb))
    child = ipt_lists(list(base.order), list(other.order), inst.dist_rows)
    return Tour(tuple(child), tour_length(inst, child))
