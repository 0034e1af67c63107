"""2-opt + Or-opt local search with candidate lists and don't-look bits, and the double-bridge kick."""

from __future__ import annotations

import warnings
from collections import deque
from typing import Sequence

import numpy as np

from ..core import Instance, NeighborLists, Tour, tour_length
from .trajectory import RunClock

EPS = 1e-7


def _reverse(t: list, pos: list, i: int, j: int, n: int):
    # reverse the cyclic segment running forward from position i to j
    length = (j - i) % n + 1
    if 2 * length > n:
        i, j = (j + 1) % n, (i - 1) % n
        length = n - length
    for _ in range(length // 2):
        a, b = t[i], t[j]
        t[i], t[j] = b, a
        pos[b], pos[a] = i, j
        i += 1
        if i == n:
            i = 0
        j -= 1
        if j < 0:
            j = n - 1


class _LocalSearch:
    """In-place local search state over a list-encoded tour."""

    def __init__(self, D, neigh: NeighborLists, clock: RunClock | None):
        self.D = D
        self.neigh = neigh.lists
        self.clock = clock
        self.evals = 0

    def run(self, t: list, length: float, queue_cities: Sequence[int] | None = None,
            verify: bool = True) -> tuple[float, bool]:
        """Improve ``t`` in place. Returns ``(length, locally_optimal)``."""
        n = len(t)
        if n < 5:
            return self._tiny(t, length), True
        D = self.D
        pos = [0] * n
        for i, c in enumerate(t):
            pos[c] = i
        queue = deque(t if queue_cities is None else queue_cities)
        queued = [False] * n
        for c in queue:
            queued[c] = True
        clock = self.clock
        full_pass_clean = False
        while True:
            while queue:
                if clock is not None:
                    clock.tick(self.evals)
                    self.evals = 0
                    if clock.expired():
                        return length, False
                a = queue.popleft()
                queued[a] = False
                delta, touched = self._improve_city(a, t, pos, n, D)
                if touched:
                    length += delta
                    full_pass_clean = False
                    for c in touched:
                        if not queued[c]:
                            queued[c] = True
                            queue.append(c)
            if not verify or full_pass_clean:
                if clock is not None:
                    clock.tick(self.evals)
                    self.evals = 0
                return length, True
            # confirm local optimality with one sweep over every city
            full_pass_clean = True
            queue.extend(t)
            for c in t:
                queued[c] = True

    def _tiny(self, t, length):
        # n < 5: every tour is 2-opt optimal except crossings on n=4, handled by brute force
        if len(t) == 4:
            D = self.D
            best = min(([t[0], t[1], t[2], t[3]], [t[0], t[2], t[1], t[3]], [t[0], t[1], t[3], t[2]]),
                       key=lambda o: sum(D[o[i]][o[(i + 1) % 4]] for i in range(4)))
            self.evals += 3
            new = sum(D[best[i]][best[(i + 1) % 4]] for i in range(4))
            if new < length - EPS:
                t[:] = best
                return new
        return length

    def _improve_city(self, a, t, pos, n, D):
        neigh = self.neigh
        # 2-opt, successor side: drop (a, an), (c, cn); add (a, c), (an, cn)
        an = t[(pos[a] + 1) % n]
        d1 = D[a][an]
        for c in neigh[a]:
            g = d1 - D[a][c]
            if g <= EPS:
                break
            self.evals += 1
            cn = t[(pos[c] + 1) % n]
            if cn == a:
                continue
            delta = D[an][cn] - D[c][cn] - g
            if delta < -EPS:
                _reverse(t, pos, pos[an], pos[c], n)
                return delta, (a, an, c, cn)
        # 2-opt, predecessor side: drop (ap, a), (cp, c); add (a, c), (ap, cp)
        ap = t[pos[a] - 1]
        d1 = D[ap][a]
        for c in neigh[a]:
            g = d1 - D[a][c]
            if g <= EPS:
                break
            self.evals += 1
            cp = t[pos[c] - 1]
            if cp == a:
                continue
            delta = D[ap][cp] - D[cp][c] - g
            if delta < -EPS:
                _reverse(t, pos, pos[a], pos[cp], n)
                return delta, (a, ap, c, cp)
        # Or-opt: move the segment of length 1..3 that starts (or ends) at a
        for seg_len in (1, 2, 3):
            if n < seg_len + 3:
                break
            for forward in ((True,) if seg_len == 1 else (True, False)):
                if forward:
                    s1 = a
                    s2 = t[(pos[a] + seg_len - 1) % n]
                else:
                    s1 = t[(pos[a] - seg_len + 1) % n]
                    s2 = a
                res = self._try_or_move(s1, s2, seg_len, t, pos, n, D)
                if res is not None:
                    return res
        return 0.0, ()

    def _try_or_move(self, s1, s2, seg_len, t, pos, n, D):
        p = t[pos[s1] - 1]
        nx = t[(pos[s2] + 1) % n]
        removal_gain = D[p][s1] + D[s2][nx] - D[p][nx]
        if removal_gain <= EPS:
            return None
        ps1 = pos[s1]
        in_seg = set(t[(ps1 + i) % n] for i in range(seg_len))
        best = None
        for end in (s1, s2):
            for c in self.neigh[end]:
                if D[end][c] >= removal_gain:
                    break
                if c in in_seg:
                    continue
                cn = t[(pos[c] + 1) % n]
                cp = t[pos[c] - 1]
                for x, y in ((c, cn), (cp, c)):
                    if y == s1 or x == s2:
                        continue
                    self.evals += 1
                    dxy = D[x][y]
                    fwd = D[x][s1] + D[s2][y] - dxy
                    rev = D[x][s2] + D[s1][y] - dxy
                    ins, rev_flag = (fwd, False) if fwd <= rev else (rev, True)
                    delta = ins - removal_gain
                    if delta < -EPS and (best is None or delta < best[0]):
                        best = (delta, x, y, rev_flag)
            if best is not None:
                break
        if best is None:
            return None
        delta, x, y, rev_flag = best
        seg = [t[(ps1 + i) % n] for i in range(seg_len)]
        # rebuild the tour starting right after the segment
        start = (pos[s2] + 1) % n
        rest = [t[(start + i) % n] for i in range(n - seg_len)]
        if rev_flag:
            seg.reverse()
        # (x, y) never touches the segment, so y follows x in ``rest``
        xi = rest.index(x)
        new = rest[: xi + 1] + seg + rest[xi + 1:]
        t[:] = new
        for i, c in enumerate(t):
            pos[c] = i
        return delta, (p, nx, s1, s2, x, y)


def local_search_2opt_oropt(inst: Instance, t: Tour | Sequence[int], nl: NeighborLists | None = None,
                            budget: RunClock | None = None) -> Tour:
    """Run 2-opt + Or-opt to a local optimum or until ``budget`` expires.

    The result is never longer than the input. When the search ends by local
    optimality, a final sweep has confirmed no improving candidate move remains.
    """
    nl = nl or inst.neighbors(8)
    order = list(t.order if isinstance(t, Tour) else t)
    length = t.length if isinstance(t, Tour) and t.length is not None else tour_length(inst, order)
    ls = _LocalSearch(inst.dist_rows, nl, budget)
    length, _ = ls.run(order, length)
    return Tour(tuple(order), length)


def _bridge_cuts(n: int, rng: np.random.Generator) -> tuple[int, int, int]:
    # four segments of length >= 2, uniform over compositions of n
    slack = n - 8
    b1, b2, b3 = sorted(rng.choice(slack + 3, size=3, replace=False).tolist())
    s1, s2, s3 = b1, b2 - b1 - 1, b3 - b2 - 1
    p1 = 2 + s1
    p2 = p1 + 2 + s2
    p3 = p2 + 2 + s3
    return p1, p2, p3


def double_bridge_list(order: list, rng: np.random.Generator, cuts=None) -> list:
    n = len(order)
    if cuts is None:
        r = int(rng.integers(n))
        order = order[r:] + order[:r]
        cuts = _bridge_cuts(n, rng)
    p1, p2, p3 = cuts
    a, b, c, d = order[:p1], order[p1:p2], order[p2:p3], order[p3:]
    return a + d + c + b


def double_bridge(t: Tour | Sequence[int], seed=None, cuts: tuple[int, int, int] | None = None) -> Tour:
    """Non-sequential 4-opt kick.

    The tour is cut into four segments A, B, C, D (each of length >= 2) and
    reconnected as A, D, C, B, which replaces all four boundary edges. With
    explicit ``cuts`` no random rotation is applied; cutting the result at
    ``(|A|, |A|+|D|, |A|+|D|+|C|)`` restores the input.
    """
    order = list(t.order if isinstance(t, Tour) else t)
    n = len(order)
    if n < 8:
        warnings.warn(f"double bridge needs n >= 8, got {n}; tour returned unchanged", stacklevel=2)
        return t if isinstance(t, Tour) else Tour(tuple(order))
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return Tour(tuple(double_bridge_list(order, rng, cuts)))
