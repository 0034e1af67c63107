"""Wilcoxon signed-rank test: exact null distribution for small samples, normal approximation otherwise."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import rankdata

from ..errors import InvalidInputError

EXACT_MAX = 25
ALTERNATIVES = ("two-sided", "greater")


@dataclass(frozen=True)
class WilcoxonResult:
    statistic: float
    pvalue: float
    n_eff: int
    method: str
    degenerate: bool = False
    zero_method: str = "wilcox"


def signed_ranks(x, y) -> tuple[np.ndarray, np.ndarray]:
    """Average ranks of |x - y| over the nonzero differences, and the signs."""
    d = np.asarray(x, dtype=np.float64) - np.asarray(y, dtype=np.float64)
    d = d[d != 0]
    return rankdata(np.abs(d), method="average"), np.sign(d)


def exact_null_counts(ranks: Sequence[float]) -> np.ndarray:
    """Number of sign assignments giving each value of 2*W.

    Ranks are averages, so doubling makes every rank integral; the table is
    the coefficient list of prod_i (1 + z^(2 r_i)) and sums to 2^k.
    """
    doubled = [int(round(2 * r)) for r in ranks]
    counts = np.zeros(sum(doubled) + 1, dtype=np.int64)
    counts[0] = 1
    for r in doubled:
        counts[r:] = counts[r:] + counts[:-r]
    return counts


def _exact_p(ranks, w, alternative):
    counts = exact_null_counts(ranks)
    total = float(counts.sum())
    w2 = int(round(2 * w))
    upper = counts[w2:].sum() / total
    if alternative == "greater":
        return float(upper)
    lower = counts[: w2 + 1].sum() / total
    return float(min(1.0, 2 * min(upper, lower)))


def _normal_p(ranks, w, alternative):
    k = len(ranks)
    mean = k * (k + 1) / 4
    _, tie_counts = np.unique(ranks, return_counts=True)
    var = k * (k + 1) * (2 * k + 1) / 24 - float(((tie_counts ** 3) - tie_counts).sum()) / 48
    sd = math.sqrt(var)
    if alternative == "greater":
        z = (w - mean - 0.5) / sd
        return 0.5 * math.erfc(z / math.sqrt(2))
    z = (abs(w - mean) - 0.5) / sd
    return min(1.0, math.erfc(max(z, 0.0) / math.sqrt(2)))


def wilcoxon_signed_rank(x, y, alternative: str = "two-sided", method: str = "auto") -> WilcoxonResult:
    """Paired signed-rank test of ``x`` against ``y``.

    Zero differences are dropped; tied magnitudes get average ranks.
    ``W`` is the rank sum of positive differences, ``greater`` tests whether
    ``x`` tends to exceed ``y``. ``method="auto"`` is exact up to 25 nonzero
    pairs and a tie- and continuity-corrected normal approximation beyond.
    """
    if alternative not in ALTERNATIVES:
        raise InvalidInputError(f"unknown alternative {alternative!r}")
    if len(x) != len(y) or len(x) < 1:
        raise InvalidInputError("need two paired samples of equal, positive length")
    ranks, signs = signed_ranks(x, y)
    k = len(ranks)
    if k == 0:
        return WilcoxonResult(0.0, 1.0, 0, "exact", degenerate=True)
    w = float(ranks[signs > 0].sum())
    if method == "auto":
        method = "exact" if k <= EXACT_MAX else "normal-approximation"
    if method == "exact":
        p = _exact_p(ranks, w, alternative)
    elif method == "normal-approximation":
        p = _normal_p(ranks, w, alternative)
    else:
        raise InvalidInputError(f"unknown method {method!r}")
    return WilcoxonResult(w, float(min(max(p, 0.0), 1.0)), k, method)


def significance_matrix(vectors: dict[str, Sequence[float]], level: float = 0.05,
                        alternative: str = "greater") -> dict[str, set[str]]:
    """For each solver, the set of solvers it beats at ``level`` (one-sided by default)."""
    lengths = {len(v) for v in vectors.values()}
    if len(lengths) > 1:
        raise InvalidInputError("all solvers must be evaluated on the same instances")
    marks = {s: set() for s in vectors}
    for s in vectors:
        for other in vectors:
            if s == other:
                continue
            res = wilcoxon_signed_rank(vectors[s], vectors[other], alternative)
            if alternative == "two-sided":
                # direction from the rank sums: s must be the larger one
                k = res.n_eff
                if res.degenerate or res.statistic <= k * (k + 1) / 4:
                    continue
            if not res.degenerate and res.pvalue < level:
                marks[s].add(other)
    return marks
