"""Success tables, hitting-time tables and quantile curve data, with CSV export."""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..errors import InvalidInputError, MissingReferenceError
from .estimators import (QuantileCurve, estimate_success_probability, max_first_hitting_time,
                         quantile_curves, success_curve)
from .wilcoxon import significance_matrix

DEFAULT_ALPHAS = (0.5, 0.1, 0.05, 0.01, 5e-3, 1e-3, 5e-4, 1e-4, 5e-5, 1e-5, 0.0)


@dataclass(frozen=True)
class SuccessRow:
    group: str
    n: int
    alpha: float
    T: int
    solver: str
    max_gap: float
    mean: float
    std: float
    marks: tuple[str, ...]
    p_hat: tuple[float, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class HittingRow:
    group: str
    n: int
    solver: str
    alpha: float
    max_fht: int
    censored: bool


def runs_by_key(records) -> dict[tuple[str, str], list]:
    """Completed trajectories keyed by (instance, solver), in run order."""
    out = defaultdict(list)
    for r in sorted((r for r in records if r.status == "completed"), key=lambda r: r.key):
        out[(r.instance, r.solver)].append(r.trajectory)
    return dict(out)


def _cells(info: Mapping[str, tuple[str, int]], instance_ids: Iterable[str]):
    cells = defaultdict(list)
    for iid in sorted(instance_ids):
        group, n = info[iid]
        cells[(group, n)].append(iid)
    return dict(sorted(cells.items()))


def _check_refs(registry, ids):
    missing = [i for i in ids if registry.length_or_none(i) is None]
    if missing:
        raise MissingReferenceError(missing)


def success_table(records, info: Mapping[str, tuple[str, int]], registry, alphas: Sequence[float],
                  Ts: Sequence[int], level: float = 0.05, alternative: str = "greater") -> list[SuccessRow]:
    """One row per (group, n, alpha, T, solver).

    ``mean``/``std`` summarize the per-instance success probabilities (sample
    standard deviation, 0 for a single instance). ``max_gap`` is the worst
    relative excess ``best_within_T / ref - 1`` over all instances and runs,
    infinite when some run had no incumbent by T.
    """
    runs = runs_by_key(records)
    instance_ids = sorted({i for i, _ in runs})
    solvers = sorted({s for _, s in runs})
    _check_refs(registry, instance_ids)
    rows = []
    for (group, n), ids in _cells(info, instance_ids).items():
        for alpha in alphas:
            for T in Ts:
                vectors = {}
                gaps = {}
                for s in solvers:
                    ps, worst = [], 0.0
                    for iid in ids:
                        trajs = runs.get((iid, s))
                        if not trajs:
                            raise InvalidInputError(f"no runs of {s} on {iid}")
                        ref = registry.length(iid)
                        ps.append(estimate_success_probability(trajs, alpha, T, ref))
                        for t in trajs:
                            best = t.best_within(T)
                            worst = max(worst, math.inf if best is None else best / ref - 1.0)
                    vectors[s] = ps
                    gaps[s] = worst
                marks = significance_matrix(vectors, level, alternative) if len(ids) > 0 else {}
                for s in solvers:
                    v = np.asarray(vectors[s])
                    std = float(v.std(ddof=1)) if len(v) > 1 else 0.0
                    rows.append(SuccessRow(group, n, alpha, int(T), s, gaps[s], float(v.mean()), std,
                                           tuple(sorted(marks.get(s, ()))), tuple(vectors[s])))
    return rows


def hitting_time_table(records, info, registry, alphas: Sequence[float]) -> list[HittingRow]:
    runs = runs_by_key(records)
    instance_ids = sorted({i for i, _ in runs})
    solvers = sorted({s for _, s in runs})
    _check_refs(registry, instance_ids)
    rows = []
    for (group, n), ids in _cells(info, instance_ids).items():
        for s in solvers:
            trajs = [t for iid in ids for t in runs.get((iid, s), [])]
            for alpha in alphas:
                h = max_first_hitting_time(trajs, alpha, registry)
                rows.append(HittingRow(group, n, s, alpha, h.value, h.censored))
    return rows


def curve_table(records, registry, alphas: Sequence[float], grid: Sequence[int]) -> list[QuantileCurve]:
    runs = runs_by_key(records)
    instance_ids = sorted({i for i, _ in runs})
    solvers = sorted({s for _, s in runs})
    _check_refs(registry, instance_ids)
    out = []
    for s in solvers:
        for alpha in alphas:
            curves = [success_curve(runs[(iid, s)], alpha, grid, registry.length(iid))
                      for iid in instance_ids if (iid, s) in runs]
            out.append(quantile_curves(curves, grid, s, alpha))
    return out


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return repr(x)
    return str(x)


def _csv(header: Sequence[str], rows: Iterable[Sequence], banner: str | None) -> str:
    buf = io.StringIO()
    if banner:
        buf.write(f"# {banner}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def success_csv(rows: Sequence[SuccessRow], banner: str | None = None) -> str:
    return _csv(("group", "n", "alpha", "T", "solver", "max_gap", "mean", "std", "marks"),
                ((r.group, r.n, r.alpha, r.T, r.solver, r.max_gap, r.mean, r.std, ";".join(r.marks))
                 for r in rows), banner)


def curves_csv(curves: Sequence[QuantileCurve], banner: str | None = None) -> str:
    def rows():
        for c in curves:
            for t, a, b, d in zip(c.grid, c.q25, c.q50, c.q75):
                yield (c.solver, c.alpha, int(t), float(a), float(b), float(d))

    return _csv(("solver", "alpha", "t_ms", "q25", "q50", "q75"), rows(), banner)


def hitting_csv(rows: Sequence[HittingRow], banner: str | None = None) -> str:
    return _csv(("group", "n", "solver", "alpha", "max_fht_ms", "censored"),
                ((r.group, r.n, r.solver, r.alpha, r.max_fht, r.censored) for r in rows), banner)


def read_csv(path) -> list[dict]:
    lines = [l for l in Path(path).read_text().splitlines() if not l.startswith("#")]
    return list(csv.DictReader(lines))
