"""Success-probability, hitting-time and PAR estimators over incumbent trajectories."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..core import within_factor
from ..errors import InvalidInputError, MissingReferenceError, OutOfRangeError
from ..solvers.trajectory import Trajectory


def success_indicator(traj: Trajectory, alpha: float, T: float, ref: float) -> int:
    """1 if the run held a ``(1 + alpha) * ref`` tour at some elapsed time <= T."""
    if not ref > 0:
        raise InvalidInputError(f"reference length must be positive, got {ref}")
    if T > traj.cutoff:
        raise OutOfRangeError(f"T={T} exceeds the run cutoff {traj.cutoff}")
    for e in traj.events:
        if e.elapsed > T:
            break
        if within_factor(e.length, ref, alpha):
            return 1
    return 0


def estimate_success_probability(runs: Sequence[Trajectory], alpha: float, T: float, ref: float) -> float:
    if not runs:
        raise InvalidInputError("no runs")
    if len({r.cutoff for r in runs}) != 1:
        raise InvalidInputError("runs have different cutoffs")
    return sum(success_indicator(r, alpha, T, ref) for r in runs) / len(runs)


def aggregate_set_probability(per_instance: Sequence[float]) -> float:
    if len(per_instance) == 0:
        raise InvalidInputError("no instances")
    return float(sum(per_instance) / len(per_instance))


def first_hitting_time(traj: Trajectory, alpha: float, ref: float) -> int | None:
    if not ref > 0:
        raise InvalidInputError(f"reference length must be positive, got {ref}")
    for e in traj.events:
        if e.elapsed > traj.cutoff:
            break
        if within_factor(e.length, ref, alpha):
            return e.elapsed
    return None


@dataclass(frozen=True)
class HittingTime:
    value: int
    censored: bool


def max_first_hitting_time(trajs: Sequence[Trajectory], alpha: float, registry) -> HittingTime:
    """Worst first hitting time over all runs; a run that never hits counts as its cutoff, flagged censored.

    ``registry`` maps instance id to reference length (a ``ReferenceRegistry``
    or a plain dict).
    """
    if not trajs:
        raise InvalidInputError("no runs")
    missing = {t.instance_id for t in trajs if _ref(registry, t.instance_id) is None}
    if missing:
        raise MissingReferenceError(missing)
    worst, censored = 0, False
    for t in trajs:
        hit = first_hitting_time(t, alpha, _ref(registry, t.instance_id))
        if hit is None:
            censored = True
            worst = max(worst, t.cutoff)
        else:
            worst = max(worst, hit)
    return HittingTime(worst, censored)


def _ref(registry, instance_id):
    if hasattr(registry, "length_or_none"):
        return registry.length_or_none(instance_id)
    return registry.get(instance_id)


def par_score(times: Sequence[float | None], T: float, f: float = 10.0) -> float:
    """Penalized average runtime: failed runs (``None``) count as ``f * T``."""
    if len(times) == 0:
        raise InvalidInputError("no runs")
    if f < 1 or not T > 0:
        raise InvalidInputError("need f >= 1 and T > 0")
    return sum(f * T if t is None else t for t in times) / len(times)


def success_curve(runs: Sequence[Trajectory], alpha: float, grid: Sequence[float], ref: float) -> np.ndarray:
    """p-hat at every grid time, from first hitting times (one pass per run)."""
    if not runs:
        raise InvalidInputError("no runs")
    grid = np.asarray(grid, dtype=np.float64)
    if grid.size and grid[-1] > min(r.cutoff for r in runs):
        raise OutOfRangeError("time grid extends past the run cutoff")
    hits = np.array([np.inf if (h := first_hitting_time(r, alpha, ref)) is None else h for r in runs])
    return (hits[None, :] <= grid[:, None]).mean(axis=1)


@dataclass(frozen=True)
class QuantileCurve:
    solver: str
    alpha: float
    grid: tuple
    q25: tuple
    q50: tuple
    q75: tuple


def quantile_curves(curves, grid: Sequence[float], solver: str = "", alpha: float = 0.0,
                    quantiles=(0.25, 0.5, 0.75)) -> QuantileCurve:
    """Pointwise quantiles across instances of per-instance success curves.

    ``curves`` has one row per instance, one column per grid time. Quantiles
    use linear interpolation between order statistics.
    """
    arr = np.atleast_2d(np.asarray(curves, dtype=np.float64))
    if arr.size == 0 or arr.shape[0] < 1:
        raise InvalidInputError("need at least one instance curve")
    if arr.shape[1] != len(grid):
        raise InvalidInputError(f"curve length {arr.shape[1]} does not match grid length {len(grid)}")
    q = np.quantile(arr, quantiles, axis=0, method="linear")
    return QuantileCurve(solver, alpha, tuple(grid), tuple(q[0]), tuple(q[1]), tuple(q[2]))


def log_time_grid(cutoff: int, points: int = 100, start: int = 10) -> list[int]:
    """Ascending integer grid, log-spaced from ``start`` to ``cutoff`` inclusive."""
    start = max(1, min(start, cutoff))
    raw = np.geomspace(start, cutoff, points)
    grid = sorted(set(int(round(v)) for v in raw) | {int(cutoff)})
    return [g for g in grid if g <= cutoff]
