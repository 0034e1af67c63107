"""Experiment execution: m seeded runs per (instance, solver) pair, persisted as JSON lines."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import platform
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator

from .core import Instance
from .errors import InvalidConfigError, InvalidInputError
from .solvers import SolverConfig, solve
from .solvers.trajectory import TIME_MODES, IncumbentEvent, Recorder, Trajectory, record_incumbent
from .tsplib import read_tsplib

log = logging.getLogger(__name__)

STATUSES = ("completed", "crashed")


@dataclass
class ExperimentPlan:
    """What to run. ``cutoff`` is in ms (wall mode) or evaluations (evals mode)."""

    plan_id: str
    instances: list
    solvers: dict[str, SolverConfig]
    runs: int = 10
    cutoff: int = 3_600_000
    time_mode: str = "wall"
    base_seed: int = 0
    jobs: int = 1
    targets: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.runs < 1:
            raise InvalidConfigError("runs per pair must be >= 1")
        if not self.cutoff > 0:
            raise InvalidConfigError("cutoff must be positive")
        if self.time_mode not in TIME_MODES:
            raise InvalidConfigError(f"unknown time mode {self.time_mode!r}")
        if len(set(self.solvers)) != len(self.solvers):
            raise InvalidConfigError("solver ids must be unique")
        if self.jobs < 1:
            raise InvalidConfigError("jobs must be >= 1")


@dataclass
class RunRecord:
    plan: str
    instance: str
    solver: str
    run: int
    seed: int
    cutoff: int
    status: str
    events: list[IncumbentEvent]
    time_mode: str = "wall"
    overshoot: int = 0
    error: str | None = None
    host: dict = field(default_factory=dict, compare=False)

    @property
    def key(self) -> tuple[str, str, int]:
        return (self.instance, self.solver, self.run)

    @property
    def final_len(self) -> float | None:
        return self.events[-1].length if self.events else None

    @property
    def trajectory(self) -> Trajectory:
        return Trajectory(self.instance, self.solver, self.seed, self.cutoff, list(self.events),
                          self.time_mode, self.overshoot)


def derive_seed(base_seed: int, instance_id: str, solver_id: str, run: int) -> int:
    """Stable 64-bit seed for one run key."""
    payload = json.dumps([int(base_seed), instance_id, solver_id, int(run)], separators=(",", ":"))
    return int.from_bytes(hashlib.blake2b(payload.encode(), digest_size=8).digest(), "big")


def _num(x):
    if isinstance(x, float) and x.is_integer():
        return int(x)
    return x


def record_to_json(rec: RunRecord) -> str:
    d = {
        "plan": rec.plan, "instance": rec.instance, "solver": rec.solver, "run": rec.run,
        "seed": rec.seed, "cutoff_ms": rec.cutoff, "status": rec.status,
        "events": [{"t_ms": e.elapsed, "evals": e.evals, "len": _num(e.length)} for e in rec.events],
        "final_len": _num(rec.final_len) if rec.final_len is not None else None,
        "time_mode": rec.time_mode, "overshoot": rec.overshoot,
    }
    if rec.error is not None:
        d["error"] = rec.error
    return json.dumps(d, separators=(",", ":"))


def record_from_json(line: str) -> RunRecord:
    d = json.loads(line)
    if d["status"] not in STATUSES:
        raise InvalidInputError(f"unknown status {d['status']!r}")
    events = [IncumbentEvent(e["t_ms"], e["evals"], e["len"]) for e in d["events"]]
    return RunRecord(d["plan"], d["instance"], d["solver"], d["run"], d["seed"], d["cutoff_ms"], d["status"],
                     events, d.get("time_mode", "wall"), d.get("overshoot", 0), d.get("error"))


def read_store(path) -> list[RunRecord]:
    path = Path(path)
    if not path.exists():
        return []
    return [record_from_json(line) for line in path.read_text().splitlines() if line.strip()]


def _repair_store(path: Path) -> list[RunRecord]:
    """Load a store, dropping a torn trailing line left by an interrupted writer."""
    if not path.exists():
        return []
    lines = path.read_text().splitlines()
    records = []
    good = []
    for i, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            records.append(record_from_json(line))
            good.append(line)
        except (json.JSONDecodeError, KeyError):
            if i != len(lines) - 1:
                raise
            log.warning("dropping torn last line of %s", path)
    if len(good) != len([l for l in lines if l.strip()]):
        path.write_text("".join(l + "\n" for l in good))
    return records


def load_instances(items: Iterable) -> list[Instance]:
    out = []
    for item in items:
        if isinstance(item, Instance):
            out.append(item)
        else:
            try:
                out.append(read_tsplib(item))
            except (OSError, ValueError) as e:
                raise InvalidInputError(f"cannot load instance {item}: {e}") from e
    ids = [i.id for i in out]
    if len(set(ids)) != len(ids):
        raise InvalidInputError("instance ids must be unique within a plan")
    return out


def _host() -> dict:
    return {"node": platform.node(), "python": platform.python_version(), "pid": os.getpid()}


def _execute(task) -> RunRecord:
    plan_id, inst, solver_id, cfg, run, seed, cutoff, time_mode, target = task
    try:
        recorder = Recorder()
        traj = solve(inst, cfg.with_seed(seed), cutoff, recorder, time_mode=time_mode, target=target,
                     solver_id=solver_id)
        return RunRecord(plan_id, inst.id, solver_id, run, seed, cutoff, "completed", traj.events,
                         time_mode, traj.overshoot, None, _host())
    except Exception:  # crash isolation at run granularity
        return RunRecord(plan_id, inst.id, solver_id, run, seed, cutoff, "crashed", [], time_mode, 0,
                         traceback.format_exc(limit=5), _host())


def plan_tasks(plan: ExperimentPlan, instances: list[Instance], skip: set) -> list[tuple]:
    tasks = []
    for inst in instances:
        for solver_id, cfg in plan.solvers.items():
            for run in range(plan.runs):
                if (inst.id, solver_id, run) in skip:
                    continue
                seed = derive_seed(plan.base_seed, inst.id, solver_id, run)
                tasks.append((plan.plan_id, inst, solver_id, cfg, run, seed, plan.cutoff, plan.time_mode,
                              plan.targets.get(inst.id)))
    return tasks


def run_experiment(plan: ExperimentPlan, store_path, on_record: Callable[[RunRecord], None] | None = None
                   ) -> list[RunRecord]:
    """Execute every missing (instance, solver, run) triple of ``plan``.

    Records already in ``store_path`` are kept and skipped, so an interrupted
    plan resumes where it stopped. New records are appended in task order,
    independent of ``plan.jobs``.
    """
    instances = load_instances(plan.instances)
    store_path = Path(store_path)
    store_path.parent.mkdir(parents=True, exist_ok=True)
    existing = _repair_store(store_path)
    done = {r.key for r in existing}
    tasks = plan_tasks(plan, instances, done)
    records = list(existing)
    with open(store_path, "a", encoding="utf-8") as fh:
        for rec in _iter_results(tasks, plan.jobs):
            fh.write(record_to_json(rec) + "\n")
            fh.flush()
            records.append(rec)
            if on_record is not None:
                on_record(rec)
    return records


def _iter_results(tasks, jobs) -> Iterator[RunRecord]:
    if jobs == 1 or len(tasks) <= 1:
        for task in tasks:
            yield _execute(task)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        yield from pool.map(_execute, tasks, chunksize=1)


__all__ = ["ExperimentPlan", "RunRecord", "derive_seed", "run_experiment", "read_store", "record_to_json",
           "record_from_json", "record_incumbent", "load_instances", "plan_tasks"]
