"""Incumbent events, run clocks and recorders."""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator

from ..errors import InvalidConfigError, MonotonicityViolation

TIME_MODES = ("wall", "evals")


@dataclass(frozen=True)
class IncumbentEvent:
    elapsed: int  # ms in wall mode, evaluation count in evals mode
    evals: int
    length: float


class RunClock:
    """Budget bookkeeping for one run.

    In ``wall`` mode elapsed time is wall-clock milliseconds since start. In
    ``evals`` mode the clock is virtual: elapsed equals the number of tour
    length evaluations performed so far, which makes runs reproducible.
    """

    def __init__(self, cutoff: int, mode: str = "wall"):
        if mode not in TIME_MODES:
            raise InvalidConfigError(f"unknown time mode {mode!r}")
        if not cutoff > 0:
            raise InvalidConfigError(f"cutoff must be positive, got {cutoff}")
        self.cutoff = int(cutoff)
        self.mode = mode
        self.evals = 0
        self._t0 = time.perf_counter()

    def tick(self, k: int = 1):
        self.evals += k

    def elapsed(self) -> int:
        if self.mode == "evals":
            return self.evals
        return int((time.perf_counter() - self._t0) * 1000)

    def expired(self) -> bool:
        return self.elapsed() >= self.cutoff

    def overshoot(self) -> int:
        return max(0, self.elapsed() - self.cutoff)


class Recorder:
    """Collects the incumbent trajectory of a single run and enforces monotonicity.

    An optional ``sink`` receives every accepted event; it is called under a
    lock so one sink can be shared by recorders of concurrent runs.
    """

    def __init__(self, sink: Callable[[IncumbentEvent], None] | None = None, lock=None):
        self.events: list[IncumbentEvent] = []
        self.sink = sink
        self._lock = lock or threading.Lock()

    @property
    def best(self) -> float:
        return self.events[-1].length if self.events else float("inf")

    def record(self, event: IncumbentEvent):
        if self.events:
            last = self.events[-1]
            if not event.length < last.length:
                raise MonotonicityViolation(f"length {event.length} does not improve on {last.length}")
            if event.elapsed < last.elapsed or event.evals < last.evals:
                raise MonotonicityViolation("event time runs backwards")
        self.events.append(event)
        if self.sink is not None:
            with self._lock:
                self.sink(event)


def record_incumbent(recorder: Recorder, event: IncumbentEvent) -> bool:
    recorder.record(event)
    return True


class EventLog:
    """Append-only JSON-lines sink; each event is flushed as it arrives."""

    def __init__(self, path):
        self.path = Path(path)
        self._fh = open(self.path, "a", encoding="utf-8")

    def __call__(self, event: IncumbentEvent):
        self._fh.write(json.dumps({"t_ms": event.elapsed, "evals": event.evals,
                                   "len": _num(event.length)}, separators=(",", ":")) + "\n")
        self._fh.flush()

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def replay_events(path) -> Iterator[IncumbentEvent]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            d = json.loads(line)
            yield IncumbentEvent(d["t_ms"], d["evals"], d["len"])


def _num(x: float):
    if isinstance(x, float) and x.is_integer():
        return int(x)
    return x


@dataclass
class Trajectory:
    instance_id: str
    solver_id: str
    seed: int
    cutoff: int
    events: list[IncumbentEvent] = field(default_factory=list)
    time_mode: str = "wall"
    overshoot: int = 0

    @property
    def final_length(self) -> float:
        return self.events[-1].length

    def best_within(self, T: float) -> float | None:
        best = None
        for e in self.events:
            if e.elapsed > T:
                break
            best = e.length
        return best
