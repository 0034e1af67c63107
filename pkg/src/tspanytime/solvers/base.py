from __future__ import annotations

from dataclasses import asdict, dataclass

from ..core import validate_tour
from ..errors import InvalidConfigError
from .trajectory import IncumbentEvent, Recorder, RunClock

FAMILIES = ("ils", "ga")
CROSSOVERS = ("none", "ipt", "eax")


@dataclass(frozen=True)
class SolverConfig:
    """Parameters of one solver variant.

    ``crossover`` means, for ``ils``: ``none`` (independent trials) or ``ipt``
    (trial bests recombined with the run best). For ``ga``: ``eax`` (plain
    EAX) or ``ipt`` (each accepted EAX offspring is further recombined with
    the parent it replaces).
    """

    family: str
    crossover: str = "ipt"
    restart: bool = True
    pop_size: int = 30
    n_children: int = 30
    k: int = 8
    kicks_per_trial: int = 50
    restart_trials: int = 20
    stall_generations: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidConfigError(f"unknown solver family {self.family!r}")
        if self.crossover not in CROSSOVERS:
            raise InvalidConfigError(f"unknown crossover {self.crossover!r}")
        if self.family == "ils" and self.crossover == "eax":
            raise InvalidConfigError("ils supports crossover none or ipt")
        if self.family == "ga" and self.crossover == "none":
            raise InvalidConfigError("ga supports crossover eax or ipt")
        if self.family == "ga" and self.pop_size < 2:
            raise InvalidConfigError("ga needs pop_size >= 2")
        if self.n_children < 1 or self.k < 2:
            raise InvalidConfigError("n_children must be >= 1 and k >= 2")
        if min(self.kicks_per_trial, self.restart_trials, self.stall_generations) < 1:
            raise InvalidConfigError("stagnation thresholds must be >= 1")

    def with_seed(self, seed: int) -> "SolverConfig":
        return SolverConfig(**{**asdict(self), "seed": int(seed)})

    def to_dict(self) -> dict:
        return asdict(self)


class Incumbent:
    """Best-so-far tracker that validates and records every improvement."""

    def __init__(self, inst, clock: RunClock, recorder: Recorder, target: float | None = None):
        self.inst = inst
        self.clock = clock
        self.recorder = recorder
        self.target = target
        self.length = float("inf")
        self.order: tuple[int, ...] | None = None

    @property
    def done(self) -> bool:
        return self.target is not None and self.length <= self.target

    def offer(self, length: float, order) -> bool:
        if not length < self.length:
            return False
        report = validate_tour(self.inst, order)
        if not report.ok:
            raise AssertionError(f"solver produced an invalid tour: {report}")
        self.length = length
        self.order = tuple(order)
        self.recorder.record(IncumbentEvent(self.clock.elapsed(), self.clock.evals, length))
        return True

    def stop(self) -> bool:
        return self.done or self.clock.expired()
