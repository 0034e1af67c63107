"""Strict pipeline configuration: one YAML document with generate/plan/analyze/export sections."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .errors import InvalidConfigError
from .generators import GeneratorJob
from .solvers import PRESETS, SolverConfig
from .solvers.trajectory import TIME_MODES

GENERATORS = ("rue", "netgen", "morphed", "tspgen", "evolved")

_SECTIONS = {"generate", "plan", "analyze", "export"}
_GENERATE = {"out_dir", "jobs"}
_JOB = {"generator", "n", "count", "seed", "bound", "params"}
_PLAN = {"id", "instances", "solvers", "runs", "cutoff", "time_mode", "base_seed", "jobs", "exact_targets"}
_ANALYZE = {"alphas", "checkpoints", "time_grid", "groups", "allow_exact", "level", "alternative", "curve_alphas"}
_TIME_GRID = {"points", "start"}
_EXPORT = {"dir"}
_SOLVER = set(SolverConfig.__dataclass_fields__) | {"preset"}


@dataclass
class PlanSection:
    id: str
    instances: Any
    solvers: dict[str, SolverConfig]
    runs: int = 10
    cutoff: int = 3_600_000
    time_mode: str = "wall"
    base_seed: int = 0
    jobs: int = 1
    exact_targets: bool = False


@dataclass
class AnalyzeSection:
    alphas: list[float]
    checkpoints: list[int] | None = None
    grid_points: int = 100
    grid_start: int = 10
    groups: list[str] | None = None
    allow_exact: bool = True
    level: float = 0.05
    alternative: str = "greater"
    curve_alphas: list[float] | None = None


@dataclass
class PipelineConfig:
    raw: dict
    generate_dir: str = "instances"
    jobs: list[GeneratorJob] = field(default_factory=list)
    plan: PlanSection | None = None
    analyze: AnalyzeSection | None = None
    export_dir: str = "results"

    @property
    def hash(self) -> str:
        canon = json.dumps(self.raw, sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _keys(d, allowed, where):
    if not isinstance(d, dict):
        raise InvalidConfigError(f"{where}: expected a mapping")
    unknown = sorted(set(d) - allowed)
    if unknown:
        raise InvalidConfigError(f"{where}: unknown key(s) {', '.join(unknown)}")


def _int(v, where, minimum=None):
    if isinstance(v, bool) or not isinstance(v, int):
        raise InvalidConfigError(f"{where}: expected an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise InvalidConfigError(f"{where}: must be >= {minimum}, got {v}")
    return v


def _solver(spec, where) -> SolverConfig:
    _keys(spec, _SOLVER, where)
    spec = dict(spec)
    preset = spec.pop("preset", None)
    if preset is not None:
        if preset not in PRESETS:
            raise InvalidConfigError(f"{where}.preset: unknown preset {preset!r} (known: {', '.join(PRESETS)})")
        spec = {**PRESETS[preset].to_dict(), **spec}
    if "family" not in spec:
        raise InvalidConfigError(f"{where}: needs 'family' or 'preset'")
    try:
        return SolverConfig(**spec)
    except (InvalidConfigError, TypeError) as e:
        raise InvalidConfigError(f"{where}: {e}") from None


def parse_config(text: str) -> PipelineConfig:
    try:
        raw = yaml.safe_load(text) or {}
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        loc = f"line {mark.line + 1}, column {mark.column + 1}: " if mark else ""
        raise InvalidConfigError(f"{loc}{getattr(e, 'problem', e)}") from None
    _keys(raw, _SECTIONS, "config")
    cfg = PipelineConfig(raw)

    gen = raw.get("generate")
    if gen is not None:
        _keys(gen, _GENERATE, "generate")
        cfg.generate_dir = str(gen.get("out_dir", "instances"))
        for i, job in enumerate(gen.get("jobs", [])):
            where = f"generate.jobs[{i}]"
            _keys(job, _JOB, where)
            if job.get("generator") not in GENERATORS:
                raise InvalidConfigError(f"{where}.generator: unknown generator {job.get('generator')!r}")
            cfg.jobs.append(GeneratorJob(job["generator"], _int(job.get("n"), f"{where}.n", 3),
                                         _int(job.get("count", 1), f"{where}.count", 1),
                                         _int(job.get("seed", 0), f"{where}.seed", 0),
                                         float(job.get("bound", 1e6)), dict(job.get("params") or {})))

    plan = raw.get("plan")
    if plan is not None:
        _keys(plan, _PLAN, "plan")
        for req in ("id", "instances", "solvers"):
            if req not in plan:
                raise InvalidConfigError(f"plan.{req}: required")
        if not isinstance(plan["solvers"], dict) or not plan["solvers"]:
            raise InvalidConfigError("plan.solvers: expected a non-empty mapping of id -> solver")
        solvers = {str(sid): _solver(spec, f"plan.solvers.{sid}") for sid, spec in plan["solvers"].items()}
        mode = plan.get("time_mode", "wall")
        if mode not in TIME_MODES:
            raise InvalidConfigError(f"plan.time_mode: expected one of {TIME_MODES}, got {mode!r}")
        cfg.plan = PlanSection(str(plan["id"]), plan["instances"], solvers,
                               _int(plan.get("runs", 10), "plan.runs", 1),
                               _int(plan.get("cutoff", 3_600_000), "plan.cutoff", 1), mode,
                               _int(plan.get("base_seed", 0), "plan.base_seed", 0),
                               _int(plan.get("jobs", 1), "plan.jobs", 1), bool(plan.get("exact_targets", False)))

    an = raw.get("analyze")
    if an is not None:
        _keys(an, _ANALYZE, "analyze")
        alphas = an.get("alphas")
        if not isinstance(alphas, list) or not alphas:
            raise InvalidConfigError("analyze.alphas: expected a non-empty list")
        if any(not isinstance(a, (int, float)) or a < 0 for a in alphas):
            raise InvalidConfigError("analyze.alphas: values must be nonnegative numbers")
        grid = an.get("time_grid", {}) or {}
        _keys(grid, _TIME_GRID, "analyze.time_grid")
        checkpoints = an.get("checkpoints")
        if checkpoints is not None:
            checkpoints = [_int(t, "analyze.checkpoints", 1) for t in checkpoints]
        alternative = an.get("alternative", "greater")
        if alternative not in ("greater", "two-sided"):
            raise InvalidConfigError(f"analyze.alternative: expected greater or two-sided, got {alternative!r}")
        cfg.analyze = AnalyzeSection([float(a) for a in alphas], checkpoints,
                                     _int(grid.get("points", 100), "analyze.time_grid.points", 2),
                                     _int(grid.get("start", 10), "analyze.time_grid.start", 1),
                                     an.get("groups"), bool(an.get("allow_exact", True)),
                                     float(an.get("level", 0.05)), alternative,
                                     [float(a) for a in an["curve_alphas"]] if an.get("curve_alphas") else None)

    exp = raw.get("export")
    if exp is not None:
        _keys(exp, _EXPORT, "export")
        cfg.export_dir = str(exp.get("dir", "results"))
    return cfg


def load_config(path) -> PipelineConfig:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InvalidConfigError(f"cannot read config {path}: {e}") from None
    return parse_config(text)
