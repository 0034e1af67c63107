"""Command-line entry point: generate, solve, analyze, registry, validate.

Exit codes: 0 success, 1 internal error, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .analysis import (ReferenceRegistry, curve_table, curves_csv, hitting_csv,
                       hitting_time_table, log_time_grid, success_csv, success_table)
from .config import PipelineConfig, load_config
from .errors import InvalidConfigError, InvalidInputError, MissingReferenceError, TspAnytimeError
from .generators import run_job
from .runner import ExperimentPlan, read_store, record_from_json, run_experiment
from .solvers import PRESETS
from .solvers.exact import MAX_EXACT_N, held_karp_exact
from .tsplib import read_tsplib, write_tsplib

EXIT_OK, EXIT_INTERNAL, EXIT_CONFIG, EXIT_DATA = 0, 1, 2, 3

log = logging.getLogger("tspanytime")


class DataError(TspAnytimeError):
    pass


def emit(**kv):
    print(" ".join(f"{k}={v}" for k, v in kv.items()), flush=True)


def _out_root(args) -> Path:
    return Path(args.out or os.environ.get("TSPANYTIME_OUT") or ".")


def _banner(cfg: PipelineConfig) -> str:
    return f"config_hash={cfg.hash} version={__version__}"


def _write_manifest(path: Path, cfg: PipelineConfig, **payload):
    doc = {"config_hash": cfg.hash, "version": __version__, **payload}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _generate_instances(cfg: PipelineConfig, args):
    from .evolve import EvolutionConfig, evolve_instance

    out = []
    for job in cfg.jobs:
        if args.seed is not None:
            job.seed = args.seed
        if job.generator != "evolved":
            out.extend(run_job(job))
            continue
        p = dict(job.params)
        names = (p.pop("solver_a", "lkh+r"), p.pop("solver_b", "eax+r"))
        solvers = []
        for name in names:
            if name not in PRESETS:
                raise InvalidConfigError(f"evolved: unknown solver preset {name!r}")
            solvers.append(PRESETS[name])
        allowed = {"direction", "generations", "pop_size", "penalty", "runs", "cutoff", "time_mode"}
        if set(p) - allowed:
            raise InvalidConfigError(f"evolved: unknown parameters {sorted(set(p) - allowed)}")
        for i in range(job.count):
            ecfg = EvolutionConfig(solvers[0], solvers[1], n=job.n, seed=job.seed + i, bound=job.bound,
                                   names=names, jobs=args.jobs or 1, **p)
            out.append(evolve_instance(ecfg))
    return out


def cmd_generate(cfg: PipelineConfig, args) -> int:
    if not cfg.jobs:
        raise InvalidConfigError("generate: no jobs configured")
    instances = _generate_instances(cfg, args)
    ids = [i.id for i in instances]
    if len(set(ids)) != len(ids):
        raise InvalidConfigError("generate: jobs produce clashing instance ids (use distinct seeds)")
    out_dir = _out_root(args) / cfg.generate_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = []
    for inst in instances:
        path = write_tsplib(inst, out_dir / f"{inst.id}.tsp")
        manifest.append({"id": inst.id, "group": inst.group, "n": inst.n, "seed": inst.meta.get("seed"),
                         "file": path.name})
        emit(event="generated", id=inst.id, group=inst.group, n=inst.n)
    _write_manifest(out_dir / "manifest.json", cfg, instances=manifest)
    return EXIT_OK


def _instance_paths(cfg: PipelineConfig, args) -> list[Path]:
    spec = cfg.plan.instances
    root = _out_root(args)
    if isinstance(spec, str):
        d = Path(spec) if Path(spec).is_absolute() else root / spec
        if not d.is_dir():
            raise InvalidConfigError(f"plan.instances: directory {d} does not exist")
        paths = sorted(d.glob("*.tsp"))
        if not paths:
            raise InvalidConfigError(f"plan.instances: no .tsp files in {d}")
        return paths
    paths = [Path(p) if Path(p).is_absolute() else root / p for p in spec]
    missing = [str(p) for p in paths if not p.exists()]
    if missing:
        raise InvalidConfigError(f"plan.instances: missing file(s) {', '.join(missing)}")
    return paths


def _load_instances(cfg, args):
    try:
        return [read_tsplib(p) for p in _instance_paths(cfg, args)]
    except InvalidInputError as e:
        if isinstance(e, InvalidConfigError):
            raise
        raise InvalidConfigError(f"plan.instances: {e}") from None


def _store_path(cfg: PipelineConfig, args) -> Path:
    return _out_root(args) / cfg.export_dir / f"{cfg.plan.id}.jsonl"


def cmd_solve(cfg: PipelineConfig, args) -> int:
    if cfg.plan is None:
        raise InvalidConfigError("plan: section required for solve")
    p = cfg.plan
    instances = _load_instances(cfg, args)
    targets = {}
    if p.exact_targets:
        for inst in instances:
            if inst.n <= MAX_EXACT_N:
                targets[inst.id] = held_karp_exact(inst)[1]
    plan = ExperimentPlan(p.id, instances, p.solvers, p.runs, p.cutoff, args.time_mode or p.time_mode,
                          args.seed if args.seed is not None else p.base_seed, args.jobs or p.jobs, targets)
    store = _store_path(cfg, args)
    store.parent.mkdir(parents=True, exist_ok=True)
    _write_manifest(store.with_suffix(".meta.json"), cfg, plan=p.id, time_mode=plan.time_mode,
                    cutoff=plan.cutoff, runs=plan.runs, base_seed=plan.base_seed,
                    solvers={k: v.to_dict() for k, v in p.solvers.items()}, instances=[i.id for i in instances])

    def report(rec):
        emit(instance=rec.instance, solver=rec.solver, run=rec.run, status=rec.status,
             final_len=rec.final_len, events=len(rec.events))

    records = run_experiment(plan, store, on_record=report)
    crashed = sum(r.status == "crashed" for r in records)
    emit(event="plan-complete", plan=p.id, records=len(records), crashed=crashed, store=store)
    return EXIT_OK


def build_registry(instances, records, allow_exact: bool, existing=None) -> ReferenceRegistry:
    reg = existing or ReferenceRegistry()
    for inst in instances:
        if allow_exact and inst.n <= MAX_EXACT_N:
            reg.set_exact(inst.id, held_karp_exact(inst)[1])
    for r in records:
        if r.status == "completed" and r.final_len is not None:
            reg.observe(r.instance, r.final_len, r.plan)
    return reg


def cmd_analyze(cfg: PipelineConfig, args) -> int:
    if cfg.analyze is None:
        raise InvalidConfigError("analyze: section required")
    if cfg.plan is None:
        raise InvalidConfigError("plan: section required to locate the trajectory store")
    a = cfg.analyze
    instances = {i.id: i for i in _load_instances(cfg, args)}
    store = _store_path(cfg, args)
    if not store.exists():
        raise DataError(f"no trajectory store at {store}")
    records = [r for r in read_store(store) if r.status == "completed"]
    unknown = sorted({r.instance for r in records} - set(instances))
    if unknown:
        raise DataError(f"store references unknown instances: {', '.join(unknown)}")
    if a.groups:
        records = [r for r in records if instances[r.instance].group in a.groups]
    if not records:
        raise DataError("no completed runs in scope")
    out_dir = _out_root(args) / cfg.export_dir
    reg_path = out_dir / "registry.json"
    existing = ReferenceRegistry.load(reg_path) if reg_path.exists() else None
    scope = [instances[i] for i in sorted({r.instance for r in records})]
    reg = build_registry(scope, records, a.allow_exact, existing)
    cutoff = min(r.cutoff for r in records)
    checkpoints = a.checkpoints or sorted({max(1, cutoff // 100), max(1, cutoff // 10), cutoff})
    if max(checkpoints) > cutoff:
        raise InvalidConfigError(f"analyze.checkpoints: {max(checkpoints)} exceeds the run cutoff {cutoff}")
    info = {iid: (inst.group, inst.n) for iid, inst in instances.items()}
    grid = log_time_grid(cutoff, a.grid_points, a.grid_start)
    banner = _banner(cfg)
    try:
        rows = success_table(records, info, reg, a.alphas, checkpoints, a.level, a.alternative)
        hits = hitting_time_table(records, info, reg, a.alphas)
        curves = curve_table(records, reg, a.curve_alphas or a.alphas, grid)
    except MissingReferenceError as e:
        raise DataError(str(e)) from None
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "success_table.csv").write_text(success_csv(rows, banner))
    (out_dir / "hitting_times.csv").write_text(hitting_csv(hits, banner))
    (out_dir / "curves.csv").write_text(curves_csv(curves, banner))
    reg.save(reg_path)
    emit(event="analyzed", rows=len(rows), curves=len(curves), hitting=len(hits), out=out_dir)
    return EXIT_OK


def cmd_registry(cfg: PipelineConfig, args) -> int:
    out_dir = _out_root(args) / cfg.export_dir
    reg_path = out_dir / "registry.json"
    reg = ReferenceRegistry.load(reg_path) if reg_path.exists() else ReferenceRegistry()
    if args.action == "update":
        if cfg.plan is None:
            raise InvalidConfigError("plan: section required for registry update")
        store = _store_path(cfg, args)
        if not store.exists():
            raise DataError(f"no trajectory store at {store}")
        instances = _load_instances(cfg, args)
        allow_exact = cfg.analyze.allow_exact if cfg.analyze else True
        reg = build_registry(instances, read_store(store), allow_exact, reg)
        out_dir.mkdir(parents=True, exist_ok=True)
        reg.save(reg_path)
    for iid, e in sorted(reg.entries.items()):
        emit(instance=iid, ref=int(e.length) if float(e.length).is_integer() else e.length, source=e.source,
             provenance=",".join(e.provenance) or "-")
    return EXIT_OK


def cmd_validate(cfg: PipelineConfig, args) -> int:
    problems = 0
    if cfg.plan is not None:
        for path in _instance_paths(cfg, args):
            try:
                inst = read_tsplib(path)
                if inst.has_duplicates():
                    emit(file=path.name, problem="duplicate-points")
                    problems += 1
            except InvalidInputError as e:
                emit(file=path.name, problem="unparseable", detail=repr(str(e)))
                problems += 1
        store = _store_path(cfg, args)
        if store.exists():
            problems += _lint_store(store)
    emit(event="validated", problems=problems)
    return EXIT_OK if problems == 0 else EXIT_DATA


def _lint_store(store: Path) -> int:
    problems = 0
    seen = set()
    for lineno, line in enumerate(store.read_text().splitlines(), 1):
        try:
            rec = record_from_json(line)
        except Exception as e:  # report every malformed line
            emit(store=store.name, line=lineno, problem="unparseable", detail=repr(str(e)))
            problems += 1
            continue
        if rec.key in seen:
            emit(store=store.name, line=lineno, problem="duplicate-key")
            problems += 1
        seen.add(rec.key)
        ev = rec.events
        if rec.status == "completed" and not ev:
            emit(store=store.name, line=lineno, problem="empty-trajectory")
            problems += 1
        for a, b in zip(ev, ev[1:]):
            if not (b.length < a.length and b.elapsed >= a.elapsed and b.evals >= a.evals):
                emit(store=store.name, line=lineno, problem="non-monotone")
                problems += 1
                break
    return problems


COMMANDS = {"generate": cmd_generate, "solve": cmd_solve, "analyze": cmd_analyze, "registry": cmd_registry,
            "validate": cmd_validate}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="pipeline YAML document")
    common.add_argument("--jobs", type=int, help="parallel worker processes")
    common.add_argument("--seed", type=int, help="override the base seed")
    common.add_argument("--time-mode", choices=("wall", "evals"), help="override the plan's time mode")
    common.add_argument("--out", help="output root (default $TSPANYTIME_OUT or .)")
    p = argparse.ArgumentParser(prog="tspanytime", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("generate", "solve", "analyze", "validate"):
        sub.add_parser(name, parents=[common])
    reg = sub.add_parser("registry", parents=[common])
    reg.add_argument("action", choices=("show", "update"), nargs="?", default="show")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING, format="level=%(levelname)s logger=%(name)s msg=%(message)s")
    try:
        if args.jobs is not None and args.jobs < 1:
            raise InvalidConfigError("--jobs must be >= 1")
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise InvalidConfigError("--seed must be an unsigned 64-bit integer")
        cfg = load_config(args.config)
        return COMMANDS[args.command](cfg, args)
    except InvalidConfigError as e:
        emit(error="config", detail=repr(str(e)))
        return EXIT_CONFIG
    except (DataError, MissingReferenceError) as e:
        emit(error="data", detail=repr(str(e)))
        return EXIT_DATA
    except KeyboardInterrupt:
        emit(error="interrupted")
        return EXIT_INTERNAL
    except Exception as e:  # last-resort boundary
        log.exception("internal error")
        emit(error="internal", detail=repr(str(e)))
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
