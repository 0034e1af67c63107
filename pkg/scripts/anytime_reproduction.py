"""Scaled anytime reproduction: 30 rue + 30 netgen instances at n=200.

Runs both solver families (m=5, 30 s wall cutoff), then derives the
maximum-first-hitting-time table and the median success curves and freezes
the summary into tests/fixtures/anytime_n200.json. The store is resumable,
so an interrupted run continues where it stopped.

    python3 scripts/anytime_reproduction.py --out runs/anytime
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from tspanytime.analysis import (DEFAULT_ALPHAS, ReferenceRegistry, curve_table, hitting_time_table,
                                 log_time_grid)
from tspanytime.generators import GeneratorConfig, gen_netgen, gen_rue
from tspanytime.runner import ExperimentPlan, read_store, run_experiment
from tspanytime.solvers import PRESETS

FIXTURE = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "anytime_n200.json"


def instances(n: int, count: int):
    out = [gen_rue(GeneratorConfig(seed, n)) for seed in range(count)]
    out += [gen_netgen(GeneratorConfig(seed, n)) for seed in range(count)]
    return out


def summarize(records, insts, cutoff):
    info = {i.id: (i.group, i.n) for i in insts}
    reg = ReferenceRegistry()
    for r in records:
        if r.status == "completed" and r.final_len is not None:
            reg.observe(r.instance, r.final_len, r.plan)
    hits = hitting_time_table(records, info, reg, DEFAULT_ALPHAS)
    grid = log_time_grid(cutoff)
    curves = curve_table(records, reg, [0.05], grid)
    return {
        "cutoff_ms": cutoff,
        "alphas": list(DEFAULT_ALPHAS),
        "hitting": [{"group": h.group, "n": h.n, "solver": h.solver, "alpha": h.alpha, "max_fht_ms": h.max_fht,
                     "censored": h.censored} for h in hits],
        "median_curves": [{"solver": c.solver, "alpha": c.alpha, "t_ms": list(c.grid), "q50": list(c.q50)}
                          for c in curves],
        "crashed": sum(r.status != "completed" for r in records),
        "records": len(records),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs/anytime")
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--count", type=int, default=30)
    ap.add_argument("--runs", type=int, default=5)
    ap.add_argument("--cutoff", type=int, default=30_000)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--fixture", default=str(FIXTURE))
    args = ap.parse_args(argv)

    insts = instances(args.n, args.count)
    solvers = {"lkh+r": PRESETS["lkh+r"], "eax+r": PRESETS["eax+r"]}
    plan = ExperimentPlan("anytime-n200", insts, solvers, args.runs, args.cutoff, "wall", 0, args.jobs)
    store = Path(args.out) / "anytime-n200.jsonl"
    run_experiment(plan, store, on_record=lambda r: print(
        f"instance={r.instance} solver={r.solver} run={r.run} status={r.status} final_len={r.final_len}",
        flush=True))
    summary = summarize(read_store(store), insts, args.cutoff)
    Path(args.fixture).parent.mkdir(parents=True, exist_ok=True)
    Path(args.fixture).write_text(json.dumps(summary, indent=1) + "\n")
    print(f"event=frozen fixture={args.fixture} records={summary['records']}")


if __name__ == "__main__":
    main()
