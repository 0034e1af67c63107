import json

import pytest

from tspanytime.cli import main
from tspanytime.config import parse_config
from tspanytime.errors import InvalidConfigError
from tspanytime.runner import read_store

BASE = """
generate:
  out_dir: inst
  jobs:
    - {generator: rue, n: 25, count: 1, seed: 3}
plan:
  id: toy
  instances: inst
  solvers:
    ils: {preset: lkh+r}
    ga: {family: ga, crossover: eax, pop_size: 10}
  runs: 3
  cutoff: 5000
  time_mode: evals
analyze:
  alphas: [0.05, 0]
export:
  dir: res
"""


def run(tmp_path, text, *cmds, extra=()):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(text)
    codes = [main([c, "--config", str(cfg), "--out", str(tmp_path / "out"), *extra]) for c in cmds]
    return codes


def test_full_pipeline(tmp_path, capsys):
    assert run(tmp_path, BASE, "generate", "solve", "analyze", "validate") == [0, 0, 0, 0]
    out = capsys.readouterr().out
    assert out.count("status=completed") == 6
    assert all("=" in tok for line in out.splitlines() for tok in line.split())
    res = tmp_path / "out" / "res"
    assert len((res / "toy.jsonl").read_text().splitlines()) == 6
    cfg_hash = parse_config(BASE).hash
    for name in ("success_table.csv", "curves.csv", "hitting_times.csv"):
        assert (res / name).read_text().startswith(f"# config_hash={cfg_hash} version=")
    assert json.loads((tmp_path / "out" / "inst" / "manifest.json").read_text())["config_hash"] == cfg_hash
    assert json.loads((res / "registry.json").read_text())["rue-n25-s3"]["source"] == "best-known"


def test_generate_is_byte_identical(tmp_path):
    run(tmp_path, BASE.replace("count: 1", "count: 5").replace("n: 25", "n: 100"), "generate")
    inst = tmp_path / "out" / "inst"
    first = {p.name: p.read_bytes() for p in inst.iterdir()}
    assert len([n for n in first if n.endswith(".tsp")]) == 5
    run(tmp_path, BASE.replace("count: 1", "count: 5").replace("n: 25", "n: 100"), "generate")
    assert {p.name: p.read_bytes() for p in inst.iterdir()} == first


def test_unknown_generator_writes_nothing(tmp_path, capsys):
    text = BASE.replace("- {generator: rue", "- {generator: rue, n: 10, seed: 1}\n    - {generator: voronoi")
    assert run(tmp_path, text, "generate") == [2]
    assert not (tmp_path / "out").exists()
    assert "voronoi" in capsys.readouterr().out


def test_resume_after_interrupt(tmp_path):
    run(tmp_path, BASE, "generate", "solve")
    store = tmp_path / "out" / "res" / "toy.jsonl"
    lines = store.read_text().splitlines()
    store.write_text("\n".join(lines[:2]) + "\n")
    assert run(tmp_path, BASE, "solve") == [0]
    assert store.read_text().splitlines() == lines
    assert len({r.key for r in read_store(store)}) == 6


def test_evals_rerun_identical(tmp_path):
    run(tmp_path, BASE.replace("time_mode: evals", "time_mode: wall"), "generate")
    run(tmp_path, BASE, "solve", extra=["--time-mode", "evals"])
    store = tmp_path / "out" / "res" / "toy.jsonl"
    first = store.read_bytes()
    store.unlink()
    run(tmp_path, BASE, "solve", extra=["--time-mode", "evals"])
    assert store.read_bytes() == first


def test_analyze_is_pure(tmp_path):
    run(tmp_path, BASE, "generate", "solve", "analyze")
    res = tmp_path / "out" / "res"
    before = {n: (res / n).read_bytes() for n in ("success_table.csv", "curves.csv", "hitting_times.csv")}
    run(tmp_path, BASE, "analyze")
    assert {n: (res / n).read_bytes() for n in before} == before


@pytest.mark.parametrize("text, code", [
    (BASE.replace("alphas: [0.05, 0]", "alphas: []"), 2),
    (BASE.replace("runs: 3", "runs: 3\n  colour: red"), 2),
    (BASE.replace("preset: lkh+r", "preset: concorde"), 2),
    (BASE.replace("time_mode: evals", "time_mode: cpu"), 2),
    ("plan: [unclosed", 2),
])
def test_config_errors_exit_2(tmp_path, text, code, capsys):
    assert run(tmp_path, text, "analyze") == [code]
    assert "error=config" in capsys.readouterr().out


def test_missing_instances_exit_2(tmp_path):
    assert run(tmp_path, BASE, "solve") == [2]


def test_missing_store_exit_3(tmp_path):
    run(tmp_path, BASE, "generate")
    assert run(tmp_path, BASE, "analyze") == [3]


def test_bad_flags(tmp_path):
    assert run(tmp_path, BASE, "solve", extra=["--jobs", "0"]) == [2]
    assert main(["frobnicate"]) == 2
    assert run(tmp_path, BASE, "solve", extra=["--time-mode", "cpu"]) == [2]


def test_registry_and_validate(tmp_path, capsys):
    run(tmp_path, BASE, "generate", "solve")
    capsys.readouterr()
    assert run(tmp_path, BASE, "registry") == [0]
    assert capsys.readouterr().out == ""
    cfg = tmp_path / "c.yaml"
    assert main(["registry", "update", "--config", str(cfg), "--out", str(tmp_path / "out")]) == 0
    assert "instance=rue-n25-s3" in capsys.readouterr().out
    store = tmp_path / "out" / "res" / "toy.jsonl"
    store.write_text(store.read_text() + "not json\n")
    assert run(tmp_path, BASE, "validate") == [3]
    assert "problem=unparseable" in capsys.readouterr().out


def test_env_output_root(tmp_path, monkeypatch):
    monkeypatch.setenv("TSPANYTIME_OUT", str(tmp_path / "envroot"))
    cfg = tmp_path / "c.yaml"
    cfg.write_text(BASE)
    assert main(["generate", "--config", str(cfg)]) == 0
    assert (tmp_path / "envroot" / "inst" / "manifest.json").exists()


def test_seed_override_changes_runs(tmp_path):
    run(tmp_path, BASE, "generate", "solve")
    store = tmp_path / "out" / "res" / "toy.jsonl"
    seeds = {r.seed for r in read_store(store)}
    store.unlink()
    run(tmp_path, BASE, "solve", extra=["--seed", "99"])
    assert seeds.isdisjoint({r.seed for r in read_store(store)})


def test_parse_config_details():
    cfg = parse_config(BASE)
    assert cfg.plan.solvers["ga"].pop_size == 10 and cfg.plan.solvers["ils"].crossover == "ipt"
    assert cfg.analyze.alphas == [0.05, 0.0] and cfg.export_dir == "res"
    assert len(cfg.hash) == 16 and cfg.hash == parse_config(BASE + "\n# comment\n").hash
    with pytest.raises(InvalidConfigError, match="line"):
        parse_config("plan:\n  id: [x\n")
    with pytest.raises(InvalidConfigError, match="plan.solvers.bad"):
        parse_config(BASE.replace("pop_size: 10", "pop_size: 1").replace("ga:", "bad:"))
