import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from tspanytime.analysis import (DEFAULT_ALPHAS, ReferenceRegistry, aggregate_set_probability, curve_table,
                                 curves_csv, estimate_success_probability, first_hitting_time, hitting_csv,
                                 hitting_time_table, log_time_grid, max_first_hitting_time, par_score,
                                 quantile_curves, reference_optimum, success_csv, success_curve,
                                 success_indicator, success_table)
from tspanytime.analysis.tables import read_csv
from tspanytime.errors import InvalidInputError, MissingReferenceError, OutOfRangeError
from tspanytime.generators import GeneratorConfig, gen_rue
from tspanytime.runner import RunRecord
from tspanytime.solvers import IncumbentEvent, Trajectory, held_karp_exact


def traj(events, cutoff=10_000, iid="i", solver="s"):
    return Trajectory(iid, solver, 0, cutoff, [IncumbentEvent(t, 0, float(x)) for t, x in events])


RUN = traj([(1000, 105), (5000, 100)])


def test_success_indicator_examples():
    assert success_indicator(RUN, 0.05, 2000, 100) == 1
    assert success_indicator(RUN, 0.0, 2000, 100) == 0
    assert success_indicator(RUN, 0.0, 5000, 100) == 1
    with pytest.raises(OutOfRangeError):
        success_indicator(RUN, 0.0, 20_000, 100)
    with pytest.raises(InvalidInputError):
        success_indicator(RUN, 0.0, 1000, 0)


def test_p_hat_examples():
    ok, bad = traj([(0, 100)]), traj([(0, 120)])
    assert estimate_success_probability([ok] * 4 + [bad] * 6, 0.0, 100, 100) == 0.4
    assert estimate_success_probability([ok] * 3, 0.0, 100, 100) == 1.0
    with pytest.raises(InvalidInputError):
        estimate_success_probability([], 0, 0, 1)
    with pytest.raises(InvalidInputError):
        estimate_success_probability([ok, traj([(0, 100)], cutoff=5)], 0, 0, 100)


def test_aggregate_examples():
    assert aggregate_set_probability([1.0, 0.5]) == 0.75
    assert aggregate_set_probability([0.0] * 4) == 0.0
    vals = np.random.default_rng(0).uniform(size=150)
    assert aggregate_set_probability(vals) == pytest.approx(oracles.naive_mean(vals), abs=1e-15)
    with pytest.raises(InvalidInputError):
        aggregate_set_probability([])


def test_first_hitting_time_examples():
    assert first_hitting_time(RUN, 0.05, 100) == 1000
    assert first_hitting_time(RUN, 0.0, 100) == 5000
    assert first_hitting_time(RUN, 1e-6, 100) == 5000
    assert first_hitting_time(RUN, 0.0, 99) is None


def test_max_first_hitting_time_examples():
    runs = [traj([(1000, 100)], iid="a"), traj([(3000, 100)], iid="a"), traj([(2000, 100)], iid="a")]
    h = max_first_hitting_time(runs, 0.0, {"a": 100})
    assert (h.value, h.censored) == (3000, False)
    h = max_first_hitting_time(runs + [traj([(0, 150)], iid="a")], 0.0, {"a": 100})
    assert (h.value, h.censored) == (10_000, True)
    with pytest.raises(MissingReferenceError) as e:
        max_first_hitting_time(runs, 0.0, {})
    assert e.value.instance_ids == ["a"]


def test_max_fht_loose_alpha_is_first_event():
    rng = np.random.default_rng(4)
    for _ in range(50):
        runs = [oracles.random_run(rng, 500, 1000) for _ in range(5)]
        runs = [r for r in runs if r]
        if not runs:
            continue
        trajs = [traj(r, 500) for r in runs]
        assert max_first_hitting_time(trajs, 100.0, {"i": 10}).value == max(r[0][0] for r in runs)


@given(st.lists(st.one_of(st.none(), st.integers(0, 100)), min_size=1, max_size=20), st.integers(1, 10))
def test_par_matches_oracle(times, f):
    assert par_score(times, 100, f) == oracles.naive_par(times, 100, f)


def test_par_examples():
    assert par_score([10, None], 100, 10) == 505
    assert par_score([5, 5, 5], 100) == 5
    assert par_score([None, None], 100, 10) == 1000
    with pytest.raises(InvalidInputError):
        par_score([1], 100, 0.5)


def test_quantile_examples():
    grid = [1, 2, 3]
    single = quantile_curves([[0.0, 0.5, 1.0]], grid)
    assert single.q25 == single.q50 == single.q75 == (0.0, 0.5, 1.0)
    q = quantile_curves([[0, 0, 0], [1, 1, 1]], grid)
    assert q.q50 == (0.5, 0.5, 0.5)


def test_quantiles_match_sort_oracle():
    rng = np.random.default_rng(8)
    grid = list(range(20))
    curves = np.sort(rng.integers(0, 6, size=(30, 20)) / 5, axis=1)
    q = quantile_curves(curves, grid)

    def oracle(col, p):
        s = sorted(col)
        h = (len(s) - 1) * p
        lo = math.floor(h)
        return s[lo] + (h - lo) * (s[min(lo + 1, len(s) - 1)] - s[lo])

    for j in range(20):
        for p, series in ((0.25, q.q25), (0.5, q.q50), (0.75, q.q75)):
            assert series[j] == pytest.approx(oracle(curves[:, j], p), abs=1e-12)


def test_success_curve_and_grid():
    runs = [RUN, traj([(0, 100)]), traj([(0, 200)])]
    grid = [0, 1000, 5000, 10_000]
    assert success_curve(runs, 0.0, grid, 100).tolist() == [1 / 3, 1 / 3, 2 / 3, 2 / 3]
    with pytest.raises(OutOfRangeError):
        success_curve(runs, 0.0, [20_000], 100)
    g = log_time_grid(30_000)
    assert g[0] == 10 and g[-1] == 30_000 and g == sorted(set(g))
    assert len(g) <= 100
    assert len(DEFAULT_ALPHAS) == 11 and DEFAULT_ALPHAS[-1] == 0.0


def test_registry_contract(tmp_path):
    inst = gen_rue(GeneratorConfig(1, 10))
    e = reference_optimum(inst)
    assert e.source == "exact-dp" and e.length == held_karp_exact(inst)[1]
    big = gen_rue(GeneratorConfig(1, 30))
    reg = ReferenceRegistry()
    runs = [traj([(0, x)], iid=big.id) for x in (105, 100, 102)]
    assert reference_optimum(big, runs, registry=reg, plan_id="p").length == 100
    v = reg.version
    assert reg.observe(big.id, 99, "q")
    assert reg.length(big.id) == 99 and reg.is_stale(v)
    assert not reg.observe(big.id, 120)
    assert reg[big.id].provenance == ["p", "q"]
    reg.save(tmp_path / "r.json")
    back = ReferenceRegistry.load(tmp_path / "r.json")
    assert back.length(big.id) == 99
    with pytest.raises(MissingReferenceError):
        reference_optimum(gen_rue(GeneratorConfig(2, 30)), [], registry=reg)


# tables ----------------------------------------------------------------------

def rec(iid, solver, run, events, cutoff=1000):
    return RunRecord("p", iid, solver, run, run, cutoff, "completed",
                     [IncumbentEvent(t, t, float(x)) for t, x in events])


TOY = [
    rec("a", "A", 0, [(0, 120), (100, 100)]),
    rec("a", "A", 1, [(0, 110), (600, 100)]),
    rec("a", "B", 0, [(0, 130), (900, 104)]),
    rec("a", "B", 1, [(0, 140)]),
    rec("b", "A", 0, [(0, 52), (50, 50)]),
    rec("b", "A", 1, [(0, 50)]),
    rec("b", "B", 0, [(0, 60), (400, 51)]),
    rec("b", "B", 1, [(0, 55), (200, 50)]),
]
INFO = {"a": ("rue", 10), "b": ("rue", 10)}


def toy_registry():
    reg = ReferenceRegistry()
    for r in TOY:
        reg.observe(r.instance, r.final_len, "p")
    return reg


def test_success_table_hand_values():
    rows = {(r.alpha, r.T, r.solver): r for r in success_table(TOY, INFO, toy_registry(), [0.0, 0.05], [500, 1000])}
    # alpha 0, T 500: A hits on a (run 0) and b (both runs); B only on b (run 1)
    r = rows[(0.0, 500, "A")]
    assert r.p_hat == (0.5, 1.0) and r.mean == 0.75 and r.std == pytest.approx(math.sqrt(0.125))
    assert r.max_gap == pytest.approx(0.1)
    assert rows[(0.0, 500, "B")].p_hat == (0.0, 0.5)
    assert rows[(0.0, 1000, "B")].p_hat == (0.0, 0.5)
    assert rows[(0.05, 1000, "B")].p_hat == (0.5, 1.0)
    assert rows[(0.0, 1000, "A")].max_gap == 0.0
    assert rows[(0.0, 500, "B")].max_gap == pytest.approx(0.4)


def test_success_table_recompute_from_raw():
    reg = toy_registry()
    for row in success_table(TOY, INFO, reg, DEFAULT_ALPHAS, [10, 100, 1000]):
        recount = []
        for iid in ("a", "b"):
            runs = [[(e.elapsed, e.length) for e in r.events] for r in TOY if r.instance == iid and r.solver == row.solver]
            recount.append(oracles.naive_p_hat(runs, 1000, row.alpha, row.T, reg.length(iid)))
        assert list(row.p_hat) == recount
        assert row.mean == pytest.approx(np.mean(recount))


def test_hitting_and_curve_tables():
    reg = toy_registry()
    hits = {(h.solver, h.alpha): h for h in hitting_time_table(TOY, INFO, reg, [0.0, 0.05])}
    assert (hits[("A", 0.0)].max_fht, hits[("A", 0.0)].censored) == (600, False)
    assert (hits[("B", 0.0)].max_fht, hits[("B", 0.0)].censored) == (1000, True)
    assert hits[("B", 0.05)].max_fht == 1000
    curves = curve_table(TOY, reg, [0.0], [100, 1000])
    a = next(c for c in curves if c.solver == "A")
    assert a.q50 == (0.75, 1.0)


def test_missing_reference_raises():
    with pytest.raises(MissingReferenceError) as e:
        success_table(TOY, INFO, ReferenceRegistry(), [0.0], [100])
    assert e.value.instance_ids == ["a", "b"]


def test_csv_writers(tmp_path):
    reg = toy_registry()
    rows = success_table(TOY, INFO, reg, [0.0], [1000])
    text = success_csv(rows, "config_hash=x version=0")
    assert text.splitlines()[0] == "# config_hash=x version=0"
    assert text.splitlines()[1] == "group,n,alpha,T,solver,max_gap,mean,std,marks"
    (tmp_path / "s.csv").write_text(text)
    assert read_csv(tmp_path / "s.csv")[0]["solver"] == "A"
    assert hitting_csv(hitting_time_table(TOY, INFO, reg, [0.0])).splitlines()[0] == \
        "group,n,solver,alpha,max_fht_ms,censored"
    assert curves_csv(curve_table(TOY, reg, [0.0], [10])).splitlines()[0] == "solver,alpha,t_ms,q25,q50,q75"
