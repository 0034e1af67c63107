import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from tspanytime.core import Instance
from tspanytime.errors import InvalidConfigError, InvalidInputError
from tspanytime.generators import (DEFAULT_OPS, MUTATION_KINDS, ClusterSpec, GeneratorConfig, GeneratorJob,
                                   MutationOp, apply_mutation, cluster_sizes, gen_morphed, gen_netgen, gen_rue,
                                   gen_tspgen, latin_hypercube, min_cost_matching, run_job)


def test_rue_bounds_and_determinism():
    a = gen_rue(GeneratorConfig(11, 500))
    assert a.coords.min() >= 0 and a.coords.max() <= 1e6
    assert np.array_equal(a.coords, gen_rue(GeneratorConfig(11, 500)).coords)
    assert not a.has_duplicates()
    assert np.all(a.coords == np.rint(a.coords))


def test_rue_mean_near_center():
    c = gen_rue(GeneratorConfig(5, 1000)).coords
    assert abs(c[:, 0].mean() - 5e5) < 0.05 * 5e5


def test_rue_small_bound_still_distinct():
    inst = gen_rue(GeneratorConfig(0, 40, bound=10))
    assert not inst.has_duplicates()


def test_config_validation():
    with pytest.raises(InvalidConfigError):
        GeneratorConfig(0, 2)
    with pytest.raises(InvalidConfigError):
        GeneratorConfig(-1, 10)
    with pytest.raises(InvalidConfigError):
        ClusterSpec(n_clusters=1)
    with pytest.raises(InvalidConfigError):
        MutationOp("swirl")
    with pytest.raises(InvalidConfigError):
        MutationOp("grid", rate=0)


def test_cluster_sizes():
    assert cluster_sizes(500, 5) == [100] * 5
    assert cluster_sizes(10, 3) == [4, 3, 3]


@given(st.integers(2, 400), st.integers(2, 20))
def test_cluster_sizes_balanced(n, nc):
    s = cluster_sizes(n, nc)
    assert sum(s) == n and max(s) - min(s) <= 1 and len(s) == nc


def test_latin_hypercube_strata():
    x = latin_hypercube(7, 2, np.random.default_rng(0))
    for d in range(2):
        assert sorted(np.floor(x[:, d] * 7).astype(int).tolist()) == list(range(7))


def test_netgen_blocks_follow_centers():
    inst = gen_netgen(GeneratorConfig(3, 500), ClusterSpec(5))
    assert inst.meta["cluster_sizes"] == [100] * 5
    centers = np.array(inst.meta["centers"])
    start = 0
    for c, size in zip(centers, inst.meta["cluster_sizes"]):
        block = inst.coords[start:start + size]
        assert np.linalg.norm(block.mean(axis=0) - c) < 0.01e6
        start += size
    assert inst.coords.min() >= 0 and inst.coords.max() <= 1e6


def _two_means(x, iters=50):
    c = x[[x[:, 0].argmin(), x[:, 0].argmax()]].copy()
    for _ in range(iters):
        lab = np.argmin(((x[:, None] - c[None]) ** 2).sum(-1), axis=1)
        c = np.array([x[lab == j].mean(axis=0) for j in range(2)])
    return lab


def test_netgen_two_clusters_recoverable():
    inst = gen_netgen(GeneratorConfig(9, 500), ClusterSpec(2))
    truth = np.repeat([0, 1], inst.meta["cluster_sizes"])
    lab = _two_means(inst.coords)
    purity = max((lab == truth).mean(), (lab != truth).mean())
    assert purity >= 0.95


def test_morph_examples():
    a = Instance("a", [(0, 0), (100, 100), (50, 0)], meta={"bound": 1000})
    b = Instance("b", [(10, 20), (110, 120), (60, 20)])
    mid = gen_morphed(a, b, 0.5)
    assert (5, 10) in set(map(tuple, mid.coords.tolist()))
    assert np.array_equal(gen_morphed(a, b, 1.0).coords, a.coords)
    with pytest.raises(InvalidInputError):
        gen_morphed(a, b, 1.5)
    with pytest.raises(InvalidInputError):
        gen_morphed(a, Instance("c", [(0, 0), (1, 1), (2, 2), (3, 3)]))


def test_matching_examples():
    assignment, cost = min_cost_matching([(0, 0), (10, 0)], [(9, 0), (1, 0)])
    assert assignment.tolist() == [1, 0] and cost == 2
    pts = np.random.default_rng(1).uniform(size=(6, 2))
    assignment, cost = min_cost_matching(pts, pts)
    assert cost == 0 and assignment.tolist() == list(range(6))


@pytest.mark.parametrize("seed", range(5))
def test_matching_equals_exhaustive(seed):
    rng = np.random.default_rng(seed)
    A, B = rng.uniform(0, 100, size=(8, 2)), rng.uniform(0, 100, size=(8, 2))
    assert min_cost_matching(A, B)[1] == pytest.approx(oracles.brute_force_matching(A, B), abs=1e-9)


def test_grid_op_forms_lattice():
    rng = np.random.default_rng(2)
    coords = rng.uniform(0, 1000, size=(90, 2))
    new, idx = apply_mutation(coords, MutationOp("grid", rate=0.1), rng, 1000)
    assert len(idx) == 9
    pts = new[idx]
    xs, ys = np.unique(pts[:, 0]), np.unique(pts[:, 1])
    assert len(xs) == 3 and len(ys) == 3
    lo, hi = coords[idx].min(axis=0), coords[idx].max(axis=0)
    assert np.all(pts >= lo - 1e-9) and np.all(pts <= hi + 1e-9)
    untouched = np.setdiff1d(np.arange(90), idx)
    assert np.array_equal(new[untouched], coords[untouched])


def test_tspgen_minimal_perturbation():
    cfg = GeneratorConfig(4, 60)
    base = gen_rue(cfg)
    inst = gen_tspgen(cfg, [MutationOp("cluster", rate=1e-6)], iterations=1)
    changed = (inst.coords != base.coords).any(axis=1).sum()
    assert changed <= 1
    with pytest.raises(InvalidConfigError):
        gen_tspgen(cfg, iterations=0)


@given(st.integers(0, 2**32), st.integers(3, 80), st.sampled_from(MUTATION_KINDS), st.integers(1, 5))
def test_tspgen_contract(seed, n, kind, iterations):
    inst = gen_tspgen(GeneratorConfig(seed, n, bound=1e4), [MutationOp(kind, rate=0.3)], iterations)
    assert inst.n == n and not inst.has_duplicates()
    assert inst.coords.min() >= 0 and inst.coords.max() <= 1e4


def test_run_job():
    insts = run_job(GeneratorJob("netgen", 30, 3, 7, params={"n_clusters": [2, 3]}))
    assert [i.meta["n_clusters"] for i in insts] == [2, 3, 2]
    assert len({i.id for i in insts}) == 3
    assert run_job(GeneratorJob("morphed", 20, 1, 0))[0].group == "morphed"
    assert run_job(GeneratorJob("tspgen", 20, 1, 0, params={"ops": ["grid"], "iterations": 2}))[0].n == 20
    with pytest.raises(InvalidConfigError):
        run_job(GeneratorJob("rue", 20, 1, 0, params={"x": 1}))
    with pytest.raises(InvalidConfigError):
        run_job(GeneratorJob("voronoi", 20))
    assert len(DEFAULT_OPS) == len(MUTATION_KINDS)
