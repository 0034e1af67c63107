import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

import oracles
from tspanytime.analysis import significance_matrix, wilcoxon_signed_rank
from tspanytime.analysis.wilcoxon import exact_null_counts, signed_ranks
from tspanytime.errors import InvalidInputError


def test_all_positive_five():
    r = wilcoxon_signed_rank([1, 2, 3, 4, 5], [0] * 5, "greater")
    assert r.statistic == 15 and r.pvalue == 0.03125 and r.method == "exact"


def test_identical_samples_degenerate():
    r = wilcoxon_signed_rank([0.3, 0.5, 1.0], [0.3, 0.5, 1.0])
    assert r.degenerate and r.pvalue == 1.0 and r.n_eff == 0


def test_zero_differences_dropped():
    r = wilcoxon_signed_rank([1, 2, 3, 4, 5, 7, 7], [0, 0, 0, 0, 0, 7, 7], "greater")
    assert r.n_eff == 5 and r.pvalue == 0.03125


def test_null_counts_sum_to_two_power():
    ranks = [1, 2.5, 2.5, 4, 5]
    assert exact_null_counts(ranks).sum() == 2**5


@given(st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=1, max_size=12))
def test_exact_matches_enumeration(pairs):
    x = [a for a, _ in pairs]
    y = [b for _, b in pairs]
    ranks, signs = signed_ranks(x, y)
    for alt in ("greater", "two-sided"):
        r = wilcoxon_signed_rank(x, y, alt, method="exact")
        if r.degenerate:
            continue
        w = float(ranks[signs > 0].sum())
        assert r.pvalue == pytest.approx(oracles.enumerate_signed_rank_p(ranks, w, alt), abs=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_agrees_with_scipy(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(5, 40))
    x, y = rng.normal(0.2, 1, size=k), rng.normal(0, 1, size=k)
    for alt in ("greater", "two-sided"):
        ours = wilcoxon_signed_rank(x, y, alt)
        ref = stats.wilcoxon(x, y, alternative=alt, method="exact" if k <= 25 else "approx", correction=True)
        assert ours.pvalue == pytest.approx(ref.pvalue, abs=1e-9)


def test_exact_vs_normal_k22():
    rng = np.random.default_rng(22)
    x, y = rng.normal(0.3, 1, size=22), rng.normal(0, 1, size=22)
    e = wilcoxon_signed_rank(x, y, method="exact").pvalue
    a = wilcoxon_signed_rank(x, y, method="normal-approximation").pvalue
    assert abs(e - a) <= 0.02


def test_auto_method_switch():
    rng = np.random.default_rng(1)
    assert wilcoxon_signed_rank(rng.normal(size=25), rng.normal(size=25)).method == "exact"
    assert wilcoxon_signed_rank(rng.normal(size=26), rng.normal(size=26)).method == "normal-approximation"


def test_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        wilcoxon_signed_rank([1, 2], [1])
    with pytest.raises(InvalidInputError):
        wilcoxon_signed_rank([1, 2], [1, 3], "sideways")


def test_significance_marks():
    m = significance_matrix({"s": [1.0] * 10, "x": [0.0] * 10})
    assert m == {"s": {"x"}, "x": set()}
    assert significance_matrix({"a": [0.5, 0.2, 1.0], "b": [0.5, 0.2, 1.0]}) == {"a": set(), "b": set()}
    v = {"s": [1.0, 0.9, 0.8, 0.7, 0.6], "x": [0.5] * 5}  # all-positive differences, p = 1/32
    assert significance_matrix(v, 0.05)["s"] == {"x"}
    assert significance_matrix(v, 0.01)["s"] == set()
    assert significance_matrix(v, 0.1, "two-sided") == {"s": {"x"}, "x": set()}
    with pytest.raises(InvalidInputError):
        significance_matrix({"a": [1, 2], "b": [1]})
