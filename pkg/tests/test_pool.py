import math

import pytest
from hypothesis import given, strategies as st

from clusterforge.graph import Configuration, load_configs
from clusterforge.pool import (
    CandidatePool, PoolError, apply_constraint, define_metric, delete, rank_and_trim, select_best, set_metric,
    update_metrics,
)

from conftest import BLADE_FILES, db


@pytest.fixture(scope="module")
def node_pool():
    return CandidatePool(tuple(load_configs(db(*BLADE_FILES))))


def pool_of(values, name="v"):
    return CandidatePool(tuple(Configuration({name: float(v)}, (f"p:{i}",), i) for i, v in enumerate(values)))


def test_infiniband_constraint(node_pool):
    ib = apply_constraint(node_pool, "'InfiniBand' in network_tech")
    assert len(ib) == 28
    assert all("InfiniBand" in c["network_tech"] for c in ib)


def test_tautology_keeps_everything(node_pool):
    assert apply_constraint(node_pool, "1 < 2").configurations == node_pool.configurations


def test_impossible_constraint_warns(node_pool):
    out = apply_constraint(node_pool, "node_cost < 0")
    assert len(out) == 0
    assert any("removed every configuration" in w for w in out.warnings)


def test_missing_metric_fails_constraint_with_warning():
    p = CandidatePool((Configuration({"a": 1.0}, ("x",), 0), Configuration({}, ("y",), 1)))
    out = apply_constraint(p, "a > 0")
    assert [c.origin_index for c in out] == [0]
    assert len(out.warnings) == 1


def test_non_boolean_constraint_is_an_error(node_pool):
    with pytest.raises(PoolError):
        apply_constraint(node_pool, "node_cost + 1")
    with pytest.raises(PoolError):
        apply_constraint(node_pool, "x = 1")


def test_define_ratio_and_node_count(node_pool):
    p = define_metric(node_pool, "node_cost_to_peak_performance = node_cost / node_peak_performance")
    for c in p:
        assert c["node_cost_to_peak_performance"] == c["node_cost"] / c["node_peak_performance"]
    one = pool_of([448], "node_peak_performance")
    assert define_metric(one, "nodes = ceil(1000000 / node_peak_performance)").configurations[0]["nodes"] == 2233


def test_define_constant_text_and_zero(node_pool):
    p = define_metric(define_metric(node_pool, "network_vendor='hp-blade'"), "x = 0")
    assert all(c["network_vendor"] == "hp-blade" and c["x"] == 0 for c in p)


def test_define_failure_names_configuration():
    p = CandidatePool((Configuration({"a": 1.0}, ("x",), 0), Configuration({}, ("y",), 7)))
    with pytest.raises(PoolError, match="configuration 7"):
        define_metric(p, "b = a * 2")


def test_select_best_argmin_and_ties():
    assert select_best(pool_of([5.2, 4.8, 6.0]), "v").selected == {1}
    assert select_best(pool_of([4.8, 4.8]), "v").selected == {0}
    assert select_best(pool_of([5.2, 4.8, 6.0]), "v", "max").selected == {2}


def test_select_best_errors():
    with pytest.raises(PoolError):
        select_best(CandidatePool(), "v")
    with pytest.raises(PoolError):
        select_best(pool_of([1]), "w")


def test_best_node_is_dual_ten_core(node_pool):
    p = apply_constraint(node_pool, "'InfiniBand' in network_tech")
    p = define_metric(p, "r = node_cost / node_peak_performance")
    best = delete(select_best(p, "r"))
    (c,) = best.configurations
    assert c["cpu_model"] == "Intel Xeon E5-2680 v2"
    assert c["cores_per_node"] == 20 and c["cpu_count"] == 2
    assert c["node_peak_performance"] == 448 and c["node_power"] == 651


def test_delete(node_pool):
    p = select_best(define_metric(node_pool, "r = node_cost"), "r")
    assert len(delete(p)) == 1
    assert len(delete(delete(p))) == 1
    with pytest.raises(PoolError):
        delete(node_pool)


def test_update_metrics_refreshes_dependants():
    p = pool_of([448], "node_peak_performance")
    p = set_metric(p, "nodes", 224)
    p = define_metric(p, "total_peak = nodes * node_peak_performance")
    p = set_metric(p, "nodes", 2233)
    assert p.configurations[0]["total_peak"] == 224 * 448
    assert update_metrics(p).configurations[0]["total_peak"] == 1_000_384


def test_update_metrics_chain_and_empty_registry():
    p = pool_of([1])
    assert update_metrics(p) == p
    p = define_metric(define_metric(p, "a = 1"), "b = a + 1")
    assert update_metrics(p).configurations[0]["b"] == 2


def test_rank_and_trim(node_pool):
    p = define_metric(node_pool, "r = node_cost / node_peak_performance")
    assert len(rank_and_trim(p, "r", 0.2)) == 12
    assert rank_and_trim(p, "r", 1.0).configurations == p.configurations
    small = pool_of([5, 1, 4, 2, 3])
    assert [c["v"] for c in rank_and_trim(small, "v", 0.4)] == [1, 2]
    with pytest.raises(PoolError):
        rank_and_trim(CandidatePool(), "v", 0.5)
    with pytest.raises(PoolError):
        rank_and_trim(small, "v", 0)


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=20), st.integers(1, 9), st.integers(-100, 100))
def test_select_best_affine_invariance(values, a, b):
    p = pool_of(values)
    q = define_metric(p, f"w = {a} * v + {b}")
    assert select_best(p, "v").selected == select_best(q, "w").selected


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=20), st.randoms())
def test_constraint_is_pointwise(values, rnd):
    p = pool_of(values)
    shuffled = list(p.configurations)
    rnd.shuffle(shuffled)
    q = CandidatePool(tuple(shuffled))
    a = {c.origin_index for c in apply_constraint(p, "v > 0")}
    b = {c.origin_index for c in apply_constraint(q, "v > 0")}
    assert a == b


@given(st.lists(st.integers(0, 9), min_size=1, max_size=30), st.floats(0.01, 1.0))
def test_rank_and_trim_matches_sort_oracle(values, frac):
    p = pool_of(values)
    kept = rank_and_trim(p, "v", frac)
    assert len(kept) >= math.ceil(frac * len(values) - 1e-9)
    order = sorted(range(len(values)), key=lambda i: (values[i], i))[:len(kept)]
    assert [c.origin_index for c in kept] == sorted(order)


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=20))
def test_delete_after_select_is_singleton(values):
    assert len(delete(select_best(pool_of(values), "v"))) == 1


def test_update_metrics_idempotent(node_pool):
    p = define_metric(node_pool, "r = node_cost / node_peak_performance")
    once = update_metrics(p)
    assert update_metrics(once).configurations == once.configurations
