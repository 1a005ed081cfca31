import math

import pytest
from hypothesis import given, settings, strategies as st

from clusterforge.ups import UpsConfig, UpsDesignError, design_ups, ups_catalogue


def unit(cap, cost, idx=0, runtime=10.0, eff=0.95, size_u=6, weight=50.0):
    return UpsConfig(f"u{idx}", float(cap), float(runtime), float(cost), eff, size_u, float(weight), idx)


def oracle(load, cat, backup=None):
    best = None
    for u in cat:
        if backup is not None and u.runtime_min < backup:
            continue
        n = math.ceil(load / u.capacity_kw)
        key = (n * u.cost, n, u.origin_index)
        best = key if best is None or key < best else best
    return best


def test_159_kw_on_40_kw_units():
    d = design_ups(159, catalogue=[unit(40, 15000)])
    assert d.count == 4 and d.delivered_capacity_kw == 160


def test_one_kw_needs_one_unit():
    assert design_ups(1, catalogue=[unit(40, 15000)]).count == 1


def test_fixture_catalogue_picks_four_40kw(ups_units):
    d = design_ups(159, None, ups_units)
    assert d.unit.capacity_kw == 40 and d.count == 4 and d.unit.runtime_min == 8
    assert d.totals["cost"] == 4 * 20000 and d.efficiency == 0.95


def test_backup_time_filters(ups_units):
    d = design_ups(159, 20, ups_units)
    assert d.unit.runtime_min >= 20
    with pytest.raises(UpsDesignError, match="no UPS offers"):
        design_ups(159, 60, ups_units)


def test_three_units_100kw_matches_oracle():
    cat = [unit(20, 5000, 0), unit(30, 8000, 1), unit(50, 14000, 2)]
    d = design_ups(100, catalogue=cat)
    assert (d.totals["cost"], d.count, d.unit.origin_index) == oracle(100, cat)


def test_efficiency_default_when_missing():
    from clusterforge.graph import Configuration
    c = Configuration({"capacity_kw": 10.0, "cost": 1.0, "size_u": 2.0, "weight": 3.0}, ("x",), 0)
    assert ups_catalogue([c])[0].power_overhead == 0.95


def test_bad_load():
    with pytest.raises(UpsDesignError):
        design_ups(0, catalogue=[unit(40, 1)])
    with pytest.raises(UpsDesignError):
        design_ups(10, catalogue=[])


_cat = st.lists(st.tuples(st.integers(5, 80), st.integers(1, 50), st.integers(0, 30)), min_size=1, max_size=8)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.1, 2000), _cat, st.randoms())
def test_oracle_capacity_and_shuffle(load, spec, rnd):
    cat = [unit(c, k * 1000, i, runtime=r) for i, (c, k, r) in enumerate(spec)]
    d = design_ups(load, catalogue=cat)
    assert d.delivered_capacity_kw >= load
    assert (d.totals["cost"], d.count, d.unit.origin_index) == oracle(load, cat)
    shuffled = list(cat)
    rnd.shuffle(shuffled)
    assert design_ups(load, catalogue=shuffled) == d


@given(st.floats(0.1, 1000), st.floats(0.1, 1000), _cat)
def test_cost_non_decreasing_in_load(a, b, spec):
    cat = [unit(c, k * 1000, i) for i, (c, k, _) in enumerate(spec)]
    lo, hi = sorted((a, b))
    assert design_ups(lo, catalogue=cat).totals["cost"] <= design_ups(hi, catalogue=cat).totals["cost"]
