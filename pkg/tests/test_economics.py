import pytest
from hypothesis import given, strategies as st

from clusterforge import data_path
from clusterforge.design import Design, Group
from clusterforge.dsl import run_file
from clusterforge.economics import (
    CostParams, EconomicsError, capex, opex, power_draw_kw, summarize, tomato_equivalent, total_power_kw,
    total_weight_kg,
)
from clusterforge.graph import Configuration
from clusterforge.layout import (
    build_compute_blocks, core_devices, place, plan_floor, route_cables, ups_devices,
)
from clusterforge.network import SwitchConfig, design_fattree
from clusterforge.ups import UpsConfig, design_ups


def test_opex_reference_values():
    assert opex(159, 8) == 1_534_482
    assert opex(1600, 72) == 15_364_800
    assert opex(0, 0) == 0
    assert abs(opex(159, 8) - 1.6e6) / 1.6e6 < 0.05
    assert abs(opex(1600, 72) - 15.7e6) / 15.7e6 < 0.03


def test_tomato():
    assert tomato_equivalent(159) == 63
    assert tomato_equivalent(0) == 0
    assert tomato_equivalent(1600) == 640
    assert abs(640 - 630) / 630 < 0.02


def test_power_draw():
    assert power_draw_kw(224 * 651, 7000) == pytest.approx(160.867, abs=1e-3)
    assert power_draw_kw(224 * 651, 0, 1.0) == pytest.approx(145.824)
    with pytest.raises(EconomicsError):
        power_draw_kw(1, 1, 0)


def test_cost_params_validation():
    with pytest.raises(EconomicsError):
        CostParams(lifetime_years=0)
    with pytest.raises(EconomicsError):
        CostParams(duty_cycle=1.5)
    with pytest.raises(EconomicsError):
        CostParams(electricity_usd_per_kwh=-1)


@given(st.floats(0, 1e4), st.integers(0, 500), st.integers(1, 5))
def test_opex_is_linear(power, racks, k):
    base = CostParams()
    assert opex(power * k, 0) == pytest.approx(k * opex(power, 0), rel=1e-9, abs=0.01 * k)
    assert opex(0, racks * k) == pytest.approx(k * opex(0, racks))
    longer = CostParams(lifetime_years=base.lifetime_years * k)
    assert opex(power, racks, longer) == pytest.approx(k * opex(power, racks), rel=1e-9, abs=0.01 * k)


def test_duty_cycle_halves_energy_only():
    half = CostParams(duty_cycle=0.5)
    energy_full = opex(100, 0)
    assert opex(100, 0, half) * 2 == energy_full
    assert opex(100, 5, half) - opex(100, 0, half) == opex(0, 5)


def _small_design(node_cost=10_000.0, switch_cost=0.0, ups_cost=0.0):
    node = Configuration({"node_cost": node_cost, "node_power": 651.0, "node_weight": 12.0,
                          "nodes_per_enclosure": 16.0, "enclosure_size_u": 10.0,
                          "node_model": "blade", "cpu_model": "cpu", "cpu_frequency": 2.8,
                          "node_peak_performance": 448.0}, ("x",), 0)
    sw = SwitchConfig("sw", 32, switch_cost, 250.0, 1, 8.0, frozenset({"InfiniBand"}), None, 0)
    net = design_fattree(224, [sw])
    ups = design_ups(160, None, [UpsConfig("u", 40, 8, ups_cost, 0.95, 9, 80, 0)])
    g = Group("compute", node, 224, net, ups, build_compute_blocks(node, 224, net),
              core_devices(net), ups_devices(ups))
    d = Design()
    d.add_group(g)
    return d


def _complete(d):
    g = d.groups[0]
    d.placement = place(g.blocks, g.cores, g.ups_units)
    d.floor = plan_floor(d.placement.rack_count)
    d.cables = route_cables(d.placement, d.floor, g.network, g.blocks, g.cores)
    return d


def test_capex_nodes_only():
    d = _complete(_small_design())
    assert capex(d) == 2_240_000


def test_capex_with_racks_and_cables():
    d = _complete(_small_design(switch_cost=9000, ups_cost=15000))
    p = CostParams(rack_unit_cost_usd=1200, cable_usd_per_m={"node_edge": 2.0, "edge_core": 3.0})
    g = d.groups[0]
    cable = sum(c.length_m * (2.0 if c.cls == "node_edge" else 3.0) for c in d.cables)
    oracle = 224 * 10_000 + g.network.switch_count * 9000 + g.ups.count * 15000 + d.placement.rack_count * 1200 + cable
    assert capex(d, p) == pytest.approx(oracle, abs=0.005)


def test_power_and_weight_sums():
    d = _small_design()
    g = d.groups[0]
    assert total_power_kw(d) == pytest.approx((224 * 651 + g.network.totals["power"]) / 0.95 / 1000)
    assert total_weight_kg(d) == 224 * 12 + g.network.totals["weight"] + g.ups.totals["weight"]


def test_summarize_names_missing_stage():
    with pytest.raises(EconomicsError, match="no equipment groups"):
        summarize(Design())
    d = _small_design()
    with pytest.raises(EconomicsError, match="not placed"):
        summarize(d)
    g = d.groups[0]
    d.placement = place(g.blocks, g.cores, g.ups_units)
    d.floor = plan_floor(d.placement.rack_count)
    with pytest.raises(EconomicsError, match="cables not routed"):
        summarize(d)


@pytest.mark.parametrize("script, nodes", [("blade_100tflops.cfs", 224), ("blade_1pflops.cfs", 2233)])
def test_summary_of_fixture_runs(script, nodes):
    r = run_file(data_path(script))
    assert r.ok, r.error
    s = r.summary
    assert s.nodes == nodes
    assert s.tco_usd == s.capex_usd + s.opex_usd
    d = r.state.design
    g = d.groups[0]
    oracle = nodes * g.metrics["node_cost"] + g.network.totals["cost"] + g.ups.totals["cost"]
    assert s.capex_usd == pytest.approx(oracle, abs=0.005)
    assert s.power_kw > 0 and s.tomato_kg_day == int(s.power_kw * 0.4)
