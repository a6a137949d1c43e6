import pytest

from sdsim.compiler import compile_model, variable_key
from sdsim.errors import CyclicDependency, InvalidControl, MalformedIntegral, UnresolvedReference
from sdsim.frs import STOCKS
from sdsim.parser import parse_model


def model(src):
    return parse_model(src).unwrap()


def entries(*eqs):
    return "\n".join(f"({i}) {e}\nUnits: Dmnl\n" for i, e in enumerate(eqs, start=1))


def test_single_constant():
    c = compile_model(model(entries("X= 1")))
    assert c.counts() == {"stocks": 0, "auxiliaries": 0, "constants": 1}
    assert c.control.final_time == 100 and c.control.dt == 1


def test_frs_plan(frs):
    assert tuple(frs.stocks) == STOCKS
    assert frs.counts() == {"stocks": 4, "auxiliaries": 17, "constants": 20}
    c = frs.control
    assert (c.initial_time, c.final_time, c.dt, c.saveper) == (0, 100, 0.0078125, 0.0078125)


def test_eval_order_is_topological(frs):
    pos = {n: i for i, n in enumerate(frs.eval_order)}
    for name in frs.eval_order:
        for dep in frs.direct_deps[name]:
            if dep in pos:
                assert pos[dep] < pos[name], (dep, name)


def test_every_variable_placed_once(frs):
    placed = list(frs.stocks) + list(frs.eval_order) + list(frs.constants)
    assert len(placed) == len(set(placed)) == 41
    assert set(placed) == set(frs.names)


def test_two_node_cycle():
    with pytest.raises(CyclicDependency) as info:
        compile_model(model(entries("A= B", "B= A")))
    assert info.value.cycle == ["A", "B"]


def test_cycle_reported_from_earliest_definition():
    with pytest.raises(CyclicDependency) as info:
        compile_model(model(entries("C= 1 + B", "A= C", "B= A")))
    cyc = info.value.cycle
    assert cyc[0] == "C" and sorted(cyc) == ["A", "B", "C"]


def test_stock_breaks_cycle():
    c = compile_model(model(entries("S= INTEG(R, 1)", "R= S*0.5")))
    assert c.counts() == {"stocks": 1, "auxiliaries": 1, "constants": 0}


def test_unresolved_reference():
    with pytest.raises(UnresolvedReference) as info:
        compile_model(model(entries("A= B + 1")))
    assert info.value.name == "B" and info.value.where == "A"


def test_time_is_reserved():
    c = compile_model(model(entries("A= Time*2")))
    assert list(c.eval_order) == ["A"]


def test_integ_below_root():
    with pytest.raises(MalformedIntegral):
        compile_model(model(entries("A= 1 + INTEG(1, 0)")))


def test_initial_value_cannot_reach_a_stock():
    with pytest.raises(MalformedIntegral):
        compile_model(model(entries("S= INTEG(1, T)", "T= INTEG(1, 0)")))
    with pytest.raises(MalformedIntegral):
        compile_model(model(entries("S= INTEG(1, K*2)", "K= T", "T= INTEG(1, 0)")))


def test_initial_value_may_use_constants_and_auxiliaries():
    c = compile_model(model(entries("S= INTEG(1, K*2)", "K= J + 1", "J= 3")))
    assert c.initial_exprs["S"] is not None


def test_bad_control_rejected():
    with pytest.raises(InvalidControl):
        compile_model(model(entries("TIME STEP= 0.3", "SAVEPER= 0.5")))
    with pytest.raises(InvalidControl):
        compile_model(model(entries("INITIAL TIME= 5", "FINAL TIME= 1")))


def test_noise_sites(frs):
    sites = frs.noise_sites
    assert [s.variable for s in sites] == ["Quality of each new Recommendations"]
    assert frs.is_noisy("Performance") and frs.is_noisy("Avg Quality")
    for quiet in ("HCI", "FRE", "Distribution of Bias in Data & Design"):
        assert not frs.is_noisy(quiet)


def test_variable_key_is_fnv1a():
    assert variable_key("") == 0xCBF29CE484222325
    assert variable_key("a") == 0xAF63DC4C8601EC8C
