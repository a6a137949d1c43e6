import math
import warnings
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from oracle import frs_noise_off
from sdsim import RngPolicy, RunConfig, compile_model, simulate, simulate_batch
from sdsim.engine import RangeWarning, StepNoise, eval_expr, evaluate_auxiliaries, initial_state, step
from sdsim.errors import DivisionByZero, InvalidBounds, NonFiniteResult, UnknownOverride
from sdsim.expr import NumberLiteral, emax, random_normal, ref
from sdsim.frs import BIAS_STOCK, build_frs_model
from sdsim.model import SimControl, with_control
from sdsim.parser import parse_model

DT = 0.0078125
NOISE_OFF = RngPolicy.noise_off()


def compiled(src):
    return compile_model(parse_model(src).unwrap())


def short(frs, final_time=2.0):
    return compile_model(with_control(frs.spec, final_time=final_time))


# -- expression evaluation ------------------------------------------------------

def test_max_clamps_at_zero():
    assert eval_expr(emax(0, -3), {}, 0.0) == 0


def test_new_processing_rate_at_t0(frs):
    aux = evaluate_auxiliaries(frs, initial_state(frs), 0.0)
    assert aux["New Processing Rate"] == pytest.approx(0.348, rel=1e-15)


def test_initial_auxiliaries(frs):
    aux = evaluate_auxiliaries(frs, initial_state(frs), 0.0)
    assert aux["Avg Interactions with Recommendations"] == 0.5
    assert aux["Avg Quality"] == 0.2
    assert aux["Skewed Patterns in Model"] == 4.0


def test_random_normal_noise_off_clamps_mean():
    assert eval_expr(random_normal(1, 5, 0.2, 4, 1), {}, 0.0, None) == 1.0


def test_division_by_zero_in_expression():
    with pytest.raises(DivisionByZero) as info:
        eval_expr(ref("a") / ref("b"), {"a": 1.0, "b": 0.0}, 3.5, variable="Q")
    assert info.value.variable == "Q" and info.value.t == 3.5


# -- stepping -------------------------------------------------------------------

def test_first_step_anchors(frs):
    for rng in (None, StepNoise(RngPolicy(global_seed=1), 1, 0)):
        nxt, _ = step(frs, initial_state(frs), 0.0, rng)
        assert nxt[BIAS_STOCK] == pytest.approx(1.00271875, abs=1e-12)
        assert nxt["HCI"] == pytest.approx(10 + DT * (26000 - 10) / 6760, abs=1e-12)
        assert nxt["HCI"] == pytest.approx(10.0300365, abs=1e-7)


def test_zero_net_flow_is_equilibrium():
    m = compiled("(1) S= INTEG(In - Out, 4)\nUnits: Dmnl\n\n(2) In= 2\nUnits: Dmnl\n\n(3) Out= 2\nUnits: Dmnl\n")
    nxt, _ = step(m, initial_state(m), 0.0)
    assert nxt["S"] == 4.0
    assert np.all(simulate(m)["S"] == 4.0)


def test_tree_evaluator_matches_kernel(frs):
    m = short(frs, 1.0)
    policy = RngPolicy(global_seed=5)
    res = simulate(m, policy)
    state = initial_state(m)
    for k in range(m.control.n_steps):
        t = k * DT
        nxt, aux = step(m, state, t, StepNoise(policy, 5, k))
        for name, value in aux.items():
            assert res[name][k] == value, (name, k)
        for s in m.stocks:
            assert res[s][k] == state[s]
        state = nxt
    for s in m.stocks:
        assert res[s][-1] == state[s]


# -- whole runs -----------------------------------------------------------------

def test_save_points_and_monotone_stocks(seed1_run):
    assert len(seed1_run.times) == 12801
    assert seed1_run.times[-1] == 100.0
    assert np.all(np.diff(seed1_run["FRE"]) > 0)
    hci = seed1_run["HCI"]
    assert np.all(np.diff(hci) > 0) and hci.max() < 26000


def test_hci_closed_form(noise_off_run):
    k = np.arange(12801)
    h = 26000 - 25990 * (1 - DT / 6760) ** k
    rel = np.abs(noise_off_run["HCI"] - h) / h
    assert rel.max() < 1e-9
    assert noise_off_run["HCI"][-1] == pytest.approx(391.6, abs=0.5)


def test_matches_hand_coded_oracle(noise_off_run):
    rows = frs_noise_off(12800)
    assert set(rows[0]) == set(noise_off_run.series)
    for name in rows[0]:
        expected = np.array([row[name] for row in rows])
        got = noise_off_run[name]
        scale = np.maximum(np.abs(expected), 1e-300)
        rel = np.abs(got - expected) / scale
        assert rel[:101].max() < 1e-12, name
        assert rel[-1] < 1e-9, name


def test_oracle_under_overrides(frs):
    over = {"Inductive Bias": 3.0, "Rebalancing & Regularization": 0.5, "Lifecycle": 90.0, "Accuracy": 7.0}
    m = short(frs, 3.0)
    res = simulate(m, NOISE_OFF, over)
    rows = frs_noise_off(m.control.n_steps, overrides=over)
    for name in rows[0]:
        expected = np.array([row[name] for row in rows])
        assert np.allclose(res[name], expected, rtol=1e-12, atol=0), name


def test_unknown_override(frs):
    with pytest.raises(UnknownOverride):
        simulate(frs, NOISE_OFF, {"No Such Var": 1})


def test_stock_initial_override(frs):
    res = simulate(short(frs, 0.1), NOISE_OFF, {"HCI": 20.0})
    assert res["HCI"][0] == 20.0


def test_determinism(frs):
    m = short(frs)
    a = simulate(m, RngPolicy(global_seed=11))
    b = simulate(m, RngPolicy(global_seed=11))
    for name in a.series:
        assert np.array_equal(a[name], b[name])


def test_seed_changes_noisy_series_only(frs):
    m = short(frs)
    a = simulate(m, RngPolicy(global_seed=1))
    b = simulate(m, RngPolicy(global_seed=2))
    assert not np.array_equal(a["Performance"], b["Performance"])
    for quiet in ("HCI", "FRE", BIAS_STOCK):
        assert np.array_equal(a[quiet], b[quiet])


def test_model_seed_constant_is_default(frs):
    m = short(frs)
    default = simulate(m, RngPolicy())
    assert default.metadata["seed"] == 1
    assert np.array_equal(default["Performance"], simulate(m, RngPolicy(global_seed=1))["Performance"])
    other = simulate(m, RngPolicy(), {"Seed": 2})
    assert other.metadata["seed"] == 2
    assert not np.array_equal(default["Performance"], other["Performance"])


def test_noise_off_independent_of_seed(frs):
    m = short(frs)
    a = simulate(m, RngPolicy(global_seed=1, mode="noise-off"))
    b = simulate(m, RngPolicy(global_seed=99, mode="noise-off"))
    for name in a.series:
        assert np.array_equal(a[name], b[name])


def test_backends_bit_identical(frs):
    m = short(frs, 1.0)
    runs = [RunConfig(RngPolicy(global_seed=s)) for s in (1, 2)] + [RunConfig(NOISE_OFF, {"User Bias": 3.0})]
    a = simulate_batch(m, runs, backend="numba")
    b = simulate_batch(m, runs, backend="numpy")
    for ra, rb in zip(a, b):
        for name in ra.series:
            assert np.array_equal(ra[name], rb[name]), name


def test_threads_do_not_change_results(frs, monkeypatch):
    m = short(frs, 1.0)
    runs = [RunConfig(RngPolicy(global_seed=s)) for s in range(1, 8)]
    serial = simulate_batch(m, runs)
    monkeypatch.setenv("SDSIM_THREADS", "3")
    threaded = simulate_batch(m, runs)
    for a, b in zip(serial, threaded):
        assert np.array_equal(a["Performance"], b["Performance"])


def test_batch_equals_individual_runs(frs):
    m = short(frs, 1.0)
    runs = [RunConfig(RngPolicy(global_seed=s), {"Skewness": float(s)}) for s in (3, 1, 2)]
    batch = simulate_batch(m, runs)
    for cfg, res in zip(runs, batch):
        solo = simulate(m, cfg.policy, cfg.overrides)
        assert np.array_equal(solo["Avg Quality"], res["Avg Quality"])


def test_performance_conservation(seed1_run):
    p = seed1_run["Performance"][0]
    inc, rem = seed1_run["Increased Quality"], seed1_run["Removed Quality"]
    for k in range(len(seed1_run.times) - 1):
        p = p + DT * (inc[k] - rem[k])
    assert p == seed1_run["Performance"][-1]


def test_quality_draws_within_bounds(seed1_run):
    q = seed1_run["Quality of each new Recommendations"]
    assert q.min() >= 1.0 and q.max() <= 5.0


def test_series_length_formula():
    m = compiled("(1) X= Time\nUnits: Dmnl\n\n(2) FINAL TIME= 10\nUnits: Day\n\n(3) TIME STEP= 0.5\nUnits: Day\n\n"
                 "(4) SAVEPER= 1.5\nUnits: Day\n")
    res = simulate(m)
    assert len(res.times) == math.floor(10 / 1.5) + 1
    assert np.array_equal(res["X"], res.times)


def test_zero_length_run():
    m = compiled("(1) X= 1\nUnits: Dmnl\n\n(2) FINAL TIME= 0\nUnits: Day\n")
    res = simulate(m)
    assert len(res.times) == 1 and res["X"][0] == 1


def test_time_grid_is_exact(noise_off_run):
    assert np.array_equal(noise_off_run.times, np.arange(12801) * DT)


@pytest.mark.parametrize("backend", ["numba", "numpy"])
def test_runtime_division_by_zero(backend):
    m = compiled("(1) A= 1/(Time - 2)\nUnits: Dmnl\n")
    with pytest.raises(DivisionByZero) as info:
        simulate(m, backend=backend)
    assert info.value.variable == "A" and info.value.t == 2.0


@pytest.mark.parametrize("backend", ["numba", "numpy"])
def test_runtime_overflow(backend):
    m = compiled("(1) S= INTEG(S*1e300, 1)\nUnits: Dmnl\n")
    with pytest.raises(NonFiniteResult) as info:
        simulate(m, backend=backend)
    assert info.value.variable == "S"


@pytest.mark.parametrize("backend", ["numba", "numpy"])
def test_runtime_bad_bounds(backend):
    m = compiled("(1) A= RANDOM NORMAL(Time + 1, 3, 1, 1, 1)\nUnits: Dmnl\n")
    with pytest.raises(InvalidBounds) as info:
        simulate(m, backend=backend)
    assert info.value.variable == "A" and info.value.t == 2.0


def test_range_warning():
    m = compiled("(1) A= Time - 5\nUnits: Dmnl [0,?]\n\n(2) FINAL TIME= 10\nUnits: Day\n")
    with pytest.warns(RangeWarning):
        simulate(m)


def test_negative_sd_allowed(frs):
    # intervention presets push the bias stock, and with it the sd, below zero
    m = short(frs, 5.0)
    res = simulate(m, RngPolicy(global_seed=1),
                   {"Inductive Bias": 5, "Popularity Bias": 5, "User Bias": 5, "Rebalancing & Regularization": 5})
    assert res["Skewed Patterns in Model"].min() < 0
    q = res["Quality of each new Recommendations"]
    assert q.min() >= 1 and q.max() <= 5


def test_save_subset(frs):
    res = simulate(short(frs), NOISE_OFF, save=["HCI"])
    assert list(res.series) == ["HCI"]
    with pytest.raises(KeyError):
        simulate(short(frs), NOISE_OFF, save=["nope"])


# -- scenario isolation ---------------------------------------------------------

_FRS = compile_model(with_control(build_frs_model(), final_time=1.0))
_PAIRS = [(c, v) for v in _FRS.names for c in _FRS.constants
          if c not in _FRS.cone(v) and c != v and c not in ("Seed",)]


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.sampled_from(_PAIRS), st.floats(0.5, 4.0))
def test_override_outside_cone_leaves_variable_unchanged(pair, value):
    const, var = pair
    policy = RngPolicy(global_seed=3)
    a = simulate(_FRS, policy, save=[var])
    b = simulate(_FRS, policy, {const: value}, save=[var])
    assert np.array_equal(a[var], b[var])


def test_debias_monotonicity(frs):
    m = short(frs, 20.0)
    base = simulate(m, NOISE_OFF, save=[BIAS_STOCK])[BIAS_STOCK]
    for rr in (0.1, 1.0, 5.0):
        assert np.all(simulate(m, NOISE_OFF, {"Rebalancing & Regularization": rr}, save=[BIAS_STOCK])[BIAS_STOCK]
                      <= base)
