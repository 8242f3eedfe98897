import math
import os

import pytest

import mprflow

SCENARIOS = os.environ.get(
    "MPRFLOW_SCENARIO_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "scenarios")
)


def load(name):
    return mprflow.Scenario.from_file(os.path.join(SCENARIOS, name + ".json"))


def test_channel_functions():
    assert mprflow.rx_power_factor(0.1, 100.0, 4.0) == pytest.approx(1e-9, rel=1e-14)
    assert mprflow.success_probability(1e-9, [], 0.0, 1.0) == 1.0
    assert mprflow.success_probability(1e-9, [1e-9], 0.0, 1.0) == pytest.approx(0.5)


def test_scenario_roundtrip():
    grid = load("grid_two_flows")
    assert len(grid.node_ids) == 16
    assert grid.destination == 15
    assert grid.interferer_set(3, 7) == [0, 5, 10, 11]
    again = mprflow.Scenario.from_json(grid.to_json())
    assert again.to_json() == grid.to_json()
    assert grid.best_path() == 1


def test_bad_scenario_raises():
    with pytest.raises(mprflow.ScenarioError):
        mprflow.Scenario.from_json('{"channel": {"alpha": 4}, "nodes": [], "flows": [], "bogus": 1}')
    with pytest.raises(mprflow.ScenarioError):
        mprflow.Scenario.from_file("/no/such/scenario.json")


def test_toy_throughput():
    toy = load("toy")
    value, terms = mprflow.link_throughput(toy, 2, 0, {1: 1.0, 2: 1.0})
    assert terms == 4
    assert value == pytest.approx(0.44046600481994408655, rel=1e-12)
    assert mprflow.aggregate_throughput(toy, {1: 1.0, 2: 1.0}) == pytest.approx(0.67936925645133804816, rel=1e-12)


def test_problem_and_solver():
    toy = load("toy")
    problem = mprflow.AllocationProblem(toy)
    assert problem.variables == ["rate_f1", "rate_f2", "aux_f1"]
    assert problem.constraint_count == 9
    objective, violations = problem.evaluate([0.0, 0.0, 0.0])
    assert objective == 0.0 and max(violations) == 0.0

    result = mprflow.solve(toy, seed=1, restarts=2)
    assert result["feasible"]
    assert result["rates"][1] == pytest.approx(1.0, abs=1e-3)
    assert result["rates"][2] == pytest.approx(1.0, abs=1e-3)
    assert mprflow.solve_best_path(toy, restarts=2)["aat"] <= result["aat"] + 1e-9


def test_simulation():
    toy = load("toy")
    stats = mprflow.simulate(toy, {1: 1.0, 2: 1.0}, slots=200_000, relay_discipline="saturated")
    expected = mprflow.aggregate_throughput(toy, {1: 1.0, 2: 1.0})
    assert abs(stats["aat"] - expected) / expected < 0.05
    assert stats["injected"] == stats["delivered"] + stats["in_network"]
    assert stats["delay_bounded"] in (True, False)
    short = mprflow.simulate(toy, {1: 0.1, 2: 0.1}, slots=20_000, warmup=1000)
    assert short["delay_bounded"] is None
    with pytest.raises(ValueError):
        mprflow.simulate(toy, {1: 0.1}, slots=20_000, relay_discipline="bogus")


def test_nonconvexity():
    holds, lhs, rhs = mprflow.nonconvexity_condition(load("toy").with_sinr_threshold(1.0))
    assert holds
    assert lhs == pytest.approx(0.097520674631462113078, rel=1e-12)
    assert rhs == pytest.approx(0.35600338269323033864, rel=1e-12)
    assert not math.isnan(lhs)
