import itertools

import numpy as np
import pytest

from transferopt.milp import (
    LinearRow,
    MilpProblem,
    SolveStatus,
    SolverParams,
    Variable,
    solve_milp,
)


def binary_problem(c, rows, name="bin"):
    variables = tuple(Variable(f"x{j}") for j in range(len(c)))
    objective = tuple((j, float(v)) for j, v in enumerate(c))
    return MilpProblem(name, variables, objective, tuple(rows))


def knapsack(values, weights, cap):
    rows = [
        LinearRow("cap", tuple((j, float(w)) for j, w in enumerate(weights)), "<=", float(cap))
    ]
    return binary_problem(values, rows, name="knapsack")


def brute_force_knapsack(values, weights, cap):
    best = 0.0
    for pick in itertools.product((0, 1), repeat=len(values)):
        if np.dot(pick, weights) <= cap:
            best = max(best, float(np.dot(pick, values)))
    return best


def test_integral_relaxation_no_branching():
    # all weights 1, capacity >= n: LP relaxation is already 0/1
    prob = knapsack([3.0, 2.0, 1.0], [1.0, 1.0, 1.0], 5.0)
    res = solve_milp(prob)
    assert res.status == SolveStatus.OPTIMAL_WITHIN_GAP
    assert res.nodes == 0
    assert res.objective == pytest.approx(6.0, abs=1e-9)


def test_ten_item_knapsack_matches_enumeration():
    rng = np.random.default_rng(42)
    values = rng.uniform(1, 10, size=10).round(2)
    weights = rng.uniform(1, 8, size=10).round(2)
    cap = float(weights.sum() * 0.45)
    prob = knapsack(values, weights, cap)
    res = solve_milp(prob, SolverParams(relative_gap=0.0))
    assert res.status == SolveStatus.OPTIMAL_WITHIN_GAP
    assert res.objective == pytest.approx(brute_force_knapsack(values, weights, cap), abs=1e-9)


@pytest.mark.parametrize("seed", range(15))
def test_random_binary_programs_match_enumeration(seed):
    rng = np.random.default_rng(100 + seed)
    n = int(rng.integers(4, 11))
    m = int(rng.integers(1, 5))
    c = rng.uniform(-2, 8, size=n).round(3)
    A = rng.uniform(-2, 5, size=(m, n)).round(3)
    b = (A.clip(min=0).sum(axis=1) * rng.uniform(0.3, 0.8, size=m)).round(3)
    senses = ["<=" if rng.random() < 0.8 else ">=" for _ in range(m)]
    rows = [
        LinearRow(f"r{i}", tuple((j, float(A[i, j])) for j in range(n)), senses[i], float(b[i]))
        for i in range(m)
    ]
    prob = binary_problem(c, rows)

    best = -np.inf
    for pick in itertools.product((0, 1), repeat=n):
        x = np.array(pick, dtype=float)
        ok = all(
            (A[i] @ x <= b[i] + 1e-12) if senses[i] == "<=" else (A[i] @ x >= b[i] - 1e-12)
            for i in range(m)
        )
        if ok:
            best = max(best, float(c @ x))

    res = solve_milp(prob, SolverParams(relative_gap=0.0))
    if best == -np.inf:
        assert res.status == SolveStatus.INFEASIBLE
    else:
        assert res.status == SolveStatus.OPTIMAL_WITHIN_GAP
        assert res.objective == pytest.approx(best, abs=1e-9)
        # bound soundness and the gap contract
        assert res.bound >= best - 1e-9
        assert res.gap <= 1e-9


def test_gap_contract_at_half_percent():
    rng = np.random.default_rng(5)
    values = rng.uniform(1, 10, size=12).round(2)
    weights = rng.uniform(1, 8, size=12).round(2)
    cap = float(weights.sum() * 0.5)
    prob = knapsack(values, weights, cap)
    res = solve_milp(prob, SolverParams(relative_gap=0.005))
    exact = brute_force_knapsack(values, weights, cap)
    assert res.status == SolveStatus.OPTIMAL_WITHIN_GAP
    assert res.objective >= exact * (1 - 0.005) - 1e-9
    assert (res.bound - res.objective) / max(abs(res.objective), 1e-9) <= 0.005 + 1e-12


def test_determinism_same_nodes_and_incumbent():
    rng = np.random.default_rng(9)
    values = rng.uniform(1, 10, size=14).round(2)
    weights = rng.uniform(1, 8, size=14).round(2)
    prob = knapsack(values, weights, float(weights.sum() * 0.4))
    a = solve_milp(prob, SolverParams(relative_gap=0.0))
    b = solve_milp(prob, SolverParams(relative_gap=0.0))
    assert a.nodes == b.nodes
    assert np.array_equal(a.assignment, b.assignment)


def test_infeasible_binary_program():
    prob = binary_problem(
        [1.0, 1.0],
        [
            LinearRow("need3", ((0, 1.0), (1, 1.0)), ">=", 3.0),
        ],
    )
    res = solve_milp(prob)
    assert res.status == SolveStatus.INFEASIBLE
    assert res.assignment is None


def test_time_limit_without_incumbent_is_flagged():
    rng = np.random.default_rng(3)
    n = 30
    values = rng.uniform(1, 10, size=n)
    weights = rng.uniform(1, 8, size=n)
    prob = knapsack(values, weights, float(weights.sum() * 0.5))
    res = solve_milp(prob, SolverParams(relative_gap=0.0, time_limit=0.0))
    assert res.status == SolveStatus.FEASIBLE_TIME_LIMIT
    assert res.incumbent_missing
    assert res.assignment is None


def test_incumbent_log_records_improvements():
    rng = np.random.default_rng(11)
    values = rng.uniform(1, 10, size=12).round(2)
    weights = rng.uniform(1, 8, size=12).round(2)
    prob = knapsack(values, weights, float(weights.sum() * 0.35))
    res = solve_milp(prob, SolverParams(relative_gap=0.0))
    assert res.log, "expected at least one incumbent improvement"
    vals = [e.value for e in res.log]
    assert vals == sorted(vals)
    assert vals[-1] == pytest.approx(res.objective)
