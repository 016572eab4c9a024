"""Builds the transfer-window MILP: maximize total squad rating under
balance, squad-size, role, loan-consistency, budget, and sampled
team-value (chance) constraints, and maps assignments back to decisions.

Five binaries per player (keep, buy, sell, loan-in, loan-out) plus one
indicator per sampled scenario. The big-M on each scenario row equals the
effective value threshold exactly, the tightest bound that stays valid.
"""

from __future__ import annotations

import math

import numpy as np

from .domain import Instance, Lock, Role, TransferSolution, validate_instance
from .milp import LinearRow, MilpProblem, Variable
from .values import ScenarioSet

DECISION_KINDS = ("keep", "buy", "sell", "loan_in", "loan_out")

_VAR_PREFIX = {
    "keep": "y",
    "buy": "buy",
    "sell": "sell",
    "loan_in": "loanin",
    "loan_out": "loanout",
}

_LOCKED_KIND = {
    Lock.NO_BUY: "buy",
    Lock.NO_SELL: "sell",
    Lock.NO_LOAN_IN: "loan_in",
    Lock.NO_LOAN_OUT: "loan_out",
}


class BuildError(ValueError):
    """The instance or scenario set cannot produce a well-formed program."""


class FixingConflictError(ValueError):
    """A what-if fixing contradicts a consistency constraint."""


def scenario_quota(alpha: float, n_scenarios: int) -> int:
    """Scenarios that must clear the threshold: ceil(alpha * n), computed
    away from float noise so the empirical probability is at least alpha."""
    return math.ceil(alpha * n_scenarios - 1e-9)


def build_squad_problem(instance: Instance, scenarios: ScenarioSet) -> MilpProblem:
    """Translate an instance plus sampled values into a mixed-binary
    program. Locks become variable fixings; role rows with an unbounded
    maximum are omitted.
    """
    findings = validate_instance(instance)
    if findings:
        raise BuildError("invalid instance: " + "; ".join(findings))
    ids = tuple(p.id for p in instance.players)
    if scenarios.player_ids != ids:
        raise BuildError("scenario rows do not align with instance players")

    players = instance.players
    n_scen = scenarios.n_scenarios
    threshold = instance.effective_threshold()

    variables: list[Variable] = []
    var_of: dict[tuple[str, str], int] = {}
    for p in players:
        for kind in DECISION_KINDS:
            var_of[(p.id, kind)] = len(variables)
            lo, hi = 0.0, 1.0
            if kind in (_LOCKED_KIND[lock] for lock in p.locks):
                hi = 0.0
            variables.append(
                Variable(f"{_VAR_PREFIX[kind]}_{p.id}", lo, hi, "binary", ("decision", p.id, kind))
            )
    scen_start = len(variables)
    for s in range(n_scen):
        variables.append(Variable(f"hit_{s}", 0.0, 1.0, "binary", ("scenario", s)))

    def v(pid: str, kind: str) -> int:
        return var_of[(pid, kind)]

    objective = []
    for p in players:
        objective.append((v(p.id, "keep"), p.rating))
        objective.append((v(p.id, "loan_in"), p.rating))
        objective.append((v(p.id, "loan_out"), -p.rating))

    rows: list[LinearRow] = []
    for p in players:
        rows.append(
            LinearRow(
                f"balance_{p.id}",
                ((v(p.id, "keep"), 1.0), (v(p.id, "buy"), -1.0), (v(p.id, "sell"), 1.0)),
                "=",
                1.0 if p.owned else 0.0,
            )
        )
    rows.append(
        LinearRow(
            "squad_size",
            tuple(
                (v(p.id, kind), coef)
                for p in players
                for kind, coef in (("keep", 1.0), ("loan_in", 1.0), ("loan_out", -1.0))
            ),
            "=",
            float(instance.squad_size),
        )
    )
    for role in Role:
        members = [p for p in players if p.has_role(role)]
        coeffs = tuple(
            (v(p.id, kind), coef)
            for p in members
            for kind, coef in (("keep", 1.0), ("loan_in", 1.0), ("loan_out", -1.0))
        )
        lo = instance.formation.min_for(role)
        if coeffs or lo > 0:
            rows.append(LinearRow(f"role_min_{role.value}", coeffs, ">=", float(lo)))
        hi = instance.formation.max_for(role)
        if hi is not None and coeffs:
            rows.append(LinearRow(f"role_max_{role.value}", coeffs, "<=", float(hi)))
    for p in players:
        owned = 1.0 if p.owned else 0.0
        rows.append(
            LinearRow(
                f"buyside_{p.id}",
                ((v(p.id, "loan_in"), 1.0), (v(p.id, "buy"), 1.0)),
                "<=",
                1.0 - owned,
            )
        )
        rows.append(
            LinearRow(
                f"sellside_{p.id}",
                ((v(p.id, "loan_out"), 1.0), (v(p.id, "sell"), 1.0)),
                "<=",
                owned,
            )
        )
    rows.append(
        LinearRow(
            "budget",
            tuple(
                (v(p.id, kind), float(price))
                for p in players
                for kind, price in (
                    ("buy", p.purchase_price),
                    ("loan_in", p.loan_in_fee),
                    ("sell", -p.sale_price),
                    ("loan_out", -p.loan_out_fee),
                )
            ),
            "<=",
            float(instance.budget),
        )
    )
    big_m = threshold
    for s in range(n_scen):
        coeffs = [(v(p.id, "keep"), float(scenarios.values[i, s])) for i, p in enumerate(players)]
        coeffs.append((scen_start + s, -big_m))
        rows.append(LinearRow(f"value_scen_{s}", tuple(coeffs), ">=", threshold - big_m))
    quota = scenario_quota(instance.alpha, n_scen)
    rows.append(
        LinearRow(
            "value_quota",
            tuple((scen_start + s, 1.0) for s in range(n_scen)),
            ">=",
            float(quota),
        )
    )

    return MilpProblem(
        f"squad_{instance.club}".replace(" ", "_"),
        tuple(variables),
        tuple(objective),
        tuple(rows),
    )


def _decision_vars(problem: MilpProblem) -> dict[tuple[str, str], int]:
    out = {}
    for j, var in enumerate(problem.variables):
        if var.meta and var.meta[0] == "decision":
            out[(var.meta[1], var.meta[2])] = j
    return out


def _ownership(problem: MilpProblem) -> dict[str, bool]:
    owned = {}
    for row in problem.rows:
        if row.name.startswith("balance_"):
            owned[row.name[len("balance_"):]] = row.rhs == 1.0
    return owned


def extract_solution(
    problem: MilpProblem,
    raw_assignment: np.ndarray,
    instance: Instance,
    scenarios: ScenarioSet,
    integrality_tol: float = 1e-5,
    feasibility_tol: float = 1e-6,
) -> TransferSolution:
    """Round an integral assignment to exact binaries and recompute every
    reported quantity from first principles: objective from ratings,
    net spend from the price ledger, scenario hits from the sampled
    values. Row activities from the solver are never trusted.
    """
    x = np.asarray(raw_assignment, dtype=float)
    rounded = np.round(x)
    if np.abs(x - rounded).max(initial=0.0) > integrality_tol:
        worst = int(np.argmax(np.abs(x - rounded)))
        raise ValueError(
            f"assignment not integral: {problem.variables[worst].name} = {x[worst]!r}"
        )

    var_of = _decision_vars(problem)
    chosen: dict[str, set[str]] = {kind: set() for kind in DECISION_KINDS}
    for (pid, kind), j in var_of.items():
        if rounded[j] > 0.5:
            chosen[kind].add(pid)

    by_id = {p.id: p for p in instance.players}
    objective = sum(by_id[pid].rating for pid in chosen["keep"])
    objective += sum(by_id[pid].rating for pid in chosen["loan_in"])
    objective -= sum(by_id[pid].rating for pid in chosen["loan_out"])

    net_spend = (
        sum(by_id[pid].purchase_price for pid in chosen["buy"])
        + sum(by_id[pid].loan_in_fee for pid in chosen["loan_in"])
        - sum(by_id[pid].sale_price for pid in chosen["sell"])
        - sum(by_id[pid].loan_out_fee for pid in chosen["loan_out"])
    )

    threshold = instance.effective_threshold()
    kept_mask = np.array([p.id in chosen["keep"] for p in instance.players])
    totals = kept_mask @ scenarios.values
    hits = tuple(bool(t >= threshold - 1e-9) for t in totals)
    empirical = sum(hits) / len(hits)

    # verify the full problem at the recomputed point
    point = rounded.copy()
    for j, var in enumerate(problem.variables):
        if var.meta and var.meta[0] == "scenario":
            point[j] = 1.0 if hits[var.meta[1]] else 0.0
    for row in problem.rows:
        violation = row.violation(point)
        if violation > feasibility_tol:
            raise ValueError(
                f"recomputed solution violates row {row.name!r} by {violation:.3g}"
            )
    if empirical < instance.alpha - 1e-12:
        raise ValueError(
            f"empirical probability {empirical:.4f} below alpha {instance.alpha}"
        )

    return TransferSolution(
        kept=frozenset(chosen["keep"]),
        bought=frozenset(chosen["buy"]),
        sold=frozenset(chosen["sell"]),
        loaned_in=frozenset(chosen["loan_in"]),
        loaned_out=frozenset(chosen["loan_out"]),
        objective_rating=float(objective),
        net_spend=int(net_spend),
        scenario_hits=hits,
        empirical_probability=float(empirical),
    )


def apply_whatif(
    problem: MilpProblem, fixings: list[tuple[str, str, int]]
) -> MilpProblem:
    """Copy the problem with decision variables pinned (player, kind, 0/1).

    Contradictions with the loan/ownership consistency rows are rejected
    up front, naming the conflicting constraint; the original problem is
    never touched.
    """
    var_of = _decision_vars(problem)
    owned = _ownership(problem)
    bounds: dict[int, tuple[float, float]] = {}
    pinned: dict[tuple[str, str], int] = {}
    for pid, kind, value in fixings:
        if (pid, kind) not in var_of:
            raise KeyError(f"no variable for player {pid!r} decision {kind!r}")
        if value not in (0, 1):
            raise ValueError(f"fixing for {pid!r}/{kind} must be 0 or 1")
        j = var_of[(pid, kind)]
        prior = pinned.get((pid, kind))
        if prior is not None and prior != value:
            raise FixingConflictError(
                f"player {pid!r}: {kind} fixed to both {prior} and {value}"
            )
        pinned[(pid, kind)] = value
        var = problem.variables[j]
        if value < var.lower or value > var.upper:
            raise FixingConflictError(
                f"player {pid!r}: {kind}={value} conflicts with existing bounds "
                f"[{var.lower:g}, {var.upper:g}] (locked decision)"
            )
        bounds[j] = (float(value), float(value))

    def pinned_one(pid: str, kind: str) -> bool:
        return pinned.get((pid, kind)) == 1

    for pid, is_owned in owned.items():
        if is_owned and (pinned_one(pid, "buy") or pinned_one(pid, "loan_in")):
            raise FixingConflictError(
                f"player {pid!r} is owned: buying or loaning in violates the "
                f"buy-side consistency row buyside_{pid}"
            )
        if not is_owned and (pinned_one(pid, "sell") or pinned_one(pid, "loan_out")):
            raise FixingConflictError(
                f"player {pid!r} is not owned: selling or loaning out violates "
                f"the sell-side consistency row sellside_{pid}"
            )
        if pinned_one(pid, "sell") and pinned_one(pid, "loan_out"):
            raise FixingConflictError(
                f"player {pid!r}: sell and loan-out together violate the "
                f"sell-side consistency row sellside_{pid}"
            )
        if pinned_one(pid, "buy") and pinned_one(pid, "loan_in"):
            raise FixingConflictError(
                f"player {pid!r}: buy and loan-in together violate the "
                f"buy-side consistency row buyside_{pid}"
            )

    return problem.with_bounds(bounds)
