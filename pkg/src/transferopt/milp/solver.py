"""Best-bound branch and bound for mixed-binary linear programs.

Child nodes are solved eagerly (warm-started from the parent basis via the
dual simplex) so the tree bound is always exact. Incumbents are accepted
only after independent recomputation of every row at the feasibility
tolerance; basis bookkeeping is never trusted for feasibility claims.
"""

from __future__ import annotations

import enum
import heapq
import json
import time
from dataclasses import dataclass, field

import numpy as np

from .problem import MilpProblem
from .simplex import SimplexCore


@dataclass(frozen=True)
class SolverParams:
    relative_gap: float = 0.005
    feasibility_tol: float = 1e-6
    integrality_tol: float = 1e-5
    time_limit: float = 3600.0
    node_limit: int | None = None
    emphasis: str = "find-feasible"  # "prove-optimality" tightens the bound to zero gap

    def __post_init__(self):
        if not 0.0 <= self.relative_gap < 1.0:
            raise ValueError("relative_gap must lie in [0, 1)")
        if self.feasibility_tol <= 0 or self.integrality_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.emphasis not in ("find-feasible", "prove-optimality"):
            raise ValueError(f"unknown emphasis {self.emphasis!r}")


class SolveStatus(enum.Enum):
    OPTIMAL_WITHIN_GAP = "optimal-within-gap"
    FEASIBLE_TIME_LIMIT = "feasible-time-limit"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LogEntry:
    """One incumbent improvement."""

    time: float
    value: float
    bound: float
    nodes: int

    def as_line(self) -> str:
        return json.dumps(
            {"t": round(self.time, 6), "incumbent": self.value,
             "bound": self.bound, "nodes": self.nodes}
        )


@dataclass
class SolveResult:
    status: SolveStatus
    assignment: np.ndarray | None
    objective: float | None
    bound: float
    nodes: int
    wall_time: float
    gap: float
    log: list[LogEntry] = field(default_factory=list)
    incumbent_missing: bool = False


def format_solve_log(result: SolveResult) -> str:
    """Machine-readable log, one JSON line per incumbent improvement."""
    return "\n".join(entry.as_line() for entry in result.log)


def _relative_gap(bound: float, incumbent: float) -> float:
    return (bound - incumbent) / max(abs(incumbent), 1e-9)


@dataclass
class _Node:
    bound: float
    branch_var: int
    fixings: dict[int, float]


def solve_milp(problem: MilpProblem, params: SolverParams | None = None) -> SolveResult:
    """Solve a mixed-binary program to the configured relative gap.

    Node selection is best bound; branching picks the most fractional
    binary, breaking ties by lowest variable index. Deterministic: the
    same problem and params give the same node count and incumbent.
    """
    params = params or SolverParams()
    c, A, senses, b, lb0, ub0 = problem.dense()
    binary = np.array([v.kind == "binary" for v in problem.variables])
    if binary.any():
        bad = np.nonzero(binary & ((lb0 < -1e-12) | (ub0 > 1 + 1e-12)))[0]
        if bad.size:
            name = problem.variables[int(bad[0])].name
            raise ValueError(f"binary variable {name!r} has bounds outside [0, 1]")

    core = SimplexCore(c, A, senses, b, lb0, ub0, params.feasibility_tol)
    start = time.perf_counter()
    log: list[LogEntry] = []
    incumbent: np.ndarray | None = None
    inc_val = -np.inf
    nodes = 0

    def elapsed() -> float:
        return time.perf_counter() - start

    def try_accept(x: np.ndarray) -> bool:
        """Round, re-verify every row from scratch, adopt if improving."""
        nonlocal incumbent, inc_val
        xr = x.copy()
        xr[binary] = np.round(xr[binary])
        if np.abs(x[binary] - xr[binary]).max(initial=0.0) > params.integrality_tol:
            return False
        violation, _ = problem.max_violation(xr)
        if violation > params.feasibility_tol:
            return False
        obj = problem.objective_value(xr)
        if obj > inc_val + 1e-12:
            incumbent, inc_val = xr, obj
            return True
        return False

    def branch_candidate(x: np.ndarray) -> int:
        """Most fractional binary; -1 when integral within tolerance."""
        frac = np.abs(x - np.round(x))
        frac[~binary] = 0.0
        j = int(np.argmax(frac))
        if frac[j] <= params.integrality_tol:
            return -1
        return j

    status = core.solve_primal()
    if status == "infeasible":
        return SolveResult(SolveStatus.INFEASIBLE, None, None, -np.inf, 0, elapsed(), np.inf)
    if status == "unbounded":
        return SolveResult(SolveStatus.UNBOUNDED, None, None, np.inf, 0, elapsed(), np.inf)
    x_root, obj_root = core.solution()
    root_bound = obj_root

    heap: list[tuple[float, int, _Node]] = []
    counter = 0

    def push(node: _Node) -> None:
        # key rounds the bound so LP noise cannot split plateau ties, and
        # breaks ties newest-first: a flat region is dived, not flooded
        nonlocal counter
        heapq.heappush(heap, (-round(node.bound, 9), -counter, node))
        counter += 1

    def handle_solved(x: np.ndarray, obj: float, fixings: dict[int, float],
                      parent_bound: float) -> None:
        """Classify a freshly solved node: incumbent, pruned, or queued."""
        bound = min(obj, parent_bound)
        j = branch_candidate(x)
        if j < 0:
            if try_accept(x):
                log.append(LogEntry(elapsed(), inc_val, _global_bound(), nodes))
                return
            # integral within tolerance but failed exact verification:
            # branch on the largest residual fractionality instead
            frac = np.abs(x - np.round(x))
            frac[~binary] = 0.0
            j = int(np.argmax(frac))
            if frac[j] <= 1e-15:
                return  # genuinely integral yet infeasible/worse: prune
        if bound > inc_val + 1e-9:
            push(_Node(bound, j, fixings))

    def _global_bound() -> float:
        # heap keys are bounds rounded to 1e-9; pad so the result still
        # dominates every exact open-node bound
        best_open = -heap[0][0] + 1e-9 if heap else -np.inf
        return max(best_open, inc_val if incumbent is not None else -np.inf)

    handle_solved(x_root, obj_root, {}, root_bound)

    hit_limit = False
    while heap:
        bound_now = _global_bound()
        if incumbent is not None:
            gap = _relative_gap(bound_now, inc_val)
            target = 1e-9 if params.emphasis == "prove-optimality" else params.relative_gap
            if gap <= target:
                break
        if elapsed() > params.time_limit or (
            params.node_limit is not None and nodes >= params.node_limit
        ):
            hit_limit = True
            break

        _, _, node = heapq.heappop(heap)
        if node.bound <= inc_val + 1e-9:
            continue
        for side in (0.0, 1.0):
            if elapsed() > params.time_limit:
                hit_limit = True
                break
            child_fix = dict(node.fixings)
            child_fix[node.branch_var] = side
            lb = lb0.copy()
            ub = ub0.copy()
            for var, val in child_fix.items():
                lb[var] = ub[var] = val
            core.set_bounds(lb, ub)
            nodes += 1
            status = core.warm_solve_current()
            if status == "infeasible":
                continue
            if status != "optimal":
                raise RuntimeError(f"unexpected LP status {status!r} at a node")
            x, obj = core.solution()
            handle_solved(x, obj, child_fix, node.bound)
        if hit_limit:
            break

    final_bound = _global_bound()
    if incumbent is None:
        if hit_limit:
            return SolveResult(
                SolveStatus.FEASIBLE_TIME_LIMIT, None, None, final_bound,
                nodes, elapsed(), np.inf, log, incumbent_missing=True,
            )
        return SolveResult(
            SolveStatus.INFEASIBLE, None, None, -np.inf, nodes, elapsed(), np.inf, log
        )
    if not heap:
        final_bound = inc_val
    gap = _relative_gap(final_bound, inc_val)
    if hit_limit and gap > params.relative_gap:
        status_out = SolveStatus.FEASIBLE_TIME_LIMIT
    else:
        status_out = SolveStatus.OPTIMAL_WITHIN_GAP
    return SolveResult(
        status_out, incumbent, inc_val, final_bound, nodes, elapsed(), gap, log
    )
