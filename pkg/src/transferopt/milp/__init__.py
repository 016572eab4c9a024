"""Mixed-binary linear programming: problem container, LP file IO, and an
in-house solver (bounded-variable revised simplex plus best-bound branch
and bound)."""

from .problem import LinearRow, MilpProblem, Variable
from .simplex import LpResult, solve_lp
from .solver import SolveResult, SolveStatus, SolverParams, solve_milp

__all__ = [
    "LinearRow",
    "LpResult",
    "MilpProblem",
    "SolveResult",
    "SolveStatus",
    "SolverParams",
    "Variable",
    "solve_lp",
    "solve_milp",
]
