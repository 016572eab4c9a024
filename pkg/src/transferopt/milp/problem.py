"""Container for mixed-binary linear programs in sparse row form.

Problems are immutable after construction; what-if variants are produced
by copying with tightened bounds. The objective sense is always maximize.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

SENSES = ("<=", ">=", "=")


@dataclass(frozen=True)
class Variable:
    """One decision variable. ``meta`` ties it back to the model entity
    (e.g. a player decision or a scenario index)."""

    name: str
    lower: float = 0.0
    upper: float = 1.0
    kind: str = "binary"
    meta: tuple = ()

    def is_fixed(self) -> bool:
        return self.lower == self.upper


@dataclass(frozen=True)
class LinearRow:
    """Sparse constraint row: coeffs are (variable index, coefficient)."""

    name: str
    coeffs: tuple[tuple[int, float], ...]
    sense: str
    rhs: float

    def activity(self, x) -> float:
        return float(sum(c * x[j] for j, c in self.coeffs))

    def violation(self, x) -> float:
        """How far the row is from holding at point x (0 when satisfied)."""
        a = self.activity(x)
        if self.sense == "<=":
            return max(0.0, a - self.rhs)
        if self.sense == ">=":
            return max(0.0, self.rhs - a)
        return abs(a - self.rhs)


@dataclass(frozen=True)
class MilpProblem:
    name: str
    variables: tuple[Variable, ...]
    objective: tuple[tuple[int, float], ...]
    rows: tuple[LinearRow, ...]
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for row in self.rows:
            if row.sense not in SENSES:
                raise ValueError(f"row {row.name!r} has unknown sense {row.sense!r}")
            for j, _ in row.coeffs:
                if not 0 <= j < len(self.variables):
                    raise ValueError(f"row {row.name!r} references variable {j}")
        self._index.update({v.name: j for j, v in enumerate(self.variables)})

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def index_of(self, name: str) -> int:
        return self._index[name]

    def objective_value(self, x) -> float:
        return float(sum(c * x[j] for j, c in self.objective))

    def with_bounds(self, fixings: dict[int, tuple[float, float]]) -> "MilpProblem":
        """Copy with the given variables' bounds replaced."""
        new_vars = list(self.variables)
        for j, (lo, hi) in fixings.items():
            if lo > hi:
                raise ValueError(
                    f"variable {new_vars[j].name!r}: lower {lo} above upper {hi}"
                )
            new_vars[j] = replace(new_vars[j], lower=float(lo), upper=float(hi))
        return MilpProblem(self.name, tuple(new_vars), self.objective, self.rows)

    def fix(self, j: int, value: float) -> "MilpProblem":
        return self.with_bounds({j: (value, value)})

    def dense(self):
        """Dense arrays (c, A, senses, b, lb, ub) for the solver."""
        n, m = self.n_variables, self.n_rows
        c = np.zeros(n)
        for j, coef in self.objective:
            c[j] += coef
        A = np.zeros((m, n))
        b = np.zeros(m)
        senses = []
        for i, row in enumerate(self.rows):
            for j, coef in row.coeffs:
                A[i, j] += coef
            b[i] = row.rhs
            senses.append(row.sense)
        lb = np.array([v.lower for v in self.variables])
        ub = np.array([v.upper for v in self.variables])
        return c, A, senses, b, lb, ub

    def max_violation(self, x) -> tuple[float, str]:
        """Largest row violation at x and the offending row's name."""
        worst, worst_name = 0.0, ""
        for row in self.rows:
            v = row.violation(x)
            if v > worst:
                worst, worst_name = v, row.name
        return worst, worst_name
