"""Bounded-variable revised simplex with an explicit basis inverse.

The primal method runs two phases (artificials only where a slack cannot
start basic) and prices with Dantzig's rule, falling back to Bland's rule
after a stall so cycling cannot occur. A dual-simplex repair loop lets the
branch-and-bound warm-start child nodes from the parent basis; it is an
optimization only, every exit re-establishes primal optimality conditions.

Rows are equilibrated (scaled by their largest coefficient) internally;
all reported activities and objectives are on the original scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problem import MilpProblem

AT_LOWER, AT_UPPER, BASIC = 0, 1, 2

_PIV_TOL = 1e-9
_DJ_TOL = 1e-9
_REFACTOR_EVERY = 128
_STALL_LIMIT = 300


@dataclass
class LpResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    objective: float | None
    basis: np.ndarray | None
    statuses: np.ndarray | None
    iterations: int


class SimplexError(RuntimeError):
    """Internal numerical failure; callers cold-restart or abort."""


class SimplexCore:
    """Holds one LP in computational form and solves it repeatedly under
    changing variable bounds (the branch-and-bound use case).

    Columns are ordered [structural, slacks, artificials]. Artificial
    bounds are opened only during phase 1.
    """

    def __init__(self, c, A, senses, b, lb, ub, feasibility_tol: float = 1e-6):
        m, n = A.shape
        self.m, self.n = m, n
        self.feas_tol = feasibility_tol

        scale = np.abs(A).max(axis=1, initial=0.0) if A.size else np.ones(m)
        scale = np.maximum(scale, 1.0)  # only shrink large rows
        self.row_scale = scale

        A = A / scale[:, None]
        b = b / scale

        n_slack = sum(1 for s in senses if s != "=")
        N = n + n_slack + m  # artificials allocated for every row
        self.N = N
        self.A = np.zeros((m, N))
        self.A[:, :n] = A
        self.b = b.copy()
        self.c_struct = c.copy()

        self.slack_of = np.full(m, -1, dtype=np.int64)
        col = n
        for i, s in enumerate(senses):
            if s == "<=":
                self.A[i, col] = 1.0
                self.slack_of[i] = col
                col += 1
            elif s == ">=":
                self.A[i, col] = -1.0
                self.slack_of[i] = col
                col += 1
        self.art_start = n + n_slack
        for i in range(m):
            # sign set per solve from the initial residual
            self.A[i, self.art_start + i] = 1.0

        self.lb0 = np.concatenate([lb, np.zeros(n_slack), np.zeros(m)])
        self.ub0 = np.concatenate([ub, np.full(n_slack, np.inf), np.zeros(m)])

        self.basis = np.zeros(m, dtype=np.int64)
        self.statuses = np.zeros(N, dtype=np.int8)
        self.B_inv = np.eye(m)
        self.x_basic = np.zeros(m)
        self.lb = self.lb0.copy()
        self.ub = self.ub0.copy()
        self.iterations = 0
        self._since_refactor = 0
        self._dual_ready = False  # current basis known to be dual feasible

    # -- state helpers -------------------------------------------------

    def set_bounds(self, lb_struct, ub_struct) -> None:
        self.lb[: self.n] = lb_struct
        self.ub[: self.n] = ub_struct

    def _nonbasic_values(self) -> np.ndarray:
        x = np.where(self.statuses == AT_UPPER, self.ub, self.lb)
        x[self.statuses == BASIC] = 0.0
        # fixed artificials sit at 0 either way
        return x

    def _recompute_basics(self) -> None:
        x_nb = self._nonbasic_values()
        z = self.b - self.A @ x_nb
        self.x_basic = self.B_inv @ z

    def _refactorize(self) -> None:
        B = self.A[:, self.basis]
        try:
            self.B_inv = np.linalg.inv(B)
        except np.linalg.LinAlgError as exc:
            raise SimplexError("singular basis") from exc
        self._recompute_basics()
        self._since_refactor = 0

    def _full_x(self) -> np.ndarray:
        x = self._nonbasic_values()
        x[self.basis] = self.x_basic
        return x

    def _pivot_update(self, r: int, j: int, w: np.ndarray) -> None:
        """Replace basis row r by column j; w = B_inv @ A[:, j]."""
        piv = w[r]
        if abs(piv) < _PIV_TOL:
            raise SimplexError("pivot element vanished")
        self.B_inv[r] /= piv
        others = np.arange(self.m) != r
        self.B_inv[others] -= np.outer(w[others], self.B_inv[r])
        self.statuses[self.basis[r]] = AT_LOWER  # caller overrides side
        self.basis[r] = j
        self.statuses[j] = BASIC

    # -- primal simplex ------------------------------------------------

    def _reduced_costs(self, c_full: np.ndarray) -> np.ndarray:
        y = c_full[self.basis] @ self.B_inv
        return c_full - y @ self.A

    def _primal_loop(self, c_full: np.ndarray, max_iter: int) -> str:
        """Runs primal pivots from the current (primal-feasible) state.

        Returns "optimal" or "unbounded".
        """
        bland = False
        stall = 0
        for _ in range(max_iter):
            d = self._reduced_costs(c_full)
            fixed = self.lb == self.ub
            can_rise = (self.statuses == AT_LOWER) & ~fixed & (d > _DJ_TOL)
            can_fall = (self.statuses == AT_UPPER) & ~fixed & (d < -_DJ_TOL)
            eligible = can_rise | can_fall
            if not eligible.any():
                return "optimal"
            idx = np.nonzero(eligible)[0]
            if bland:
                j = int(idx[0])
            else:
                j = int(idx[np.argmax(np.abs(d[idx]))])
            sigma = 1.0 if self.statuses[j] == AT_LOWER else -1.0

            w = self.B_inv @ self.A[:, j]
            delta = -sigma * w  # basic change per unit entering movement
            lo_b = self.lb[self.basis]
            hi_b = self.ub[self.basis]
            t = np.full(self.m, np.inf)
            neg = delta < -_PIV_TOL
            pos = delta > _PIV_TOL
            t[neg] = (self.x_basic[neg] - lo_b[neg]) / -delta[neg]
            t[pos] = (hi_b[pos] - self.x_basic[pos]) / delta[pos]
            t = np.maximum(t, 0.0)
            t_self = self.ub[j] - self.lb[j]

            t_basic = t.min() if self.m else np.inf
            step = min(t_basic, t_self)
            if not np.isfinite(step):
                return "unbounded"

            self.iterations += 1
            self._since_refactor += 1
            if step < 1e-12:
                stall += 1
                if stall > _STALL_LIMIT:
                    bland = True
            else:
                stall = 0

            if t_self <= t_basic:
                # bound flip, basis unchanged
                self.statuses[j] = AT_UPPER if sigma > 0 else AT_LOWER
                self.x_basic += delta * t_self
            else:
                ties = np.nonzero(t <= t_basic + 1e-12)[0]
                r = int(ties[np.argmin(self.basis[ties])])
                leave_to = AT_LOWER if delta[r] < 0 else AT_UPPER
                enter_val = (self.lb[j] + step) if sigma > 0 else (self.ub[j] - step)
                self.x_basic += delta * step
                leaving = self.basis[r]
                self._pivot_update(r, j, w)
                self.statuses[leaving] = leave_to
                self.x_basic[r] = enter_val

            if self._since_refactor >= _REFACTOR_EVERY:
                self._refactorize()
        raise SimplexError("primal iteration limit")

    def _phase1(self) -> str:
        """Build a starting basis, running phase-1 pivots if needed."""
        self.statuses[:] = AT_LOWER
        finite_lower = np.isfinite(self.lb)
        self.statuses[~finite_lower] = AT_UPPER  # not expected here
        x_nb = self._nonbasic_values()
        resid = self.b - self.A[:, : self.art_start] @ x_nb[: self.art_start]

        need_art = np.zeros(self.m, dtype=bool)
        for i in range(self.m):
            s = self.slack_of[i]
            if s >= 0:
                sig = self.A[i, s]
                val = resid[i] / sig
                if val >= -1e-11:
                    self.basis[i] = s
                    self.statuses[s] = BASIC
                    continue
            need_art[i] = True

        c_phase1 = np.zeros(self.N)
        for i in range(self.m):
            art = self.art_start + i
            if need_art[i]:
                self.A[i, art] = 1.0 if resid[i] >= 0 else -1.0
                self.basis[i] = art
                self.statuses[art] = BASIC
                self.lb[art], self.ub[art] = 0.0, np.inf
                c_phase1[art] = -1.0
            else:
                self.lb[art], self.ub[art] = 0.0, 0.0

        self._refactorize()
        if need_art.any():
            status = self._primal_loop(c_phase1, max_iter=20000 + 40 * self.N)
            if status != "optimal":
                raise SimplexError("phase 1 unbounded")
            art_sum = self.x_basic[self.basis >= self.art_start].sum()
            if art_sum > 1e-7:
                return "infeasible"
            self._drive_out_artificials()
        self.lb[self.art_start:] = 0.0
        self.ub[self.art_start:] = 0.0
        return "feasible"

    def _drive_out_artificials(self) -> None:
        """Pivot basic artificials (all at value 0) out where possible."""
        for r in range(self.m):
            if self.basis[r] < self.art_start:
                continue
            alpha = self.B_inv[r] @ self.A[:, : self.art_start]
            nonbasic = self.statuses[: self.art_start] != BASIC
            candidates = np.nonzero(nonbasic & (np.abs(alpha) > 1e-7))[0]
            if candidates.size == 0:
                continue  # redundant row, artificial stays pinned at 0
            j = int(candidates[0])
            w = self.B_inv @ self.A[:, j]
            old_status = self.statuses[j]
            art = self.basis[r]
            self._pivot_update(r, j, w)
            self.statuses[art] = AT_LOWER
            self.x_basic[r] = self.lb[j] if old_status == AT_LOWER else self.ub[j]
        self._refactorize()

    def solve_primal(self) -> str:
        """Cold solve under the current bounds."""
        self._dual_ready = False
        if self._phase1() == "infeasible":
            return "infeasible"
        c_full = np.zeros(self.N)
        c_full[: self.n] = self.c_struct
        status = self._primal_loop(c_full, max_iter=50000 + 40 * self.N)
        if status == "optimal":
            self._recompute_basics()
            self._dual_ready = True
        return status

    # -- dual simplex warm start ----------------------------------------

    def warm_solve_current(self) -> str:
        """Re-optimize after a bounds change from the basis the core
        already holds. Reduced costs depend on the basis alone, so any
        basis left by a previous optimal (or dual) run stays dual
        feasible; a dual repair restores primal feasibility and a primal
        polish finishes. Cold restart on any trouble: the warm path is an
        optimization, never a correctness dependency.
        """
        if not self._dual_ready:
            return self.solve_primal()
        try:
            self._recompute_basics()
            status = self._dual_loop(max_iter=6000)
            if status == "infeasible":
                return "infeasible"
            c_full = np.zeros(self.N)
            c_full[: self.n] = self.c_struct
            out = self._primal_loop(c_full, max_iter=50000 + 40 * self.N)
            if out == "optimal":
                self._recompute_basics()
                if self._primal_violation() <= 1e-7:
                    return "optimal"
                raise SimplexError("warm start left primal infeasible")
            if out == "unbounded":
                return "unbounded"
            raise SimplexError("warm start did not converge")
        except SimplexError:
            return self.solve_primal()

    def _primal_violation(self) -> float:
        lo = self.lb[self.basis] - self.x_basic
        hi = self.x_basic - self.ub[self.basis]
        return float(max(lo.max(initial=0.0), hi.max(initial=0.0)))

    def _dual_loop(self, max_iter: int) -> str:
        """Pivot until the basis is primal feasible again.

        Entering choice keeps reduced-cost signs valid (dual ratio test);
        returns "repaired" or "infeasible".
        """
        c_full = np.zeros(self.N)
        c_full[: self.n] = self.c_struct
        fallback = False
        zero_steps = 0
        for _ in range(max_iter):
            lo_b = self.lb[self.basis]
            hi_b = self.ub[self.basis]
            below = lo_b - self.x_basic
            above = self.x_basic - hi_b
            worst = np.maximum(below, above)
            r = int(np.argmax(worst))
            if worst[r] <= 1e-9:
                return "repaired"
            going_down = below[r] > above[r]  # x below lower: leaves at lower

            alpha = self.B_inv[r] @ self.A
            d = self._reduced_costs(c_full)
            fixed = self.lb == self.ub
            at_lo = (self.statuses == AT_LOWER) & ~fixed
            at_up = (self.statuses == AT_UPPER) & ~fixed
            if going_down:
                eligible = (at_lo & (alpha < -_PIV_TOL)) | (at_up & (alpha > _PIV_TOL))
            else:
                eligible = (at_lo & (alpha > _PIV_TOL)) | (at_up & (alpha < -_PIV_TOL))
            idx = np.nonzero(eligible)[0]
            if idx.size == 0:
                return "infeasible"
            ratios = np.abs(d[idx] / alpha[idx])
            j = int(idx[0]) if fallback else int(idx[np.argmin(ratios)])

            if not fallback:
                if ratios.min() < 1e-12:
                    zero_steps += 1
                    if zero_steps > _STALL_LIMIT:
                        fallback = True
                else:
                    zero_steps = 0

            w = self.B_inv @ self.A[:, j]
            leaving = self.basis[r]
            self._pivot_update(r, j, w)
            self.statuses[leaving] = AT_LOWER if going_down else AT_UPPER
            self.iterations += 1
            self._since_refactor += 1
            if self._since_refactor >= _REFACTOR_EVERY:
                self._refactorize()
            else:
                self._recompute_basics()
        raise SimplexError("dual iteration limit")

    # -- extraction ------------------------------------------------------

    def solution(self) -> tuple[np.ndarray, float]:
        x = self._full_x()
        obj = float(self.c_struct @ x[: self.n])
        return x[: self.n].copy(), obj


def solve_lp(problem: MilpProblem, feasibility_tol: float = 1e-6) -> LpResult:
    """Solve the continuous relaxation of a problem to optimality.

    Deterministic for identical input; raises SimplexError only on
    internal numerical failure.
    """
    c, A, senses, b, lb, ub = problem.dense()
    core = SimplexCore(c, A, senses, b, lb, ub, feasibility_tol)
    status = core.solve_primal()
    if status != "optimal":
        return LpResult(status, None, None, None, None, core.iterations)
    x, obj = core.solution()
    return LpResult(
        "optimal", x, obj, core.basis.copy(), core.statuses.copy(), core.iterations
    )
