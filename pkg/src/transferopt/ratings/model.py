"""Solves the assembled least-squares system and packages the ratings."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .assembly import LsqSystem, assemble_system
from .records import PlayerInfo, RatingParams, age_interpolation


@dataclass
class SolveReport:
    iterations: int
    relative_residual: float
    converged: bool
    ridged_columns: tuple[str, ...] = ()


@dataclass(frozen=True)
class RatingModel:
    """Fitted coefficients plus the metadata needed to rate a player at an
    arbitrary time."""

    params: RatingParams
    mode: str
    player_ids: tuple[str, ...]
    beta_player: np.ndarray
    beta_age: np.ndarray
    competitions: tuple[str, ...]
    beta_home: np.ndarray
    beta_home_red: np.ndarray
    beta_away_red: np.ndarray
    leagues: tuple[str, ...]
    beta_league: np.ndarray
    players: dict[str, PlayerInfo]
    similar: dict[str, list[tuple[str, float]]]
    report: SolveReport = field(compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(
            self, "_index", {p: i for i, p in enumerate(self.player_ids)}
        )
        object.__setattr__(
            self, "_league_index", {b: i for i, b in enumerate(self.leagues)}
        )

    def age_term(self, age: float) -> float:
        if self.beta_age.size == 0:
            return 0.0
        total = 0.0
        for year, u in age_interpolation(age, self.params.age_min, self.params.age_max):
            total += u * self.beta_age[year - self.params.age_min]
        return total

    def home_advantage(self, competition: str) -> float:
        return float(self.beta_home[self.competitions.index(competition)])

    def average_home_advantage(self) -> float:
        return float(self.beta_home.mean()) if self.beta_home.size else 0.0

    def age_curve(self) -> dict[int, float]:
        return {
            year: float(self.beta_age[year - self.params.age_min])
            for year in self.params.age_grid
        } if self.beta_age.size else {}


def player_rating(model: RatingModel, player_id: str, at_time: float | None = None) -> float:
    """Full rating at a time: individual term + age curve + league factors."""
    if player_id not in model._index:
        raise KeyError(f"unknown player {player_id!r}")
    value = float(model.beta_player[model._index[player_id]])
    if model.mode == "plain":
        return value
    info = model.players[player_id]
    at_time = model.params.ref_time if at_time is None else at_time
    value += model.age_term(info.age_at(at_time))
    if info.leagues:
        value += float(
            np.mean([model.beta_league[model._league_index[lg]] for lg in info.leagues])
        )
    return value


def solve_system(
    system: LsqSystem,
    tol: float = 1e-8,
    max_iterations: int = 20000,
) -> tuple[np.ndarray, SolveReport]:
    """Minimize the sum of squared rows by conjugate gradients on the
    normal equations.

    Coefficients no row touches (possible at the unsmoothed age-grid
    endpoints) get a 1e-10 ridge so the operator stays positive definite;
    they are reported back. Converges when the normal-equation residual
    drops below tol relative to the right-hand side, else warns.
    """
    A = system.matrix.tocsr()
    col_norms = np.asarray(A.multiply(A).sum(axis=0)).ravel()
    ridge = np.where(col_norms <= 0.0, 1e-10, 0.0)
    ridged = tuple(
        _column_name(system, j) for j in np.nonzero(ridge)[0]
    )

    At = A.T.tocsr()
    rhs = At @ system.target

    def normal_matvec(v: np.ndarray) -> np.ndarray:
        return At @ (A @ v) + ridge * v

    x = np.zeros(A.shape[1])
    r = rhs - normal_matvec(x)
    p = r.copy()
    rs = float(r @ r)
    rhs_norm = float(np.linalg.norm(rhs)) or 1.0
    iterations = 0
    while np.sqrt(rs) / rhs_norm > tol and iterations < max_iterations:
        Ap = normal_matvec(p)
        denom = float(p @ Ap)
        if denom <= 0.0:
            break  # numerically semi-definite; stop at the best iterate
        alpha = rs / denom
        x += alpha * p
        r -= alpha * Ap
        rs_new = float(r @ r)
        p = r + (rs_new / rs) * p
        rs = rs_new
        iterations += 1

    rel = float(np.sqrt(rs)) / rhs_norm
    converged = rel <= tol
    if not converged:
        warnings.warn(
            f"normal-equation solve stopped at relative residual {rel:.2e} "
            f"after {iterations} iterations",
            RuntimeWarning,
            stacklevel=2,
        )
    return x, SolveReport(iterations, rel, converged, ridged)


def _column_name(system: LsqSystem, j: int) -> str:
    space = system.space
    if j < space.n_players:
        return f"player:{space.players[j]}"
    j -= space.n_players
    if j < len(space.ages):
        return f"age:{space.ages[j]}"
    j -= len(space.ages)
    if j < len(space.competitions):
        return f"home:{space.competitions[j]}"
    j -= len(space.competitions)
    if j < 8:
        side = "home_red" if j < 4 else "away_red"
        return f"{side}:{j % 4 + 1}"
    return f"league:{space.leagues[j - 8]}"


def fit_ratings(
    segments,
    players: dict[str, PlayerInfo],
    params: RatingParams | None = None,
    mode: str = "novel",
    tol: float = 1e-8,
) -> RatingModel:
    """Assemble and solve in one step."""
    params = params or RatingParams()
    system = assemble_system(segments, players, params, mode)
    x, report = solve_system(system, tol=tol)
    space = system.space
    n_p = space.n_players
    n_a = len(space.ages)
    n_c = len(space.competitions)
    if mode == "plain":
        beta_age = np.zeros(0)
        beta_home = np.zeros(0)
        home_red = np.zeros(4)
        away_red = np.zeros(4)
        beta_league = np.zeros(0)
    else:
        beta_age = x[n_p : n_p + n_a]
        beta_home = x[n_p + n_a : n_p + n_a + n_c]
        home_red = x[n_p + n_a + n_c : n_p + n_a + n_c + 4]
        away_red = x[n_p + n_a + n_c + 4 : n_p + n_a + n_c + 8]
        beta_league = x[n_p + n_a + n_c + 8 :]
    return RatingModel(
        params=params,
        mode=mode,
        player_ids=space.players,
        beta_player=x[:n_p].copy(),
        beta_age=beta_age.copy(),
        competitions=space.competitions,
        beta_home=beta_home.copy(),
        beta_home_red=home_red.copy(),
        beta_away_red=away_red.copy(),
        leagues=space.leagues,
        beta_league=beta_league.copy(),
        players={p: players[p] for p in space.players} if mode == "novel" else {},
        similar=system.similar,
        report=report,
    )
