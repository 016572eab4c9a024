"""Observation records and weighting for the plus-minus rating engine.

A segment is a maximal stretch of a match with constant lineups; it is the
unit the regression sees. Times and ages are decimal years.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class SegmentRecord:
    match_id: str
    competition: str
    home_team: str
    away_team: str
    segment: int
    duration: float
    home_players: tuple[str, ...]
    away_players: tuple[str, ...]
    goals_home: int
    goals_away: int
    goal_diff_start: int
    home_reds: int
    away_reds: int
    match_time: float
    home_advantage: bool = True

    def __post_init__(self):
        if self.duration < 0:
            raise ValueError(f"segment {self.match_id}/{self.segment}: negative duration")
        if not 1 <= len(self.home_players) <= 11 or not 1 <= len(self.away_players) <= 11:
            raise ValueError(
                f"segment {self.match_id}/{self.segment}: sides must field 1-11 players"
            )

    @property
    def goal_diff(self) -> int:
        """Goals in this segment, in favor of the home team."""
        return self.goals_home - self.goals_away

    @property
    def goal_diff_end(self) -> int:
        return self.goal_diff_start + self.goal_diff


@dataclass(frozen=True)
class PlayerInfo:
    player_id: str
    name: str
    birth_time: float
    leagues: tuple[str, ...]

    def age_at(self, time: float) -> float:
        return time - self.birth_time


@dataclass(frozen=True)
class RatingParams:
    """Weighting, regularization, and grid settings.

    Defaults are the tuned values: time decay 0.1/year, duration offset and
    scale 300, blowout factor 2.5, ridge 16, similar-player pull 0.85 with
    age influence 0.35 capped at 35 teammates, age grid 16..42.

    Note the time weight: the decay is applied as exp(-rho1 * (T - t)) so
    that older matches weigh less.
    """

    rho1: float = 0.1
    rho2: float = 300.0
    rho3: float = 300.0
    rho4: float = 2.5
    lam: float = 16.0
    w_similar: float = 0.85
    w_age: float = 0.35
    max_similar: int = 35
    age_min: int = 16
    age_max: int = 42
    ref_time: float = 2014.5

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("regularization strength must be positive")
        if self.w_similar > 1:
            raise ValueError("similar-player weight must not exceed 1")
        if self.age_min >= self.age_max:
            raise ValueError("age grid must span at least two years")

    @property
    def age_grid(self) -> range:
        return range(self.age_min, self.age_max + 1)


def segment_weight(seg: SegmentRecord, params: RatingParams) -> float:
    """Importance of one segment: recency * duration * blowout state.

    The blowout factor applies only when the score is already lopsided at
    both ends of the segment.
    """
    gap_years = params.ref_time - seg.match_time
    if gap_years < 0:
        raise ValueError(
            f"match {seg.match_id} played after the rating time {params.ref_time}"
        )
    w_time = math.exp(-params.rho1 * gap_years)
    w_duration = (seg.duration + params.rho2) / params.rho3
    blowout = abs(seg.goal_diff_start) >= 2 and abs(seg.goal_diff_end) >= 2
    w_goals = params.rho4 if blowout else 1.0
    return w_time * w_duration * w_goals


def age_interpolation(age: float, age_min: int, age_max: int) -> list[tuple[int, float]]:
    """Piecewise-linear weights over the integer age grid.

    Weights are non-negative, sum to 1, sit on at most two consecutive
    grid ages, and average back to the clamped age.
    """
    clamped = min(max(age, float(age_min)), float(age_max))
    lo = int(math.floor(clamped))
    lo = min(lo, age_max - 1)
    frac = clamped - lo
    if frac <= 0.0:
        return [(lo, 1.0)]
    if frac >= 1.0:
        return [(lo + 1, 1.0)]
    return [(lo, 1.0 - frac), (lo + 1, frac)]
