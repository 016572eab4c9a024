"""Plus-minus rating engine: segment records, sparse least-squares
assembly, conjugate-gradient solve, and forecast-based evaluation."""

from .assembly import LsqSystem, VariableSpace, assemble_system, similar_players
from .evaluation import (
    EvaluationReport,
    MatchResult,
    OrderedLogit,
    baseline_loss,
    evaluate_ratings,
    fit_ordered_logit,
    matches_from_segments,
    quadratic_loss,
    split_half_reliability,
    team_rating_difference,
)
from .model import RatingModel, SolveReport, fit_ratings, player_rating, solve_system
from .records import (
    PlayerInfo,
    RatingParams,
    SegmentRecord,
    age_interpolation,
    segment_weight,
)

__all__ = [
    "EvaluationReport",
    "LsqSystem",
    "MatchResult",
    "OrderedLogit",
    "PlayerInfo",
    "RatingModel",
    "RatingParams",
    "SegmentRecord",
    "SolveReport",
    "VariableSpace",
    "age_interpolation",
    "assemble_system",
    "baseline_loss",
    "evaluate_ratings",
    "fit_ordered_logit",
    "fit_ratings",
    "matches_from_segments",
    "player_rating",
    "quadratic_loss",
    "segment_weight",
    "similar_players",
    "solve_system",
    "split_half_reliability",
    "team_rating_difference",
]
