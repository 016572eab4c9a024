"""Rating evaluation: match-outcome prediction through an ordered logit on
rating differences, quadratic loss against one-hot results, and split-half
reliability of the fitted ratings."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .model import RatingModel, fit_ratings, player_rating
from .records import PlayerInfo, RatingParams, SegmentRecord

AWAY_WIN, DRAW, HOME_WIN = 0, 1, 2
_PARAM_CAP = 30.0


@dataclass(frozen=True)
class MatchResult:
    match_id: str
    home_players: tuple[str, ...]
    away_players: tuple[str, ...]
    time: float
    outcome: int  # 0 away win, 1 draw, 2 home win


def matches_from_segments(segments: list[SegmentRecord]) -> list[MatchResult]:
    """Collapse segments into per-match results; lineups are the opening
    segment's, the outcome comes from the summed goals."""
    by_match: dict[str, list[SegmentRecord]] = defaultdict(list)
    for seg in segments:
        by_match[seg.match_id].append(seg)
    out = []
    for mid, segs in by_match.items():
        segs.sort(key=lambda s: s.segment)
        total = sum(s.goal_diff for s in segs)
        outcome = HOME_WIN if total > 0 else AWAY_WIN if total < 0 else DRAW
        out.append(
            MatchResult(
                mid, segs[0].home_players, segs[0].away_players, segs[0].match_time, outcome
            )
        )
    out.sort(key=lambda m: m.match_id)
    return out


@dataclass(frozen=True)
class OrderedLogit:
    """Three-outcome ordered logit on a single regressor with two cutpoints."""

    slope: float
    cut_low: float
    cut_high: float
    converged: bool
    capped: bool

    def probabilities(self, x: np.ndarray) -> np.ndarray:
        z = self.slope * np.asarray(x, dtype=float)
        p_away = _sigmoid(self.cut_low - z)
        p_not_home = _sigmoid(self.cut_high - z)
        return np.column_stack([p_away, p_not_home - p_away, 1.0 - p_not_home])


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


def fit_ordered_logit(
    x: np.ndarray, y: np.ndarray, grad_tol: float = 1e-8, max_iter: int = 20000
) -> OrderedLogit:
    """Maximum likelihood by gradient ascent with backtracking.

    Degenerate outcome sets push a cutpoint to infinity; parameters are
    capped and the fit flagged.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=int)
    present = np.bincount(y, minlength=3) / len(y)
    # cutpoints start at the empirical cumulative log-odds
    lo = np.clip(present[AWAY_WIN], 1e-6, 1 - 1e-6)
    hi = np.clip(present[AWAY_WIN] + present[DRAW], 1e-6, 1 - 1e-6)
    theta = np.array([0.0, np.log(lo / (1 - lo)), np.log(hi / (1 - hi))])
    theta[2] = max(theta[2], theta[1] + 1e-6)

    def log_likelihood(t):
        probs = OrderedLogit(t[0], t[1], t[2], True, False).probabilities(x)
        return float(np.log(np.maximum(probs[np.arange(len(y)), y], 1e-300)).sum())

    def gradient(t):
        b, c1, c2 = t
        z = b * x
        s1 = _sigmoid(c1 - z)
        s2 = _sigmoid(c2 - z)
        d1 = s1 * (1 - s1)
        d2 = s2 * (1 - s2)
        g = np.zeros(3)
        m0 = y == AWAY_WIN
        m1 = y == DRAW
        m2 = y == HOME_WIN
        p0 = np.maximum(s1, 1e-12)
        p1 = np.maximum(s2 - s1, 1e-12)
        p2 = np.maximum(1 - s2, 1e-12)
        g[0] = (
            -(d1[m0] / p0[m0] * x[m0]).sum()
            - ((d2[m1] - d1[m1]) / p1[m1] * x[m1]).sum()
            + (d2[m2] / p2[m2] * x[m2]).sum()
        )
        g[1] = (d1[m0] / p0[m0]).sum() - (d1[m1] / p1[m1]).sum()
        g[2] = (d2[m1] / p1[m1]).sum() - (d2[m2] / p2[m2]).sum()
        return g

    ll = log_likelihood(theta)
    converged = False
    for _ in range(max_iter):
        g = gradient(theta)
        if np.linalg.norm(g) < grad_tol:
            converged = True
            break
        step = 1.0 / max(1.0, len(y))
        improved = False
        for _ in range(60):
            candidate = theta + step * g
            candidate[2] = max(candidate[2], candidate[1])
            if np.abs(candidate).max() > _PARAM_CAP:
                candidate = np.clip(candidate, -_PARAM_CAP, _PARAM_CAP)
            cand_ll = log_likelihood(candidate)
            if cand_ll > ll:
                theta, ll = candidate, cand_ll
                improved = True
                break
            step /= 2.0
        if not improved:
            break
    capped = bool(np.abs(theta).max() >= _PARAM_CAP - 1e-9)
    return OrderedLogit(theta[0], theta[1], theta[2], converged and not capped, capped)


def team_rating_difference(model: RatingModel, match: MatchResult) -> float:
    home = np.mean([player_rating(model, p, match.time) for p in match.home_players])
    away = np.mean([player_rating(model, p, match.time) for p in match.away_players])
    return float(home - away)


def quadratic_loss(probs: np.ndarray, outcomes: np.ndarray) -> float:
    """Mean squared error of the probability vector against one-hot results."""
    onehot = np.zeros_like(probs)
    onehot[np.arange(len(outcomes)), outcomes] = 1.0
    return float(((probs - onehot) ** 2).sum(axis=1).mean())


def baseline_loss(outcomes: np.ndarray) -> float:
    """Loss of always predicting the empirical outcome frequencies."""
    freq = np.bincount(outcomes, minlength=3) / len(outcomes)
    probs = np.tile(freq, (len(outcomes), 1))
    return quadratic_loss(probs, np.asarray(outcomes))


@dataclass(frozen=True)
class EvaluationReport:
    avg_quadratic_loss: float
    split_half_correlation: float
    baseline_quadratic_loss: float
    logit: OrderedLogit
    n_matches: int
    repetitions: int


def split_half_reliability(
    segments: list[SegmentRecord],
    players: dict[str, PlayerInfo],
    params: RatingParams,
    mode: str = "novel",
    repetitions: int = 5,
    seed: int = 0,
) -> float:
    """Pearson correlation of ratings fitted on two random halves of the
    training matches, averaged over repetitions. Duplicate data in both
    halves therefore correlates at exactly 1."""
    by_match: dict[str, list[SegmentRecord]] = defaultdict(list)
    for seg in segments:
        by_match[seg.match_id].append(seg)
    match_ids = sorted(by_match)
    rng = np.random.default_rng(seed)
    scores = []
    for _ in range(repetitions):
        picks = rng.random(len(match_ids)) < 0.5
        half_a = [s for mid, take in zip(match_ids, picks) if take for s in by_match[mid]]
        half_b = [s for mid, take in zip(match_ids, picks) if not take for s in by_match[mid]]
        if not half_a or not half_b:
            continue
        model_a = fit_ratings(half_a, players, params, mode)
        model_b = fit_ratings(half_b, players, params, mode)
        shared = sorted(set(model_a.player_ids) & set(model_b.player_ids))
        if len(shared) < 3:
            continue
        ra = np.array([player_rating(model_a, p) for p in shared])
        rb = np.array([player_rating(model_b, p) for p in shared])
        if np.std(ra) < 1e-15 or np.std(rb) < 1e-15:
            scores.append(1.0 if np.allclose(ra, rb) else 0.0)
        else:
            scores.append(float(np.corrcoef(ra, rb)[0, 1]))
    return float(np.mean(scores)) if scores else float("nan")


def evaluate_ratings(
    model: RatingModel,
    heldout: list[MatchResult],
    training_segments: list[SegmentRecord] | None = None,
    repetitions: int = 5,
    seed: int = 0,
) -> EvaluationReport:
    """Validity (quadratic loss of ordered-logit forecasts on held-out
    matches) and reliability (split-half rating correlation on the
    training segments, when provided)."""
    diffs = np.array([team_rating_difference(model, m) for m in heldout])
    outcomes = np.array([m.outcome for m in heldout])
    logit = fit_ordered_logit(diffs, outcomes)
    loss = quadratic_loss(logit.probabilities(diffs), outcomes)
    reliability = float("nan")
    if training_segments is not None:
        reliability = split_half_reliability(
            training_segments, model.players, model.params, model.mode, repetitions, seed
        )
    return EvaluationReport(
        avg_quadratic_loss=loss,
        split_half_correlation=reliability,
        baseline_quadratic_loss=baseline_loss(outcomes),
        logit=logit,
        n_matches=len(heldout),
        repetitions=repetitions,
    )
