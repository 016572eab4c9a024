"""Assembles the plus-minus regression as a sparse least-squares system.

Plain mode is the classic ridge setup: per-90 goal difference explained by
player indicators, every coefficient shrunk to zero, red-card segments
discarded. Novel mode rescales short-handed sides to eleven, adds age,
league, home-advantage, and red-card terms, smooths the age curve, and
shrinks each player's full rating toward that of frequent teammates.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .records import PlayerInfo, RatingParams, SegmentRecord, age_interpolation, segment_weight


@dataclass(frozen=True)
class VariableSpace:
    """Index layout of the coefficient vector; every coefficient has
    exactly one index."""

    players: tuple[str, ...]
    ages: tuple[int, ...]
    competitions: tuple[str, ...]
    leagues: tuple[str, ...]
    mode: str

    def __post_init__(self):
        object.__setattr__(self, "_player_index", {p: i for i, p in enumerate(self.players)})

    @property
    def n_players(self) -> int:
        return len(self.players)

    def player(self, pid: str) -> int:
        return self._player_index[pid]

    def age(self, year: int) -> int:
        return self.n_players + (year - self.ages[0])

    def competition(self, label: str) -> int:
        return self.n_players + len(self.ages) + self.competitions.index(label)

    def red(self, side: str, n: int) -> int:
        base = self.n_players + len(self.ages) + len(self.competitions)
        return base + (0 if side == "home" else 4) + (n - 1)

    def league(self, label: str) -> int:
        base = self.n_players + len(self.ages) + len(self.competitions) + 8
        return base + self.leagues.index(label)

    @property
    def size(self) -> int:
        if self.mode == "plain":
            return self.n_players
        return self.n_players + len(self.ages) + len(self.competitions) + 8 + len(self.leagues)


@dataclass
class LsqSystem:
    matrix: sparse.csr_matrix
    target: np.ndarray
    space: VariableSpace
    n_data_rows: int
    n_reg_rows: int
    dropped_segments: int
    similar: dict[str, list[tuple[str, float]]] = field(default_factory=dict)

    @property
    def n_squared_terms(self) -> int:
        """Rows of the quadratic objective (data plus regularization)."""
        return self.matrix.shape[0]


def similar_players(
    segments: list[SegmentRecord], max_similar: int
) -> dict[str, list[tuple[str, float]]]:
    """Most-shared-minutes teammates per player, with the time of the last
    match the pair appeared in together. Ties break on (minutes desc,
    player id asc); the list is capped at max_similar."""
    minutes: dict[tuple[str, str], float] = defaultdict(float)
    last: dict[tuple[str, str], float] = defaultdict(float)
    for seg in segments:
        for side in (seg.home_players, seg.away_players):
            for i, p in enumerate(side):
                for q in side[i + 1:]:
                    key = (p, q) if p < q else (q, p)
                    minutes[key] += seg.duration
                    if seg.match_time > last[key]:
                        last[key] = seg.match_time
    per_player: dict[str, list[tuple[str, float, float]]] = defaultdict(list)
    for (p, q), mins in minutes.items():
        t = last[(p, q)]
        per_player[p].append((q, mins, t))
        per_player[q].append((p, mins, t))
    out: dict[str, list[tuple[str, float]]] = {}
    for p, mates in per_player.items():
        mates.sort(key=lambda m: (-m[1], m[0]))
        out[p] = [(q, t) for q, _, t in mates[:max_similar]]
    return out


class _RowBuilder:
    def __init__(self):
        self.rows: list[int] = []
        self.cols: list[int] = []
        self.vals: list[float] = []
        self.target: list[float] = []
        self.n = 0

    def add(self, coeffs: dict[int, float], rhs: float) -> None:
        for col, val in coeffs.items():
            if val != 0.0:
                self.rows.append(self.n)
                self.cols.append(col)
                self.vals.append(val)
        self.target.append(rhs)
        self.n += 1

    def build(self, n_cols: int) -> tuple[sparse.csr_matrix, np.ndarray]:
        mat = sparse.csr_matrix(
            (self.vals, (self.rows, self.cols)), shape=(self.n, n_cols)
        )
        return mat, np.asarray(self.target)


def _aux_coeffs(
    coeffs: dict[int, float],
    space: VariableSpace,
    info: PlayerInfo,
    at_time: float,
    age_weight: float,
    factor: float,
    params: RatingParams,
) -> None:
    """Accumulate factor * f_aux(player, at_time, age_weight) into coeffs:
    the individual term, the age curve at that time, and league factors."""
    coeffs[space.player(info.player_id)] = coeffs.get(space.player(info.player_id), 0.0) + factor
    if age_weight != 0.0:
        for year, u in age_interpolation(info.age_at(at_time), params.age_min, params.age_max):
            col = space.age(year)
            coeffs[col] = coeffs.get(col, 0.0) + factor * age_weight * u
    if info.leagues:
        share = factor / len(info.leagues)
        for lg in info.leagues:
            col = space.league(lg)
            coeffs[col] = coeffs.get(col, 0.0) + share


def assemble_system(
    segments: list[SegmentRecord],
    players: dict[str, PlayerInfo],
    params: RatingParams,
    mode: str = "novel",
) -> LsqSystem:
    """One weighted data row per usable segment plus one regularization row
    per coefficient (age-grid endpoints excepted)."""
    if mode not in ("plain", "novel"):
        raise ValueError(f"unknown mode {mode!r}")

    usable: list[SegmentRecord] = []
    dropped = 0
    for seg in segments:
        if not seg.home_players or not seg.away_players:
            raise ValueError(f"segment {seg.match_id}/{seg.segment} has an empty side")
        if mode == "plain" and (seg.home_reds > 0 or seg.away_reds > 0):
            dropped += 1  # plain ratings ignore short-handed play entirely
            continue
        usable.append(seg)

    ids = sorted({p for s in usable for p in s.home_players + s.away_players})
    if mode == "novel":
        missing = [p for p in ids if p not in players]
        if missing:
            raise ValueError(f"players without age data: {missing[:5]}")
    space = VariableSpace(
        players=tuple(ids),
        ages=tuple(params.age_grid) if mode == "novel" else (),
        competitions=tuple(sorted({s.competition for s in usable})) if mode == "novel" else (),
        leagues=tuple(
            sorted({lg for p in ids for lg in players[p].leagues})
        ) if mode == "novel" else (),
        mode=mode,
    )

    rb = _RowBuilder()
    for seg in usable:
        w = segment_weight(seg, params) if mode == "novel" else 1.0
        factor = w * seg.duration / 90.0
        coeffs: dict[int, float] = {}
        if mode == "plain":
            for pid in seg.home_players:
                coeffs[space.player(pid)] = coeffs.get(space.player(pid), 0.0) + factor
            for pid in seg.away_players:
                coeffs[space.player(pid)] = coeffs.get(space.player(pid), 0.0) - factor
        else:
            scale_home = 11.0 / len(seg.home_players)
            scale_away = 11.0 / len(seg.away_players)
            for pid in seg.home_players:
                _aux_coeffs(coeffs, space, players[pid], seg.match_time, 1.0,
                            factor * scale_home, params)
            for pid in seg.away_players:
                _aux_coeffs(coeffs, space, players[pid], seg.match_time, 1.0,
                            -factor * scale_away, params)
            red_diff = seg.home_reds - seg.away_reds
            if red_diff > 0:
                coeffs[space.red("home", min(red_diff, 4))] = factor
            elif red_diff < 0:
                coeffs[space.red("away", min(-red_diff, 4))] = -factor
            if seg.home_advantage:
                col = space.competition(seg.competition)
                coeffs[col] = coeffs.get(col, 0.0) + factor
        rb.add(coeffs, w * seg.goal_diff)
    n_data = rb.n

    lam = params.lam
    similar: dict[str, list[tuple[str, float]]] = {}
    if mode == "plain":
        for pid in space.players:
            rb.add({space.player(pid): lam}, 0.0)
    else:
        similar = similar_players(usable, params.max_similar)
        for pid in space.players:
            coeffs = {}
            _aux_coeffs(coeffs, space, players[pid], params.ref_time, 1.0, lam, params)
            mates = similar.get(pid, [])
            if mates:
                pull = -lam * params.w_similar / len(mates)
                for mate, t_shared in mates:
                    _aux_coeffs(coeffs, space, players[mate], t_shared,
                                params.w_age, pull, params)
            rb.add(coeffs, 0.0)
        for year in params.age_grid:
            if year in (params.age_min, params.age_max):
                continue  # endpoints carry no smoothing row
            rb.add(
                {
                    space.age(year): lam,
                    space.age(year - 1): -lam / 2.0,
                    space.age(year + 1): -lam / 2.0,
                },
                0.0,
            )
        for comp in space.competitions:
            rb.add({space.competition(comp): lam}, 0.0)
        for side in ("home", "away"):
            for n in range(1, 5):
                rb.add({space.red(side, n): lam}, 0.0)
        for lg in space.leagues:
            rb.add({space.league(lg): lam}, 0.0)

    matrix, target = rb.build(space.size)
    return LsqSystem(
        matrix=matrix,
        target=target,
        space=space,
        n_data_rows=n_data,
        n_reg_rows=rb.n - n_data,
        dropped_segments=dropped,
        similar=similar,
    )
