"""Synthetic desk-scale data: league-sized club instances with a fitted
value model, plus controlled families for budget/loan studies.

Everything is deterministic from the seed. Club shapes follow the
2013/14 English Premier League season: 20 clubs, 25-player registration
lists, transfer targets on top.
"""

from __future__ import annotations

import dataclasses
import zlib

import numpy as np

from .domain import Formation, FORMATIONS, Instance, Player, Role
from .ratings.records import PlayerInfo, RatingParams, SegmentRecord, age_interpolation
from .values import ValueModel, fit_value_model

CLUB_SIZES: dict[str, int] = {
    "Arsenal FC": 41,
    "Aston Villa": 55,
    "Cardiff City": 61,
    "Chelsea FC": 53,
    "Crystal Palace": 60,
    "Everton FC": 45,
    "Fulham FC": 51,
    "Hull City": 55,
    "Liverpool FC": 46,
    "Manchester City": 37,
    "Manchester United": 42,
    "Newcastle United": 50,
    "Norwich City": 50,
    "Southampton FC": 50,
    "Stoke City": 50,
    "Sunderland AFC": 51,
    "Swansea City": 55,
    "Tottenham Hotspur": 48,
    "West Bromwich Albion": 51,
    "West Ham United": 51,
}

CLUB_BUDGETS: dict[str, int] = {
    "Arsenal FC": 45_000,
    "Aston Villa": 12_000,
    "Cardiff City": 8_000,
    "Chelsea FC": 60_000,
    "Crystal Palace": 9_000,
    "Everton FC": 18_000,
    "Fulham FC": 9_000,
    "Hull City": 8_000,
    "Liverpool FC": 40_000,
    "Manchester City": 60_000,
    "Manchester United": 55_000,
    "Newcastle United": 14_000,
    "Norwich City": 8_000,
    "Southampton FC": 16_000,
    "Stoke City": 10_000,
    "Sunderland AFC": 9_000,
    "Swansea City": 11_000,
    "Tottenham Hotspur": 35_000,
    "West Bromwich Albion": 9_000,
    "West Ham United": 11_000,
}

# Age-bucket growth slopes on the fourth-root scale and residual spreads:
# young players appreciate with high variance, veterans depreciate.
_BUCKET_AGES = (18.0, 21.5, 23.5, 25.5, 27.5, 29.5, 31.5, 34.5)
_BUCKET_SLOPES = (1.060, 1.048, 1.035, 1.022, 1.005, 0.978, 0.938, 0.890)
_BUCKET_SPREAD = (0.24, 0.20, 0.16, 0.13, 0.11, 0.10, 0.09, 0.09)

_ROLE_CONSTANTS = {
    Role.GK: -0.05,
    Role.RB: 0.00,
    Role.CB: 0.02,
    Role.LB: 0.00,
    Role.RW: 0.06,
    Role.CM: 0.04,
    Role.LW: 0.06,
    Role.AM: 0.08,
    Role.FW: 0.10,
}

# Owned-squad role template (25 slots): covers the default 433 outright
# (6 CM, 6 FW counting dual-role wingers) and leans on dual roles for the
# back-three formations.
_SQUAD_TEMPLATE: list[tuple[Role, ...]] = (
    [(Role.GK,)] * 3
    + [(Role.RB, Role.CB), (Role.RB,)]
    + [(Role.CB,)] * 5
    + [(Role.LB, Role.CB), (Role.LB,)]
    + [(Role.CM,)] * 4 + [(Role.CM, Role.AM)] * 2
    + [(Role.RW, Role.FW), (Role.LW, Role.FW)]
    + [(Role.AM, Role.CM)]
    + [(Role.FW,)] * 4
)


def synthetic_value_history(seed: int = 0, rows_per_group: int = 80) -> list:
    """One season of (age, roles, value_now, value_next) rows drawn from
    the bucket growth model with multiplicative noise."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 11]))
    roles = list(Role)
    history = []
    for age, slope, spread in zip(_BUCKET_AGES, _BUCKET_SLOPES, _BUCKET_SPREAD):
        for _ in range(rows_per_group):
            picked = {roles[int(rng.integers(0, len(roles)))]}
            if rng.random() < 0.25:
                picked.add(roles[int(rng.integers(0, len(roles)))])
            now = float(np.exp(rng.uniform(np.log(300), np.log(60_000))))
            base = slope * now**0.25 + sum(_ROLE_CONSTANTS[r] for r in picked)
            eps = float(np.clip(rng.normal(0.0, spread), -0.75, 1.5))
            history.append((age + rng.uniform(-0.4, 0.4), picked, now, base**4 * (1 + eps)))
    return history


def synthetic_value_model(seed: int = 0) -> ValueModel:
    return fit_value_model(synthetic_value_history(seed))


def _draw_player(rng, pid: str, owned: bool, roles: list[Role], quality: float) -> Player:
    age = float(np.clip(rng.normal(25.2, 3.8), 17.0, 36.0))
    value = int(np.clip(np.exp(rng.normal(np.log(4200 * quality), 0.75)), 250, 80_000))
    # value-linked rating with noise; the market prices performance imperfectly
    rating = 0.035 * np.log(max(value, 200) / 200.0) + rng.normal(0.0, 0.03)
    rating = float(np.clip(rating, -0.05, 0.45))
    value = int(value)
    return Player(
        id=pid,
        name=pid.replace("_", " ").title(),
        age=round(age, 1),
        roles=frozenset(roles),
        owned=owned,
        current_value=value,
        purchase_price=int(value * rng.uniform(1.0, 1.35)),
        sale_price=int(value * rng.uniform(0.8, 1.05)),
        loan_in_fee=int(value * rng.uniform(0.08, 0.18)) + 1,
        loan_out_fee=int(value * rng.uniform(0.04, 0.12)) + 1,
        rating=round(rating, 4),
    )


def synthetic_instance(
    club: str,
    seed: int = 0,
    alpha: float = 0.2,
    growth_factor: float = 1.0,
    formation: Formation | None = None,
    n_players: int | None = None,
    budget: int | None = None,
) -> Instance:
    """One club's decision problem. Club-name seeds make every club a
    different but reproducible draw."""
    total = n_players or CLUB_SIZES.get(club, 45)
    rng = np.random.default_rng(np.random.SeedSequence([seed, zlib.crc32(club.encode())]))
    n_owned = 25 + min(6, max(0, (total - 37) // 4))
    n_targets = total - n_owned
    quality = (budget if budget is not None else CLUB_BUDGETS.get(club, 15_000)) / 15_000.0

    players: list[Player] = []
    slug = club.lower().replace(" ", "_")
    extra_roles = list(Role)
    for i in range(n_owned):
        if i < len(_SQUAD_TEMPLATE):
            roles = list(_SQUAD_TEMPLATE[i])
        else:
            roles = [extra_roles[int(rng.integers(0, len(extra_roles)))]]
        if rng.random() < 0.2:
            roles.append(extra_roles[int(rng.integers(0, len(extra_roles)))])
        players.append(_draw_player(rng, f"{slug}_o{i:02d}", True, roles, quality))
    for i in range(n_targets):
        roles = [extra_roles[int(rng.integers(0, len(extra_roles)))]]
        if rng.random() < 0.30:
            roles.append(extra_roles[int(rng.integers(0, len(extra_roles)))])
        players.append(_draw_player(rng, f"{slug}_t{i:02d}", False, roles, quality * 1.1))

    owned_value = sum(p.current_value for p in players if p.owned)
    return Instance(
        club=club,
        players=tuple(players),
        budget=budget if budget is not None else CLUB_BUDGETS.get(club, 15_000),
        squad_size=25,
        formation=formation or FORMATIONS["433"],
        value_threshold=owned_value,
        alpha=alpha,
        growth_factor=growth_factor,
    )


def league_instances(seed: int = 0, alpha: float = 0.2) -> list[Instance]:
    return [synthetic_instance(club, seed=seed, alpha=alpha) for club in CLUB_SIZES]


def loan_study_instance(seed: int, budget: int, alpha: float = 0.2) -> Instance:
    """Family member for the budget/loan trend: a thin owned squad that
    must acquire several players, with loans far cheaper than purchases."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 17]))
    players: list[Player] = []
    for i in range(20):
        players.append(_draw_player(rng, f"own{i:02d}", True, list(_SQUAD_TEMPLATE[i]), 0.8))
    for i in range(14):
        roles = [list(Role)[int(rng.integers(0, 9))]]
        p = _draw_player(rng, f"tgt{i:02d}", False, roles, 1.0)
        players.append(p)
    owned_value = sum(p.current_value for p in players if p.owned)
    return Instance(
        club=f"LoanStudy{seed}",
        players=tuple(players),
        budget=budget,
        squad_size=25,
        formation=Formation("open", {Role.GK: 2}),
        value_threshold=int(owned_value * 0.7),
        alpha=alpha,
    )


# -- synthetic match corpus for the rating engine -----------------------


class MatchCorpusTruth:
    """Ground truth behind a generated corpus: coefficient lookups mirror
    the rating model so recovery can be scored."""

    def __init__(self, params: RatingParams, beta_player, beta_age, home_adv,
                 home_red, away_red, beta_league):
        self.params = params
        self.beta_player = beta_player  # dict id -> per-90 contribution
        self.beta_age = beta_age  # dict grid year -> effect
        self.home_adv = home_adv  # dict competition -> goals per 90
        self.home_red = home_red  # tuple, n = 1..4
        self.away_red = away_red
        self.beta_league = beta_league  # dict league -> effect

    def age_term(self, age: float) -> float:
        return sum(
            u * self.beta_age[y]
            for y, u in age_interpolation(age, self.params.age_min, self.params.age_max)
        )

    def player_term(self, info: PlayerInfo, at_time: float) -> float:
        value = self.beta_player[info.player_id] + self.age_term(info.age_at(at_time))
        value += sum(self.beta_league[lg] for lg in info.leagues) / len(info.leagues)
        return value

    def segment_mean_diff(self, seg: SegmentRecord, players) -> float:
        """Expected goal difference of a segment under the true model."""
        home = sum(self.player_term(players[p], seg.match_time) for p in seg.home_players)
        away = sum(self.player_term(players[p], seg.match_time) for p in seg.away_players)
        mu = (11.0 / len(seg.home_players)) * home - (11.0 / len(seg.away_players)) * away
        diff = seg.home_reds - seg.away_reds
        if diff > 0:
            mu += self.home_red[min(diff, 4) - 1]
        elif diff < 0:
            mu -= self.away_red[min(-diff, 4) - 1]
        if seg.home_advantage:
            mu += self.home_adv[seg.competition]
        return mu * seg.duration / 90.0


def synthetic_match_corpus(
    seed: int = 0,
    n_matches: int = 2200,
    n_players: int = 80,
    params: RatingParams | None = None,
    peak_age: int = 26,
    home_advantage: float = 0.25,
    red_first_home: float = -0.83,
    red_first_away: float = -1.07,
):
    """Match segments generated from a known rating model.

    Returns (segments, players, truth). Goals are Poisson around the
    model's expected rates, so fitted coefficients should recover the
    truth up to shrinkage. First-red effects default to the home/away
    asymmetry reported for top-league data; later reds add less.
    """
    params = params or RatingParams()
    rng = np.random.default_rng(np.random.SeedSequence([seed, 23]))

    ids = [f"pl{i:03d}" for i in range(n_players)]
    ages_at_ref = rng.uniform(18.0, 37.0, size=n_players)
    players = {
        pid: PlayerInfo(pid, pid.upper(), params.ref_time - age, ("league_a",))
        for pid, age in zip(ids, ages_at_ref)
    }
    truth = MatchCorpusTruth(
        params,
        beta_player={pid: float(rng.normal(0.0, 0.09)) for pid in ids},
        beta_age={
            y: 0.04 - 0.0022 * (y - peak_age) ** 2 for y in params.age_grid
        },
        home_adv={"synthetic_league": home_advantage},
        home_red=(red_first_home, red_first_home * 1.5, red_first_home * 1.8, red_first_home * 2.0),
        away_red=(red_first_away, red_first_away * 1.5, red_first_away * 1.8, red_first_away * 2.0),
        beta_league={"league_a": 0.0},
    )

    segments: list[SegmentRecord] = []
    for m in range(n_matches):
        match_id = f"m{m:05d}"
        t = float(params.ref_time - rng.uniform(0.0, 4.0))
        lineup = rng.choice(n_players, size=22, replace=False)
        home = tuple(ids[i] for i in lineup[:11])
        away = tuple(ids[i] for i in lineup[11:])
        cuts = np.sort(rng.uniform(10, 80, size=int(rng.integers(0, 3))))
        bounds = [0.0, *cuts.tolist(), 90.0]
        red_at = None
        red_side = None
        if rng.random() < 0.12 and len(bounds) > 2:
            red_at = int(rng.integers(1, len(bounds) - 1))
            red_side = "home" if rng.random() < 0.5 else "away"
        g0 = 0
        for k in range(len(bounds) - 1):
            dur = bounds[k + 1] - bounds[k]
            home_outs = 1 if (red_at is not None and k >= red_at and red_side == "home") else 0
            away_outs = 1 if (red_at is not None and k >= red_at and red_side == "away") else 0
            seg = SegmentRecord(
                match_id=match_id,
                competition="synthetic_league",
                home_team=f"club{int(lineup[0]) % 10}",
                away_team=f"club{int(lineup[11]) % 10}",
                segment=k,
                duration=float(dur),
                home_players=home[: 11 - home_outs],
                away_players=away[: 11 - away_outs],
                goals_home=0,
                goals_away=0,
                goal_diff_start=g0,
                home_reds=home_outs,
                away_reds=away_outs,
                match_time=t,
                home_advantage=True,
            )
            mu = truth.segment_mean_diff(seg, players)
            base = 1.25 * dur / 90.0
            lam_home = max(0.01, base + mu / 2.0)
            lam_away = max(0.01, base - mu / 2.0)
            gh = int(rng.poisson(lam_home))
            ga = int(rng.poisson(lam_away))
            seg = dataclasses.replace(seg, goals_home=gh, goals_away=ga)
            segments.append(seg)
            g0 += gh - ga
    return segments, players, truth
