import math

import numpy as np
import pytest

from transferopt.ratings import (
    PlayerInfo,
    RatingParams,
    SegmentRecord,
    age_interpolation,
    assemble_system,
    fit_ratings,
    player_rating,
    segment_weight,
    similar_players,
    solve_system,
)
from transferopt.ratings.assembly import _RowBuilder
from transferopt.synth import synthetic_match_corpus


def seg(
    match="m1",
    segment=0,
    duration=90.0,
    home=("h1",),
    away=("a1",),
    gh=0,
    ga=0,
    g0=0,
    home_reds=0,
    away_reds=0,
    t=2014.5,
    comp="league",
    home_adv=True,
):
    return SegmentRecord(
        match_id=match,
        competition=comp,
        home_team="H",
        away_team="A",
        segment=segment,
        duration=duration,
        home_players=home,
        away_players=away,
        goals_home=gh,
        goals_away=ga,
        goal_diff_start=g0,
        home_reds=home_reds,
        away_reds=away_reds,
        match_time=t,
        home_advantage=home_adv,
    )


def info(pid, age=25.0, leagues=("L1",), ref=2014.5):
    return PlayerInfo(pid, pid.upper(), ref - age, leagues)


PARAMS = RatingParams()


# -- segment_weight ------------------------------------------------------


def test_weight_is_one_at_reference_conditions():
    s = seg(duration=0.0, t=PARAMS.ref_time)
    assert segment_weight(s, PARAMS) == pytest.approx(1.0)


def test_blowout_factor_requires_both_ends_lopsided():
    s = seg(duration=0.0, g0=2, gh=1, ga=0)  # 2 -> 3
    assert segment_weight(s, PARAMS) == pytest.approx(2.5)
    s2 = seg(duration=0.0, g0=2, gh=0, ga=1)  # 2 -> 1
    assert segment_weight(s2, PARAMS) == pytest.approx(1.0)


def test_older_matches_weigh_less():
    now = segment_weight(seg(t=2014.5), PARAMS)
    old = segment_weight(seg(t=2010.5), PARAMS)
    assert old < now
    assert old / now == pytest.approx(math.exp(-0.1 * 4.0))


def test_duration_scaling():
    w90 = segment_weight(seg(duration=90.0), PARAMS)
    assert w90 == pytest.approx((90 + 300) / 300)


def test_future_match_rejected():
    with pytest.raises(ValueError, match="after the rating time"):
        segment_weight(seg(t=2015.0), PARAMS)


# -- age interpolation ---------------------------------------------------


def test_grid_point_and_midpoint():
    assert age_interpolation(25.0, 16, 42) == [(25, 1.0)]
    assert age_interpolation(25.5, 16, 42) == [(25, 0.5), (26, 0.5)]


def test_clamping_below_and_above():
    assert age_interpolation(14.3, 16, 42) == [(16, 1.0)]
    assert age_interpolation(45.0, 16, 42) == [(42, 1.0)]


@pytest.mark.parametrize("age", np.linspace(14.0, 45.0, 37))
def test_weights_sum_to_one_and_average_to_clamped_age(age):
    weights = age_interpolation(float(age), 16, 42)
    assert sum(u for _, u in weights) == pytest.approx(1.0)
    assert all(0.0 <= u <= 1.0 for _, u in weights)
    assert len(weights) <= 2
    years = [y for y, _ in weights]
    assert max(years) - min(years) <= 1
    want = min(max(age, 16.0), 42.0)
    assert sum(y * u for y, u in weights) == pytest.approx(want)


# -- assembly ------------------------------------------------------------


def test_plain_mode_row_count_players_plus_segments():
    segs = [seg(match=f"m{i}", home=("h1", "h2"), away=("a1", "a2")) for i in range(5)]
    system = assemble_system(segs, {}, PARAMS, mode="plain")
    assert system.space.size == 4  # K players, nothing else
    assert system.n_data_rows == 5
    assert system.n_reg_rows == 4
    assert system.n_squared_terms == 9


def test_plain_mode_drops_red_card_segments():
    full = seg(match="m1", home=tuple(f"h{i}" for i in range(11)),
               away=tuple(f"a{i}" for i in range(11)))
    short = seg(match="m2", home=tuple(f"h{i}" for i in range(10)),
                away=tuple(f"a{i}" for i in range(11)), home_reds=1)
    system = assemble_system([full, short], {}, PARAMS, mode="plain")
    assert system.n_data_rows == 1
    assert system.dropped_segments == 1


def test_novel_mode_keeps_short_handed_segments_and_rescales():
    players = {f"h{i}": info(f"h{i}") for i in range(11)}
    players.update({f"a{i}": info(f"a{i}") for i in range(11)})
    short = seg(
        home=tuple(f"h{i}" for i in range(10)),
        away=tuple(f"a{i}" for i in range(11)),
        home_reds=1,
    )
    system = assemble_system([short], players, PARAMS, mode="novel")
    assert system.n_data_rows == 1
    row = system.matrix.getrow(0).toarray().ravel()
    h_coef = row[system.space.player("h0")]
    a_coef = row[system.space.player("a0")]
    # short side rescaled by 11/10 exactly
    assert h_coef / -a_coef == pytest.approx(11.0 / 10.0)


def test_novel_row_includes_home_advantage_and_red_terms():
    players = {"h1": info("h1"), "a1": info("a1")}
    s = seg(home=("h1",), away=("a1",), away_reds=1, duration=45.0)
    system = assemble_system([s], players, PARAMS, mode="novel")
    row = system.matrix.getrow(0).toarray().ravel()
    w = segment_weight(s, PARAMS)
    factor = w * 45.0 / 90.0
    assert row[system.space.competition("league")] == pytest.approx(factor)
    assert row[system.space.red("away", 1)] == pytest.approx(-factor)
    assert row[system.space.red("home", 1)] == 0.0


def test_neutral_venue_has_no_home_advantage_term():
    players = {"h1": info("h1"), "a1": info("a1")}
    s = seg(home_adv=False)
    system = assemble_system([s], players, PARAMS, mode="novel")
    row = system.matrix.getrow(0).toarray().ravel()
    assert row[system.space.competition("league")] == 0.0


def test_empty_side_rejected():
    with pytest.raises(ValueError):
        SegmentRecord(
            match_id="m",
            competition="c",
            home_team="H",
            away_team="A",
            segment=0,
            duration=1.0,
            home_players=(),
            away_players=("a1",),
            goals_home=0,
            goals_away=0,
            goal_diff_start=0,
            home_reds=0,
            away_reds=0,
            match_time=2014.0,
        )


def test_age_endpoints_have_no_smoothing_rows():
    players = {"h1": info("h1"), "a1": info("a1")}
    system = assemble_system([seg()], players, PARAMS, mode="novel")
    # rows touching endpoint age columns: only data rows or similar rows,
    # never a second-difference row anchored at the endpoint
    lo = system.space.age(PARAMS.age_min)
    hi = system.space.age(PARAMS.age_max)
    reg_block = system.matrix[system.n_data_rows:, :]
    for col in (lo, hi):
        touching = reg_block[:, col].nonzero()[0]
        for r in touching:
            row = reg_block.getrow(r).toarray().ravel()
            # anchored smoothing rows have the +lam on the anchor age
            assert row[col] != PARAMS.lam or np.count_nonzero(row) > 3


def test_similar_players_ranking_and_cap():
    segs = [
        seg(match="m1", home=("a", "b", "c"), away=("x", "y", "z"), duration=90),
        seg(match="m2", home=("a", "b"), away=("x", "y"), duration=30, t=2013.5),
    ]
    sim = similar_players(segs, max_similar=2)
    assert sim["a"][0][0] == "b"  # 120 shared minutes beats 90
    assert sim["a"][0][1] == 2014.5  # most recent shared match
    assert len(sim["a"]) == 2
    # ties break by id: c and x? c shares 90 with a, x shares none
    assert sim["a"][1][0] == "c"


# -- solve_system --------------------------------------------------------


def test_identity_system_returns_targets():
    rb = _RowBuilder()
    targets = [1.5, -2.0, 0.25]
    for i, t in enumerate(targets):
        rb.add({i: 1.0}, t)
    matrix, target = rb.build(3)
    from transferopt.ratings.assembly import LsqSystem, VariableSpace

    system = LsqSystem(
        matrix=matrix,
        target=target,
        space=VariableSpace(("p0", "p1", "p2"), (), (), (), "plain"),
        n_data_rows=3,
        n_reg_rows=0,
        dropped_segments=0,
    )
    x, report = solve_system(system)
    assert x == pytest.approx(targets, abs=1e-10)
    assert report.converged


def test_two_by_two_least_squares_exact():
    rb = _RowBuilder()
    rb.add({0: 2.0, 1: 1.0}, 3.0)
    rb.add({0: 1.0, 1: 3.0}, 5.0)
    matrix, target = rb.build(2)
    from transferopt.ratings.assembly import LsqSystem, VariableSpace

    system = LsqSystem(
        matrix=matrix,
        target=target,
        space=VariableSpace(("p0", "p1"), (), (), (), "plain"),
        n_data_rows=2,
        n_reg_rows=0,
        dropped_segments=0,
    )
    x, _ = solve_system(system)
    assert x == pytest.approx([4 / 5, 7 / 5], abs=1e-10)


def test_one_v_one_closed_form():
    # single 90' segment, home wins 1-0, plain ridge:
    # minimize (bh - ba - 1)^2 + lam^2 bh^2 + lam^2 ba^2
    # => bh = -ba = 1 / (2 + lam^2)
    lam = PARAMS.lam
    system = assemble_system([seg(gh=1)], {}, PARAMS, mode="plain")
    x, _ = solve_system(system)
    bh = x[system.space.player("h1")]
    ba = x[system.space.player("a1")]
    want = 1.0 / (2.0 + lam**2)
    assert bh == pytest.approx(want, abs=1e-10)
    assert ba == pytest.approx(-want, abs=1e-10)


def test_unanchored_endpoint_age_gets_tiny_ridge():
    # a two-year grid has no interior smoothing rows, so an unobserved
    # endpoint column is genuinely untouched and needs the fallback ridge
    params = RatingParams(age_min=24, age_max=25, ref_time=2014.5)
    players = {"h1": info("h1", age=24.0), "a1": info("a1", age=24.0)}
    system = assemble_system([seg()], players, params, mode="novel")
    x, report = solve_system(system)
    assert "age:25" in report.ridged_columns
    assert np.isfinite(x).all()
    assert x[system.space.age(25)] == pytest.approx(0.0, abs=1e-9)


# -- ratings and invariants ---------------------------------------------


def test_player_rating_zero_model():
    model = fit_ratings([seg()], {"h1": info("h1"), "a1": info("a1")}, PARAMS, "novel")
    model.beta_player[:] = 0.0
    model.beta_age[:] = 0.0
    model.beta_league[:] = 0.0
    assert player_rating(model, "h1") == 0.0
    with pytest.raises(KeyError):
        player_rating(model, "nobody")


def test_player_rating_hand_sum():
    model = fit_ratings(
        [seg()], {"h1": info("h1", age=27.0), "a1": info("a1", age=27.0)}, PARAMS, "novel"
    )
    model.beta_player[model.player_ids.index("h1")] = 0.10
    model.beta_age[:] = 0.0
    model.beta_age[27 - PARAMS.age_min] = 0.05
    model.beta_league[:] = 0.02
    assert player_rating(model, "h1") == pytest.approx(0.17)


def test_age_cancellation_same_age_full_lineups():
    """With 11v11 and equal ages, adding a constant to the whole age curve
    leaves predicted segment values unchanged."""
    players = {}
    home = tuple(f"h{i}" for i in range(11))
    away = tuple(f"a{i}" for i in range(11))
    for pid in home + away:
        players[pid] = info(pid, age=26.0)
    segs = [seg(match=f"m{k}", home=home, away=away, gh=k % 3) for k in range(4)]
    system = assemble_system(segs, players, PARAMS, mode="novel")
    x, _ = solve_system(system)
    shifted = x.copy()
    for year in PARAMS.age_grid:
        shifted[system.space.age(year)] += 0.37
    data = system.matrix[: system.n_data_rows]
    before = data @ x
    after = data @ shifted
    assert np.abs(after - before).max() <= 1e-10


def test_plain_shrinkage_direction():
    segs, _, _ = synthetic_match_corpus(seed=4, n_matches=40, n_players=30)
    weak = fit_ratings(segs, {}, RatingParams(lam=4.0), "plain")
    strong = fit_ratings(segs, {}, RatingParams(lam=40.0), "plain")
    assert np.abs(strong.beta_player).max() < np.abs(weak.beta_player).max()


def test_determinism_same_data_same_coefficients():
    segs, players, _ = synthetic_match_corpus(seed=5, n_matches=60, n_players=30)
    a = fit_ratings(segs, players, PARAMS, "novel")
    b = fit_ratings(segs, players, PARAMS, "novel")
    assert np.array_equal(a.beta_player, b.beta_player)
    assert np.array_equal(a.beta_age, b.beta_age)
