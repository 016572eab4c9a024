"""Future-value model: age-bucketed regression on the fourth-root scale,
i.i.d. scenario sampling for the chance constraint, and the in-sample /
out-of-sample stability protocols.

Residuals are stored as relative errors on the original money scale (the
sampled value is prediction * (1 + eps)); draws at or below -1 are clamped
to keep sampled values non-negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import Instance, Player, Role, TransferSolution


class ValueModelDomainError(ValueError):
    """The regression base term went negative before the fourth power."""


@dataclass(frozen=True)
class AgeGroup:
    """Closed integer age bucket; None marks an open end."""

    lower: int | None
    upper: int | None

    def contains(self, age: float) -> bool:
        year = math.floor(age)
        if self.lower is not None and year < self.lower:
            return False
        if self.upper is not None and year > self.upper:
            return False
        return True

    @property
    def label(self) -> str:
        lo = "-" if self.lower is None else str(self.lower)
        hi = "-" if self.upper is None else str(self.upper)
        return f"[{lo},{hi}]"


AGE_GROUPS: tuple[AgeGroup, ...] = (
    AgeGroup(None, 20),
    AgeGroup(21, 22),
    AgeGroup(23, 24),
    AgeGroup(25, 26),
    AgeGroup(27, 28),
    AgeGroup(29, 30),
    AgeGroup(31, 32),
    AgeGroup(33, None),
)


def age_group_index(age: float) -> int:
    for i, group in enumerate(AGE_GROUPS):
        if group.contains(age):
            return i
    raise ValueError(f"age {age} matches no group")  # unreachable: buckets partition


@dataclass(frozen=True)
class GroupModel:
    """Fitted coefficients for one age bucket."""

    slope: float
    role_constants: dict[Role, float]
    error_samples: tuple[float, ...]
    r_squared: float
    dropped_roles: tuple[Role, ...] = ()


@dataclass(frozen=True)
class ValueModel:
    """One GroupModel per age bucket, aligned with AGE_GROUPS."""

    groups: tuple[GroupModel, ...]

    def __post_init__(self):
        if len(self.groups) != len(AGE_GROUPS):
            raise ValueError(f"expected {len(AGE_GROUPS)} age groups")
        for g, grp in zip(AGE_GROUPS, self.groups):
            if not grp.error_samples:
                raise ValueError(f"age group {g.label} has no error samples")

    def group_for(self, age: float) -> GroupModel:
        return self.groups[age_group_index(age)]


@dataclass(frozen=True)
class ScenarioSet:
    """Sampled future values, one row per player and one column per scenario."""

    player_ids: tuple[str, ...]
    values: np.ndarray
    seed: int

    @property
    def n_scenarios(self) -> int:
        return self.values.shape[1]

    def row_for(self, player_id: str) -> np.ndarray:
        return self.values[self.player_ids.index(player_id)]


def _base_term(group: GroupModel, player: Player) -> float:
    base = group.slope * player.current_value ** 0.25
    base += sum(group.role_constants.get(r, 0.0) for r in player.roles)
    return base


def predict_value(model: ValueModel, player: Player, epsilon: float) -> float:
    """Future value: (slope * value^(1/4) + sum of role constants)^4 * (1+eps).

    The role sum runs over all of the player's roles. Rejects epsilon <= -1
    and a negative base (the fourth power would hide its sign).
    """
    if epsilon < -1.0:
        raise ValueError(f"epsilon {epsilon} below -1 would give a negative value")
    group = model.group_for(player.age)
    base = _base_term(group, player)
    if base < 0:
        raise ValueModelDomainError(
            f"player {player.id!r}: negative base {base:.6g} in age group "
            f"{AGE_GROUPS[age_group_index(player.age)].label}"
        )
    return base**4 * (1.0 + epsilon)


def fit_value_model(
    history: list[tuple[float, set[Role] | frozenset[Role], float, float]],
) -> ValueModel:
    """Ordinary least squares per age bucket, no intercept: the role
    indicators play the constant's part.

    Rows are (age, roles, value_now, value_next). Each bucket needs at
    least one more row than it has distinct roles. Roles never observed in
    a bucket are dropped for that bucket and recorded, as are columns
    removed to break rank deficiency.
    """
    all_roles = sorted({r for _, roles, _, _ in history for r in roles}, key=lambda r: r.value)
    buckets: list[list[tuple[float, frozenset[Role], float, float]]] = [
        [] for _ in AGE_GROUPS
    ]
    for age, roles, now, nxt in history:
        if now < 0 or nxt < 0:
            raise ValueError("values must be non-negative")
        buckets[age_group_index(age)].append((age, frozenset(roles), now, nxt))

    groups = []
    for gi, rows in enumerate(buckets):
        label = AGE_GROUPS[gi].label
        present = sorted({r for _, roles, _, _ in rows for r in roles}, key=lambda r: r.value)
        if len(rows) < len(present) + 1:
            raise ValueError(
                f"age group {label}: {len(rows)} rows cannot identify "
                f"{len(present)} role constants plus a slope"
            )
        dropped = [r for r in all_roles if r not in present]
        keep = list(present)
        y = np.array([nxt**0.25 for _, _, _, nxt in rows])
        while True:
            X = np.empty((len(rows), 1 + len(keep)))
            X[:, 0] = [now**0.25 for _, _, now, _ in rows]
            for k, role in enumerate(keep):
                X[:, 1 + k] = [1.0 if role in roles else 0.0 for _, roles, _, _ in rows]
            beta, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
            if rank == X.shape[1] or not keep:
                break
            dropped.append(keep.pop())  # break collinearity, last role first

        fitted4 = X @ beta
        pred = np.maximum(fitted4, 0.0) ** 4
        actual = np.array([nxt for _, _, _, nxt in rows])
        eps = actual / np.maximum(pred, 1e-12) - 1.0

        ss_res = float(((y - fitted4) ** 2).sum())
        ss_tot = float(((y - y.mean()) ** 2).sum())
        if ss_res <= 1e-12 * max(1.0, ss_tot):
            r2 = 1.0
        elif ss_tot <= 1e-30:
            r2 = 0.0
        else:
            r2 = 1.0 - ss_res / ss_tot

        groups.append(
            GroupModel(
                slope=float(beta[0]),
                role_constants={role: float(b) for role, b in zip(keep, beta[1:])},
                error_samples=tuple(float(e) for e in eps),
                r_squared=r2,
                dropped_roles=tuple(dropped),
            )
        )
    return ValueModel(tuple(groups))


def sample_scenarios(
    model: ValueModel, players: list[Player] | tuple[Player, ...], count: int, seed: int
) -> ScenarioSet:
    """Draw residuals uniformly (with replacement) from each player's age
    bucket and apply them to the deterministic prediction. Bit-for-bit
    reproducible from the seed.
    """
    if count < 1:
        raise ValueError("scenario count must be at least 1")
    rng = np.random.default_rng(seed)
    values = np.empty((len(players), count))
    for i, player in enumerate(players):
        group = model.group_for(player.age)
        base = _base_term(group, player)
        if base < 0:
            raise ValueModelDomainError(f"player {player.id!r}: negative base {base:.6g}")
        samples = np.asarray(group.error_samples)
        draws = samples[rng.integers(0, len(samples), size=count)]
        draws = np.maximum(draws, -1.0 + 1e-9)
        values[i] = base**4 * (1.0 + draws)
    return ScenarioSet(tuple(p.id for p in players), values, seed)


def expected_team_value(model: ValueModel, players, kept_ids: frozenset[str]) -> float:
    """Expected one-year value of the kept squad, by exact enumeration of
    the stored residuals (no sampling)."""
    total = 0.0
    for player in players:
        if player.id not in kept_ids:
            continue
        group = model.group_for(player.age)
        base = _base_term(group, player)
        eps = np.maximum(np.asarray(group.error_samples), -1.0 + 1e-9)
        total += float(np.mean(base**4 * (1.0 + eps)))
    return total


@dataclass(frozen=True)
class StabilityReport:
    """Objective statistics across repeated independently sampled solves."""

    mean: float
    stdev: float
    objectives: tuple[float, ...]
    infeasible_count: int
    sample_size: int
    seeds: tuple[int, ...]


def stability_seeds(base_seed: int, repetitions: int) -> tuple[int, ...]:
    state = np.random.SeedSequence(base_seed).generate_state(repetitions, dtype=np.uint32)
    return tuple(int(s) for s in state)


def in_sample_stability(
    instance: Instance,
    model: ValueModel,
    sample_size: int = 70,
    repetitions: int = 10,
    solver_params=None,
    base_seed: int = 0,
    seeds: tuple[int, ...] | None = None,
) -> StabilityReport:
    """Solve one SAA per independent sample; report mean and standard
    deviation of the optimal objective. Infeasible repetitions are
    excluded from the statistics and counted. Explicit ``seeds`` override
    the streams derived from ``base_seed``.
    """
    from .squadprob import build_squad_problem
    from .milp import SolveStatus, solve_milp

    if repetitions < 2:
        raise ValueError("need at least 2 repetitions")
    if seeds is None:
        seeds = stability_seeds(base_seed, repetitions)
    elif len(seeds) != repetitions:
        raise ValueError("seed list length must match repetitions")
    objectives = []
    infeasible = 0
    for seed in seeds:
        scen = sample_scenarios(model, instance.players, sample_size, seed)
        result = solve_milp(build_squad_problem(instance, scen), solver_params)
        if result.status == SolveStatus.INFEASIBLE:
            infeasible += 1
        elif result.objective is not None:
            objectives.append(result.objective)
        else:
            infeasible += 1
    arr = np.asarray(objectives)
    mean = float(arr.mean()) if arr.size else float("nan")
    stdev = float(arr.std(ddof=1)) if arr.size >= 2 else 0.0
    return StabilityReport(mean, stdev, tuple(objectives), infeasible, sample_size, seeds)


def out_of_sample_probability(
    solution: TransferSolution,
    model: ValueModel,
    instance: Instance,
    count: int = 1000,
    seed: int = 0,
) -> float:
    """Fraction of fresh scenarios where the kept squad's sampled value
    clears the instance threshold."""
    scen = sample_scenarios(model, instance.players, count, seed)
    kept = np.array([p.id in solution.kept for p in instance.players])
    totals = kept @ scen.values
    return float(np.mean(totals >= instance.effective_threshold() - 1e-9))
