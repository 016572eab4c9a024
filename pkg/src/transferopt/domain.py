"""Core vocabulary of the transfer-window decision problem.

Value objects only; all algorithmic work lives in the sibling modules.
Money is kept as integer thousands so budget arithmetic is an exact
ledger, ages are real years at a reference date.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class Role(enum.Enum):
    """On-pitch position labels used for squad-coverage requirements."""

    GK = "GK"
    RB = "RB"
    CB = "CB"
    LB = "LB"
    RW = "RW"
    CM = "CM"
    LW = "LW"
    AM = "AM"
    FW = "FW"


ROLE_ORDER = tuple(Role)


class Lock(enum.Enum):
    """Transfer actions that negotiations have taken off the table.

    Locks fix decision variables rather than removing the player, so
    reports still cover locked players.
    """

    NO_BUY = "no_buy"
    NO_SELL = "no_sell"
    NO_LOAN_IN = "no_loan_in"
    NO_LOAN_OUT = "no_loan_out"


@dataclass(frozen=True)
class Player:
    """One owned or target player with the four transaction prices.

    Money fields are integer thousands. ``purchase_price`` / ``loan_in_fee``
    are meaningful for targets, ``sale_price`` / ``loan_out_fee`` for owned
    players; the other pair is carried but ignored by the model.
    """

    id: str
    name: str
    age: float
    roles: frozenset[Role]
    owned: bool
    current_value: int
    purchase_price: int = 0
    sale_price: int = 0
    loan_in_fee: int = 0
    loan_out_fee: int = 0
    rating: float = 0.0
    locks: frozenset[Lock] = frozenset()

    def has_role(self, role: Role) -> bool:
        return role in self.roles


@dataclass(frozen=True)
class Formation:
    """Minimum (and optional maximum) number of players per role."""

    name: str
    min_per_role: dict[Role, int]
    max_per_role: dict[Role, int] = field(default_factory=dict)

    def min_for(self, role: Role) -> int:
        return self.min_per_role.get(role, 0)

    def max_for(self, role: Role) -> int | None:
        """None means the role is uncapped."""
        return self.max_per_role.get(role)

    def total_minimum(self) -> int:
        return sum(self.min_per_role.values())


# Standard formations: minimum players required in each role.
FORMATIONS: dict[str, Formation] = {
    name: Formation(
        name,
        dict(zip(ROLE_ORDER, mins)),
    )
    for name, mins in {
        #        GK RB CB LB RW CM LW AM FW
        "442": (3, 2, 4, 2, 2, 4, 2, 0, 4),
        "433": (3, 2, 4, 2, 0, 6, 0, 0, 6),
        "4312": (3, 2, 4, 2, 0, 6, 0, 2, 4),
        "352": (3, 0, 6, 0, 2, 6, 2, 0, 4),
        "343": (3, 0, 6, 0, 2, 4, 2, 0, 6),
    }.items()
}


@dataclass(frozen=True)
class Instance:
    """A club's one-window decision problem.

    ``value_threshold`` is the future team value the club wants to defend
    with probability at least ``alpha``; ``growth_factor`` scales it when
    the club targets growth instead of preservation. ``discount_rate``
    optionally discounts the threshold comparison (off by default).
    """

    club: str
    players: tuple[Player, ...]
    budget: int
    squad_size: int
    formation: Formation
    value_threshold: int
    alpha: float
    growth_factor: float = 1.0
    discount_rate: float = 0.0

    @property
    def owned(self) -> tuple[Player, ...]:
        return tuple(p for p in self.players if p.owned)

    @property
    def targets(self) -> tuple[Player, ...]:
        return tuple(p for p in self.players if not p.owned)

    def effective_threshold(self) -> float:
        """Threshold the sampled team value is compared against."""
        return self.value_threshold * self.growth_factor / (1.0 + self.discount_rate)


def default_value_threshold(players: tuple[Player, ...] | list[Player]) -> int:
    """Initial market value of the owned squad, the default protection level."""
    return sum(p.current_value for p in players if p.owned)


@dataclass(frozen=True)
class TransferSolution:
    """Per-player transfer decisions plus the recomputed solution facts.

    ``kept`` is ownership at the end of the window (the indicator the
    chance constraint sees), ``scenario_hits`` the per-scenario indicator
    of the team value clearing the threshold.
    """

    kept: frozenset[str]
    bought: frozenset[str]
    sold: frozenset[str]
    loaned_in: frozenset[str]
    loaned_out: frozenset[str]
    objective_rating: float
    net_spend: int
    scenario_hits: tuple[bool, ...]
    empirical_probability: float

    def decision_for(self, player_id: str) -> str:
        """Human-readable decision label for one player."""
        if player_id in self.bought:
            return "buy"
        if player_id in self.sold:
            return "sell"
        if player_id in self.loaned_in:
            return "loan-in"
        if player_id in self.loaned_out:
            return "loan-out"
        if player_id in self.kept:
            return "keep"
        return "pass"


def validate_instance(instance: Instance) -> list[str]:
    """Check every structural invariant; returns findings, never raises.

    An empty list means the instance is well formed and the formation's
    total role minimum fits inside the squad size.
    """
    findings: list[str] = []
    seen: set[str] = set()
    for p in instance.players:
        if p.id in seen:
            findings.append(f"duplicate player id {p.id!r}")
        seen.add(p.id)
        if not p.roles:
            findings.append(f"player {p.id!r} has an empty roles set")
        if p.age < 15:
            findings.append(f"player {p.id!r} has age {p.age} below 15")
        for fld in ("current_value", "purchase_price", "sale_price",
                    "loan_in_fee", "loan_out_fee"):
            if getattr(p, fld) < 0:
                findings.append(f"player {p.id!r} has negative {fld}")

    if instance.squad_size <= 0:
        findings.append(f"squad size {instance.squad_size} must be positive")
    if not 0.0 < instance.alpha < 1.0:
        findings.append(f"alpha {instance.alpha} outside (0, 1)")
    if instance.growth_factor < 1.0:
        findings.append(f"growth factor {instance.growth_factor} below 1")
    if instance.budget < 0:
        findings.append(f"budget {instance.budget} is negative")
    if instance.value_threshold < 0:
        findings.append(f"value threshold {instance.value_threshold} is negative")

    fm = instance.formation
    if fm.total_minimum() > instance.squad_size:
        findings.append(
            f"formation {fm.name!r} requires {fm.total_minimum()} players, "
            f"more than the squad size {instance.squad_size}"
        )
    for role, lo in fm.min_per_role.items():
        if lo < 0:
            findings.append(f"formation {fm.name!r} has negative minimum for {role.value}")
        hi = fm.max_for(role)
        if hi is not None and hi < lo:
            findings.append(
                f"formation {fm.name!r} has max {hi} below min {lo} for {role.value}"
            )

    attainable = sum(
        1 for p in instance.players
        if p.owned or not (Lock.NO_BUY in p.locks and Lock.NO_LOAN_IN in p.locks)
    )
    if attainable < instance.squad_size:
        findings.append(
            f"only {attainable} players attainable for a squad of {instance.squad_size}"
        )
    return findings
