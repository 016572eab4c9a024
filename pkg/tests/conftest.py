import numpy as np
import pytest

from transferopt.domain import Formation, Instance, Player, Role
from transferopt.values import AGE_GROUPS, GroupModel, ValueModel


def make_player(pid, owned, rating, value, age=25.0, roles=("CM",), locks=(), **prices):
    from transferopt.domain import Lock

    return Player(
        id=pid,
        name=pid.upper(),
        age=age,
        roles=frozenset(Role(r) for r in roles),
        owned=owned,
        current_value=value,
        purchase_price=prices.get("purchase", value),
        sale_price=prices.get("sale", value),
        loan_in_fee=prices.get("loan_in", max(1, value // 10)),
        loan_out_fee=prices.get("loan_out", max(1, value // 10)),
        rating=rating,
        locks=frozenset(Lock(l) for l in locks),
    )


def flat_formation(minimum_cm=0):
    """Formation with no binding role requirements except an optional CM floor."""
    return Formation("open", {Role.CM: minimum_cm})


def simple_value_model(error_samples=(0.0,), slope=1.0, role_constants=None):
    groups = tuple(
        GroupModel(
            slope=slope,
            role_constants=dict(role_constants or {}),
            error_samples=tuple(error_samples),
            r_squared=1.0,
        )
        for _ in AGE_GROUPS
    )
    return ValueModel(groups)


@pytest.fixture
def toy_instance():
    """3 owned + 3 targets, squad of 3, generous budget."""
    players = (
        make_player("own1", True, 0.30, 100),
        make_player("own2", True, 0.10, 80),
        make_player("own3", True, 0.05, 60),
        make_player("tgt1", False, 0.40, 120, purchase=90),
        make_player("tgt2", False, 0.20, 50, purchase=40),
        make_player("tgt3", False, 0.02, 30, purchase=10),
    )
    return Instance(
        club="Toyville",
        players=players,
        budget=100,
        squad_size=3,
        formation=flat_formation(),
        value_threshold=120,
        alpha=0.5,
        growth_factor=1.0,
    )


def random_instance(rng, n_players=None, n_owned=None, squad=None, alpha=None):
    """Random small instance for oracle comparisons."""
    n_players = n_players or int(rng.integers(5, 10))
    n_owned = n_owned if n_owned is not None else int(rng.integers(2, n_players - 1))
    squad = squad or int(rng.integers(2, n_players - 1))
    role_pool = [Role.GK, Role.CB, Role.CM, Role.FW]
    players = []
    for i in range(n_players):
        owned = i < n_owned
        value = int(rng.integers(20, 200))
        players.append(
            Player(
                id=f"p{i:02d}",
                name=f"P{i:02d}",
                age=float(rng.uniform(17, 35)),
                roles=frozenset(
                    rng.choice(role_pool, size=int(rng.integers(1, 3)), replace=False)
                ),
                owned=owned,
                current_value=value,
                purchase_price=int(value * rng.uniform(0.8, 1.3)),
                sale_price=int(value * rng.uniform(0.7, 1.1)),
                loan_in_fee=int(value * rng.uniform(0.1, 0.3)),
                loan_out_fee=int(value * rng.uniform(0.05, 0.2)),
                rating=float(rng.uniform(-0.05, 0.4)),
            )
        )
    owned_value = sum(p.current_value for p in players if p.owned)
    formation = Formation("mini", {Role.CM: int(rng.integers(0, 2))})
    return Instance(
        club=f"Club{rng.integers(1000)}",
        players=tuple(players),
        budget=int(rng.integers(30, 150)),
        squad_size=squad,
        formation=formation,
        value_threshold=int(owned_value * rng.uniform(0.4, 0.8)),
        alpha=float(alpha if alpha is not None else rng.uniform(0.15, 0.85)),
        growth_factor=1.0,
    )
