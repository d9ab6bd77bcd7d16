"""Round-based game engine enforcing the information protocol.

Each round the defender commits an allocation first, knowing only prior
attacks; the attacker then moves with full view of that allocation; the
attack's edges (with surfaces) are revealed back to the defender and the
round is recorded.  Reactive defenders never see the system itself, only
a masked view of revealed edges, and the engine rejects any reactive
allocation that strays outside the revealed set.

Traces are reproducible bit-for-bit from (system, policies, rounds, seed).
"""

from __future__ import annotations

import random
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import Any

from .attackers import Attacker, MultiAttackRound, aggregate_multi_attack
from .defenders import Defender
from .model import (
    Attack,
    DefenseAllocation,
    System,
    SystemView,
    cost,
    ensure_valid_system,
    payoff,
    validate_attack,
)


class ReactiveContractError(RuntimeError):
    """A reactive defender allocated budget to an unrevealed edge."""


def masked_view(system: System, revealed: Iterable[str]) -> SystemView:
    """The defender-facing view: revealed edges with surfaces, no rewards."""
    keep = set(revealed)
    unknown = keep - set(system.edge_ids)
    if unknown:
        raise KeyError(f"unknown edges {sorted(unknown)!r}")
    return SystemView(
        edges=tuple(e for e in system.edges if e.id in keep),
        start=system.start,
        budget=system.budget,
    )


@dataclass(frozen=True)
class RoundFeedback:
    """What the defender learns after a round.

    ``edge_weights`` is the update column: 1 per edge of a single attack,
    aggregate distribution mass for a population round.  ``view`` is the
    refreshed masked view for reactive defenders, None otherwise.
    """

    round_index: int
    attacks: tuple[Attack, ...]
    surfaces: Mapping[str, float]
    edge_weights: Mapping[str, float]
    view: SystemView | None


@dataclass(frozen=True)
class RoundRecord:
    """One played round: the committed allocation, the attacks, and
    the logged cost/payoff (per-attacker means on population rounds)."""

    round_index: int
    allocation: DefenseAllocation
    attacks: tuple[Attack, ...]
    cost: float
    payoff: float
    newly_revealed: tuple[str, ...]
    beta: float | None

    @property
    def is_multi(self) -> bool:
        return len(self.attacks) > 1

    def aggregate(self) -> dict[str, float]:
        """Edge distribution of the round's attacks."""
        return aggregate_multi_attack(MultiAttackRound(self.attacks))


@dataclass(frozen=True)
class GameTrace:
    system: System
    records: tuple[RoundRecord, ...]
    defender: Mapping[str, Any]
    attacker: Mapping[str, Any]
    seed: int

    @property
    def rounds(self) -> int:
        return len(self.records)

    def costs(self) -> list[float]:
        return [r.cost for r in self.records]

    def payoffs(self) -> list[float]:
        return [r.payoff for r in self.records]

    def edge_usage(self) -> dict[str, float]:
        """Per-edge attack weight over the whole game (per-attacker means
        on population rounds), as consumed by hindsight analysis."""
        usage: dict[str, float] = {}
        for record in self.records:
            share = 1.0 / len(record.attacks)
            for attack in record.attacks:
                for eid in attack.path:
                    usage[eid] = usage.get(eid, 0.0) + share
        return usage


def run_game(
    system: System,
    defender: Defender,
    attacker: Attacker,
    rounds: int,
    seed: int = 0,
) -> GameTrace:
    """Play a repeated game and record every round.

    The defender commits strictly before the attacker moves and receives
    no attack information for the current round; randomness flows only
    through the seeded generator handed to the attacker.
    """
    if rounds < 1:
        raise ValueError(f"need at least one round, got {rounds}")
    ensure_valid_system(system)
    rng = random.Random(seed)
    revealed: dict[str, None] = {}
    defender.start(
        masked_view(system, revealed) if defender.reactive else system, rounds
    )
    attacker.start(system, rng, rounds)
    records: list[RoundRecord] = []
    for t in range(1, rounds + 1):
        allocation = defender.commit(t)
        beta = defender.last_beta
        if defender.reactive:
            stray = [eid for eid in allocation.support() if eid not in revealed]
            if stray:
                raise ReactiveContractError(
                    f"round {t}: reactive allocation on unrevealed edges {stray}"
                )
        move = attacker.attack(allocation, t)
        attacks = move.attacks if isinstance(move, MultiAttackRound) else (move,)
        for a in attacks:
            validate_attack(system, a, require_nonempty=True)
        newly: list[str] = []
        surfaces: dict[str, float] = {}
        for a in attacks:
            for eid in a.path:
                if eid not in revealed:
                    revealed[eid] = None
                    newly.append(eid)
                if eid not in surfaces:
                    surfaces[eid] = system.surface(eid)
        if len(attacks) == 1:
            weights = {eid: 1.0 for eid in attacks[0].path}
        else:
            weights = aggregate_multi_attack(move)
        round_costs = [cost(system, a, allocation) for a in attacks]
        round_payoffs = [payoff(system, a) for a in attacks]
        feedback = RoundFeedback(
            round_index=t,
            attacks=attacks,
            surfaces=surfaces,
            edge_weights=weights,
            view=masked_view(system, revealed) if defender.reactive else None,
        )
        defender.observe(feedback)
        records.append(
            RoundRecord(
                round_index=t,
                allocation=allocation,
                attacks=attacks,
                cost=sum(round_costs) / len(round_costs),
                payoff=sum(round_payoffs) / len(round_payoffs),
                newly_revealed=tuple(newly),
                beta=beta,
            )
        )
    return GameTrace(
        system=system,
        records=tuple(records),
        defender=dict(defender.describe()),
        attacker=dict(attacker.describe()),
        seed=seed,
    )
