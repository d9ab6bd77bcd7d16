"""Horn-clause generalization of the attack-graph model.

Clauses play the role of edges and valid proofs the role of paths: a proof
is an ordered clause list in which every antecedent was established by an
earlier clause.  Payoff sums rewards of distinct derived propositions;
cost charges each clause occurrence its allocation over surface.  A graph
system embeds exactly (one clause per edge plus a zero-cost base clause
for the start vertex), and the embedding preserves cost and payoff.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from types import MappingProxyType

from .model import (
    _ID_PATTERN,
    Attack,
    DefenseAllocation,
    InvalidProofError,
    System,
    Violation,
)


@dataclass(frozen=True)
class HornClause:
    """``antecedents -> consequent`` with a positive attack surface."""

    id: str
    antecedents: frozenset[str]
    consequent: str
    surface: float

    def __post_init__(self):
        object.__setattr__(self, "antecedents", frozenset(self.antecedents))


@dataclass(frozen=True)
class HornSystem:
    """Propositions with rewards, surfaced clauses, and a defense budget."""

    propositions: frozenset[str]
    clauses: tuple[HornClause, ...]
    rewards: Mapping[str, float]
    budget: float

    def __post_init__(self):
        object.__setattr__(self, "propositions", frozenset(self.propositions))
        object.__setattr__(self, "clauses", tuple(self.clauses))
        object.__setattr__(self, "rewards", MappingProxyType(dict(self.rewards)))
        object.__setattr__(self, "_clause_map", {c.id: c for c in self.clauses})

    @classmethod
    def build(
        cls,
        clauses: Iterable[tuple[str, Iterable[str], str, float]],
        rewards: Mapping[str, float] | None = None,
        budget: float = 1.0,
    ) -> "HornSystem":
        """Construct from ``(id, antecedents, consequent, surface)`` rows."""
        rows = tuple(
            HornClause(cid, frozenset(ante), cons, surface)
            for cid, ante, cons, surface in clauses
        )
        rewards = dict(rewards or {})
        props = set(rewards)
        for c in rows:
            props |= c.antecedents
            props.add(c.consequent)
        return cls(frozenset(props), rows, rewards, budget)

    @property
    def clause_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.clauses)

    def has_clause(self, clause_id: str) -> bool:
        return clause_id in self._clause_map

    def clause(self, clause_id: str) -> HornClause:
        try:
            return self._clause_map[clause_id]
        except KeyError:
            raise KeyError(f"unknown clause {clause_id!r}") from None

    def reward(self, proposition: str) -> float:
        return self.rewards.get(proposition, 0.0)

    def base_clauses(self) -> tuple[HornClause, ...]:
        """Clauses without antecedents (the Horn analog of the perimeter)."""
        return tuple(c for c in self.clauses if not c.antecedents)


@dataclass(frozen=True)
class Proof:
    """Ordered clause-id list; validity is checked against a system."""

    clauses: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))

    def __len__(self) -> int:
        return len(self.clauses)


def validate_horn_system(system: HornSystem) -> list[Violation]:
    out: list[Violation] = []
    if not (math.isfinite(system.budget) and system.budget > 0):
        out.append(Violation("E-BUDGET", f"budget must be positive, got {system.budget}"))
    for p in sorted(system.propositions):
        if not _ID_PATTERN.match(p):
            out.append(Violation("E-ID", f"proposition id {p!r} is not a plain token"))
    for prop, reward in system.rewards.items():
        if prop not in system.propositions:
            out.append(Violation("E-PROP", f"reward names undeclared proposition {prop!r}"))
        if not (math.isfinite(reward) and reward >= 0):
            out.append(
                Violation("E-REWARD", f"reward of {prop!r} must be nonnegative, got {reward}")
            )
    seen: set[str] = set()
    for c in system.clauses:
        if not _ID_PATTERN.match(c.id):
            out.append(Violation("E-ID", f"clause id {c.id!r} is not a plain token"))
        if c.id in seen:
            out.append(Violation("E-CLAUSE-ID", f"duplicate clause id {c.id!r}"))
        seen.add(c.id)
        for prop in sorted(c.antecedents | {c.consequent}):
            if prop not in system.propositions:
                out.append(
                    Violation("E-PROP", f"clause {c.id!r} references undeclared proposition {prop!r}")
                )
        if not (math.isfinite(c.surface) and c.surface > 0):
            out.append(
                Violation("E-SURFACE", f"clause {c.id!r} must have positive surface, got {c.surface}")
            )
    return out


def validate_proof(system: HornSystem, proof: Proof) -> None:
    """Raise ``InvalidProofError`` naming the first clause whose antecedents
    are not all established by strictly earlier clauses."""
    proved: set[str] = set()
    for index, clause_id in enumerate(proof.clauses):
        if not system.has_clause(clause_id):
            raise InvalidProofError(f"proof step {index}: unknown clause {clause_id!r}")
        clause = system.clause(clause_id)
        missing = clause.antecedents - proved
        if missing:
            raise InvalidProofError(
                f"proof step {index}: clause {clause_id!r} needs unproved "
                f"antecedent {sorted(missing)[0]!r}"
            )
        proved.add(clause.consequent)


def derived_propositions(system: HornSystem, proof: Proof) -> tuple[str, ...]:
    """Distinct consequents of the proof, in first-derivation order."""
    seen: set[str] = set()
    ordered: list[str] = []
    for clause_id in proof.clauses:
        consequent = system.clause(clause_id).consequent
        if consequent not in seen:
            seen.add(consequent)
            ordered.append(consequent)
    return tuple(ordered)


def horn_payoff(system: HornSystem, proof: Proof) -> float:
    """Total reward over distinct derived propositions."""
    validate_proof(system, proof)
    return sum(system.reward(p) for p in derived_propositions(system, proof))


def horn_cost(system: HornSystem, proof: Proof, allocation: DefenseAllocation) -> float:
    """Sum of allocation over surface across clause occurrences (repeats count)."""
    validate_proof(system, proof)
    return sum(allocation.get(c) / system.clause(c).surface for c in proof.clauses)


@dataclass(frozen=True)
class GraphEmbedding:
    """A graph system recast as Horn clauses, preserving cost and payoff.

    Each edge becomes a clause ``{src} -> dst`` with the same id and
    surface; one extra base clause (no antecedents) derives the start
    vertex and never receives allocation.
    """

    graph: System
    horn: HornSystem
    start_clause: str

    def translate_attack(self, attack: Attack) -> Proof:
        return Proof((self.start_clause,) + attack.path)

    def translate_allocation(self, allocation: DefenseAllocation) -> DefenseAllocation:
        return DefenseAllocation(dict(allocation.alloc), allocation.budget)


def graph_to_horn(system: System) -> GraphEmbedding:
    start_clause = "derive-start"
    while system.has_edge(start_clause):
        start_clause = "_" + start_clause
    clauses: list[tuple[str, tuple[str, ...], str, float]] = [
        (start_clause, (), system.start, 1.0)
    ]
    for e in system.edges:
        clauses.append((e.id, (e.src,), e.dst, e.surface))
    horn = HornSystem.build(clauses, rewards=dict(system.rewards), budget=system.budget)
    return GraphEmbedding(graph=system, horn=horn, start_clause=start_clause)
