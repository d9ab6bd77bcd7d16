"""Defender strategies for repeated attack-defense games.

Two multiplicative-update learners form the core: a reactive one that
discovers edges as attacks reveal them (zero allocation until the first
attack) and a fixed-rate one that knows every edge from the start.  Both
spread the budget proportionally to ``beta ** score`` where an edge's
score drops by ``1/surface`` each time it is attacked, so allocations
chase observed attack traffic at a learning rate that anneals with time.

Proactive alternatives live alongside them: minimum-cut perimeter
defense, enumeration-based minimax allocations for the return-on-attack
and profit objectives, the hindsight-optimal fixed allocation, and the
uniform and myopic baselines.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, replace
from typing import Any, ClassVar

import networkx as nx
import numpy as np
from scipy.optimize import linprog

from .model import (
    Attack,
    DefenseAllocation,
    System,
    SystemView,
    validate_attack,
    zero_allocation,
)
from .paths import DEFAULT_ENUMERATION_LIMIT, PathSet


def beta_schedule(num_units: int, round_index: int) -> float:
    """Annealed learning rate: 1 / (1 + sqrt(2 ln(n) / (round + 1))).

    ``num_units`` counts the attackable units known after the round's
    reveals.  A single known unit gives 1 (no discrimination to learn).
    """
    if num_units < 1:
        raise ValueError(f"need at least one unit, got {num_units}")
    if round_index < 1:
        raise ValueError(f"round index starts at 1, got {round_index}")
    return 1.0 / (1.0 + math.sqrt(2.0 * math.log(num_units) / (round_index + 1.0)))


def horizon_beta(num_units: int, horizon: int) -> float:
    """Fixed learning rate for a known horizon: 1 / (1 + sqrt(2 ln(n) / T))."""
    if num_units < 1:
        raise ValueError(f"need at least one unit, got {num_units}")
    if horizon < 1:
        raise ValueError(f"horizon must be positive, got {horizon}")
    return 1.0 / (1.0 + math.sqrt(2.0 * math.log(num_units) / horizon))


# ---------------------------------------------------------------------------
# reactive learner over hidden edges


@dataclass(frozen=True)
class ReactiveHiddenState:
    """Learning state over the edges revealed so far.

    ``surfaces`` preserves revelation order; ``scores`` holds each revealed
    edge's cumulative exponent, minus the weighted count of its appearances
    in attacks divided by its surface (never positive).  ``last_beta`` is
    the rate used for the most recent allocation, None before any attack.
    """

    budget: float
    surfaces: Mapping[str, float] = field(default_factory=dict)
    scores: Mapping[str, float] = field(default_factory=dict)
    round_index: int = 0
    last_beta: float | None = None


def reactive_hidden_step(
    state: ReactiveHiddenState,
    attack: Attack,
    surfaces: Mapping[str, float],
    beta: float | None = None,
) -> tuple[ReactiveHiddenState, DefenseAllocation]:
    """Consume one observed attack; return the state and next allocation.

    ``surfaces`` must cover the attack's edges (the attack reveals them).
    ``beta`` overrides the annealed schedule, for tests and diagnostics.
    """
    if not attack.path:
        raise ValueError("cannot learn from an empty attack")
    weights = {eid: 1.0 for eid in attack.path}
    return reactive_hidden_update(state, weights, surfaces, beta)


def reactive_hidden_update(
    state: ReactiveHiddenState,
    edge_weights: Mapping[str, float],
    surfaces: Mapping[str, float],
    beta: float | None = None,
) -> tuple[ReactiveHiddenState, DefenseAllocation]:
    """Generalized step for one round of observed attack traffic.

    ``edge_weights`` gives each attacked edge's weight in the round: 1 for
    a single attack, the aggregate distribution mass for a population of
    attackers.  Every attacked edge's score drops by weight/surface; newly
    seen edges join the revealed set.
    """
    if not edge_weights:
        raise ValueError("round contained no attacked edges")
    new_surfaces = dict(state.surfaces)
    new_scores = dict(state.scores)
    for eid, weight in edge_weights.items():
        if weight < 0:
            raise ValueError(f"negative attack weight {weight} on {eid!r}")
        if eid not in surfaces:
            raise ValueError(f"no surface reported for attacked edge {eid!r}")
        w = surfaces[eid]
        if eid in new_surfaces:
            if w != new_surfaces[eid]:
                raise ValueError(
                    f"edge {eid!r} re-revealed with surface {w}, previously {new_surfaces[eid]}"
                )
        else:
            if not (math.isfinite(w) and w > 0):
                raise ValueError(f"surface of {eid!r} must be positive, got {w}")
            new_surfaces[eid] = w
        new_scores[eid] = new_scores.get(eid, 0.0) - weight / w
    round_index = state.round_index + 1
    if beta is None:
        beta = beta_schedule(len(new_surfaces), round_index)
    new_state = ReactiveHiddenState(
        budget=state.budget,
        surfaces=new_surfaces,
        scores=new_scores,
        round_index=round_index,
        last_beta=beta,
    )
    return new_state, hidden_allocation(new_state, beta)


def hidden_allocation(state: ReactiveHiddenState, beta: float | None = None) -> DefenseAllocation:
    """Budget over revealed edges, proportional to ``beta ** score``.

    Scores are nonpositive and shrink over time, so the shares are
    computed in log space with the largest exponent factored out; the
    normalization can then never overflow.  With nothing revealed the
    allocation is identically zero.
    """
    if not state.surfaces:
        return zero_allocation(state.budget)
    if beta is None:
        beta = state.last_beta
    if beta is None:
        beta = beta_schedule(len(state.surfaces), max(state.round_index, 1))
    if not 0.0 < beta <= 1.0:
        raise ValueError(f"beta must be in (0, 1], got {beta}")
    log_beta = math.log(beta)
    exponents = {eid: state.scores.get(eid, 0.0) * log_beta for eid in state.surfaces}
    top = max(exponents.values())
    shares = {eid: math.exp(x - top) for eid, x in exponents.items()}
    z = sum(shares.values())
    return DefenseAllocation(
        {eid: state.budget * s / z for eid, s in shares.items()}, state.budget
    )


# ---------------------------------------------------------------------------
# fixed-rate learner over known edges


@dataclass(frozen=True)
class ReactiveKnownState:
    """Multiplicative-update state when every edge is known from the start.

    ``log_shares`` stores the log of normalized allocation fractions; one
    update multiplies each attacked edge's share by ``beta ** (-1/surface)``
    and renormalizes, all in log space.
    """

    budget: float
    beta: float
    horizon: int
    surfaces: Mapping[str, float]
    log_shares: Mapping[str, float]
    round_index: int = 0


def reactive_known_start(
    system: System | SystemView, horizon: int, beta: float | None = None
) -> ReactiveKnownState:
    """Uniform initial shares; ``beta`` defaults to ``horizon_beta(|E|, T)``."""
    surfaces = {e.id: e.surface for e in system.edges}
    if not surfaces:
        raise ValueError("system has no edges")
    if horizon < 1:
        raise ValueError(f"horizon must be positive, got {horizon}")
    if beta is None:
        beta = horizon_beta(len(surfaces), horizon)
    if not 0.0 < beta <= 1.0:
        raise ValueError(f"beta must be in (0, 1], got {beta}")
    log_uniform = -math.log(len(surfaces))
    return ReactiveKnownState(
        budget=system.budget,
        beta=beta,
        horizon=horizon,
        surfaces=surfaces,
        log_shares={eid: log_uniform for eid in surfaces},
        round_index=0,
    )


def reactive_known_step(state: ReactiveKnownState, attack: Attack) -> ReactiveKnownState:
    """Penalize the attacked edges: share *= beta ** (-1/surface), renormalized."""
    if not attack.path:
        raise ValueError("cannot learn from an empty attack")
    column: dict[str, float] = {}
    for eid in attack.path:
        if eid not in state.surfaces:
            raise KeyError(f"attack uses unknown edge {eid!r}")
        column[eid] = -1.0 / state.surfaces[eid]
    return reactive_known_update(state, column)


def reactive_known_update(
    state: ReactiveKnownState, update_column: Mapping[str, float]
) -> ReactiveKnownState:
    """Apply one multiplicative update with arbitrary per-edge exponents.

    Shares transform as ``share * beta ** m(e)`` and renormalize; adding a
    constant to every exponent cancels in the normalization, so updates
    are invariant to uniform shifts of the column.
    """
    unknown = set(update_column) - set(state.surfaces)
    if unknown:
        raise KeyError(f"update names unknown edges {sorted(unknown)!r}")
    log_beta = math.log(state.beta)
    raw = {
        eid: ls + update_column.get(eid, 0.0) * log_beta
        for eid, ls in state.log_shares.items()
    }
    top = max(raw.values())
    z = top + math.log(sum(math.exp(x - top) for x in raw.values()))
    return replace(
        state,
        log_shares={eid: x - z for eid, x in raw.items()},
        round_index=state.round_index + 1,
    )


def known_allocation(state: ReactiveKnownState) -> DefenseAllocation:
    return DefenseAllocation(
        {eid: state.budget * math.exp(ls) for eid, ls in state.log_shares.items()},
        state.budget,
    )


# ---------------------------------------------------------------------------
# proactive allocations


def mincut_perimeter_defense(system: System, target: str) -> DefenseAllocation:
    """Whole budget over a minimum-weight start-to-target edge cut.

    Surfaces act as capacities (parallel edges merge for the flow
    computation and are recovered when crossing edges are collected);
    cut edges receive budget proportional to surface, so every
    start-to-target attack costs at least budget / cut_weight.
    """
    if target == system.start:
        raise ValueError("target must differ from the start vertex")
    if target not in system.vertices:
        raise KeyError(f"unknown vertex {target!r}")
    graph = nx.DiGraph()
    graph.add_nodes_from(system.vertices)
    for e in system.edges:
        if graph.has_edge(e.src, e.dst):
            graph[e.src][e.dst]["capacity"] += e.surface
        else:
            graph.add_edge(e.src, e.dst, capacity=e.surface)
    if not nx.has_path(graph, system.start, target):
        raise ValueError(f"target {target!r} is unreachable from {system.start!r}")
    _, (near, far) = nx.minimum_cut(graph, system.start, target)
    cut = [e for e in system.edges if e.src in near and e.dst in far]
    weight = sum(e.surface for e in cut)
    return DefenseAllocation(
        {e.id: system.budget * e.surface / weight for e in cut}, system.budget
    )


@dataclass(frozen=True)
class MinimaxResult:
    """Optimal fixed allocation and the attacker value it concedes."""

    allocation: DefenseAllocation
    value: float
    objective: str


def minimax_proactive_defense(
    system: System, objective: str = "roa", limit: int = DEFAULT_ENUMERATION_LIMIT
) -> MinimaxResult:
    """Fixed allocation minimizing the attacker's best achievable objective.

    Attacks are enumerated (up to ``limit``) and the minimax program is
    solved as a linear program over the allocation.  For ``objective="roa"``
    the program maximizes ``z`` subject to ``cost(a, d) >= z * payoff(a)``
    for every attack with positive payoff; the conceded value is ``1/z``
    (infinite if no feasible ``z > 0`` exists).  For ``objective="profit"``
    it minimizes the maximum of ``payoff(a) - cost(a, d)`` and zero, the
    floor reflecting that an attacker can always abstain.
    """
    if objective not in ("roa", "profit"):
        raise ValueError(f"unknown objective {objective!r}")
    pathset = PathSet.enumerate(system, limit)
    num_edges = len(system.edges)
    budget_row = np.concatenate([np.ones(num_edges), [0.0]])
    if objective == "roa":
        mask = pathset.payoffs > 0
        if not mask.any():
            # Nothing is worth attacking; any feasible allocation concedes 0.
            return MinimaxResult(zero_allocation(system.budget), 0.0, "roa")
        a_ub = np.vstack(
            [
                np.hstack([-pathset.rate_rows[mask], pathset.payoffs[mask][:, None]]),
                budget_row,
            ]
        )
        b_ub = np.concatenate([np.zeros(int(mask.sum())), [system.budget]])
        cost_vector = np.zeros(num_edges + 1)
        cost_vector[-1] = -1.0
    else:
        a_ub = np.vstack(
            [
                np.hstack([-pathset.rate_rows, -np.ones((len(pathset.attacks), 1))]),
                budget_row,
            ]
        )
        b_ub = np.concatenate([-pathset.payoffs, [system.budget]])
        cost_vector = np.zeros(num_edges + 1)
        cost_vector[-1] = 1.0
    result = linprog(
        cost_vector,
        A_ub=a_ub,
        b_ub=b_ub,
        bounds=[(0.0, None)] * (num_edges + 1),
        method="highs",
    )
    if not result.success:
        raise RuntimeError(f"minimax solve failed: {result.message}")
    allocation = _solution_allocation(result.x[:num_edges], system)
    if objective == "roa":
        z = result.x[-1]
        value = math.inf if z <= 0 else 1.0 / z
    else:
        value = float(result.x[-1])
    return MinimaxResult(allocation, value, objective)


def _solution_allocation(vector: np.ndarray, system: System) -> DefenseAllocation:
    # Solver residue below the feasibility tolerance is dropped.
    tiny = 1e-11 * max(1.0, system.budget)
    alloc = {
        e.id: float(amount)
        for e, amount in zip(system.edges, vector)
        if amount > tiny
    }
    return DefenseAllocation(alloc, system.budget)


def hindsight_best_proactive(
    system: System, attacks: Sequence[Attack]
) -> tuple[DefenseAllocation, float]:
    """Best fixed allocation against a known attack sequence, with its cost.

    Total inflicted cost is linear in the allocation, so one edge takes
    the whole budget: the edge maximizing uses/surface, ties broken by
    the smallest edge id.
    """
    usage: dict[str, float] = {}
    for attack in attacks:
        validate_attack(system, attack)
        for eid in attack.path:
            usage[eid] = usage.get(eid, 0.0) + 1.0
    return hindsight_from_usage(system, usage)


def hindsight_from_usage(
    system: System, usage: Mapping[str, float]
) -> tuple[DefenseAllocation, float]:
    """Hindsight optimum from per-edge attack weights (fractional weights
    arise from attacker populations)."""
    best_edge: str | None = None
    best_ratio = 0.0
    for e in sorted(system.edges, key=lambda e: e.id):
        ratio = usage.get(e.id, 0.0) / e.surface
        if ratio > best_ratio:
            best_ratio = ratio
            best_edge = e.id
    if best_edge is None:
        raise ValueError("no attack used any edge; hindsight defense is undefined")
    allocation = DefenseAllocation({best_edge: system.budget}, system.budget)
    return allocation, system.budget * best_ratio


def uniform_defense(system: System | SystemView) -> DefenseAllocation:
    """budget / |E| on every edge."""
    if not system.edges:
        raise ValueError("system has no edges")
    share = system.budget / len(system.edges)
    return DefenseAllocation({e.id: share for e in system.edges}, system.budget)


def myopic_defense(system: System | SystemView, last_attack: Attack) -> DefenseAllocation:
    """Whole budget over the last attack's edges, proportional to surface."""
    if not last_attack.path:
        raise ValueError("last attack is empty")
    surfaces: dict[str, float] = {}
    for eid in last_attack.path:
        w = system.surface(eid)
        if w is None:
            raise KeyError(f"unknown edge {eid!r}")
        surfaces[eid] = w
    total = sum(surfaces.values())
    return DefenseAllocation(
        {eid: system.budget * w / total for eid, w in surfaces.items()}, system.budget
    )


# ---------------------------------------------------------------------------
# engine-facing policies


class Defender(ABC):
    """Per-game defender driven by the engine.

    Reactive policies receive a masked ``SystemView`` (revealed edges
    only, never rewards) and must keep allocations inside the revealed
    set; proactive policies receive the full ``System`` once at start.
    ``last_beta`` mirrors the learning rate behind the latest committed
    allocation, for trace records.
    """

    reactive: ClassVar[bool] = False
    last_beta: float | None = None

    @abstractmethod
    def start(self, view: System | SystemView, horizon: int) -> None:
        """Reset for a fresh game."""

    @abstractmethod
    def commit(self, round_index: int) -> DefenseAllocation:
        """Allocation for the coming round, committed before the attack."""

    def observe(self, feedback) -> None:
        """Consume the round's revealed attacks (see engine.RoundFeedback)."""

    @abstractmethod
    def describe(self) -> dict[str, Any]:
        """JSON-able descriptor recorded in traces."""


class ReactiveDefender(Defender):
    """Learning defender over revealed edges; allocates nothing in round 1."""

    reactive = True

    def __init__(self):
        self._state: ReactiveHiddenState | None = None
        self._pending: DefenseAllocation | None = None

    def start(self, view: SystemView, horizon: int) -> None:
        self._state = ReactiveHiddenState(budget=view.budget)
        self._pending = zero_allocation(view.budget)
        self.last_beta = None

    def commit(self, round_index: int) -> DefenseAllocation:
        return self._pending

    def observe(self, feedback) -> None:
        self._state, self._pending = reactive_hidden_update(
            self._state, feedback.edge_weights, feedback.surfaces
        )
        self.last_beta = self._state.last_beta

    def describe(self) -> dict[str, Any]:
        return {"policy": "reactive-hidden", "schedule": "round-adaptive"}


class KnownEdgesDefender(Defender):
    """Multiplicative-update defender that knows every edge up front."""

    def __init__(self, beta: float | None = None):
        self._beta = beta
        self._state: ReactiveKnownState | None = None

    def start(self, view: System | SystemView, horizon: int) -> None:
        self._state = reactive_known_start(view, horizon, beta=self._beta)
        self.last_beta = self._state.beta

    def commit(self, round_index: int) -> DefenseAllocation:
        return known_allocation(self._state)

    def observe(self, feedback) -> None:
        column = {
            eid: -weight / self._state.surfaces[eid]
            for eid, weight in feedback.edge_weights.items()
        }
        self._state = reactive_known_update(self._state, column)

    def describe(self) -> dict[str, Any]:
        return {
            "policy": "known-edges",
            "beta": "horizon" if self._beta is None else self._beta,
        }


class MyopicDefender(Defender):
    """Overreacting baseline: all budget onto the last round's attack edges."""

    reactive = True

    def __init__(self):
        self._budget: float | None = None
        self._pending: DefenseAllocation | None = None

    def start(self, view: SystemView, horizon: int) -> None:
        self._budget = view.budget
        self._pending = zero_allocation(view.budget)

    def commit(self, round_index: int) -> DefenseAllocation:
        return self._pending

    def observe(self, feedback) -> None:
        total = sum(feedback.surfaces.values())
        self._pending = DefenseAllocation(
            {eid: self._budget * w / total for eid, w in feedback.surfaces.items()},
            self._budget,
        )

    def describe(self) -> dict[str, Any]:
        return {"policy": "myopic"}


class FixedDefender(Defender):
    """Plays one precomputed allocation every round."""

    def __init__(self, allocation: DefenseAllocation, name: str = "fixed"):
        self._allocation = allocation
        self._name = name

    def start(self, view: System | SystemView, horizon: int) -> None:
        pass

    def commit(self, round_index: int) -> DefenseAllocation:
        return self._allocation

    def describe(self) -> dict[str, Any]:
        return {"policy": self._name}


class UniformDefender(Defender):
    """Fixed budget / |E| on every edge."""

    def __init__(self):
        self._allocation: DefenseAllocation | None = None

    def start(self, view: System | SystemView, horizon: int) -> None:
        self._allocation = uniform_defense(view)

    def commit(self, round_index: int) -> DefenseAllocation:
        return self._allocation

    def describe(self) -> dict[str, Any]:
        return {"policy": "uniform"}


class MinimaxDefender(Defender):
    """Plays the minimax fixed allocation for the chosen objective."""

    def __init__(self, objective: str = "roa", limit: int = DEFAULT_ENUMERATION_LIMIT):
        self._objective = objective
        self._limit = limit
        self._allocation: DefenseAllocation | None = None

    def start(self, view: System, horizon: int) -> None:
        self._allocation = minimax_proactive_defense(
            view, self._objective, self._limit
        ).allocation

    def commit(self, round_index: int) -> DefenseAllocation:
        return self._allocation

    def describe(self) -> dict[str, Any]:
        return {"policy": "minimax", "objective": self._objective}


class MincutDefender(Defender):
    """Plays the minimum-cut perimeter allocation for a target vertex."""

    def __init__(self, target: str):
        self._target = target
        self._allocation: DefenseAllocation | None = None

    def start(self, view: System, horizon: int) -> None:
        self._allocation = mincut_perimeter_defense(view, self._target)

    def commit(self, round_index: int) -> DefenseAllocation:
        return self._allocation

    def describe(self) -> dict[str, Any]:
        return {"policy": "mincut", "target": self._target}
