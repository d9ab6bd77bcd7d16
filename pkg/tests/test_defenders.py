"""Learning and proactive defender strategies."""

from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import attack_sequence, sample_systems
from reactive_defense import (
    Attack,
    DefenseAllocation,
    FixedDefender,
    KnownEdgesDefender,
    MincutDefender,
    MinimaxDefender,
    MyopicDefender,
    ReactiveDefender,
    ReactiveHiddenState,
    System,
    UniformDefender,
    beta_schedule,
    fixture,
    hidden_allocation,
    hindsight_best_proactive,
    hindsight_from_usage,
    horizon_beta,
    known_allocation,
    mincut_perimeter_defense,
    minimax_proactive_defense,
    myopic_defense,
    reactive_hidden_step,
    reactive_hidden_update,
    reactive_known_start,
    reactive_known_step,
    reactive_known_update,
    roa,
    uniform_defense,
    zero_allocation,
)
from reactive_defense.generators import random_system


# Rate values recomputed independently with 50-digit decimal arithmetic.
def test_beta_schedule_frozen_values():
    assert beta_schedule(2, 1) == pytest.approx(0.5456863298432674, rel=1e-15)
    assert beta_schedule(2, 2) == pytest.approx(0.5953167644187397, rel=1e-15)
    assert beta_schedule(3, 5) == pytest.approx(0.6229955137622369, rel=1e-15)
    assert beta_schedule(1, 1) == 1.0
    assert beta_schedule(1, 999) == 1.0
    with pytest.raises(ValueError):
        beta_schedule(0, 1)
    with pytest.raises(ValueError):
        beta_schedule(2, 0)


def test_horizon_beta_frozen_values():
    assert horizon_beta(2, 100) == pytest.approx(0.8946616416375769, rel=1e-15)
    assert horizon_beta(4, 50) == pytest.approx(0.8094007005809811, rel=1e-15)
    assert horizon_beta(1, 10) == 1.0
    with pytest.raises(ValueError):
        horizon_beta(0, 10)
    with pytest.raises(ValueError):
        horizon_beta(2, 0)


def test_beta_schedule_anneals_toward_one():
    values = [beta_schedule(4, k) for k in range(1, 200)]
    assert all(b2 > b1 for b1, b2 in zip(values, values[1:]))
    assert values[-1] < 1.0


# ---------------------------------------------------------------------------
# hidden-edge learner


def test_hidden_allocation_zero_before_any_attack():
    state = ReactiveHiddenState(budget=5.0)
    assert hidden_allocation(state).total() == 0.0
    assert state.last_beta is None
    assert state.round_index == 0


def test_hidden_step_overridden_rate():
    surfaces = {"e1": 1.0, "e2": 1.0}
    state = ReactiveHiddenState(budget=3.0)
    state, alloc = reactive_hidden_update(
        state, {"e1": 1.0, "e2": 1.0}, surfaces, beta=0.5
    )
    assert alloc.get("e1") == pytest.approx(1.5, rel=1e-12)
    assert alloc.get("e2") == pytest.approx(1.5, rel=1e-12)

    state, alloc = reactive_hidden_step(state, Attack(("e1",)), surfaces, beta=0.5)
    # scores (-2, -1): shares proportional to 0.5**-2 : 0.5**-1 = 2 : 1
    assert state.scores["e1"] == -2.0
    assert state.scores["e2"] == -1.0
    assert alloc.get("e1") == pytest.approx(2.0, rel=1e-12)
    assert alloc.get("e2") == pytest.approx(1.0, rel=1e-12)
    assert state.round_index == 2


def test_hidden_step_default_schedule():
    surfaces = {"e1": 2.0, "e2": 4.0}
    state = ReactiveHiddenState(budget=1.0)
    state, _ = reactive_hidden_step(state, Attack(("e1",)), surfaces)
    assert state.last_beta == beta_schedule(1, 1) == 1.0
    state, alloc = reactive_hidden_step(state, Attack(("e2",)), surfaces)
    # two edges revealed after two rounds
    beta = beta_schedule(2, 2)
    assert state.last_beta == beta
    # recompute the allocation directly from the committed scores
    shares = {eid: beta ** state.scores[eid] for eid in surfaces}
    z = sum(shares.values())
    for eid in surfaces:
        assert alloc.get(eid) == pytest.approx(shares[eid] / z, rel=1e-12)


def test_hidden_update_weighted_masses():
    surfaces = {"a": 1.0, "b": 2.0}
    state = ReactiveHiddenState(budget=4.0)
    state, _ = reactive_hidden_update(state, {"a": 0.25, "b": 0.75}, surfaces)
    assert state.scores["a"] == -0.25
    assert state.scores["b"] == -0.375


def test_hidden_update_rejects_bad_input():
    surfaces = {"e1": 1.0}
    state = ReactiveHiddenState(budget=1.0)
    with pytest.raises(ValueError, match="empty attack"):
        reactive_hidden_step(state, Attack(()), surfaces)
    with pytest.raises(ValueError, match="no attacked edges"):
        reactive_hidden_update(state, {}, surfaces)
    with pytest.raises(ValueError, match="negative attack weight"):
        reactive_hidden_update(state, {"e1": -0.5}, surfaces)
    with pytest.raises(ValueError, match="no surface reported"):
        reactive_hidden_update(state, {"ghost": 1.0}, surfaces)
    with pytest.raises(ValueError, match="must be positive"):
        reactive_hidden_update(state, {"e1": 1.0}, {"e1": -2.0})
    state, _ = reactive_hidden_step(state, Attack(("e1",)), surfaces)
    with pytest.raises(ValueError, match="re-revealed"):
        reactive_hidden_step(state, Attack(("e1",)), {"e1": 3.0})
    with pytest.raises(ValueError, match="beta"):
        hidden_allocation(state, beta=0.0)
    with pytest.raises(ValueError, match="beta"):
        hidden_allocation(state, beta=1.5)


# ---------------------------------------------------------------------------
# known-edge learner


def test_known_start_uniform():
    system = fixture("fig3_n4")
    state = reactive_known_start(system, horizon=50)
    assert state.beta == horizon_beta(4, 50)
    alloc = known_allocation(state)
    for eid in system.edge_ids:
        assert alloc.get(eid) == pytest.approx(system.budget / 4.0, rel=1e-12)
    assert alloc.total() == pytest.approx(system.budget, rel=1e-12)


def test_known_step_penalizes_attacked_edge():
    system = System.build(
        edges=[("e1", "s", "a", 1.0), ("e2", "s", "b", 1.0)], budget=1.0
    )
    state = reactive_known_start(system, horizon=10, beta=0.5)
    state = reactive_known_step(state, Attack(("e1",)))
    alloc = known_allocation(state)
    # share(e1) doubles before renormalizing: (1, 0.5) -> (2/3, 1/3)
    assert alloc.get("e1") == pytest.approx(2.0 / 3.0, rel=1e-12)
    assert alloc.get("e2") == pytest.approx(1.0 / 3.0, rel=1e-12)
    assert state.round_index == 1


def test_known_update_shift_invariant():
    system = fixture("fig3_n2")
    base = reactive_known_start(system, horizon=20, beta=0.7)
    eids = list(base.surfaces)
    column = {eids[0]: -1.4, eids[1]: 0.25}
    shifted = {eid: column[eid] + 3.75 for eid in eids}
    a = reactive_known_update(base, column)
    b = reactive_known_update(base, shifted)
    for eid in eids:
        assert a.log_shares[eid] == pytest.approx(b.log_shares[eid], abs=1e-12)


def test_known_learner_rejects_bad_input():
    system = fixture("fig3_n2")
    with pytest.raises(ValueError, match="horizon"):
        reactive_known_start(system, horizon=0)
    with pytest.raises(ValueError, match="beta"):
        reactive_known_start(system, horizon=5, beta=1.5)
    state = reactive_known_start(system, horizon=5)
    with pytest.raises(ValueError, match="empty attack"):
        reactive_known_step(state, Attack(()))
    with pytest.raises(KeyError, match="ghost"):
        reactive_known_step(state, Attack(("ghost",)))
    with pytest.raises(KeyError, match="ghost"):
        reactive_known_update(state, {"ghost": 1.0})
    empty = System.build(edges=[], start="s")
    with pytest.raises(ValueError, match="no edges"):
        reactive_known_start(empty, horizon=5)


# ---------------------------------------------------------------------------
# proactive allocations


def test_mincut_layered_chain():
    system = fixture("fig2")
    deep = mincut_perimeter_defense(system, "db")
    assert deep.alloc == {"right": 10.0}
    shallow = mincut_perimeter_defense(system, "front")
    assert shallow.alloc == {"left": 10.0}


def test_mincut_merges_parallel_edges():
    system = System.build(
        edges=[
            ("p1", "s", "t", 1.0),
            ("p2", "s", "t", 2.0),
            ("q", "s", "a", 0.5),
            ("r", "a", "t", 0.25),
        ],
        rewards={"t": 1.0},
        budget=2.0,
    )
    alloc = mincut_perimeter_defense(system, "t")
    # cut {s, a} | {t} has weight 3.25, beating the perimeter cut's 3.5
    assert set(alloc.support()) == {"p1", "p2", "r"}
    assert alloc.get("p1") == pytest.approx(2.0 * 1.0 / 3.25, rel=1e-12)
    assert alloc.get("p2") == pytest.approx(2.0 * 2.0 / 3.25, rel=1e-12)
    assert alloc.get("r") == pytest.approx(2.0 * 0.25 / 3.25, rel=1e-12)


def test_mincut_rejects_bad_targets():
    system = fixture("fig2")
    with pytest.raises(ValueError, match="differ from the start"):
        mincut_perimeter_defense(system, "s")
    with pytest.raises(KeyError, match="unknown vertex"):
        mincut_perimeter_defense(system, "ghost")
    island = System.build(
        edges=[("e", "s", "a", 1.0)], rewards={"b": 1.0}, budget=1.0
    )
    with pytest.raises(ValueError, match="unreachable"):
        mincut_perimeter_defense(island, "b")


def test_minimax_roa_layered_chain():
    system = fixture("fig2")
    result = minimax_proactive_defense(system, "roa")
    assert result.objective == "roa"
    assert result.value == pytest.approx(1.0, abs=1e-9)
    assert result.allocation.get("left") == pytest.approx(5.0, abs=1e-6)
    assert result.allocation.get("right") == pytest.approx(5.0, abs=1e-6)


def test_minimax_profit_two_objective_fork():
    system = fixture("fig4")
    result = minimax_proactive_defense(system, "profit")
    assert result.value == pytest.approx(1.0, abs=1e-9)
    assert result.allocation.get("right") == pytest.approx(9.0, abs=1e-9)
    # solver dust on the cheap edge is dropped, leaving it truly undefended
    assert result.allocation.get("left") == 0.0
    assert roa(system, Attack(("left",)), result.allocation) == math.inf


def test_minimax_roa_two_objective_fork():
    system = fixture("fig4")
    result = minimax_proactive_defense(system, "roa")
    assert result.value == pytest.approx(11.0 / 9.0, rel=1e-9)
    assert result.value <= 1.25


def test_minimax_roa_parallel_edges():
    system = fixture("appendix_b")
    result = minimax_proactive_defense(system, "roa")
    assert result.value == pytest.approx(2.0, rel=1e-9)
    assert result.allocation.get("e1") == pytest.approx(0.5, abs=1e-9)
    assert result.allocation.get("e2") == pytest.approx(0.5, abs=1e-9)


def test_minimax_degenerate_cases():
    worthless = System.build(
        edges=[("e", "s", "a", 1.0)], rewards={}, budget=1.0
    )
    result = minimax_proactive_defense(worthless, "roa")
    assert result.value == 0.0
    assert result.allocation.total() == 0.0

    rich = System.build(
        edges=[("lo", "s", "a", 1.0), ("hi", "s", "b", 1.0)],
        rewards={"a": 1.0, "b": 10.0},
        budget=100.0,
    )
    flooded = minimax_proactive_defense(rich, "profit")
    assert 0.0 <= flooded.value <= 1e-9

    with pytest.raises(ValueError, match="unknown objective"):
        minimax_proactive_defense(worthless, "speed")


def test_hindsight_best_proactive():
    system = fixture("appendix_b")
    attacks = [Attack(("e1",)), Attack(("e1",)), Attack(("e2",))]
    alloc, best_cost = hindsight_best_proactive(system, attacks)
    assert alloc.alloc == {"e1": 1.0}
    assert best_cost == 2.0

    # exact tie goes to the smallest edge id
    alloc, best_cost = hindsight_best_proactive(
        system, [Attack(("e1",)), Attack(("e2",))]
    )
    assert alloc.alloc == {"e1": 1.0}
    assert best_cost == 1.0


def test_hindsight_weighs_usage_by_surface():
    system = fixture("fig2")
    alloc, best_cost = hindsight_best_proactive(
        system, [Attack(("left", "right"))]
    )
    # one use each: 1/5 on the wide edge vs 9/5 on the narrow one
    assert alloc.alloc == {"right": 10.0}
    assert best_cost == pytest.approx(18.0, rel=1e-12)


def test_hindsight_from_usage():
    system = fixture("appendix_b")
    alloc, best_cost = hindsight_from_usage(system, {"e2": 0.5})
    assert alloc.alloc == {"e2": 1.0}
    assert best_cost == 0.5
    with pytest.raises(ValueError, match="hindsight defense is undefined"):
        hindsight_from_usage(system, {})


def test_uniform_and_myopic_defense():
    system = fixture("fig2")
    uni = uniform_defense(system)
    assert uni.get("left") == 5.0
    assert uni.get("right") == 5.0

    myo = myopic_defense(system, Attack(("left", "right")))
    total_surface = 5.0 + 5.0 / 9.0
    assert myo.get("left") == pytest.approx(10.0 * 5.0 / total_surface, rel=1e-12)
    assert myo.get("right") == pytest.approx(
        10.0 * (5.0 / 9.0) / total_surface, rel=1e-12
    )
    with pytest.raises(ValueError, match="empty"):
        myopic_defense(system, Attack(()))
    with pytest.raises(ValueError, match="no edges"):
        uniform_defense(System.build(edges=[], start="s"))


def test_defender_descriptors():
    assert ReactiveDefender.reactive is True
    assert MyopicDefender.reactive is True
    assert KnownEdgesDefender.reactive is False
    assert FixedDefender.reactive is False

    assert ReactiveDefender().describe() == {
        "policy": "reactive-hidden",
        "schedule": "round-adaptive",
    }
    assert KnownEdgesDefender().describe() == {
        "policy": "known-edges",
        "beta": "horizon",
    }
    assert KnownEdgesDefender(beta=0.7).describe()["beta"] == 0.7
    assert FixedDefender(zero_allocation(1.0)).describe() == {"policy": "fixed"}
    assert FixedDefender(zero_allocation(1.0), name="noop").describe() == {
        "policy": "noop"
    }
    assert MinimaxDefender("profit").describe() == {
        "policy": "minimax",
        "objective": "profit",
    }
    assert MincutDefender("db").describe() == {"policy": "mincut", "target": "db"}
    assert UniformDefender().describe() == {"policy": "uniform"}
    assert MyopicDefender().describe() == {"policy": "myopic"}


# ---------------------------------------------------------------------------
# properties


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=60, deadline=None)
def test_fixed_rate_ratio_monotone(seed):
    # attacking an edge can only raise its share relative to spared edges
    rng = random.Random(seed)
    system = random_system(rng, max_extra_edges=7)
    if len(system.edges) < 2:
        return
    state = reactive_known_start(system, horizon=50)
    for attack in attack_sequence(system, rng, 6):
        before = known_allocation(state)
        state = reactive_known_step(state, attack)
        after = known_allocation(state)
        hit = set(attack.path)
        for spared in set(system.edge_ids) - hit:
            for eid in hit:
                old = before.get(eid) / before.get(spared)
                new = after.get(eid) / after.get(spared)
                assert new > old * (1.0 - 1e-12)


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=60, deadline=None)
def test_annealed_ratio_monotone_without_new_reveals(seed):
    # with unit surfaces and no mid-game reveals, the annealed learner also
    # shifts budget toward the attacked edge every round
    rng = random.Random(seed)
    n = rng.randint(2, 6)
    surfaces = {f"e{i}": 1.0 for i in range(n)}
    state = ReactiveHiddenState(budget=1.0)
    state, alloc = reactive_hidden_update(
        state, {eid: 1.0 / n for eid in surfaces}, surfaces
    )
    for _ in range(rng.randint(1, 12)):
        target = rng.choice(sorted(surfaces))
        before = alloc
        state, alloc = reactive_hidden_update(state, {target: 1.0}, surfaces)
        for other in surfaces:
            if other == target:
                continue
            old = before.get(target) / before.get(other)
            new = alloc.get(target) / alloc.get(other)
            assert new > old * (1.0 - 1e-12)


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=40, deadline=None)
def test_learner_allocations_feasible(seed):
    rng = random.Random(seed)
    system = random_system(rng, max_extra_edges=9)
    state = ReactiveHiddenState(budget=system.budget)
    surfaces = {e.id: e.surface for e in system.edges}
    for attack in attack_sequence(system, rng, 10):
        state, alloc = reactive_hidden_step(state, attack, surfaces)
        assert alloc.total() == pytest.approx(system.budget, rel=1e-9)
        assert set(alloc.support()) <= set(state.surfaces)
