"""Shared helpers for the test suite."""

from __future__ import annotations

import random

from reactive_defense.generators import random_attack, random_system
from reactive_defense.model import Attack, System
from reactive_defense.paths import EnumerationLimitError, enumerate_attacks


def sample_systems(
    count: int, base_seed: int = 0, max_paths: int = 500, **kwargs
) -> list[tuple[int, System]]:
    """Deterministic stream of random systems with a bounded attack count.

    Seeds are consumed in order and oversized systems skipped, so the
    returned list is reproducible for a given signature.
    """
    out: list[tuple[int, System]] = []
    seed = base_seed
    attempts = 0
    while len(out) < count:
        seed += 1
        attempts += 1
        assert attempts < 200 * count, "generator keeps producing oversized systems"
        system = random_system(random.Random(seed), **kwargs)
        try:
            enumerate_attacks(system, limit=max_paths)
        except EnumerationLimitError:
            continue
        out.append((seed, system))
    return out


def attack_sequence(system: System, rng: random.Random, length: int) -> list[Attack]:
    """Random non-empty attacks; start-edge fallback keeps the draw total."""
    out: list[Attack] = []
    fallback = Attack((system.start_edges()[0].id,))
    while len(out) < length:
        attack = random_attack(system, rng)
        out.append(attack if attack is not None else fallback)
    return out
