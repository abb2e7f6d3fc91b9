"""Seeded random instance generators.

All generators return the raw wire payload (n, times, precedence edges
before closure) so the output can be written straight to disk; identical
parameters and seed give identical payloads.
"""

from __future__ import annotations

import random

from .instance import Instance, build_instance

MODELS = ("random-dag", "chain-mix", "antichain-plus-matching")


def random_dag(n: int, density: float, tmax: int, seed: int) -> dict:
    """Each index-ordered pair (i, j), i < j, gets an edge with the given
    probability."""
    rng = random.Random(seed)
    times = [rng.randint(0, tmax) for _ in range(n)]
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                edges.append([i, j])
    return {"n": n, "times": times, "precedences": edges}


def chain_mix(n: int, density: float, tmax: int, seed: int) -> dict:
    """Jobs split round-robin over max(1, round((1 - density) * n)) chains;
    density 1 gives a single chain, density 0 an antichain."""
    rng = random.Random(seed)
    times = [rng.randint(0, tmax) for _ in range(n)]
    chains = max(1, round((1.0 - density) * n)) if n else 1
    order = list(range(n))
    rng.shuffle(order)
    edges = []
    for c in range(chains):
        members = order[c::chains]
        for a, b in zip(members, members[1:]):
            edges.append([a, b])
    return {"n": n, "times": times, "precedences": edges}


def antichain_plus_matching(n: int, density: float, tmax: int, seed: int) -> dict:
    """floor(density * n / 2) vertex-disjoint comparable pairs, no other
    constraints."""
    rng = random.Random(seed)
    times = [rng.randint(0, tmax) for _ in range(n)]
    k = int(density * n / 2)
    chosen = rng.sample(range(n), 2 * k) if k else []
    edges = [[chosen[2 * i], chosen[2 * i + 1]] for i in range(k)]
    return {"n": n, "times": times, "precedences": edges}


def generate(model: str, n: int, density: float, tmax: int, seed: int) -> dict:
    if model == "random-dag":
        return random_dag(n, density, tmax, seed)
    if model == "chain-mix":
        return chain_mix(n, density, tmax, seed)
    if model == "antichain-plus-matching":
        return antichain_plus_matching(n, density, tmax, seed)
    raise ValueError(f"unknown model {model!r}, expected one of {MODELS}")


def to_instance(payload: dict) -> Instance:
    return build_instance(payload["times"], [tuple(e) for e in payload["precedences"]])
