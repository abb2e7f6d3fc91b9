"""Brute-force ground truth: enumerate linear extensions, keep the cheapest.

Deliberately naive so it stays an independent check for every solver:
no memoization, no pruning beyond precedence feasibility. The DFS picks
the next job in increasing index order, so enumeration order and tie
breaks are deterministic.
"""

from __future__ import annotations

from typing import Iterator

from .instance import Instance, Ordering


class InstanceTooLarge(ValueError):
    pass


def _check_cap(n: int, cap: int) -> None:
    if n > cap:
        raise InstanceTooLarge(f"n={n} exceeds enumeration cap {cap}")


def linear_extensions(inst: Instance, cap: int = 12) -> Iterator[Ordering]:
    """Yield every precedence-respecting ordering exactly once."""
    n = inst.n
    _check_cap(n, cap)
    if n == 0:
        yield Ordering(())
        return
    succ = inst.succ_masks
    pred = inst.pred_masks
    prefix: list[int] = []

    def walk(placed: int, ready: int) -> Iterator[Ordering]:
        if len(prefix) == n:
            yield Ordering.from_sequence(prefix)
            return
        m = ready
        while m:
            b = m & -m
            m ^= b
            v = b.bit_length() - 1
            nxt = ready ^ b
            s = succ[v] & ~placed & ~b
            while s:
                sb = s & -s
                s ^= sb
                w = sb.bit_length() - 1
                if pred[w] & ~(placed | b) == 0:
                    nxt |= sb
            prefix.append(v)
            yield from walk(placed | b, nxt)
            prefix.pop()

    ready0 = 0
    for v in range(n):
        if pred[v] == 0:
            ready0 |= 1 << v
    yield from walk(0, ready0)


def brute_force_optimal(inst: Instance, cap: int = 12) -> tuple[Ordering, int]:
    """Exact optimum by exhaustive search; ties go to the first sequence found."""
    n = inst.n
    _check_cap(n, cap)
    if n == 0:
        return Ordering(()), 0
    times = inst.times
    succ = inst.succ_masks
    pred = inst.pred_masks
    best_cost: int | None = None
    best_seq: tuple[int, ...] = ()
    prefix: list[int] = []

    def walk(placed: int, ready: int, depth: int, cost: int) -> None:
        nonlocal best_cost, best_seq
        if depth == n:
            if best_cost is None or cost < best_cost:
                best_cost = cost
                best_seq = tuple(prefix)
            return
        coeff = n - depth
        m = ready
        while m:
            b = m & -m
            m ^= b
            v = b.bit_length() - 1
            nxt = ready ^ b
            s = succ[v] & ~placed & ~b
            while s:
                sb = s & -s
                s ^= sb
                w = sb.bit_length() - 1
                if pred[w] & ~(placed | b) == 0:
                    nxt |= sb
            prefix.append(v)
            walk(placed | b, nxt, depth + 1, cost + coeff * times[v])
            prefix.pop()

    ready0 = 0
    for v in range(n):
        if pred[v] == 0:
            ready0 |= 1 << v
    walk(0, ready0, 0, 0)
    if best_cost is None:
        raise AssertionError("a finite poset always has a linear extension")
    return Ordering.from_sequence(best_seq), best_cost
