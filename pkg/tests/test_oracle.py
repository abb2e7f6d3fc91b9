import pytest

import schedexact as sx
from schedexact import InstanceTooLarge, Ordering

from conftest import count_extensions_by_ideal_recursion, random_instance


def test_antichain_counts_factorial():
    inst = sx.build_instance([1, 2, 3], [])
    assert sum(1 for _ in sx.linear_extensions(inst)) == 6


def test_chain_single_extension():
    inst = sx.transitive_closure([(0, 1), (1, 2)], 3)
    exts = list(sx.linear_extensions(inst))
    assert len(exts) == 1
    assert exts[0].sequence == (0, 1, 2)


def test_one_constraint_three_extensions():
    inst = sx.transitive_closure([(0, 1)], 3)
    got = {o.sequence for o in sx.linear_extensions(inst)}
    # independent derivation: filter all 6 permutations
    from itertools import permutations

    expected = {p for p in permutations(range(3)) if p.index(0) < p.index(1)}
    assert got == expected
    assert len(got) == 3


def test_every_extension_is_valid():
    inst = random_instance(3, 6, 0.4)
    for o in sx.linear_extensions(inst):
        assert sx.validate_ordering(inst, o)


def test_extensions_are_unique_and_lexicographic():
    inst = random_instance(9, 6, 0.3)
    seqs = [o.sequence for o in sx.linear_extensions(inst)]
    assert len(seqs) == len(set(seqs))
    assert seqs == sorted(seqs)


@pytest.mark.parametrize("seed,n,density", [(1, 5, 0.0), (2, 6, 0.2), (3, 7, 0.4), (4, 8, 0.6), (5, 8, 0.0)])
def test_count_matches_ideal_recursion(seed, n, density):
    inst = random_instance(seed, n, density)
    got = sum(1 for _ in sx.linear_extensions(inst))
    assert got == count_extensions_by_ideal_recursion(inst)


def test_brute_shortest_first():
    inst = sx.build_instance([1, 2, 3], [])
    o, c = sx.brute_force_optimal(inst)
    assert o.positions == (1, 2, 3)
    assert c == 10


def test_brute_forced_chain():
    inst = sx.transitive_closure([(0, 1)], 2)
    o, c = sx.brute_force_optimal(sx.build_instance([5, 1], [(0, 1)]))
    assert o.positions == (1, 2)
    assert c == 11


def test_brute_two_jobs_swaps():
    inst = sx.build_instance([2, 1], [])
    o, c = sx.brute_force_optimal(inst)
    assert o.positions == (2, 1)
    assert c == 4


def test_brute_equals_min_over_extensions():
    for seed in range(8):
        inst = random_instance(seed + 20, 6, 0.3)
        _, c = sx.brute_force_optimal(inst)
        assert c == min(sx.ordering_cost(inst, o) for o in sx.linear_extensions(inst))


def test_cap_guard():
    inst = sx.build_instance([1] * 13, [])
    with pytest.raises(InstanceTooLarge):
        sx.brute_force_optimal(inst)
    with pytest.raises(InstanceTooLarge):
        next(sx.linear_extensions(inst))
    # override allows larger n
    chain = sx.transitive_closure([(i, i + 1) for i in range(12)], 13)
    o, c = sx.brute_force_optimal(chain, cap=13)
    assert o.sequence == tuple(range(13))


def test_empty_instance():
    inst = sx.build_instance([], [])
    o, c = sx.brute_force_optimal(inst)
    assert o == Ordering(()) and c == 0
