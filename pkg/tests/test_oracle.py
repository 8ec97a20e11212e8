import itertools
import random

import pytest

from expanderham.errors import InvalidInput
from expanderham.forest import LinearForest
from expanderham.generators import fixture, gnp
from expanderham.graph import Graph
from expanderham.oracle import enumerate_rotations, held_karp, verify_paths_cover


def brute_hamiltonian(g):
    n = g.n
    if n < 3:
        return False
    for perm in itertools.permutations(range(1, n)):
        seq = (0,) + perm
        if all(g.has_edge(seq[i], seq[(i + 1) % n]) for i in range(n)):
            return True
    return False


def test_known_graphs():
    assert held_karp(fixture("complete", 5))[0]
    assert held_karp(fixture("cycle", 9))[0]
    assert not held_karp(fixture("petersen"))[0]
    assert not held_karp(fixture("complete_bipartite", 3, 4))[0]
    assert held_karp(fixture("complete_bipartite", 4, 4))[0]
    assert not held_karp(fixture("path", 5))[0]
    assert not held_karp(Graph(2, [(0, 1)]))[0]


def test_witness_is_a_cycle():
    ok, seq = held_karp(fixture("complete_bipartite", 3, 3))
    assert ok and sorted(seq) == list(range(6))
    g = fixture("complete_bipartite", 3, 3)
    assert all(g.has_edge(seq[i], seq[(i + 1) % 6]) for i in range(6))


def test_matches_permutation_brute_force():
    rng = random.Random(0)
    for i in range(120):
        g = gnp(rng.randint(3, 7), rng.uniform(0.3, 0.8), seed=i)
        assert held_karp(g)[0] == brute_hamiltonian(g)


def test_refuses_large_inputs():
    with pytest.raises(InvalidInput):
        held_karp(fixture("cycle", 21))


def test_enumerate_rotations_small_case():
    # path 0-1-2-3-4-5 with chords 0-3, 2-5: one rotation at pivot 3 exposes 2
    g = Graph(6, [(i, i + 1) for i in range(5)] + [(0, 3), (2, 5)])
    f = LinearForest.from_paths(6, [list(range(6))])
    assert enumerate_rotations(g, f, 0, None, 1) == {0, 2}
    assert enumerate_rotations(g, f.edges(), 0, None, 0, n=6) == {0}
    with pytest.raises(InvalidInput):
        enumerate_rotations(g, f, 3, None, 1)


def test_verify_paths_cover():
    edges = {frozenset(e) for e in [(0, 1), (1, 2), (3, 4), (4, 5)]}
    assert verify_paths_cover(range(6), edges, [[0, 1, 2], [3, 4, 5]], [(0, 2), (3, 5)])
    assert not verify_paths_cover(range(6), edges, [[0, 1, 2], [3, 4]], [(0, 2), (3, 4)])
    assert not verify_paths_cover(range(6), edges, [[0, 1, 2], [3, 4, 5]], [(0, 2), (5, 3)])
