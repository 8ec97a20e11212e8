import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from expanderham.config import SolverConfig
from expanderham.errors import InvalidInput
from expanderham.generators import fixture, gnp, random_regular
from expanderham.graph import Graph
from expanderham.oracle import held_karp
from expanderham.pipeline import (find_hamilton_cycle, find_hamilton_path, posa_fallback,
                                  verify_hamilton_cycle, verify_hamilton_path)


def test_verifiers():
    g = fixture("cycle", 5)
    assert verify_hamilton_cycle(g, [0, 1, 2, 3, 4])
    assert verify_hamilton_cycle(g, [2, 1, 0, 4, 3])
    assert not verify_hamilton_cycle(g, [0, 2, 1, 3, 4])
    assert not verify_hamilton_cycle(g, [0, 1, 2, 3])
    assert not verify_hamilton_cycle(g, [0, 1, 2, 3, 3])
    assert not verify_hamilton_cycle(g, None)
    p = fixture("path", 4)
    assert verify_hamilton_path(p, [0, 1, 2, 3], 0, 3)
    assert not verify_hamilton_path(p, [0, 1, 2, 3], 3, 0)


def test_small_fixtures():
    assert find_hamilton_cycle(fixture("complete", 8)).outcome == "cycle"
    assert find_hamilton_cycle(fixture("petersen")).outcome == "not_found"
    assert find_hamilton_cycle(fixture("path", 6)).outcome == "not_found"
    assert find_hamilton_cycle(Graph(2, [(0, 1)])).outcome == "not_found"
    assert find_hamilton_cycle(fixture("complete_bipartite", 3, 5)).outcome == "not_found"


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 11), st.floats(0.2, 0.9), st.integers(0, 10 ** 6))
def test_answers_agree_with_held_karp(n, p, seed):
    g = gnp(n, p, seed=seed)
    rep = find_hamilton_cycle(g, SolverConfig(seed=seed))
    hk = held_karp(g)[0]
    if rep.found:
        assert hk and verify_hamilton_cycle(g, rep.cycle)
    if not hk:
        assert rep.outcome == "not_found"


def test_posa_fallback_on_dense_graph():
    g = random_regular(200, 10, seed=5)
    cyc = posa_fallback(g)
    assert verify_hamilton_cycle(g, cyc)


def test_structured_pipeline_engages():
    g = random_regular(1000, 20, seed=6)
    rep = find_hamilton_cycle(g, SolverConfig(seed=6))
    assert rep.outcome == "cycle" and rep.verified
    assert verify_hamilton_cycle(g, rep.cycle)
    assert rep.merges > 0 and not rep.fallback_used
    assert rep.potential_log
    assert rep.potential_csv().startswith("phase,step,path_count,sum_sq,move")


def test_report_serialises():
    rep = find_hamilton_cycle(fixture("complete", 6))
    d = json.loads(rep.to_json())
    assert d["outcome"] == "cycle" and len(d["cycle"]) == 6


def test_same_seed_same_cycle():
    g = random_regular(600, 16, seed=8)
    a = find_hamilton_cycle(g, SolverConfig(seed=1))
    b = find_hamilton_cycle(g, SolverConfig(seed=1))
    assert a.cycle == b.cycle


def test_path_mode():
    g = random_regular(500, 20, seed=9)
    rng = random.Random(9)
    for _ in range(2):
        x, y = rng.sample(range(500), 2)
        rep = find_hamilton_path(g, x, y, SolverConfig(seed=x))
        assert rep.outcome == "path"
        assert verify_hamilton_path(g, rep.path, x, y)
        assert (min(x, y), max(x, y)) not in rep.broken_edges


def test_path_mode_small():
    g = fixture("complete", 5)
    rep = find_hamilton_path(g, 1, 3)
    assert rep.path[0] == 1 and rep.path[-1] == 3
    # a path graph has only its own end-to-end path
    p = fixture("path", 5)
    assert find_hamilton_path(p, 0, 4).found
    assert not find_hamilton_path(p, 0, 3).found


def test_path_mode_rejects():
    g = fixture("complete", 5)
    with pytest.raises(InvalidInput):
        find_hamilton_path(g, 2, 2)
    with pytest.raises(InvalidInput):
        find_hamilton_path(g, 0, 9)
