import pytest

from expanderham.config import SolverConfig
from expanderham.engine import (close_pair, medium_paths, merge_two_paths, net_change,
                                split_groups, steer_endpoint)
from expanderham.errors import InvalidInput
from expanderham.forest import LinearForest
from expanderham.generators import fixture, random_regular
from expanderham.reduction import run_reduction


@pytest.fixture(scope="module")
def reduced():
    g = random_regular(1000, 20, seed=21)
    return g, run_reduction(g, merge=False, target=1).forest


def side(f, path_ids, keep_end=None):
    """Vertices of the given paths minus every endpoint except keep_end."""
    out = set()
    for pid in path_ids:
        e1, e2, _ = f.paths[pid]
        out.update(v for v in f.walk(e1) if not f.is_endpoint(v) or v == keep_end)
    return out


def test_close_pair_joins_two_paths(reduced):
    g, f = reduced
    pids = sorted(f.paths, key=lambda k: -f.paths[k][2])
    half = len(pids) // 2
    x = f.paths[pids[0]][0]
    y = f.paths[pids[half]][0]
    X = side(f, pids[:half], keep_end=x)
    Y = side(f, pids[half:], keep_end=y)
    out, rep = close_pair(g, f, x, y, X, Y)
    assert rep.ok, rep.message
    out.validate()
    assert out.path_count() == f.path_count() - 1
    assert len(out.edges() ^ f.edges()) == rep.edges_changed
    assert all(g.has_edge(*e) for e in out.edges())


def test_close_pair_preconditions(reduced):
    g, f = reduced
    x, y = sorted(f.endpoints())[:2]
    with pytest.raises(InvalidInput):
        close_pair(g, f, x, y, {y}, {x})
    with pytest.raises(InvalidInput):
        close_pair(g, f, x, y, set(range(g.n)), {y})


def test_steer_endpoint_lands_in_target(reduced):
    g, f = reduced
    u = max(f.endpoints(), key=lambda v: f.path_len(v))
    big = [pid for pid in f.paths if pid != f.pid[u]]
    V = side(f, big)
    out, v, rec = steer_endpoint(g, f, u, set(range(g.n)), V)
    out.validate()
    assert v in V and out.is_endpoint(v) and not out.is_endpoint(u)
    assert out.endpoints() == (f.endpoints() - {u}) | {v}


def test_medium_paths_and_groups(reduced):
    g, f = reduced
    cfg = SolverConfig()
    skip = sorted(f.endpoints())[:2]
    pieces = medium_paths(f, cfg, skip=skip)
    lo, _ = cfg.medium_range(f.n)
    assert pieces
    assert all(len(p) >= 2 for p in pieces)
    assert all(not set(skip) & set(p) for p in pieces)
    groups = split_groups(pieces, family=lambda p: f.pid[p[0]])
    assert len(groups) == 5
    assert sorted(map(tuple, pieces)) == sorted(tuple(p) for gr in groups for p in gr)
    # chopped pieces of one forest path never straddle the first class and the rest
    fam = {}
    for i, gr in enumerate(groups):
        for p in gr:
            fam.setdefault(f.pid[p[0]], set()).add(0 if i < 2 else i)
    assert all(len(s) == 1 for s in fam.values())


def test_split_groups_balances_mass():
    pieces = [list(range(i * 10, i * 10 + 10)) for i in range(20)]
    groups = split_groups(pieces)
    masses = sorted(sum(map(len, gr)) for gr in groups)
    assert masses == [40] * 5


def test_merge_two_paths_contract(reduced):
    g, f = reduced
    cfg = SolverConfig()
    done = 0
    for _ in range(6):
        ps = sorted(f.paths.values(), key=lambda p: p[2])
        for a in range(len(ps) - 1):
            x, y = ps[a][0], ps[a + 1][0]
            out, rep = merge_two_paths(g, f, x, y, cfg)
            if rep.ok:
                break
            assert out is f
        else:
            pytest.fail("no pair could be merged")
        out.validate()
        assert out.path_count() == f.path_count() - 1
        assert out.endpoints() == f.endpoints() - {x, y}
        assert not out.isolated()
        assert len(out.edges() ^ f.edges()) <= 4 * cfg.depth_cap + 8
        f = out
        done += 1
    assert done == 6


def test_merge_same_path_ends(reduced):
    g, f = reduced
    cfg = SolverConfig()
    for e1, e2, _ in sorted(f.paths.values(), key=lambda p: p[2]):
        out, rep = merge_two_paths(g, f, e1, e2, cfg)
        if rep.ok:
            out.validate()
            assert out.endpoints() == f.endpoints() - {e1, e2}
            assert out.path_count() == f.path_count() - 1
            return
    pytest.fail("no same-path merge succeeded")


def test_merge_rejects_bad_input(reduced):
    g, f = reduced
    x = sorted(f.endpoints())[0]
    with pytest.raises(InvalidInput):
        merge_two_paths(g, f, x, x)
    inner = next(v for v in range(g.n) if not f.is_endpoint(v))
    with pytest.raises(InvalidInput):
        merge_two_paths(g, f, x, inner)
    with pytest.raises(InvalidInput):
        merge_two_paths(g, LinearForest(g.n), 0, 1)


def test_merge_needs_medium_mass():
    # only 2-vertex paths: nothing reaches the medium window
    g = fixture("complete", 40)
    f = LinearForest.from_paths(40, [[2 * i, 2 * i + 1] for i in range(20)])
    out, rep = merge_two_paths(g, f, 0, 2)
    assert not rep.ok and rep.stage == "precondition" and out is f


def test_net_change_cancels():
    from expanderham.rotation import RotationRecord, RotationStep
    r1 = RotationRecord(0, [RotationStep(0, 3, 2, (2, 3), (0, 3))])
    r2 = RotationRecord(2, [RotationStep(2, 3, 0, (0, 3), (2, 3))])
    assert net_change([r1, r2]) == set()
    assert net_change([r1]) == {(2, 3), (0, 3)}
