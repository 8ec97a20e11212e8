import pytest

from expanderham.errors import InvalidInput
from expanderham.generators import (cayley_graph, fixture, gnp, make_group, random_cayley,
                                    random_regular)


@pytest.mark.parametrize("n,d", [(10, 3), (50, 4), (200, 8), (31, 30)])
def test_random_regular_is_simple_and_regular(n, d):
    g = random_regular(n, d, seed=1)
    assert g.n == n and set(g.degrees()) == {d}


def test_random_regular_is_seeded():
    assert random_regular(100, 6, seed=4) == random_regular(100, 6, seed=4)
    assert random_regular(100, 6, seed=4) != random_regular(100, 6, seed=5)


@pytest.mark.parametrize("n,d", [(5, 3), (4, 4), (-1, 2)])
def test_random_regular_rejects(n, d):
    with pytest.raises(InvalidInput):
        random_regular(n, d)


def test_gnp_extremes():
    assert gnp(8, 0.0).m == 0
    assert gnp(8, 1.0).m == 28
    with pytest.raises(InvalidInput):
        gnp(5, 1.5)


@pytest.mark.parametrize("kind,param,order", [("cyclic", 12, 12), ("power_of_Z2", 4, 16),
                                              ("dihedral", 5, 10), ("symmetric", 4, 24)])
def test_groups_satisfy_axioms(kind, param, order):
    grp = make_group(kind, param)
    assert grp.order == order
    for a in range(order):
        assert grp.mul(a, 0) == a == grp.mul(0, a)
        assert grp.mul(a, grp.inv(a)) == 0
    for a in range(0, order, 3):
        for b in range(1, order, 5):
            for c in range(2, order, 7):
                assert grp.mul(grp.mul(a, b), c) == grp.mul(a, grp.mul(b, c))


def test_cayley_degree_is_connection_set_size():
    g = random_cayley("dihedral", 20, 4, seed=2)
    k = g.meta["degree"]
    assert set(g.degrees()) == {k}


def test_hypercube():
    grp = make_group("power_of_Z2", 3)
    g = cayley_graph(grp, [1, 2, 4])
    assert g.m == 12 and set(g.degrees()) == {3}
    with pytest.raises(InvalidInput):
        cayley_graph(grp, [0])


def test_fixtures():
    p = fixture("petersen")
    assert p.n == 10 and p.m == 15 and set(p.degrees()) == {3}
    assert fixture("complete", 5).m == 10
    assert fixture("complete_bipartite", 2, 3).m == 6
    assert fixture("cycle", 7).m == 7
    assert fixture("path", 4).m == 3
    with pytest.raises(InvalidInput):
        fixture("dodecahedron")
