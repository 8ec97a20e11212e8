import random

import pytest

from expanderham.config import SolverConfig
from expanderham.errors import InvalidInput, StageFailure
from expanderham.extendability import (ExtendableEmbedding, deficiency_audit, embed_constructible,
                                       extend_path, partition_expander)
from expanderham.generators import fixture, random_regular
from expanderham.linking import build_linking_blueprint, check_certificate
from expanderham.oracle import verify_linking_exhaustive


@pytest.fixture(scope="module")
def host():
    return random_regular(600, 20, seed=11)


def test_deficiency_of_empty_embedding():
    g = fixture("complete", 8)
    emb = ExtendableEmbedding(g, D=5)
    # fresh singleton: 7 free neighbours against D-1 = 4
    assert emb.deficiency([0]) == 3
    # pairs still pass (8 free against 8) but triples cannot in a graph this small
    assert deficiency_audit(emb, max_size=2).status == "certified"
    assert deficiency_audit(emb).refuted


def test_deficiency_counts_used_vertices():
    g = fixture("complete", 8)
    emb = ExtendableEmbedding(g, D=5)
    emb.add_path([0, 1, 2])
    # vertex 1 has H-degree 2, so its demand drops by 1; 5 free neighbours
    assert emb.deficiency([1]) == 5 - (4 - 1)


def test_audit_refutes_a_starved_vertex():
    g = fixture("cycle", 12)
    emb = ExtendableEmbedding(g, D=5)
    v = deficiency_audit(emb)
    assert v.refuted and v.condition == "deficiency"


def test_embedding_log_rolls_back():
    g = fixture("complete", 6)
    emb = ExtendableEmbedding(g)
    tok = emb.snapshot()
    emb.add_path([0, 1, 2, 3])
    emb.remove_edge(1, 2)
    assert emb.hedges == {(0, 1), (2, 3)}
    emb.rollback(tok)
    assert not emb.used and not emb.hedges and not emb.hdeg


def test_embedding_rejects_bad_updates():
    g = fixture("path", 4)
    emb = ExtendableEmbedding(g)
    emb.add_vertex(0)
    with pytest.raises(InvalidInput):
        emb.add_vertex(0)
    emb.add_vertex(2)
    with pytest.raises(InvalidInput):
        emb.add_edge(0, 2)  # not a host edge
    with pytest.raises(InvalidInput):
        ExtendableEmbedding(g, D=2)


def test_extend_path_free_end(host):
    emb = ExtendableEmbedding(host)
    emb.add_vertex(0)
    path = extend_path(emb, 0, 6, rng=random.Random(1))
    assert len(path) == 7 and path[0] == 0
    assert all(host.has_edge(a, b) for a, b in zip(path, path[1:]))
    assert len(set(path)) == 7
    assert not deficiency_audit(emb, region=set(path)).refuted


def test_extend_path_between_anchors(host):
    emb = ExtendableEmbedding(host)
    emb.add_vertex(0)
    far = extend_path(emb, 0, 5, rng=random.Random(2))[-1]
    path = extend_path(emb, 0, 4, x=far, rng=random.Random(3))
    assert path[0] == 0 and path[-1] == far and len(path) == 5
    assert set(path[1:-1]).isdisjoint({0, far}) and len(set(path)) == 5


def test_extend_path_input_errors(host):
    emb = ExtendableEmbedding(host)
    with pytest.raises(InvalidInput):
        extend_path(emb, 0, 3)
    emb.add_vertex(0)
    with pytest.raises(InvalidInput):
        extend_path(emb, 0, 0)
    with pytest.raises(InvalidInput):
        extend_path(emb, 0, 3, x=0)


def test_extend_path_gives_up_in_a_cycle():
    g = fixture("cycle", 40)
    emb = ExtendableEmbedding(g, D=3)
    emb.add_vertex(0)
    with pytest.raises(StageFailure):
        extend_path(emb, 0, 3, cfg=SolverConfig(extend_retries=3))


def test_embed_blueprint(host):
    H = build_linking_blueprint(3)
    for s in range(10):
        try:
            He, emb = embed_constructible(host, H, rng=random.Random(s))
            break
        except StageFailure:
            continue
    else:
        pytest.fail("no embedding in 10 attempts")
    assert He.embedded and check_certificate(H)
    imgs = He.vertex_images()
    assert len(set(imgs)) == H.n_vertices
    assert all(host.has_edge(u, v) for u, v in He.edge_images())
    assert set(emb.hedges) == {(min(e), max(e)) for e in He.edge_images()}
    assert verify_linking_exhaustive(He)


def test_embed_rejects_small_host():
    with pytest.raises(InvalidInput):
        embed_constructible(fixture("complete", 20), build_linking_blueprint(4))


def test_partition_covers_everything():
    g = random_regular(1000, 20, seed=3)
    part = partition_expander(g, SolverConfig(seed=3))
    assert part.X | part.Y | part.Z == set(range(1000))
    assert not (part.X & part.Y or part.X & part.Z or part.Y & part.Z)
    assert set(part.A) | set(part.B) <= part.X
    for c, a, b in zip(part.connectors, part.A, part.B):
        assert c[0] == a and c[-1] == b
        assert all(g.has_edge(u, v) for u, v in zip(c, c[1:]))
        assert set(c[1:-1]) <= part.Y


def test_partition_path_mode_keeps_the_pair_outside_X():
    g = random_regular(1000, 20, seed=4)
    x, y = g.edges()[0]
    part = partition_expander(g, SolverConfig(seed=4), pair=(x, y))
    assert x not in part.X and y not in part.X
    c0 = part.connectors[0]
    i = c0.index(x)
    assert c0[i + 1] == y or c0[i - 1] == y
    with pytest.raises(InvalidInput):
        partition_expander(g, pair=(0, next(v for v in range(1000) if not g.has_edge(0, v) and v)))
