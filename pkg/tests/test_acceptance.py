"""Acceptance criteria 1-10.  Each test records a PASS/FAIL line that is printed
in the terminal summary (see conftest.py)."""
import math
import random
import statistics
import time

import numpy as np

from conftest import elapsed, random_forest_graph
from expanderham.config import SolverConfig
from expanderham.engine import merge_two_paths
from expanderham.errors import InvalidInput, StageFailure
from expanderham.expansion import estimate_lambda
from expanderham.extendability import embed_constructible
from expanderham.generators import fixture, gnp, random_cayley, random_regular
from expanderham.linking import build_linking_blueprint, build_sorting_network
from expanderham.oracle import enumerate_rotations, held_karp, verify_linking_exhaustive
from expanderham.pipeline import find_hamilton_cycle, find_hamilton_path, verify_hamilton_cycle, \
    verify_hamilton_path
from expanderham.reduction import run_reduction
from expanderham.rotation import (endpoint_change_audit, endpoint_reach, replay,
                                  RotationRecord, rotate1, rotation_targets)

# every solver answer produced below is re-verified here for criterion 1
_ANSWERS = []


def _audit(g, report, pair=None):
    if report.cycle is None:
        return
    if pair is None:
        ok = verify_hamilton_cycle(g, report.cycle)
    else:
        ok = verify_hamilton_path(g, report.cycle, *pair)
    _ANSWERS.append(ok)


# -- 2 ------------------------------------------------------------------------

def test_c2_oracle_equivalence(criterion):
    rng = random.Random(2)
    bad = []
    counts = {"cycle": 0, "not_found": 0}
    for i in range(500):
        n = rng.randint(3, 14)
        if i % 2 == 0:
            g = gnp(n, rng.uniform(0.15, 0.7), seed=i)
        else:
            ds = [d for d in range(2, n) if n * d % 2 == 0]
            g = random_regular(n, rng.choice(ds), seed=i)
        rep = find_hamilton_cycle(g, SolverConfig(seed=i))
        _audit(g, rep)
        hk, _ = held_karp(g)
        counts[rep.outcome] = counts.get(rep.outcome, 0) + 1
        if rep.outcome == "cycle" and not hk:
            bad.append((i, "cycle without a Hamilton cycle"))
        if not hk and rep.outcome != "not_found":
            bad.append((i, rep.outcome))
    criterion(2, not bad, f"500 graphs, outcomes {counts}, violations {len(bad)}")
    assert not bad, bad[:5]


# -- 3 ------------------------------------------------------------------------

def _edge_diff(a, b):
    return len(a.edges() ^ b.edges())


def test_c3_rotation_invariants(criterion):
    rng = random.Random(3)
    bad = []
    ops = 0
    while ops < 10 ** 4:
        n = rng.randint(6, 24)
        iso_free = rng.random() < 0.7
        g, f = random_forest_graph(rng, n, p=rng.uniform(0.2, 0.6), isolated_ok=not iso_free)
        before = f.copy()
        ends = sorted(f.endpoints())
        v = rng.choice(ends)
        if rng.random() < 0.5:
            # a single 1-rotation with a random pivot and side
            zs = [z for z in g.adj[v]]
            if not zs:
                continue
            z = rng.choice(zs)
            opts = sorted(rotation_targets(f, v, z))
            try:
                f2, rec = rotate1(g, f, v, z, side=rng.choice(opts))
            except InvalidInput:
                continue
            k = 1
        else:
            k = rng.randint(1, 4)
            reach = endpoint_reach(g, f, v, None, k, state_cap=5000)
            u = rng.choice(sorted(reach))
            rec = reach[u]
            f2 = replay(rec, f)
            k = max(1, len(rec))
        ops += 1
        try:
            f2.validate()
        except AssertionError as exc:
            bad.append(("invalid", str(exc)))
            continue
        if f != before:
            bad.append(("input mutated", v))
        if iso_free:
            # a zero-step record (u == v) leaves End unchanged
            want = before.endpoints() if rec.u == rec.v else (before.endpoints() | {rec.u}) - {rec.v}
            if f2.endpoints() != want or not endpoint_change_audit(rec, before, f2):
                bad.append(("endpoints", v, rec.u))
        if _edge_diff(before, f2) > 2 * k:
            bad.append(("edge diff", _edge_diff(before, f2), k))
        back = f2.copy()
        rec.undo(back)
        if back != before or back.edges() != before.edges():
            bad.append(("undo", v))
        if RotationRecord.from_dict(rec.to_dict()).steps != rec.steps:
            bad.append(("serialize", v))
    criterion(3, not bad, f"{ops} rotations, violations {len(bad)}")
    assert not bad, bad[:5]


# -- 4 ------------------------------------------------------------------------

def test_c4_reach_matches_oracle(criterion):
    rng = random.Random(4)
    done = skipped = 0
    bad = []
    while done < 100:
        n = rng.randint(5, 12)
        g, f = random_forest_graph(rng, n, p=rng.uniform(0.3, 0.8))
        v = rng.choice(sorted(f.endpoints()))
        U = None if rng.random() < 0.5 else set(rng.sample(range(n), rng.randint(3, n)))
        k = rng.randint(1, 4)
        try:
            want = enumerate_rotations(g, f, v, U, k)
        except InvalidInput:
            skipped += 1
            continue
        got = endpoint_reach(g, f, v, U, k, state_cap=10 ** 6)
        if set(got) != want:
            bad.append((n, v, k, sorted(got), sorted(want)))
        for y, rec in got.items():
            if not replay(rec, f).is_endpoint(y):
                bad.append(("witness", y))
        done += 1
    criterion(4, not bad, f"{done} instances ({skipped} over the oracle cap), mismatches {len(bad)}")
    assert not bad, bad[:3]


# -- 5 ------------------------------------------------------------------------

def test_c5_potential_monotone(criterion):
    rng = random.Random(5)
    bad = []
    for i in range(100):
        kind = i % 3
        if kind == 0:
            n, d = rng.choice([(60, 6), (100, 8), (150, 10)])
            g = random_regular(n, d, seed=i)
        elif kind == 1:
            n = rng.randint(30, 120)
            g = gnp(n, rng.uniform(0.08, 0.3), seed=i)
        else:
            g = random_regular(400, 12, seed=i)
        merge = kind == 2
        st = run_reduction(g, cfg=SolverConfig(seed=i), merge=merge, target=1 if merge else None)
        log = [(c, q) for _, c, q, _ in st.log]
        if any(b >= a for a, b in zip(log, log[1:])):
            bad.append((i, "not decreasing"))
        if st.steps > g.n * g.n + g.n:
            bad.append((i, "too many steps"))
        st.forest.validate()
    criterion(5, not bad, f"100 runs, violations {len(bad)}")
    assert not bad, bad[:5]


# -- 6 ------------------------------------------------------------------------

def test_c6_merge_contract(criterion):
    cfg = SolverConfig()
    limit = 4 * cfg.depth_cap + 8
    bad = []
    tried = ok = 0
    for seed in range(5):
        g = random_regular(1000, 20, seed=100 + seed)
        f = run_reduction(g, merge=False, target=1).forest
        off = 0
        for _ in range(10):
            if f.path_count() < 2:
                break
            ps = sorted(f.paths.values(), key=lambda p: p[2])
            x, y = ps[off % len(ps)][0], ps[(off + 1) % len(ps)][0]
            tried += 1
            f2, rep = merge_two_paths(g, f, x, y, cfg)
            if not rep.ok:
                # a failed merge must hand back the untouched input
                if f2 is not f:
                    bad.append(("failure did not return the input", seed))
                off += 1
                continue
            ok += 1
            f2.validate()
            if f2.path_count() != f.path_count() - 1:
                bad.append(("count", seed))
            if f2.endpoints() != f.endpoints() - {x, y}:
                bad.append(("End", seed))
            if f2.isolated():
                bad.append(("isolated", seed))
            if not all(g.has_edge(*e) for e in f2.edges()):
                bad.append(("non-edge", seed))
            if _edge_diff(f, f2) > limit:
                bad.append(("edges", _edge_diff(f, f2)))
            f = f2
    criterion(6, not bad and ok > 0,
              f"{tried} merges tried, {ok} succeeded, contract violations {len(bad)}")
    assert ok > 0
    assert not bad, bad[:5]


# -- 7 ------------------------------------------------------------------------

def _embedded(N):
    H = build_linking_blueprint(N)
    for s in range(20):
        g = random_regular(1000, 20, seed=700 + 10 * N + s)
        try:
            He, _ = embed_constructible(g, H, rng=random.Random(s))
            return g, He
        except StageFailure:
            continue
    raise AssertionError(f"could not embed N={N}")


def test_c7_linking(criterion):
    bad = []
    for N in (2, 3, 4, 5):
        H = build_linking_blueprint(N)
        if not verify_linking_exhaustive(H):
            bad.append(("blueprint", N))
        g, He = _embedded(N)
        if not verify_linking_exhaustive(He):
            bad.append(("embedded", N))
        if not all(g.has_edge(u, v) for u, v in He.edge_images()):
            bad.append(("host edges", N))
    rng = random.Random(7)
    perms = []
    for _ in range(1000):
        p = list(range(8))
        rng.shuffle(p)
        perms.append(p)
    if not verify_linking_exhaustive(build_linking_blueprint(8), perms=perms):
        bad.append(("random bijections", 8))
    for N in range(1, 17):
        if not build_sorting_network(N).sorts_all_binary():
            bad.append(("sorting", N))
    criterion(7, not bad, f"N=2..5 blueprint+embedded, N=8 x 1000, sorting N<=16; failures {bad}")
    assert not bad


# -- 8 ------------------------------------------------------------------------

def _dense_lambda(g):
    mus = np.linalg.eigvalsh(g.adjacency_matrix())[::-1]
    return max(abs(mus[1]), abs(mus[-1])), mus[1]


def test_c8_spectral(criterion):
    rng = random.Random(8)
    worst = 0.0
    for i in range(50):
        if i % 5 == 4:
            g = random_cayley("cyclic", rng.randint(40, 200), rng.randint(3, 8), seed=i)
        else:
            n = rng.randint(20, 200)
            ds = [d for d in range(3, 13) if n * d % 2 == 0]
            g = random_regular(n, rng.choice(ds), seed=i)
        lam, mu2 = _dense_lambda(g)
        est = estimate_lambda(g, method="iterative")
        worst = max(worst, abs(est.lam - lam))
        if est.mu2 is not None:
            worst = max(worst, abs(est.mu2 - mu2))
    named = []
    for n in (5, 10, 30):
        named.append(abs(estimate_lambda(fixture("complete", n)).lam - 1.0))
    for d in (2, 5, 9):
        named.append(abs(estimate_lambda(fixture("complete_bipartite", d, d)).lam - d))
    for n in (5, 12, 41, 100):
        named.append(abs(estimate_lambda(fixture("cycle", n)).mu2 - 2 * math.cos(2 * math.pi / n)))
    ok = worst < 1e-6 and max(named) < 1e-6
    criterion(8, ok, f"max |iterative - dense| {worst:.2e}, named families {max(named):.2e}")
    assert ok


# -- 9 ------------------------------------------------------------------------

def test_c9_solve_rate(criterion):
    times, found = [], 0
    for seed in range(20):
        g = random_regular(1000, 20, seed=seed)
        t = time.perf_counter()
        rep = find_hamilton_cycle(g, SolverConfig(seed=seed))
        times.append(time.perf_counter() - t)
        _audit(g, rep)
        found += rep.found and rep.verified
    med = statistics.median(times)
    ok1 = found >= 19 and med < 5.0
    big, engaged = 0, 0
    for seed in range(5):
        g = random_regular(5000, 30, seed=seed)
        rep = find_hamilton_cycle(g, SolverConfig(seed=seed))
        _audit(g, rep)
        big += rep.found and rep.verified
        engaged += rep.merges > 0
    ok2 = big >= 4 and engaged >= 1
    criterion(9, ok1 and ok2, f"n=1000: {found}/20, median {med:.2f}s; "
                              f"n=5000: {big}/5, pipeline merges in {engaged}")
    assert ok1 and ok2


# -- 10 -----------------------------------------------------------------------

def test_c10_hamilton_connected(criterion):
    bad = []
    total = 0
    k8 = fixture("complete", 8)
    cases = [(k8, (0, 7)), (k8, (2, 5))]
    rng = random.Random(10)
    for s in range(10):
        g = random_regular(500, 20, seed=1000 + s)
        for _ in range(5):
            cases.append((g, tuple(rng.sample(range(500), 2))))
    for g, (x, y) in cases:
        rep = find_hamilton_path(g, x, y, SolverConfig(seed=total))
        total += 1
        _audit(g, rep, (x, y))
        if not (rep.found and verify_hamilton_path(g, rep.cycle, x, y)):
            bad.append(("not found", g.n, x, y))
        if (min(x, y), max(x, y)) in rep.broken_edges:
            bad.append(("protected edge broken", x, y))
    criterion(10, not bad, f"{total} pairs, failures {len(bad)}")
    assert not bad, bad[:5]


# -- 1 (runs last in this module) --------------------------------------------

def test_c1_verification_sound(criterion):
    ok = all(_ANSWERS) and elapsed() < 600
    criterion(1, ok, f"{len(_ANSWERS)} reported answers re-verified, "
                     f"{_ANSWERS.count(False)} failed")
    assert all(_ANSWERS)
