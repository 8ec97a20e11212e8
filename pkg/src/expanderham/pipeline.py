"""End-to-end Hamilton cycle / path search: partition, reduce, merge, link, verify."""
import json
import random
import time
from dataclasses import dataclass, field

from .config import SolverConfig
from .engine import merge_two_paths
from .errors import InvalidInput, StageFailure
from .extendability import partition_expander
from .forest import LinearForest, edge_key
from .linking import link
from .reduction import run_reduction
from .rotation import ReachSearch, replay

OUTCOMES = ("cycle", "path", "not_found", "refuted_input")


@dataclass
class SolveReport:
    outcome: str
    mode: str = "cycle"
    cycle: list = None  # vertex sequence; for paths it runs from x to y
    timings: dict = field(default_factory=dict)
    merges: int = 0
    merge_failures: int = 0
    fallback_used: bool = False
    verified: bool = False
    stage: str = None
    message: str = ""
    potential_log: list = field(default_factory=list)  # (phase, step, path_count, sum_sq, move)
    broken_edges: set = field(default_factory=set, repr=False)  # every edge a rotation removed

    @property
    def found(self):
        return self.outcome in ("cycle", "path")

    @property
    def path(self):
        return self.cycle if self.mode == "path" else None

    def potential_csv(self):
        rows = ["phase,step,path_count,sum_sq,move"]
        rows += [",".join(str(c) for c in r) for r in self.potential_log]
        return "\n".join(rows) + "\n"

    def to_dict(self):
        return {"outcome": self.outcome, "mode": self.mode, "cycle": self.cycle,
                "timings": self.timings, "merges": self.merges,
                "merge_failures": self.merge_failures, "fallback_used": self.fallback_used,
                "verified": self.verified, "stage": self.stage, "message": self.message}

    def to_json(self):
        return json.dumps(self.to_dict())


# -- verification ----------------------------------------------------------------

def verify_hamilton_cycle(g, seq):
    if seq is None or g.n < 3 or len(seq) != g.n or len(set(seq)) != g.n:
        return False
    if any(not (0 <= v < g.n) for v in seq):
        return False
    return all(g.has_edge(seq[i], seq[(i + 1) % g.n]) for i in range(g.n))


def verify_hamilton_path(g, seq, x=None, y=None):
    if seq is None or len(seq) != g.n or len(set(seq)) != g.n:
        return False
    if any(not (0 <= v < g.n) for v in seq):
        return False
    if x is not None and seq[0] != x or y is not None and seq[-1] != y:
        return False
    return all(g.has_edge(a, b) for a, b in zip(seq, seq[1:]))


# -- rotation-extension fallback ------------------------------------------------------

def _hopeless(g):
    """Cheap necessary conditions: n >= 3, min degree >= 2, connected."""
    if g.n < 3 or min(g.degrees()) < 2:
        return True
    seen, stack = {0}, [0]
    while stack:
        for w in g.adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) != g.n


def posa_fallback(g, cfg=None, protected=None, start=None, broken=None):
    """Randomized rotation-extension search for a Hamilton cycle.

    `protected` is an edge that must stay on the cycle (it is never broken
    by a rotation); `start` seeds every restart's path.  Edges removed by
    rotations are added to the set `broken` when given.  Returns the cycle
    as a vertex list or None.
    """
    cfg = cfg or SolverConfig()
    if _hopeless(g):
        return None
    n = g.n
    prot = edge_key(*protected) if protected is not None else None
    if prot is not None and not g.has_edge(*prot):
        raise InvalidInput("protected edge is not in the graph")
    rng = random.Random(cfg.seed)
    budget = cfg.posa_rotation_budget
    adj = [list(g.adj[v]) for v in range(n)]
    for _ in range(cfg.posa_restarts):
        if start is not None:
            path = list(start)
        else:
            path = [rng.randrange(n)]
        pos = {v: i for i, v in enumerate(path)}
        stall = 0
        while budget > 0 and stall < 4 * n:
            budget -= 1
            last = path[-1]
            fresh = [w for w in adj[last] if w not in pos]
            if fresh:
                # prefer the most constrained unvisited neighbour
                w = min(fresh, key=lambda v: (sum(1 for z in adj[v] if z not in pos), rng.random()))
                pos[w] = len(path)
                path.append(w)
                stall = 0
                continue
            if len(path) == n and g.has_edge(path[0], last):
                return path
            if len(path) < n and g.has_edge(path[0], last):
                opened = _reopen(g, path, pos, prot, rng)
                if opened is not None:
                    if broken is not None:
                        broken.add(edge_key(opened[-2], opened[0]))
                    path = opened
                    pos = {v: i for i, v in enumerate(path)}
                    continue
            # rotate at a random pivot
            options = [w for w in adj[last] if w in pos and pos[w] < len(path) - 2]
            options = [w for w in options if edge_key(w, path[pos[w] + 1]) != prot]
            if not options:
                path.reverse()
                pos = {v: i for i, v in enumerate(path)}
                stall += 1
                continue
            w = rng.choice(options)
            i = pos[w]
            if broken is not None:
                broken.add(edge_key(w, path[i + 1]))
            path[i + 1:] = path[:i:-1]
            for j in range(i + 1, len(path)):
                pos[path[j]] = j
            stall += 1
        if budget <= 0:
            break
    return None


def _reopen(g, path, pos, prot, rng):
    """The path closes into a cycle; break it next to a vertex with an outside neighbour."""
    m = len(path)
    idx = list(range(m))
    rng.shuffle(idx)
    for i in idx:
        u = path[i]
        out = [w for w in g.adj[u] if w not in pos]
        if not out:
            continue
        nxt = path[(i + 1) % m]
        if edge_key(u, nxt) == prot:
            continue
        return path[i + 1:] + path[:i + 1] + [out[0]]
    return None


def _cycle_to_path(cycle, x, y):
    """Remove edge xy from a cycle through it: the path from x to y."""
    i = cycle.index(x)
    rot = cycle[i:] + cycle[:i]
    if rot[1] == y:
        rot = [rot[0]] + rot[1:][::-1]
    if rot[-1] != y:
        raise StageFailure("assemble", "cycle does not use the protected edge")
    return rot


# -- structured pipeline ------------------------------------------------------------------

def _assemble(F_paths, A, B, H):
    """Close forest paths (ends in A u B) into one cycle through the linking structure."""
    Aset = set(A)
    ab, aa, bb = [], [], []
    for p in F_paths:
        s, t = p[0], p[-1]
        if (s in Aset) and (t in Aset):
            aa.append(p)
        elif (s not in Aset) and (t not in Aset):
            bb.append(p)
        else:
            ab.append(p if s in Aset else p[::-1])
    if len(aa) != len(bb):
        raise StageFailure("assemble", "unequal numbers of AA and BB paths")
    order = list(ab)
    for pa, pb in zip(aa, bb):
        order += [pa, pb]
    a_index = {a: i for i, a in enumerate(A)}
    b_index = {b: i for i, b in enumerate(B)}
    phi = [None] * len(A)
    for k, p in enumerate(order):
        ex, en = p[-1], order[(k + 1) % len(order)][0]
        if ex in Aset:
            phi[a_index[ex]] = b_index[en]
        else:
            phi[a_index[en]] = b_index[ex]
    links = link(H, phi)
    by_end = {}
    for i, q in enumerate(links):
        by_end[(q[0], q[-1])] = q
    cycle = []
    for k, p in enumerate(order):
        cycle.extend(p)
        ex, en = p[-1], order[(k + 1) % len(order)][0]
        q = by_end.get((ex, en))
        if q is None:
            q = by_end[(en, ex)][::-1]
        cycle.extend(q[1:-1])
    return cycle


def _structured(g, cfg, report, pair=None):
    t = time.perf_counter()
    part = partition_expander(g, cfg, pair=pair)
    report.timings["partition"] = time.perf_counter() - t

    t = time.perf_counter()
    zsub, zold = g.subgraph(part.Z)
    zstate = run_reduction(zsub, cfg=cfg, target=1, merge=False)
    report.potential_log += [("Z",) + row for row in zstate.log]
    if zstate.forest.isolated():
        raise StageFailure("reduce", "isolated vertices remain in the residual forest")
    keep = sorted(set(range(g.n)) - (part.X - set(part.A) - set(part.B)))
    gp, old = g.subgraph(keep)
    new = {v: i for i, v in enumerate(old)}
    paths = [[new[v] for v in c] for c in part.connectors]
    paths += [[new[zold[v]] for v in p] for p in zstate.forest.path_list()]
    # connectors are shielded while two or more free paths remain; the last
    # free path can only be absorbed by rotating through them
    keep_xy = {edge_key(new[pair[0]], new[pair[1]])} if pair is not None else set()
    shield = {edge_key(a, b) for c in paths[:len(part.connectors)] for a, b in zip(c, c[1:])}
    f = LinearForest.from_paths(gp.n, paths, protected=shield | keep_xy)
    report.timings["reduce"] = time.perf_counter() - t

    t = time.perf_counter()
    ab = {new[v] for v in part.A} | {new[v] for v in part.B}
    N = len(part.A)
    conn = [[new[v] for v in c] for c in part.connectors]
    step = 0
    report.potential_log.append(("merge", step, *f.potential(), "start"))
    shakes = 0
    while f.path_count() > N:
        intact = sum(1 for c in conn if all(f.has_edge(a, b) for a, b in zip(c, c[1:])))
        if intact < cfg.connector_budget * N:
            raise StageFailure("connectors", f"only {intact} of {N} connectors intact")
        ends = sorted(v for v in f.endpoints() if v not in ab)
        if not ends:
            raise StageFailure("merge", "no free endpoints left")
        if f.path_count() == N + 1 and f.protected != keep_xy:
            f = f.copy()
            f.protected = frozenset(keep_xy)
        merged = False
        for x, y in _pairs(f, ends, cfg.merge_pair_attempts):
            out, mrep = merge_two_paths(gp, f, x, y, cfg)
            if mrep.ok:
                report.broken_edges |= {edge_key(old[a], old[b]) for a, b in f.edges() - out.edges()}
                f = out
                report.merges += 1
                step += 1
                report.potential_log.append(("merge", step, *f.potential(), "merge"))
                merged = True
                break
            report.merge_failures += 1
            report.stage, report.message = mrep.stage, mrep.message
        if not merged:
            if shakes >= cfg.merge_shakes:
                raise StageFailure("merge", f"no merge succeeded ({report.message})")
            out = _shake(gp, f, ends, shakes, cfg)
            report.broken_edges |= {edge_key(old[a], old[b]) for a, b in f.edges() - out.edges()}
            f = out
            shakes += 1
    report.timings["merge"] = time.perf_counter() - t

    t = time.perf_counter()
    if f.endpoints() != ab:
        raise StageFailure("assemble", "forest endpoints are not exactly A u B")
    fpaths = [[old[v] for v in p] for p in f.path_list()]
    cycle = _assemble(fpaths, part.A, part.B, part.H)
    report.timings["assemble"] = time.perf_counter() - t
    return cycle


def _shake(g, f, ends, salt, cfg):
    """Move one free endpoint by a rotation sequence so the next merges see a new forest.

    Only the endpoint changes; A u B stays in End and no vertex is isolated.
    """
    x = ends[salt % len(ends)]
    search = ReachSearch(g, f, x, None, state_cap=cfg.reach_state_cap)
    seen = []
    for _ in range(cfg.depth_cap):
        if search.exhausted():
            break
        for v in search.expand_layer():
            out = replay(search.records[v], f)
            if not out.isolated() and out.endpoints() == f.endpoints() - {x} | {v}:
                seen.append(out)
        if len(seen) > salt:
            break
    if not seen:
        raise StageFailure("merge", f"endpoint {x} cannot move")
    return seen[min(salt, len(seen) - 1)]


def _pairs(f, ends, attempts):
    """Candidate endpoint pairs, shortest paths first, lowest ids breaking ties.

    Merging short paths keeps the long ones available as rotation room.  Two
    ends of one path are allowed but ranked after pairs from distinct paths.
    """
    by_len = sorted(ends, key=lambda v: (f.path_len(v), v))[:2 * attempts + 2]
    cands = []
    for i, x in enumerate(by_len):
        for y in by_len[i + 1:]:
            same = f.same_path(x, y)
            cands.append((same, f.path_len(x) + f.path_len(y), min(x, y), max(x, y)))
    cands.sort()
    return [(x, y) for _, _, x, y in cands[:attempts]]


def _solve(g, cfg, pair=None):
    mode = "cycle" if pair is None else "path"
    report = SolveReport("not_found", mode)
    t0 = time.perf_counter()
    host = g if pair is None else g.with_edge(*pair)
    start = list(pair) if pair is not None else None

    def finish(cycle, fallback):
        seq = cycle if pair is None else _cycle_to_path(cycle, *pair)
        ok = (verify_hamilton_cycle(g, seq) if pair is None
              else verify_hamilton_path(g, seq, *pair))
        if not ok:
            raise StageFailure("verify", "assembled sequence failed verification")
        report.outcome, report.cycle, report.verified = mode, seq, True
        report.fallback_used = fallback
        report.stage, report.message = None, ""
        return report

    def fallback():
        t = time.perf_counter()
        cyc = posa_fallback(host, cfg, protected=pair, start=start, broken=report.broken_edges)
        report.timings["fallback"] = report.timings.get("fallback", 0.0) + time.perf_counter() - t
        return cyc

    tried = False
    try:
        if g.n < 3:
            report.message = "fewer than three vertices"
            return report
        if g.n < cfg.fallback_first_below:
            tried = True
            cyc = fallback()
            if cyc is not None:
                return finish(cyc, True)
        try:
            return finish(_structured(host, cfg, report, pair), False)
        except (StageFailure, InvalidInput) as exc:
            report.stage = getattr(exc, "stage", "input")
            report.message = getattr(exc, "message", str(exc))
        if not tried:
            cyc = fallback()
            if cyc is not None:
                return finish(cyc, True)
        return report
    finally:
        report.timings["total"] = time.perf_counter() - t0


def find_hamilton_cycle(g, cfg=None):
    """Search for a Hamilton cycle; every returned cycle has been verified."""
    return _solve(g, cfg or SolverConfig())


def find_hamilton_path(g, x, y, cfg=None):
    """Search for a Hamilton path from x to y (via a cycle through the edge xy)."""
    g.check_vertex(x)
    g.check_vertex(y)
    if x == y:
        raise InvalidInput("path endpoints must differ")
    return _solve(g, cfg or SolverConfig(), pair=(x, y))
