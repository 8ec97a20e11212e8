"""Local search toward a lex-small spanning linear forest.

Every logged move strictly lowers the potential (path count, sum of squared
path sizes) in lexicographic order.  Path sizes are vertex counts.
"""
from collections import deque
from dataclasses import dataclass, field

from .config import SolverConfig
from .forest import LinearForest, edge_key
from .rotation import endpoint_reach


@dataclass
class ReductionState:
    forest: LinearForest
    log: list = field(default_factory=list)  # (step, path_count, sum_sq, move)
    merges: int = 0
    merge_failures: int = 0

    def __post_init__(self):
        if not self.log:
            self.log.append((0, *self.forest.potential(), "start"))

    @property
    def potential(self):
        return self.forest.potential()

    @property
    def steps(self):
        return len(self.log) - 1

    def record(self, move):
        self.log.append((len(self.log), *self.forest.potential(), move))

    def residual_isolated(self):
        return self.forest.isolated()

    def to_csv(self):
        rows = ["step,path_count,sum_sq,move"]
        rows += [f"{s},{c},{q},{m}" for s, c, q, m in self.log]
        return "\n".join(rows) + "\n"


def initial_forest(g):
    """Greedy maximal matching in vertex order; unmatched vertices stay isolated."""
    f = LinearForest(g.n)
    for u in range(g.n):
        if not f.is_isolated(u):
            continue
        for w in g.adj[u]:
            if f.is_isolated(w):
                f.add_edge(u, w)
                break
    return f


# -- isolated vertices ------------------------------------------------------

def _improving_attach(g, f, v):
    """A move that absorbs isolated v and strictly lowers the potential, or None."""
    for z in g.adj[v]:
        if f.is_endpoint(z):
            return ("attach", z, None)
    for z in g.adj[v]:
        # z inside a path: cut off a side of >= 2 vertices, hang v on z
        for t in f.nb[z]:
            if t < 0 or f.is_protected(z, t):
                continue
            if sum(1 for _ in f.walk(t, z)) >= 2:
                return ("split", z, t)
    return None


def _apply_attach(f, v, move):
    kind, z, t = move
    if kind == "split":
        f.remove_edge(z, t)
    f.add_edge(v, z)


def absorb_isolated(g, state, cfg=None):
    """Absorb isolated vertices; returns True if anything improved."""
    f = state.forest
    improved = False
    for v in f.isolated():
        if not f.is_isolated(v):
            continue
        move = _improving_attach(g, f, v)
        if move is not None:
            _apply_attach(f, v, move)
            state.record(move[0])
            improved = True
            continue
        chain = _rotate_isolated(g, f, v)
        if chain is not None:
            steps, u, move = chain
            for a, b, c in steps:
                f.remove_edge(a, b)
                f.add_edge(c, a)
            _apply_attach(f, u, move)
            state.record("rotate+" + move[0])
            improved = True
    return improved


def _rotate_isolated(g, f, v):
    """Rotations v -> x along centres of 3-vertex paths x-w-y (lengths unchanged).

    Breadth-first over which vertex is isolated; returns (steps, u, move)
    where each step (w, t, s) removes wt and adds sw, or None if no isolated
    vertex in the reach has an improving attach.
    """
    seen = {v}
    queue = deque([(v, ())])
    while queue:
        u, steps = queue.popleft()
        work = f
        if steps:
            work = f.copy()
            for a, b, c in steps:
                work.remove_edge(a, b)
                work.add_edge(c, a)
            move = _improving_attach(g, work, u)
            if move is not None:
                return list(steps), u, move
        for w in g.adj[u]:
            if work.degree(w) != 2 or work.path_len(w) != 3:
                continue
            for t in work.nb[w]:
                if t in seen or work.is_protected(w, t):
                    continue
                seen.add(t)
                queue.append((t, steps + ((w, t, u),)))
    return None


# -- joins and splices ------------------------------------------------------

def join_endpoints(g, state, cfg=None):
    """Add every available edge between endpoints of different paths."""
    f = state.forest
    improved = False
    for u in range(f.n):
        while f.is_endpoint(u):
            hit = None
            for w in g.adj[u]:
                if f.is_endpoint(w) and not f.same_path(u, w):
                    hit = w
                    break
            if hit is None:
                break
            f.add_edge(u, hit)
            state.record("join")
            improved = True
    return improved


def rebalance_5x(g, state, cfg=None):
    """Splice endpoints onto paths at least five times longer; True if any applied."""
    f = state.forest
    improved = False
    again = True
    while again:
        again = False
        order = sorted(f.paths.items(), key=lambda kv: (kv[1][2], min(kv[1][0], kv[1][1])))
        for pid, (e1, e2, size) in order:
            if pid not in f.paths or f.paths[pid][2] != size:
                continue
            for x in {e1, e2}:
                move = _splice_move(g, f, x, size)
                if move is not None:
                    y, cut = move
                    f.remove_edge(y, cut)
                    f.add_edge(x, y)
                    state.record("splice")
                    improved = again = True
                    break
            if again:
                break
    return improved


def _splice_move(g, f, x, size):
    for y in g.adj[x]:
        if f.same_path(x, y):
            continue
        big = f.path_len(y)
        if big < 5 * size:
            continue
        # keep the shorter stretch from y to an end; cut the edge on the other side
        best = None
        for t in f.nb[y]:
            if t < 0 or f.is_protected(y, t):
                continue
            other = big - sum(1 for _ in f.walk(t, y))  # stretch containing y
            if best is None or other < best[0]:
                best = (other, t)
        if best is not None and size + best[0] < big:
            return y, best[1]
    return None


# -- driver -----------------------------------------------------------------

def _shortest_endpoints(f, avoid=()):
    order = sorted(f.paths.values(), key=lambda p: (p[2], min(p[0], p[1])))
    picks = []
    for e1, e2, _ in order:
        cands = [e for e in (e1, e2) if e not in avoid]
        if cands:
            picks.append(min(cands))
        if len(picks) == 2:
            return picks
    return None


def run_reduction(g, f0=None, cfg=None, target=None, merge=True, avoid=()):
    """Drive f0 to a fixpoint of the local moves; merge while above target."""
    from .engine import merge_two_paths

    cfg = cfg or SolverConfig()
    f = initial_forest(g) if f0 is None else f0.copy()
    state = ReductionState(f)
    target = cfg.path_target(g.n) if target is None else target
    cap = g.n * g.n + g.n
    while state.steps <= cap:
        changed = absorb_isolated(g, state, cfg)
        if state.forest.path_count() <= target and not state.forest.isolated():
            break
        changed |= join_endpoints(g, state, cfg)
        if state.forest.path_count() <= target and not state.forest.isolated():
            break
        changed |= rebalance_5x(g, state, cfg)
        if changed:
            continue
        if not merge or state.forest.path_count() <= target or state.forest.isolated():
            break
        pick = _shortest_endpoints(state.forest, avoid)
        if pick is None:
            break
        out, report = merge_two_paths(g, state.forest, pick[0], pick[1], cfg)
        if not report.ok:
            state.merge_failures += 1
            break
        state.forest = out
        state.merges += 1
        state.record("merge")
    return state


def reduce_forest(g, f0=None, cfg=None, **kw):
    return run_reduction(g, f0, cfg, **kw).forest


@dataclass
class GrowthAudit:
    ok: bool
    edge: tuple = None
    bound: int = 0

    def __bool__(self):
        return self.ok


def segment_growth_audit(g, f, v, k, state_cap=10 ** 6):
    """Neighbours of E^k(v) lie on paths of size at most 6^(k+1) |seg(v)|."""
    reach = endpoint_reach(g, f, v, None, k, state_cap=state_cap)
    bound = 6 ** (k + 1) * f.path_len(v)
    for w in reach:
        for z in g.adj[w]:
            if f.path_len(z) > bound:
                return GrowthAudit(False, edge_key(w, z), bound)
    return GrowthAudit(True, None, bound)


def mass_between(f, a, b):
    """Vertices on paths whose size lies in [a, b]."""
    return sum(p[2] for p in f.paths.values() if a <= p[2] <= b)
