"""Extendable embeddings: growing paths in a host expander while keeping free expansion.

An embedded subgraph H is audited against the deficiency inequality

    |Gamma(S) - V(H)| >= (D - 1)|S| - sum over u in S & V(H) of (d_H(u) - 1)

exhaustively for |S| <= 2 and by sampling for larger S.
"""
import json
import random
from dataclasses import dataclass, field

from .config import SolverConfig
from .errors import InvalidInput, StageFailure
from .expansion import ExpansionVerdict, check_c_expander_sampled
from .linking import build_linking_blueprint


class ExtendableEmbedding:
    """Mutable embedded subgraph H of a host graph, with an undo log."""

    def __init__(self, g, D=5, m=6):
        if D < 3:
            raise InvalidInput("D must be at least 3")
        self.g = g
        self.D = D
        self.m = m
        self.used = set()
        self.hdeg = {}
        self.hedges = set()
        self._log = []

    # -- mutation ------------------------------------------------------
    def add_vertex(self, v):
        if v in self.used:
            raise InvalidInput(f"vertex {v} already embedded")
        self.used.add(v)
        self.hdeg[v] = 0
        self._log.append(("v", v))

    def add_edge(self, u, v):
        e = (min(u, v), max(u, v))
        if u not in self.used or v not in self.used:
            raise InvalidInput("both ends must be embedded")
        if e in self.hedges:
            raise InvalidInput(f"edge {e} already in H")
        if not self.g.has_edge(u, v):
            raise InvalidInput(f"edge {e} is not a host edge")
        self.hedges.add(e)
        self.hdeg[u] += 1
        self.hdeg[v] += 1
        self._log.append(("e", e))

    def remove_edge(self, u, v):
        e = (min(u, v), max(u, v))
        self.hedges.remove(e)
        self.hdeg[u] -= 1
        self.hdeg[v] -= 1
        self._log.append(("r", e))

    def add_path(self, path):
        for v in path:
            if v not in self.used:
                self.add_vertex(v)
        for u, v in zip(path, path[1:]):
            self.add_edge(u, v)

    def snapshot(self):
        return len(self._log)

    def rollback(self, token):
        while len(self._log) > token:
            kind, item = self._log.pop()
            if kind == "v":
                self.used.discard(item)
                del self.hdeg[item]
            elif kind == "e":
                self.hedges.discard(item)
                self.hdeg[item[0]] -= 1
                self.hdeg[item[1]] -= 1
            else:
                self.hedges.add(item)
                self.hdeg[item[0]] += 1
                self.hdeg[item[1]] += 1

    # -- queries ---------------------------------------------------------
    def max_degree(self):
        return max(self.hdeg.values(), default=0)

    def free_degree(self, v):
        return sum(1 for w in self.g.adj[v] if w not in self.used)

    def deficiency(self, S):
        """lhs - rhs of the inequality for S (negative means violated)."""
        used = self.used
        gam = set()
        for v in S:
            gam.update(self.g.adj[v])
        lhs = sum(1 for w in gam if w not in used)
        rhs = (self.D - 1) * len(S)
        for u in S:
            if u in used:
                rhs -= self.hdeg[u] - 1
        return lhs - rhs

    def to_dict(self):
        return {"D": self.D, "m": self.m, "vertices": sorted(self.used),
                "edges": sorted(list(e) for e in self.hedges)}

    def to_json(self):
        return json.dumps(self.to_dict())


def _ball(g, root, size, rng):
    seen, got, i = [root], {root}, 0
    while i < len(seen) and len(seen) < size:
        nb = list(g.adj[seen[i]])
        rng.shuffle(nb)
        for w in nb:
            if w not in got:
                got.add(w)
                seen.append(w)
                if len(seen) >= size:
                    break
        i += 1
    return seen


def deficiency_audit(emb, s_max=2, samples=200, seed=0, region=None, max_size=None):
    """Exhaustive for |S| <= min(s_max, 2); sampled BFS-ball sets up to 2m (capped by max_size)."""
    g = emb.g
    verts = range(g.n) if region is None else sorted(region)
    region_set = set(verts)
    checked = 0

    def refute(S):
        return ExpansionVerdict("refuted", "sampled", (frozenset(S),), "deficiency", checked)

    used = emb.used
    single, free = {}, {}

    def info(v):
        if v not in single:
            single[v] = emb.deficiency([v])
            free[v] = sum(1 for w in g.adj[v] if w not in used)
        return single[v]

    for v in verts:
        checked += 1
        if info(v) < 0:
            return refute([v])
    if s_max >= 2:
        # a pair {u, w} loses exactly its shared free neighbours relative to the
        # two singletons, so it can only fail if min(free) > def(u) + def(w)
        cap = emb.D
        for u in verts:
            if single[u] >= cap:
                continue
            near = set()
            for w in g.adj[u]:
                near.add(w)
                near.update(g.adj[w])
            near.discard(u)
            for w in near:
                if info(w) >= cap or (w < u and w in region_set):
                    continue
                if min(free[u], free[w]) <= single[u] + single[w]:
                    continue
                checked += 1
                if emb.deficiency([u, w]) < 0:
                    return refute([u, w])
    top = 2 * emb.m if max_size is None else min(2 * emb.m, max_size)
    rng = random.Random(seed)
    roots = list(verts)
    if top >= 3 and roots:
        for _ in range(samples):
            S = _ball(g, rng.choice(roots), rng.randint(3, top), rng)
            checked += 1
            if emb.deficiency(S) < 0:
                return refute(S)
    return ExpansionVerdict("certified", "sampled", None, "deficiency", checked)


# -- path extension ------------------------------------------------------------------

def _search(emb, y, ell, x, rng, budget):
    """Randomized DFS for a path y -> (x) with ell edges and fresh internals."""
    g, used = emb.g, emb.used
    if x is not None:
        n1 = {w for w in g.adj[x] if w not in used}
        n2 = set()
        for w in n1:
            n2.update(u for u in g.adj[w] if u not in used)
    path = [y]
    onpath = {y}
    stack = []
    steps = 0

    def candidates(c, remaining):
        out = []
        for w in g.adj[c]:
            if w in used or w in onpath:
                continue
            if x is not None:
                if remaining == 1 and w not in n1:
                    continue
                if remaining == 2 and w not in n2:
                    continue
            out.append((-emb.free_degree(w) + rng.random() * 3, w))
        out.sort()
        return [w for _, w in out]

    if x is not None and ell == 1:
        return [y, x] if g.has_edge(x, y) and (min(x, y), max(x, y)) not in emb.hedges else None
    internal = ell - 1 if x is not None else ell
    stack.append(candidates(y, internal))
    while stack:
        steps += 1
        if steps > budget:
            return None
        opts = stack[-1]
        if not opts:
            stack.pop()
            if len(path) > 1:
                onpath.discard(path.pop())
            continue
        w = opts.pop(0)
        path.append(w)
        onpath.add(w)
        if len(path) - 1 == internal:
            if x is None:
                return path
            if g.has_edge(w, x):
                return path + [x]
            onpath.discard(path.pop())
            continue
        stack.append(candidates(w, internal - (len(path) - 1)))
    return None


def extend_path(emb, y, ell, x=None, cfg=None, rng=None):
    """Add a path of length ell from y (to x, if given) with fresh internal vertices.

    The extension is kept only if the region it touches passes the deficiency
    audit; otherwise it is rolled back and the search retried.
    """
    cfg = cfg or SolverConfig()
    rng = rng or random.Random(cfg.seed)
    g = emb.g
    for v in (y,) if x is None else (y, x):
        if v not in emb.used:
            raise InvalidInput(f"anchor {v} is not embedded")
        if emb.hdeg[v] > emb.D / 2:
            raise InvalidInput(f"anchor {v} has H-degree {emb.hdeg[v]} > D/2")
    if x == y:
        raise InvalidInput("the two anchors must differ")
    if ell < 1:
        raise InvalidInput("path length must be at least 1")
    if len(emb.used) + ell > g.n * cfg.embed_budget_fraction:
        raise InvalidInput("embedding budget exceeded")
    for _ in range(cfg.extend_retries):
        path = _search(emb, y, ell, x, rng, cfg.extend_search_budget)
        if path is None:
            continue
        tok = emb.snapshot()
        emb.add_path(path)
        region = set(path)
        for v in path:
            region.update(g.adj[v])
        verdict = deficiency_audit(emb, cfg.s_max, max(1, cfg.sample_count // 20),
                                   rng.randrange(1 << 30), region, cfg.audit_max_size)
        if not verdict.refuted and emb.max_degree() <= emb.D:
            return path
        emb.rollback(tok)
    raise StageFailure("extend", f"no certified path of length {ell} from {y}")


# -- embedding whole structures ---------------------------------------------------------

def embed_constructible(g, blueprint, cfg=None, emb=None, rng=None):
    """Embed a linking blueprint path by path along its construction sequence.

    A and B come from one extendable anchor path (its edges are dropped
    again).  Returns (embedded structure, embedding).  Rolls back on failure.
    """
    cfg = cfg or SolverConfig()
    rng = rng or random.Random(cfg.seed)
    emb = emb or ExtendableEmbedding(g, cfg.extend_D, max(1, cfg.audit_max_size // 2))
    N = blueprint.N
    if (blueprint.n_vertices + len(emb.used)) > g.n * cfg.embed_budget_fraction:
        raise InvalidInput(f"host with {g.n} vertices is too small for a {blueprint.n_vertices}-vertex blueprint")
    tok = emb.snapshot()
    try:
        free = [v for v in range(g.n) if v not in emb.used]
        pool = rng.sample(free, min(20, len(free)))
        start = max(pool, key=lambda v: (emb.free_degree(v), -v))
        emb.add_vertex(start)
        anchor = extend_path(emb, start, 2 * N - 1, cfg=cfg, rng=rng)
        for u, v in zip(anchor, anchor[1:]):
            emb.remove_edge(u, v)
        image = [None] * blueprint.n_vertices
        for i in range(N):
            image[blueprint.A[i]] = anchor[i]
            image[blueprint.B[i]] = anchor[N + i]
        for p in blueprint.certificate:
            if image[p[0]] is None:
                p = p[::-1]
            ell = len(p) - 1
            if image[p[-1]] is not None:
                got = extend_path(emb, image[p[0]], ell, x=image[p[-1]], cfg=cfg, rng=rng)
            else:
                got = extend_path(emb, image[p[0]], ell, cfg=cfg, rng=rng)
            for b, h in zip(p, got):
                if image[b] is None:
                    image[b] = h
                elif image[b] != h:
                    raise StageFailure("embed", "anchor mismatch")
    except (StageFailure, InvalidInput) as exc:
        emb.rollback(tok)
        if isinstance(exc, InvalidInput):
            raise StageFailure("embed", str(exc)) from None
        raise
    return blueprint.with_image(image), emb


@dataclass
class Partition:
    X: frozenset
    Y: frozenset
    Z: frozenset
    A: list
    B: list
    connectors: list  # host paths, connector i runs from A[i] to B[i]
    H: object  # embedded LinkingStructure
    emb: ExtendableEmbedding = field(repr=False, default=None)
    audits: dict = field(default_factory=dict)

    def to_dict(self):
        return {"X": sorted(self.X), "Y": sorted(self.Y), "Z": sorted(self.Z),
                "A": self.A, "B": self.B, "connectors": self.connectors, "audits": self.audits}

    def to_json(self):
        return json.dumps(self.to_dict())


def partition_expander(g, cfg=None, seed=None, pair=None):
    """Split V(g) into a linking structure X, connector interiors Y and the rest Z.

    With `pair=(x, y)` the edge xy (which must be a host edge) is placed
    inside connector 0 and x, y are kept out of X.  A failed embedding is
    retried from scratch up to cfg.partition_retries times.
    """
    cfg = cfg or SolverConfig()
    base = cfg.seed if seed is None else seed
    if pair is not None and not g.has_edge(*pair):
        raise InvalidInput("the protected pair must be a host edge")
    err = None
    for attempt in range(max(1, cfg.partition_retries)):
        try:
            return _partition_once(g, cfg, random.Random(f"{base}:{attempt}"), pair)
        except StageFailure as exc:
            err = exc
    raise err


def _partition_once(g, cfg, rng, pair):
    N = cfg.link_count(g.n)
    blueprint = build_linking_blueprint(N, cfg)
    emb = ExtendableEmbedding(g, cfg.extend_D, max(1, cfg.audit_max_size // 2))
    if pair is not None:
        x, y = pair
        emb.add_vertex(x)
        emb.add_vertex(y)
        emb.add_edge(x, y)
    H, emb = embed_constructible(g, blueprint, cfg, emb, rng)
    A, B = H.a_images(), H.b_images()
    L = cfg.connector_length
    connectors = []
    for i in range(N):
        if i == 0 and pair is not None:
            x, y = pair
            l1 = (L - 1) // 2
            p1 = extend_path(emb, A[0], l1, x=x, cfg=cfg, rng=rng)
            p2 = extend_path(emb, y, L - 1 - l1, x=B[0], cfg=cfg, rng=rng)
            connectors.append(p1 + p2)
        else:
            connectors.append(extend_path(emb, A[i], L, x=B[i], cfg=cfg, rng=rng))
    X = frozenset(H.vertex_images())
    Y = frozenset(v for p in connectors for v in p[1:-1])
    Z = frozenset(range(g.n)) - X - Y
    audits = {}
    for name, verts in (("Z", Z), ("ZYAB", Z | Y | set(A) | set(B))):
        sub, _ = g.subgraph(verts)
        light = cfg.with_(sample_count=min(cfg.sample_count, 20))
        verdict = check_c_expander_sampled(sub, cfg.c_prime, light, seed=rng.randrange(1 << 30),
                                           pairs=False)
        audits[name] = verdict.status
        if verdict.refuted:
            raise StageFailure("partition", f"residual audit on {name} refuted")
    return Partition(X, Y, Z, A, B, connectors, H, emb, audits)
