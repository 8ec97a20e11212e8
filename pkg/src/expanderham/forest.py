"""Spanning linear forests with O(1) path lookups.

Each vertex has two neighbour slots (-1 when empty) and a path id.  The path
registry maps a path id to [end, end, vertex count].  Joining two paths
relabels the shorter one; splitting walks both halves in lock-step and
relabels whichever finishes first, so each update costs O(smaller part).
"""
import json

from .errors import InvalidInput


def edge_key(u, v):
    return (u, v) if u < v else (v, u)


class LinearForest:
    __slots__ = ("n", "nb", "pid", "paths", "_next", "protected")

    def __init__(self, n, protected=()):
        self.n = n
        self.nb = [[-1, -1] for _ in range(n)]
        self.pid = list(range(n))
        self.paths = {v: [v, v, 1] for v in range(n)}
        self._next = n
        self.protected = frozenset(edge_key(*e) for e in protected)

    @classmethod
    def from_paths(cls, n, paths, protected=()):
        f = cls(n, protected)
        seen = set()
        for p in paths:
            for v in p:
                if not 0 <= v < n:
                    raise InvalidInput(f"vertex {v} outside 0..{n - 1}")
                if v in seen:
                    raise InvalidInput(f"vertex {v} appears on two paths")
                seen.add(v)
            for a, b in zip(p, p[1:]):
                f.add_edge(a, b)
        return f

    @classmethod
    def from_edges(cls, n, edges, protected=()):
        f = cls(n, protected)
        for u, v in edges:
            f.add_edge(u, v)
        return f

    def copy(self):
        g = LinearForest.__new__(LinearForest)
        g.n = self.n
        g.nb = [s[:] for s in self.nb]
        g.pid = self.pid[:]
        g.paths = {k: v[:] for k, v in self.paths.items()}
        g._next = self._next
        g.protected = self.protected
        return g

    # -- queries -------------------------------------------------------
    def neighbors(self, v):
        a, b = self.nb[v]
        if a < 0:
            return [] if b < 0 else [b]
        return [a] if b < 0 else [a, b]

    def degree(self, v):
        a, b = self.nb[v]
        return (a >= 0) + (b >= 0)

    def has_edge(self, u, v):
        return v in self.nb[u] and v >= 0

    def is_endpoint(self, v):
        a, b = self.nb[v]
        return a < 0 or b < 0

    def is_isolated(self, v):
        return self.nb[v][0] < 0 and self.nb[v][1] < 0

    def is_protected(self, u, v):
        return edge_key(u, v) in self.protected

    def path_id(self, v):
        return self.pid[v]

    def path_len(self, v):
        return self.paths[self.pid[v]][2]

    def path_ends(self, v):
        e = self.paths[self.pid[v]]
        return e[0], e[1]

    def other_end(self, v):
        e1, e2 = self.path_ends(v)
        return e2 if e1 == v else e1

    def same_path(self, u, v):
        return self.pid[u] == self.pid[v]

    def endpoints(self):
        return {v for v in range(self.n) if self.is_endpoint(v)}

    def isolated(self):
        return [v for v in range(self.n) if self.is_isolated(v)]

    def path_count(self):
        return len(self.paths)

    def lengths(self):
        return [p[2] for p in self.paths.values()]

    def potential(self):
        ls = self.lengths()
        return (len(ls), sum(x * x for x in ls))

    def lex_key(self):
        ls = sorted(self.lengths(), reverse=True)
        return (len(ls), tuple(ls))

    def edges(self):
        out = set()
        for v in range(self.n):
            for w in self.nb[v]:
                if w > v:
                    out.add((v, w))
        return out

    def edge_count(self):
        return self.n - len(self.paths)

    def walk(self, start, prev=-1):
        """Vertices from `start` moving away from `prev`."""
        nb = self.nb
        cur, p = start, prev
        while cur >= 0:
            yield cur
            a, b = nb[cur]
            if a == p:
                nxt = b
            elif b == p:
                nxt = a
            else:
                nxt = a if a >= 0 else b
            p, cur = cur, nxt

    def path_vertices(self, v):
        e1, _ = self.path_ends(v)
        return list(self.walk(e1))

    def path_list(self):
        out = [list(self.walk(p[0])) for p in self.paths.values()]
        out.sort(key=lambda p: min(p))
        return out

    def positions(self):
        """(position along path from its first registered end, path id) per vertex."""
        pos = [0] * self.n
        for key, p in self.paths.items():
            for i, v in enumerate(self.walk(p[0])):
                pos[v] = i
        return pos, self.pid[:]

    def __eq__(self, other):
        return (isinstance(other, LinearForest) and self.n == other.n
                and self.edges() == other.edges() and self.protected == other.protected)

    def __repr__(self):
        return f"LinearForest(n={self.n}, paths={len(self.paths)})"

    # -- updates -------------------------------------------------------
    def add_edge(self, u, v):
        if u == v:
            raise InvalidInput("cannot add a loop")
        nb = self.nb
        if not (self.is_endpoint(u) and self.is_endpoint(v)):
            raise InvalidInput(f"edge ({u},{v}) would give a vertex forest-degree 3")
        pu, pv = self.pid[u], self.pid[v]
        if pu == pv:
            raise InvalidInput(f"edge ({u},{v}) would close a cycle")
        Pu, Pv = self.paths[pu], self.paths[pv]
        ou = Pu[1] if Pu[0] == u else Pu[0]
        ov = Pv[1] if Pv[0] == v else Pv[0]
        nb[u][0 if nb[u][0] < 0 else 1] = v
        nb[v][0 if nb[v][0] < 0 else 1] = u
        if Pu[2] >= Pv[2]:
            keep, gone, start, prev = pu, pv, v, u
        else:
            keep, gone, start, prev = pv, pu, u, v
        pid = self.pid
        for w in self.walk(start, prev):
            pid[w] = keep
        self.paths[keep] = [ou, ov, Pu[2] + Pv[2]]
        del self.paths[gone]

    def remove_edge(self, u, v):
        nb = self.nb
        if v < 0 or v not in nb[u]:
            raise InvalidInput(f"({u},{v}) is not a forest edge")
        nb[u][nb[u].index(v)] = -1
        nb[v][nb[v].index(u)] = -1
        old = self.pid[u]
        e1, e2, length = self.paths[old]
        wu, wv = self.walk(u), self.walk(v)
        cu = cv = 0
        last_u = last_v = -1
        small = None
        while small is None:
            w = next(wu, None)
            if w is None:
                small = "u"
                break
            cu += 1
            last_u = w
            w = next(wv, None)
            if w is None:
                small = "v"
                break
            cv += 1
            last_v = w
        new = self._next
        self._next += 1
        pid = self.pid
        if small == "u":
            far = last_u
            for w in self.walk(u):
                pid[w] = new
            other_far = e2 if far == e1 else e1
            self.paths[new] = [far, u, cu]
            self.paths[old] = [v, other_far, length - cu]
        else:
            far = last_v
            for w in self.walk(v):
                pid[w] = new
            other_far = e2 if far == e1 else e1
            self.paths[new] = [far, v, cv]
            self.paths[old] = [u, other_far, length - cv]

    # -- checking ------------------------------------------------------
    def validate(self):
        """Full structural check; raises AssertionError describing the first problem."""
        n = self.n
        nb = self.nb
        for v in range(n):
            a, b = nb[v]
            if a >= 0 and a == b:
                raise AssertionError(f"vertex {v} lists neighbour {a} twice")
            for w in (a, b):
                if w >= 0 and v not in nb[w]:
                    raise AssertionError(f"asymmetric slot {v}->{w}")
                if w == v:
                    raise AssertionError(f"loop at {v}")
        seen = [False] * n
        total = 0
        for key, (e1, e2, length) in self.paths.items():
            if not (self.is_endpoint(e1) and self.is_endpoint(e2)):
                raise AssertionError(f"path {key} registered ends are not endpoints")
            verts = list(self.walk(e1))
            if len(verts) > n:
                raise AssertionError("cycle detected")
            if verts[-1] != e2:
                raise AssertionError(f"path {key} does not run from {e1} to {e2}")
            if len(verts) != length:
                raise AssertionError(f"path {key} length {len(verts)} != registry {length}")
            for w in verts:
                if seen[w]:
                    raise AssertionError(f"vertex {w} on two paths")
                seen[w] = True
                if self.pid[w] != key:
                    raise AssertionError(f"vertex {w} has stale path id")
            total += length
        if total != n or not all(seen):
            raise AssertionError("registry does not cover every vertex exactly once (cycle?)")
        return True

    def to_json(self):
        return json.dumps(self.path_list())

    @classmethod
    def from_json(cls, n, text):
        return cls.from_paths(n, json.loads(text))


def interior(f, u):
    """Vertices of U whose forest neighbours all lie in U."""
    u = u if isinstance(u, (set, frozenset)) else set(u)
    nb = f.nb
    out = set()
    for x in u:
        a, b = nb[x]
        if (a < 0 or a in u) and (b < 0 or b in u):
            out.add(x)
    return out


def lex_compare(f1, f2):
    """-1, 0 or 1 as f1 is lex-smaller, equal or larger than f2."""
    k1, k2 = f1.lex_key(), f2.lex_key()
    return (k1 > k2) - (k1 < k2)


def lex_key_of_lengths(lengths):
    ls = sorted(lengths, reverse=True)
    return (len(ls), tuple(ls))


def forest_zone(f, centers, radius):
    """Vertices within forest distance `radius` of any center."""
    out = set()
    for c in centers:
        local = {c}
        frontier = [c]
        for _ in range(radius):
            nxt = []
            for x in frontier:
                for w in f.nb[x]:
                    if w >= 0 and w not in local:
                        local.add(w)
                        nxt.append(w)
            frontier = nxt
        out |= local
    return out
