"""Sorting networks, comparator gadgets and (A,B)-linking structures.

A linking structure is laid out in columns 0..depth.  Column 0 is A and the
last column is B.  Between two columns every wire either passes through on a
plain path or meets its comparator partner in a gadget.  Every piece has the
same traversal length, so every routed path has the same length.
"""
import json
import random
from dataclasses import dataclass, field

from .config import SolverConfig
from .errors import InvalidInput
from .graph import Graph


# -- sorting networks -------------------------------------------------------------

@dataclass
class SortingNetwork:
    N: int
    layers: list  # list of lists of comparators (i, j), i < j

    @property
    def depth(self):
        return len(self.layers)

    def comparators(self):
        return [c for layer in self.layers for c in layer]

    def apply(self, values):
        vals = list(values)
        for layer in self.layers:
            for i, j in layer:
                if vals[i] > vals[j]:
                    vals[i], vals[j] = vals[j], vals[i]
        return vals

    def check_layers(self):
        for layer in self.layers:
            used = set()
            for i, j in layer:
                if not 0 <= i < j < self.N or i in used or j in used:
                    return False
                used.update((i, j))
        return True

    def sorts_all_binary(self):
        """0-1 principle check over all 2^N inputs."""
        for mask in range(1 << self.N):
            vals = [(mask >> b) & 1 for b in range(self.N)]
            out = self.apply(vals)
            if any(out[i] > out[i + 1] for i in range(self.N - 1)):
                return False
        return True

    def sorts_random_binary(self, trials=10 ** 4, seed=0):
        rng = random.Random(seed)
        for _ in range(trials):
            out = self.apply([rng.randint(0, 1) for _ in range(self.N)])
            if any(out[i] > out[i + 1] for i in range(self.N - 1)):
                return False
        return True


def _batcher_layers(p2):
    layers = []
    p = 1
    while p < p2:
        k = p
        while k >= 1:
            layer = []
            for j in range(k % p, p2 - k, 2 * k):
                for i in range(min(k, p2 - j - k)):
                    if (i + j) // (2 * p) == (i + j + k) // (2 * p):
                        layer.append((i + j, i + j + k))
            layers.append(layer)
            k //= 2
        p *= 2
    return layers


def build_sorting_network(N):
    """Batcher odd-even merge sort; padded to a power of two, padding pruned."""
    if N < 1:
        raise InvalidInput("a sorting network needs at least one wire")
    p2 = 1
    while p2 < N:
        p2 *= 2
    layers = []
    for layer in _batcher_layers(p2):
        # padding wires carry +inf and sit at the top, so comparators touching them never swap
        kept = [(i, j) for i, j in layer if j < N]
        if kept:
            layers.append(kept)
    return SortingNetwork(N, layers)


def _check_bijection(phi, N):
    phi = list(phi)
    if len(phi) != N or sorted(phi) != list(range(N)):
        raise InvalidInput("phi must be a bijection on 0..N-1")
    return phi


def route_permutation(net, phi):
    """Per-comparator crossed flags that carry input wire i to output wire phi[i]."""
    phi = _check_bijection(phi, net.N)
    vals = list(phi)
    states = []
    for layer in net.layers:
        row = []
        for i, j in layer:
            crossed = vals[i] > vals[j]
            if crossed:
                vals[i], vals[j] = vals[j], vals[i]
            row.append(crossed)
        states.append(row)
    return states


def trajectories(net, states):
    """Wire occupied by each input after every layer: traj[i][c]."""
    where = list(range(net.N))  # where[i] = current wire of input i
    at = list(range(net.N))  # at[w] = input on wire w
    traj = [[i] for i in range(net.N)]
    for layer, row in zip(net.layers, states):
        for (i, j), crossed in zip(layer, row):
            if crossed:
                a, b = at[i], at[j]
                at[i], at[j] = b, a
                where[a], where[b] = j, i
        for inp in range(net.N):
            traj[inp].append(where[inp])
    return traj


# -- gadget ------------------------------------------------------------------------

@dataclass
class Gadget:
    """Comparator gadget: an even cycle of marked vertices plus dotted paths.

    Local ids 0..size-1.  Terminals a1, a2 (inputs) and b1, b2 (outputs).
    `straight` holds the paths a1->b1, a2->b2; `crossed` holds a1->b2, a2->b1.
    """

    marked: int
    path_len: int
    size: int
    edges: list
    a1: int
    a2: int
    b1: int
    b2: int
    straight: tuple
    crossed: tuple
    cycle: list  # marked vertices in cyclic order, starting at t1
    segments: list  # dotted paths as local vertex lists, first entry is a1's
    names: dict = field(default_factory=dict, repr=False)

    @property
    def traversal(self):
        return len(self.straight[0]) - 1

    def certificate(self):
        """{a1,a2}-path-constructible order: a1's dotted path, the cycle, the rest."""
        half = len(self.cycle) // 2
        arc1 = self.cycle[: half + 1]
        arc2 = self.cycle[half:] + [self.cycle[0]]
        return [self.segments[0], arc1, arc2] + self.segments[1:]


def build_gadget(marked=8, path_len=3):
    if marked < 8 or marked % 4:
        raise InvalidInput("marked must be a multiple of 4, at least 8")
    if path_len < 1:
        raise InvalidInput("path_len must be at least 1")
    k = marked // 4
    L = path_len
    names = {}

    def vid(name):
        if name not in names:
            names[name] = len(names)
        return names[name]

    edges = []

    def row(tag, start, end):
        marks = [vid((tag, i)) for i in range(1, 2 * k + 1)]
        ends = [vid(start)] + marks + [vid(end)]
        segs = []
        for s in range(k + 1):
            lo, hi = ends[2 * s], ends[2 * s + 1]
            inner = [vid((tag + "-dot", s, r)) for r in range(1, L)]
            seg = [lo] + inner + [hi]
            segs.append(seg)
            edges.extend(zip(seg, seg[1:]))
        for j in range(k):
            edges.append((marks[2 * j], marks[2 * j + 1]))
        return segs

    top = row("t", "a1", "b1")
    bot = row("s", "a2", "b2")

    def t(i):
        return vid(("t", i))

    def s(i):
        return vid(("s", i))

    diag = [(t(1), t(3))]
    diag += [(t(2 * i), t(2 * i + 3)) for i in range(1, k - 1)]
    diag += [(t(2 * k - 2), s(2 * k)), (t(2 * k), s(2))]
    diag += [(s(2 * i - 1), s(2 * i + 2)) for i in range(1, k - 1)]
    diag += [(s(2 * k - 3), s(2 * k - 1))]
    edges.extend(diag)
    a1, a2, b1, b2 = vid("a1"), vid("a2"), vid("b1"), vid("b2")
    size = len(names)

    # horizontals join consecutive segments
    straight = ([v for seg in top for v in seg], [v for seg in bot for v in seg])
    # crossed pairing alternates dotted segments and diagonals
    seg_of = {}
    for seg in top + bot:
        seg_of[seg[0]] = seg
        seg_of[seg[-1]] = seg[::-1]
    dmate = {}
    for u, v in diag:
        dmate[u], dmate[v] = v, u

    def follow(start):
        out = list(seg_of[start])
        while out[-1] in dmate:
            out.append(dmate[out[-1]])
            out.extend(seg_of[out[-1]][1:])
        return out

    crossed = (follow(a1), follow(a2))
    # even cycle of full lines (horizontals + diagonals), from t1
    full = {}
    for u, v in [(t(2 * j + 1), t(2 * j + 2)) for j in range(k)] + \
            [(s(2 * j + 1), s(2 * j + 2)) for j in range(k)] + diag:
        full.setdefault(u, []).append(v)
        full.setdefault(v, []).append(u)
    cycle = [t(1)]
    prev = None
    while True:
        nxt = [w for w in full[cycle[-1]] if w != prev][0]
        if nxt == cycle[0]:
            break
        prev = cycle[-1]
        cycle.append(nxt)
    segments = [top[0]] + top[1:] + bot
    gad = Gadget(marked, L, size, edges, a1, a2, b1, b2, straight, crossed, cycle,
                 segments, names)
    if not certify_gadget(gad):
        raise AssertionError("gadget pairings failed certification")
    return gad


def _spanning_pair_ok(size, edge_set, pair, ends):
    seen = set()
    for p, (a, b) in zip(pair, ends):
        if p[0] != a or p[-1] != b:
            return False
        for u, v in zip(p, p[1:]):
            if (min(u, v), max(u, v)) not in edge_set:
                return False
        for v in p:
            if v in seen:
                return False
            seen.add(v)
    return len(seen) == size and len(pair[0]) == len(pair[1])


def certify_gadget(gad):
    """Both pairings are spanning, vertex-disjoint, equal-length path pairs; full lines form one even cycle."""
    es = {(min(u, v), max(u, v)) for u, v in gad.edges}
    if len(es) != len(gad.edges):
        return False
    ok_s = _spanning_pair_ok(gad.size, es, gad.straight, [(gad.a1, gad.b1), (gad.a2, gad.b2)])
    ok_c = _spanning_pair_ok(gad.size, es, gad.crossed, [(gad.a1, gad.b2), (gad.a2, gad.b1)])
    return ok_s and ok_c and len(gad.cycle) == gad.marked and gad.marked % 2 == 0 \
        and len(gad.straight[0]) == len(gad.crossed[0])


def gadget_pairings_exhaustive(gad):
    """Enumerate every spanning pair of disjoint paths for both pairings (small gadgets only).

    Returns (straight_found, crossed_found, straight_lengths_equal, crossed_lengths_equal).
    """
    adj = {v: set() for v in range(gad.size)}
    for u, v in gad.edges:
        adj[u].add(v)
        adj[v].add(u)

    def pairs(s1, e1, s2, e2):
        found = []

        def second(path, used):
            if path[-1] == e2:
                if len(used) == gad.size:
                    return [list(path)]
                return []
            out = []
            for w in adj[path[-1]]:
                if w not in used and (w != e1 and w != s1):
                    used.add(w)
                    path.append(w)
                    out += second(path, used)
                    path.pop()
                    used.discard(w)
            return out

        def first(path, used):
            if path[-1] == e1:
                for q in second([s2], used | {s2}):
                    found.append((list(path), q))
                return
            for w in adj[path[-1]]:
                if w not in used and w not in (s2, e2):
                    used.add(w)
                    path.append(w)
                    first(path, used)
                    path.pop()
                    used.discard(w)

        first([s1], {s1})
        return found

    st = pairs(gad.a1, gad.b1, gad.a2, gad.b2)
    cr = pairs(gad.a1, gad.b2, gad.a2, gad.b1)
    eq = lambda fs: any(len(p) == len(q) for p, q in fs)
    return bool(st), bool(cr), eq(st), eq(cr)


# -- linking structure ---------------------------------------------------------------

@dataclass
class LinkingStructure:
    N: int
    net: SortingNetwork
    n_vertices: int
    edges: list
    A: list
    B: list
    certificate: list  # paths, in construction order, over blueprint ids
    gadgets: dict  # (layer, i, j) -> list mapping gadget-local id -> blueprint id
    passes: dict  # (layer, wire) -> blueprint path
    column: dict  # (wire, column) -> blueprint id
    gadget: Gadget
    m: int  # traversal length of one layer
    image: list = None  # blueprint id -> host vertex once embedded

    @property
    def embedded(self):
        return self.image is not None

    def graph(self):
        return Graph(self.n_vertices, self.edges)

    def to_host(self, v):
        return v if self.image is None else self.image[v]

    def vertex_images(self):
        return [self.to_host(v) for v in range(self.n_vertices)]

    def edge_images(self):
        return [(self.to_host(u), self.to_host(v)) for u, v in self.edges]

    def a_images(self):
        return [self.to_host(v) for v in self.A]

    def b_images(self):
        return [self.to_host(v) for v in self.B]

    def max_degree(self):
        deg = [0] * self.n_vertices
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return max(deg) if deg else 0

    def with_image(self, image):
        return LinkingStructure(self.N, self.net, self.n_vertices, self.edges, self.A, self.B,
                                self.certificate, self.gadgets, self.passes, self.column,
                                self.gadget, self.m, list(image))

    def to_dict(self):
        return {"n": self.n_vertices, "edges": [list(e) for e in self.edges],
                "meta": {"N": self.N, "A": self.A, "B": self.B, "m": self.m,
                         "depth": self.net.depth, "certificate": self.certificate,
                         "image": self.image}}

    def to_json(self):
        return json.dumps(self.to_dict())


def _split_length(m, lo, hi):
    """Split m into the fewest parts with sizes in [lo, hi], as even as possible."""
    parts = -(-m // hi)
    while parts * lo > m:
        parts -= 1
    if parts < 1 or parts * hi < m:
        raise InvalidInput(f"cannot split length {m} into pieces within [{lo}, {hi}]")
    base, extra = divmod(m, parts)
    return [base + 1] * extra + [base] * (parts - extra)


def build_linking_blueprint(N, cfg=None):
    cfg = cfg or SolverConfig()
    if N < 2:
        raise InvalidInput("a linking structure needs N >= 2")
    net = build_sorting_network(N)
    gad = build_gadget(cfg.gadget_marked, cfg.gadget_path_len)
    m = gad.traversal
    pieces = _split_length(m, cfg.cert_len_low, cfg.cert_len_high)
    count = [0]
    edges = []

    def fresh():
        count[0] += 1
        return count[0] - 1

    depth = net.depth
    column = {}
    for w in range(N):
        column[(w, 0)] = fresh()
    for w in range(N):
        column[(w, depth)] = fresh()
    A = [column[(w, 0)] for w in range(N)]
    B = [column[(w, depth)] for w in range(N)]
    certificate = []
    gadgets, passes = {}, {}
    for c, layer in enumerate(net.layers):
        busy = {}
        for i, j in layer:
            busy[i] = busy[j] = (i, j)
        for w in range(N):
            if w in busy:
                i, j = busy[w]
                if w != i:
                    continue
                for wire in (i, j):
                    if (wire, c + 1) not in column:
                        column[(wire, c + 1)] = fresh()
                loc = [None] * gad.size
                loc[gad.a1], loc[gad.a2] = column[(i, c)], column[(j, c)]
                loc[gad.b1], loc[gad.b2] = column[(i, c + 1)], column[(j, c + 1)]
                for v in range(gad.size):
                    if loc[v] is None:
                        loc[v] = fresh()
                gadgets[(c, i, j)] = loc
                edges.extend((loc[u], loc[v]) for u, v in gad.edges)
                certificate.extend([loc[v] for v in p] for p in gad.certificate())
            else:
                if (w, c + 1) not in column:
                    column[(w, c + 1)] = fresh()
                path = [column[(w, c)]] + [fresh() for _ in range(m - 1)] + [column[(w, c + 1)]]
                passes[(c, w)] = path
                edges.extend(zip(path, path[1:]))
                pos = 0
                for p in pieces:
                    certificate.append(path[pos:pos + p + 1])
                    pos += p
    edges = [(min(u, v), max(u, v)) for u, v in edges]
    return LinkingStructure(N, net, count[0], edges, A, B, certificate, gadgets, passes,
                            column, gad, m)


def check_certificate(H, lo=None, hi=None):
    """Replay the construction sequence: fresh internals, an anchored end, exact edge cover."""
    present = set(H.A) | set(H.B)
    used = set()
    for p in H.certificate:
        if len(p) < 2:
            return False
        if lo is not None and not lo <= len(p) - 1 <= hi:
            return False
        if any(v in present for v in p[1:-1]) or len(set(p)) != len(p):
            return False
        if p[0] not in present and p[-1] not in present:
            return False
        for u, v in zip(p, p[1:]):
            e = (min(u, v), max(u, v))
            if e in used:
                return False
            used.add(e)
        present.update(p)
    return used == set(H.edges) and present == set(range(H.n_vertices))


def link(H, phi):
    """Vertex-disjoint equal-length paths covering H, path i from A[i] to B[phi[i]]."""
    phi = _check_bijection(phi, H.N)
    net = H.net
    states = route_permutation(net, phi)
    gad = H.gadget
    # which gadget path leaves from a given terminal under a given state
    paths = []
    for inp in range(H.N):
        wire = inp
        out = [H.column[(wire, 0)]]
        for c, (layer, row) in enumerate(zip(net.layers, states)):
            hit = None
            for (i, j), crossed in zip(layer, row):
                if wire in (i, j):
                    hit = (i, j, crossed)
                    break
            if hit is None:
                out.extend(H.passes[(c, wire)][1:])
                continue
            i, j, crossed = hit
            loc = H.gadgets[(c, i, j)]
            top = wire == i
            if crossed:
                local = gad.crossed[0] if top else gad.crossed[1]
                wire = j if top else i
            else:
                local = gad.straight[0] if top else gad.straight[1]
            out.extend(loc[v] for v in local[1:])
        paths.append([H.to_host(v) for v in out])
    return paths
