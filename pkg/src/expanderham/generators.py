"""Instance generators: random regular, G(n,p), random Cayley graphs, named fixtures."""
import itertools
import random
from collections import defaultdict

from .errors import InvalidInput
from .graph import Graph

RESTART_CAP = 1000


def random_regular(n, d, seed=0):
    """Uniform-ish simple d-regular graph by pairing stubs.

    Stubs are paired at random; colliding pairs (loops, repeated edges) go
    back into the pool and are re-paired.  If the leftover pool can no longer
    be completed the whole attempt restarts (at most RESTART_CAP times).
    """
    if n < 0 or d < 0:
        raise InvalidInput("n and d must be non-negative")
    if (n * d) % 2:
        raise InvalidInput(f"n*d = {n * d} is odd")
    if d >= n and n > 0:
        raise InvalidInput(f"need d < n, got d={d}, n={n}")
    rng = random.Random(seed)
    if d == 0:
        return Graph(n, meta={"kind": "random_regular", "d": 0, "seed": seed})
    for _ in range(RESTART_CAP):
        edges = _pair_stubs(n, d, rng)
        if edges is not None:
            g = Graph(n, sorted(edges), meta={"kind": "random_regular", "d": d, "seed": seed})
            assert g.is_regular() and g.degree(0) == d
            return g
    raise InvalidInput(f"no simple {d}-regular graph on {n} vertices after {RESTART_CAP} restarts")


def _pair_stubs(n, d, rng):
    edges = set()
    stubs = [v for v in range(n) for _ in range(d)]
    while stubs:
        rng.shuffle(stubs)
        left = defaultdict(int)
        it = iter(stubs)
        for a, b in zip(it, it):
            if a > b:
                a, b = b, a
            if a != b and (a, b) not in edges:
                edges.add((a, b))
            else:
                left[a] += 1
                left[b] += 1
        if not left:
            break
        # some pair of leftover vertices must still be joinable
        vs = sorted(left)
        if not any((a, b) not in edges for a, b in itertools.combinations(vs, 2)):
            return None
        stubs = [v for v in vs for _ in range(left[v])]
    return edges


def gnp(n, p, seed=0):
    if not 0 <= p <= 1:
        raise InvalidInput("p must lie in [0, 1]")
    rng = random.Random(seed)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph(n, edges, meta={"kind": "gnp", "p": p, "seed": seed})


# -- groups -------------------------------------------------------------------

class _Group:
    """Finite group on element indices 0..order-1; index 0 is the identity."""

    def __init__(self, name, elements, mul, inv):
        self.name = name
        self.elements = elements
        self.index = {e: i for i, e in enumerate(elements)}
        self._mul = mul
        self._inv = inv

    @property
    def order(self):
        return len(self.elements)

    def mul(self, i, j):
        return self.index[self._mul(self.elements[i], self.elements[j])]

    def inv(self, i):
        return self.index[self._inv(self.elements[i])]


def make_group(kind, param):
    if kind == "cyclic":
        m = int(param)
        if m < 1:
            raise InvalidInput("cyclic group needs order >= 1")
        return _Group(f"Z{m}", list(range(m)), lambda a, b: (a + b) % m, lambda a: (-a) % m)
    if kind == "power_of_Z2":
        k = int(param)
        if not 0 <= k <= 20:
            raise InvalidInput("power_of_Z2 needs 0 <= k <= 20")
        return _Group(f"Z2^{k}", list(range(1 << k)), lambda a, b: a ^ b, lambda a: a)
    if kind == "dihedral":
        m = int(param)
        if m < 1:
            raise InvalidInput("dihedral group needs m >= 1")
        elems = [(r, s) for s in (0, 1) for r in range(m)]

        def mul(a, b):
            return ((a[0] + (b[0] if a[1] == 0 else -b[0])) % m, a[1] ^ b[1])

        def inv(a):
            return ((-a[0]) % m, 0) if a[1] == 0 else a

        return _Group(f"D{m}", elems, mul, inv)
    if kind == "symmetric":
        k = int(param)
        if not 1 <= k <= 8:
            raise InvalidInput("symmetric group needs 1 <= k <= 8")
        elems = list(itertools.permutations(range(k)))

        def mul(a, b):
            return tuple(a[b[i]] for i in range(k))

        def inv(a):
            out = [0] * k
            for i, x in enumerate(a):
                out[x] = i
            return tuple(out)

        return _Group(f"S{k}", elems, mul, inv)
    raise InvalidInput(f"unknown group {kind!r}")


def cayley_graph(group, gens):
    """x ~ x*s for s in the symmetrized connection set."""
    conn = set()
    for s in gens:
        if s == 0:
            raise InvalidInput("the identity cannot be a generator")
        conn.add(s)
        conn.add(group.inv(s))
    edges = set()
    for x in range(group.order):
        for s in conn:
            y = group.mul(x, s)
            edges.add((min(x, y), max(x, y)))
    meta = {"kind": "cayley", "group": group.name, "generators": sorted(gens),
            "connection_set": sorted(conn), "degree": len(conn)}
    return Graph(group.order, sorted(edges), meta=meta)


def random_cayley(group, param, d, seed=0, gens=None):
    """Cayley graph of a named group with d random non-identity generators."""
    grp = make_group(group, param)
    if gens is None:
        if d >= grp.order:
            raise InvalidInput(f"d={d} must be below the group order {grp.order}")
        rng = random.Random(seed)
        gens = rng.sample(range(1, grp.order), d)
    g = cayley_graph(grp, [int(s) for s in gens])
    g.meta["seed"] = seed
    return g


# -- fixtures -------------------------------------------------------------------

def fixture(name, *args):
    if name == "petersen":
        outer = [(i, (i + 1) % 5) for i in range(5)]
        spokes = [(i, i + 5) for i in range(5)]
        inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
        return Graph(10, outer + spokes + inner, meta={"kind": "petersen"})
    if name == "complete":
        (n,) = args
        return Graph(n, itertools.combinations(range(n), 2), meta={"kind": "complete"})
    if name == "complete_bipartite":
        a, b = args
        return Graph(a + b, [(i, a + j) for i in range(a) for j in range(b)],
                     meta={"kind": "complete_bipartite"})
    if name == "path":
        (n,) = args
        return Graph(n, [(i, i + 1) for i in range(n - 1)], meta={"kind": "path"})
    if name == "cycle":
        (n,) = args
        if n < 3:
            raise InvalidInput("a cycle needs at least 3 vertices")
        return Graph(n, [(i, (i + 1) % n) for i in range(n)], meta={"kind": "cycle"})
    raise InvalidInput(f"unknown fixture {name!r}")
