"""Immutable simple undirected graphs on dense vertex ids 0..n-1."""
import io
import json
import operator

from .errors import InvalidInput


class Graph:
    """Simple undirected graph.

    Neighbour lists are sorted tuples (deterministic iteration order); a
    parallel list of frozensets answers membership queries.  `labels` keeps
    the original vertex ids when an input file was relabelled.
    """

    __slots__ = ("n", "m", "adj", "_nbr", "labels", "meta")

    def __init__(self, n, edges=(), labels=None, meta=None):
        n = int(n)
        if n < 0:
            raise InvalidInput("vertex count must be non-negative")
        nbr = [set() for _ in range(n)]
        m = 0
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidInput(f"edge ({u},{v}) has a vertex outside 0..{n - 1}")
            if u == v:
                raise InvalidInput(f"self-loop at {u}")
            if v in nbr[u]:
                raise InvalidInput(f"duplicate edge ({u},{v})")
            nbr[u].add(v)
            nbr[v].add(u)
            m += 1
        self.n = n
        self.m = m
        self.adj = tuple(tuple(sorted(s)) for s in nbr)
        self._nbr = [frozenset(s) for s in nbr]
        if labels is not None and len(labels) != n:
            raise InvalidInput("labels must have one entry per vertex")
        self.labels = None if labels is None else list(labels)
        self.meta = dict(meta or {})

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self):
        return hash((self.n, self.adj))

    def neighbors(self, v):
        return self.adj[v]

    def nbrset(self, v):
        return self._nbr[v]

    def has_edge(self, u, v):
        return v in self._nbr[u]

    def degree(self, v):
        return len(self.adj[v])

    def degrees(self):
        return [len(a) for a in self.adj]

    def edges(self):
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    def check_vertex(self, v):
        try:
            v = operator.index(v)
        except TypeError:
            raise InvalidInput(f"vertex id must be an integer, got {v!r}") from None
        if not 0 <= v < self.n:
            raise InvalidInput(f"vertex {v} outside 0..{self.n - 1}")
        return v

    def check_set(self, xs):
        out = set()
        for v in xs:
            out.add(self.check_vertex(v))
        return frozenset(out)

    def subgraph(self, vertices):
        """Induced subgraph, relabelled densely.  Returns (graph, old_ids)."""
        old = sorted(set(vertices))
        new_of = {v: i for i, v in enumerate(old)}
        edges = []
        for i, v in enumerate(old):
            for w in self.adj[v]:
                j = new_of.get(w)
                if j is not None and i < j:
                    edges.append((i, j))
        return Graph(len(old), edges), old

    def with_edge(self, u, v):
        if self.has_edge(u, v):
            return self
        return Graph(self.n, self.edges() + [(u, v)], labels=self.labels, meta=self.meta)

    def is_regular(self):
        degs = set(self.degrees())
        return len(degs) <= 1

    def adjacency_matrix(self):
        import numpy as np

        a = np.zeros((self.n, self.n))
        for u, v in self.edges():
            a[u, v] = a[v, u] = 1.0
        return a

    def sparse_adjacency(self):
        import numpy as np
        import scipy.sparse as sp

        rows, cols = [], []
        for u in range(self.n):
            rows.extend([u] * len(self.adj[u]))
            cols.extend(self.adj[u])
        data = np.ones(len(rows))
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))


def as_vertex_set(g, xs):
    return g.check_set(xs)


def outer_neighborhood(g, x):
    """N(X) = Gamma(X) minus X."""
    xs = g.check_set(x)
    out = set()
    for v in xs:
        out.update(g.adj[v])
    return frozenset(out - xs)


def has_edge_between(g, x, y):
    xs, ys = g.check_set(x), g.check_set(y)
    if xs & ys:
        raise InvalidInput("sets must be disjoint")
    if len(xs) > len(ys):
        xs, ys = ys, xs
    for v in xs:
        if not g.nbrset(v).isdisjoint(ys):
            return True
    return False


def _read_text(source):
    if isinstance(source, bytes):
        return source.decode()
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode() if isinstance(data, bytes) else data


def _load_edge_list(text):
    header = None
    edges = []
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            nums = [int(p) for p in parts]
        except ValueError:
            raise InvalidInput(f"line {lineno}: expected integers, got {line!r}") from None
        if len(nums) != 2:
            raise InvalidInput(f"line {lineno}: expected two integers")
        if header is None:
            header = nums
            if nums[0] < 0 or nums[1] < 0:
                raise InvalidInput(f"line {lineno}: negative header value")
            continue
        u, v = nums
        n = header[0]
        if not (0 <= u < n and 0 <= v < n):
            raise InvalidInput(f"line {lineno}: vertex out of range 0..{n - 1}")
        if u == v:
            raise InvalidInput(f"line {lineno}: self-loop")
        edges.append((u, v, lineno))
    if header is None:
        raise InvalidInput("line 1: missing 'n m' header")
    n, m = header
    if len(edges) != m:
        raise InvalidInput(f"header announces {m} edges, found {len(edges)}")
    seen = set()
    for u, v, lineno in edges:
        key = (min(u, v), max(u, v))
        if key in seen:
            raise InvalidInput(f"line {lineno}: duplicate edge {key}")
        seen.add(key)
    return Graph(n, [(u, v) for u, v, _ in edges])


def _load_json(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"line {exc.lineno}: {exc.msg}") from None
    if not isinstance(obj, dict) or "edges" not in obj:
        raise InvalidInput("JSON graph needs an 'edges' list")
    raw = obj["edges"]
    labels = obj.get("labels")
    if "n" in obj:
        n = int(obj["n"])
        edges = [(int(u), int(v)) for u, v in raw]
        return Graph(n, edges, labels=labels)
    # arbitrary non-negative ids: relabel densely, keep the map
    ids = sorted({int(x) for e in raw for x in e} | {int(x) for x in obj.get("vertices", [])})
    if ids and ids[0] < 0:
        raise InvalidInput("vertex ids must be non-negative")
    new_of = {v: i for i, v in enumerate(ids)}
    return Graph(len(ids), [(new_of[int(u)], new_of[int(v)]) for u, v in raw], labels=ids)


def load_graph(source, fmt="edge-list"):
    """Parse a graph from text, bytes or a file object."""
    text = _read_text(source)
    if fmt in ("edge-list", "edgelist", "txt"):
        return _load_edge_list(text)
    if fmt == "json":
        return _load_json(text)
    raise InvalidInput(f"unknown graph format {fmt!r}")


def save_graph(g, fmt="edge-list"):
    edges = g.edges()
    if fmt in ("edge-list", "edgelist", "txt"):
        lines = [f"{g.n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]
        return "\n".join(lines) + "\n"
    if fmt == "json":
        obj = {"n": g.n, "edges": [[u, v] for u, v in edges]}
        if g.labels is not None:
            obj["labels"] = g.labels
        return json.dumps(obj)
    raise InvalidInput(f"unknown graph format {fmt!r}")


def guess_format(path):
    return "json" if str(path).endswith(".json") else "edge-list"


def read_graph_file(path, fmt=None):
    with open(path, "rb") as fh:
        return load_graph(fh, fmt or guess_format(path))


def write_graph_file(g, path, fmt=None):
    with open(path, "w") as fh:
        fh.write(save_graph(g, fmt or guess_format(path)))
