"""Brute-force ground truth.  Shares only the Graph type with the solver code."""
import itertools
from collections import deque

from .errors import InvalidInput

HELD_KARP_CAP = 20
ROTATION_STATE_CAP = 10 ** 6


def held_karp(g):
    """Exact Hamilton-cycle decision by subset DP.  Returns (bool, cycle or None)."""
    n = g.n
    if n > HELD_KARP_CAP:
        raise InvalidInput(f"held_karp refuses n={n} > {HELD_KARP_CAP}")
    if n < 3:
        return False, None
    adj = [0] * n
    for u in range(n):
        for v in g.adj[u]:
            adj[u] |= 1 << v
    full = (1 << n) - 1
    # dp[mask]: bitset of end vertices v such that some path starts at 0,
    # covers exactly mask and ends at v
    dp = [0] * (1 << n)
    dp[1] = 1
    for mask in range(1, 1 << n, 2):
        ends = dp[mask]
        while ends:
            lb = ends & -ends
            ends ^= lb
            v = lb.bit_length() - 1
            ext = adj[v] & ~mask
            while ext:
                lw = ext & -ext
                ext ^= lw
                dp[mask | lw] |= lw
    closing = dp[full] & adj[0]
    if not closing:
        return False, None
    v = (closing & -closing).bit_length() - 1
    mask = full
    seq = [v]
    while mask != 1:
        prev_mask = mask ^ (1 << v)
        cands = dp[prev_mask] & adj[v]
        u = (cands & -cands).bit_length() - 1
        mask, v = prev_mask, u
        seq.append(v)
    seq.reverse()
    return True, seq


def _forest_adj(n, edges):
    adj = {v: set() for v in range(n)}
    for e in edges:
        a, b = tuple(e)
        adj[a].add(b)
        adj[b].add(a)
    return adj


def _bfs_dist(adj, src):
    dist = {src: 0}
    dq = deque([src])
    while dq:
        x = dq.popleft()
        for w in adj[x]:
            if w not in dist:
                dist[w] = dist[x] + 1
                dq.append(w)
    return dist


def _parents(adj, src):
    par = {src: None}
    dq = deque([src])
    while dq:
        x = dq.popleft()
        for w in adj[x]:
            if w not in par:
                par[w] = x
                dq.append(w)
    return par


def enumerate_rotations(g, forest_edges, v, u_set, k, n=None, cap=ROTATION_STATE_CAP):
    """All endpoints reachable from v by <= k legal rotations (exhaustive DFS).

    `forest_edges` is an iterable of vertex pairs (or anything with .edges()).
    Pivots must lie in the interior of u_set (None = all vertices) and be at
    forest distance >= 3 in the ORIGINAL forest from v and every earlier pivot.
    """
    if hasattr(forest_edges, "edges"):
        n = forest_edges.n
        forest_edges = forest_edges.edges()
    n = g.n if n is None else n
    start = frozenset(frozenset(e) for e in forest_edges)
    fadj = _forest_adj(n, start)
    if len(fadj[v]) > 1:
        raise InvalidInput(f"{v} is not an endpoint")
    universe = set(range(n)) if u_set is None else set(u_set)
    inner = {x for x in universe if fadj[x] <= universe}
    dist_cache = {}

    def dist(a, b):
        if a not in dist_cache:
            dist_cache[a] = _bfs_dist(fadj, a)
        return dist_cache[a].get(b, float("inf"))

    reached = {v}
    seen = set()
    stack = [(start, v, ())]
    while stack:
        edges, x, pivots = stack.pop()
        key = (edges, x, frozenset(pivots))
        if key in seen:
            continue
        seen.add(key)
        if len(seen) > cap:
            raise InvalidInput("rotation enumeration exceeded its state cap")
        if len(pivots) >= k:
            continue
        cur = _forest_adj(n, edges)
        comp = _parents(cur, x)
        for z in g.adj[x]:
            if z not in inner or z == x:
                continue
            if dist(z, v) < 3 or any(dist(z, p) < 3 for p in pivots):
                continue
            if not cur[z]:
                ys = [z]
            elif z in comp:
                ys = [comp[z]]
            else:
                ys = sorted(cur[z])
            for y in ys:
                new = set(edges)
                if y != z:
                    new.discard(frozenset((y, z)))
                new.add(frozenset((x, z)))
                reached.add(y)
                stack.append((frozenset(new), y, pivots + (z,)))
    return reached


def verify_paths_cover(vertices, edge_set, paths, pairs):
    """Paths are vertex-disjoint, cover `vertices`, have equal length, use
    only edges of edge_set and join the requested endpoint pairs."""
    used = set()
    lengths = set()
    for p, (a, b) in zip(paths, pairs):
        if len(p) < 2 or p[0] != a or p[-1] != b:
            return False
        for x, y in zip(p, p[1:]):
            if frozenset((x, y)) not in edge_set:
                return False
        for x in p:
            if x in used:
                return False
            used.add(x)
        lengths.add(len(p))
    return len(paths) == len(pairs) and used == set(vertices) and len(lengths) == 1


def verify_linking_exhaustive(H, N=None, perms=None):
    """Route every bijection A->B through H and audit the result."""
    from .linking import link

    N = H.N if N is None else N
    if perms is None:
        if N > 5:
            raise InvalidInput("exhaustive linking check is limited to N <= 5")
        perms = itertools.permutations(range(N))
    verts = H.vertex_images()
    edge_set = {frozenset(e) for e in H.edge_images()}
    A, B = H.a_images(), H.b_images()
    for phi in perms:
        try:
            paths = link(H, list(phi))
        except Exception:
            return False
        pairs = [(A[i], B[phi[i]]) for i in range(N)]
        if not verify_paths_cover(verts, edge_set, paths, pairs):
            return False
    return True
