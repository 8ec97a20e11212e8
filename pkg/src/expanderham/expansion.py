"""Expansion checks: C-expanders, "expands into", forest-expander extraction, spectra."""
import json
import math
import random
from dataclasses import dataclass

import numpy as np

from .config import SolverConfig
from .errors import InvalidInput, StageFailure
from .forest import interior


@dataclass
class ExpansionVerdict:
    status: str  # certified | refuted | inconclusive
    mode: str  # exact | sampled | spectral
    witness: tuple = None  # (X,) for a small-set failure, (X, Y) for a missing edge
    condition: str = None  # "a" small sets, "b" linear-sized pairs, "into" for expands_into
    checked: int = 0

    @property
    def refuted(self):
        return self.status == "refuted"

    def to_dict(self):
        return {
            "status": self.status,
            "mode": self.mode,
            "condition": self.condition,
            "witness": None if self.witness is None else [sorted(s) for s in self.witness],
        }

    def to_json(self):
        return json.dumps(self.to_dict())


@dataclass
class SpectralEstimate:
    d: int
    lam: float = None  # largest nontrivial eigenvalue in absolute value
    mu2: float = None  # second largest eigenvalue (signed)
    regular: bool = True
    residual: float = 0.0
    mode: str = "dense"
    min_degree: int = 0
    max_degree: int = 0

    def to_dict(self):
        return {"status": "estimated" if self.regular else "non-regular", "mode": "spectral",
                "d": self.d, "lambda": self.lam, "mu2": self.mu2, "residual": self.residual,
                "method": self.mode, "min_degree": self.min_degree, "max_degree": self.max_degree}

    def to_json(self):
        return json.dumps(self.to_dict())


def _divisor(C, cfg):
    if cfg is not None and cfg.small_set_divisor > 0:
        return cfg.small_set_divisor
    return 2.0 * C


def _nbhd(g, xs):
    out = set()
    for v in xs:
        out.update(g.adj[v])
    out.difference_update(xs)
    return out


def recheck_witness(g, verdict, C, cfg=None, u=None, target=None):
    """Re-verify a refutation against the raw definition."""
    if verdict.status != "refuted" or not verdict.witness:
        return False
    n = g.n
    if verdict.condition == "a":
        (x,) = verdict.witness
        return 1 <= len(x) < n / _divisor(C, cfg) and len(_nbhd(g, x)) < C * len(x)
    if verdict.condition == "b":
        x, y = verdict.witness
        lim = n / _divisor(C, cfg)
        if x & y or len(x) < lim or len(y) < lim:
            return False
        return all(g.nbrset(v).isdisjoint(y) for v in x)
    if verdict.condition == "into":
        (x,) = verdict.witness
        lim = _into_limit(len(u), C, cfg)
        return (set(x) <= set(u) and 1 <= len(x) <= lim
                and len(_nbhd(g, x) & set(target)) < C * len(x))
    return False


# -- C-expander, exact ----------------------------------------------------

def _gamma_table(g):
    """Closed-free neighbourhood masks Gamma(X) for all 2^n subsets (doubling build)."""
    n = g.n
    gamma = np.zeros(1 << n, dtype=np.uint32)
    for i in range(n):
        bits = 0
        for w in g.adj[i]:
            bits |= 1 << w
        lo = 1 << i
        gamma[lo:2 * lo] = gamma[:lo] | np.uint32(bits)
    return gamma


def _bits_to_set(mask):
    out, i = set(), 0
    while mask:
        if mask & 1:
            out.add(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def check_c_expander_exact(g, C, cfg=None):
    """Decide both expander conditions over all subsets (n <= exact cap)."""
    cap = cfg.exact_cap if cfg is not None else 20
    if C <= 0:
        raise InvalidInput("C must be positive")
    n = g.n
    if n > cap:
        raise InvalidInput(f"n={n} exceeds the exact cap {cap}; use check_c_expander_sampled")
    if n == 0:
        return ExpansionVerdict("certified", "exact")
    lim = n / _divisor(C, cfg)
    masks = np.arange(1 << n, dtype=np.uint32)
    gamma = _gamma_table(g)
    sizes = np.bitwise_count(masks).astype(np.int64)
    outer = np.bitwise_count(gamma & ~masks).astype(np.int64)
    bad = (sizes >= 1) & (sizes < lim) & (outer < C * sizes)
    if bad.any():
        idx = np.flatnonzero(bad)
        best = idx[np.argmin(sizes[idx] * (1 << n) + idx)]
        return ExpansionVerdict("refuted", "exact", (_bits_to_set(int(best)),), "a", 1 << n)
    s = math.ceil(lim - 1e-12)
    if 2 * s <= n:
        covered = np.bitwise_count(gamma | masks).astype(np.int64)
        bad = (sizes == s) & (n - covered >= s)
        if bad.any():
            m = int(np.flatnonzero(bad)[0])
            x = _bits_to_set(m)
            cov = _bits_to_set(int(gamma[m]) | m)
            rest = sorted(set(range(n)) - cov)[:s]
            return ExpansionVerdict("refuted", "exact", (x, frozenset(rest)), "b", 1 << n)
    return ExpansionVerdict("certified", "exact", checked=1 << n)


# -- C-expander, sampled --------------------------------------------------

def _ball(g, root, size, rng):
    """BFS ball around root, visiting neighbours in random order, truncated to size."""
    seen = [root]
    got = {root}
    i = 0
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
    return frozenset(seen)


def _near(g, u):
    out = set(g.adj[u])
    for w in g.adj[u]:
        out.update(g.adj[w])
    out.discard(u)
    return out


def check_c_expander_sampled(g, C, cfg=None, seed=None, pairs=True):
    """All singletons, all pairs and random small sets; refutes only with a verified witness.

    `pairs=False` skips the quadratic pair sweep (used for quick residual audits).
    """
    cfg = cfg or SolverConfig()
    if C <= 0:
        raise InvalidInput("C must be positive")
    n = g.n
    rng = random.Random(cfg.seed if seed is None else seed)
    lim = n / _divisor(C, cfg)
    checked = 0

    def refute(wit, cond):
        v = ExpansionVerdict("refuted", "sampled", wit, cond, checked)
        assert recheck_witness(g, v, C, cfg)
        return v

    if n == 0:
        return ExpansionVerdict("inconclusive", "sampled")
    by_deg = sorted(range(n), key=lambda v: (len(g.adj[v]), v))
    if 1 < lim:
        for v in by_deg:
            checked += 1
            if len(g.adj[v]) < C:
                return refute((frozenset([v]),), "a")
            break  # degrees only grow along by_deg
    if pairs and 2 < lim:
        for u in range(n):
            nu = set(g.adj[u])
            for w in _near(g, u):
                if w <= u:
                    continue
                checked += 1
                nb = (nu | set(g.adj[w])) - {u, w}
                if len(nb) < 2 * C:
                    return refute((frozenset([u, w]),), "a")
        # pairs at distance > 2 have |N| = deg u + deg w
        dmin = len(g.adj[by_deg[0]])
        for u in by_deg:
            if len(g.adj[u]) + dmin >= 2 * C:
                break
            near = _near(g, u)
            for w in by_deg:
                if len(g.adj[u]) + len(g.adj[w]) >= 2 * C:
                    break
                if w != u and w not in near:
                    return refute((frozenset([u, w]),), "a")
    top = math.ceil(lim) - 1
    if top >= 3:
        for t in range(cfg.sample_count):
            size = rng.randint(3, top)
            if t % 2:
                x = frozenset(rng.sample(range(n), size))
            else:
                x = _ball(g, rng.randrange(n), size, rng)
            checked += 1
            if len(x) >= 1 and len(_nbhd(g, x)) < C * len(x):
                return refute((x,), "a")
    s = math.ceil(lim - 1e-12)
    if 2 * s <= n:
        for t in range(cfg.sample_count):
            if t % 2:
                x = frozenset(rng.sample(range(n), s))
            else:
                x = _ball(g, rng.randrange(n), s, rng)
            if len(x) < s:
                continue
            checked += 1
            rest = set(range(n)) - x - _nbhd(g, x)
            if len(rest) >= s:
                return refute((x, frozenset(sorted(rest)[:s])), "b")
    return ExpansionVerdict("inconclusive", "sampled", checked=checked)


def check_c_expander(g, C, cfg=None):
    cfg = cfg or SolverConfig()
    if g.n <= cfg.exact_cap:
        return check_c_expander_exact(g, C, cfg)
    return check_c_expander_sampled(g, C, cfg)


# -- expands into ---------------------------------------------------------

def _into_limit(usize, C, cfg):
    div = cfg.expand_fraction_divisor if cfg is not None else 5000.0
    # singletons are always in scope; at desk scale the fraction is below one
    return max(1, int(usize / (div * C)))


def expands_into(g, u, target, C, cfg=None, seed=None):
    """Every X in u with 1 <= |X| <= limit has at least C|X| neighbours in target."""
    cfg = cfg or SolverConfig()
    u = g.check_set(u)
    target = g.check_set(target)
    if len(u) < max(1, cfg.expand_floor):
        raise InvalidInput(f"|U|={len(u)} is below the floor {cfg.expand_floor}")
    lim = _into_limit(len(u), C, cfg)
    tset = set(target)
    checked = 0

    def gain(x):
        return len(_nbhd(g, x) & tset)

    def refute(x):
        v = ExpansionVerdict("refuted", "sampled" if len(u) > cfg.exact_cap else "exact",
                             (frozenset(x),), "into", checked)
        assert recheck_witness(g, v, C, cfg, u, target)
        return v

    members = sorted(u)
    for v in members:
        checked += 1
        if gain([v]) < C:
            return refute([v])
    if len(u) <= cfg.exact_cap:
        from itertools import combinations

        for size in range(2, min(lim, len(u)) + 1):
            for x in combinations(members, size):
                checked += 1
                if gain(x) < C * size:
                    return refute(x)
        return ExpansionVerdict("certified", "exact", condition="into", checked=checked)
    rng = random.Random(cfg.seed if seed is None else seed)
    if lim >= 2:
        sub = g.subgraph(members)[0]
        for _ in range(cfg.sample_count):
            size = rng.randint(2, min(lim, len(u)))
            if rng.random() < 0.5:
                x = rng.sample(members, size)
            else:
                x = [members[i] for i in _ball(sub, rng.randrange(len(members)), size, rng)]
            checked += 1
            if gain(x) < C * len(x):
                return refute(x)
        return ExpansionVerdict("inconclusive", "sampled", condition="into", checked=checked)
    return ExpansionVerdict("certified", "sampled", condition="into", checked=checked)


# -- forest expanders -----------------------------------------------------

def extract_forest_expanders(g, f, parts, cfg=None, need=None, demands=None):
    """Greedy one-vertex-at-a-time cleaning of `parts`.

    A vertex leaves its part while it has fewer than `need` (default ceil(C'))
    neighbours in the current interior of some part.  `demands[i]` narrows
    the parts whose interior part i must reach (default: all of them).
    Returns the cleaned parts as frozensets, in input order.
    """
    cfg = cfg or SolverConfig()
    n = g.n
    need = math.ceil(cfg.c_prime) if need is None else need
    parts = [set(g.check_set(p)) for p in parts]
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            if parts[i] & parts[j]:
                raise InvalidInput("parts must be disjoint")
    floor = max(1, int(n / cfg.part_mass_divisor))
    for i, p in enumerate(parts):
        if len(interior(f, p)) < floor:
            raise InvalidInput(f"part {i} has interior below {floor}")
    owner = {}
    for i, p in enumerate(parts):
        for v in p:
            owner[v] = i
    inner = [interior(f, p) for p in parts]
    k = len(parts)
    cnt = {}
    for v in owner:
        row = [0] * k
        for w in g.adj[v]:
            j = owner.get(w)
            if j is not None and w in inner[j]:
                row[j] += 1
        cnt[v] = row
    cols = [list(range(k)) if demands is None else list(demands[i]) for i in range(k)]

    def short(v):
        row = cnt[v]
        return any(row[j] < need for j in cols[owner[v]])

    cap = 2.0 * n / cfg.C
    removed = [0] * k
    work = [v for v in sorted(owner) if short(v)]
    while work:
        v = work.pop()
        i = owner.get(v)
        if i is None or not short(v):
            continue
        # v leaves part i; v and its forest neighbours drop out of int(U_i)
        parts[i].discard(v)
        del owner[v]
        removed[i] += 1
        if removed[i] > cap:
            raise StageFailure("extract", f"part {i} lost more than {cap:.0f} vertices")
        lost = [v] + [w for w in f.nb[v] if w >= 0 and w in inner[i]]
        for x in lost:
            if x not in inner[i]:
                continue
            inner[i].discard(x)
            for w in g.adj[x]:
                row = cnt.get(w)
                if row is not None and w in owner:
                    row[i] -= 1
                    if row[i] < need and i in cols[owner[w]]:
                        work.append(w)
        cnt.pop(v, None)
    for i, p in enumerate(parts):
        if len(inner[i]) < floor:
            raise StageFailure("extract", f"part {i} interior fell below {floor}")
    out = [frozenset(p) for p in parts]
    if cfg.self_check:
        for i, p in enumerate(out):
            for j in cols[i]:
                verdict = expands_into(g, p, interior(f, out[j]), need, cfg)
                if verdict.refuted:
                    raise StageFailure("extract", f"part {i} failed the expansion audit")
    return out


# -- spectra --------------------------------------------------------------

def _power_lambda(a, n, d, cfg):
    """Power iteration on A^2 with the all-ones direction projected out."""
    rng = np.random.default_rng(cfg.seed)
    x = rng.standard_normal(n)
    x -= x.mean()
    x /= np.linalg.norm(x)
    lam, res = 0.0, float("inf")
    for _ in range(cfg.power_max_iter):
        y = a @ x
        y -= y.mean()
        lam = float(np.linalg.norm(y))
        z = a @ y
        z -= z.mean()
        nz = float(np.linalg.norm(z))
        if nz == 0:
            return 0.0, 0.0
        res = float(np.linalg.norm(z - lam * lam * x))
        x = z / nz
        if res < cfg.power_tol * max(1.0, lam * lam):
            break
    return lam, res


def estimate_lambda(g, cfg=None, method="auto"):
    """Largest nontrivial |eigenvalue| of a regular graph (and the signed second eigenvalue).

    method: "dense" (eigvalsh), "iterative" (Lanczos on a shifted operator,
    power iteration if that does not converge) or "auto" (dense up to
    cfg.dense_cap vertices).
    """
    cfg = cfg or SolverConfig()
    degs = g.degrees()
    n = g.n
    lo, hi = (min(degs), max(degs)) if degs else (0, 0)
    if lo != hi:
        return SpectralEstimate(d=hi, regular=False, mode="none", min_degree=lo, max_degree=hi)
    d = hi
    if n <= 1:
        return SpectralEstimate(d=d, lam=0.0, mu2=None, min_degree=lo, max_degree=hi)
    if method == "dense" or (method == "auto" and n <= cfg.dense_cap) or n <= 3:
        mus = np.linalg.eigvalsh(g.adjacency_matrix())[::-1]
        lam = float(max(abs(mus[1]), abs(mus[-1])))
        return SpectralEstimate(d, lam, float(mus[1]), True, 0.0, "dense", lo, hi)
    import scipy.sparse.linalg as sla

    a = g.sparse_adjacency()
    ones = np.ones(n)

    def shifted(shift):
        # ones is an eigenvector with eigenvalue d; move it to d + shift
        return sla.LinearOperator((n, n), matvec=lambda x: a @ x + (shift / n) * ones * np.sum(x),
                                  dtype=float)

    try:
        top, vt = sla.eigsh(shifted(-(2 * d + 1)), k=1, which="LA", tol=0, maxiter=cfg.power_max_iter)
        bot, vb = sla.eigsh(shifted(d + 1), k=1, which="SA", tol=0, maxiter=cfg.power_max_iter)
    except sla.ArpackNoConvergence:
        lam, res = _power_lambda(a, n, d, cfg)
        return SpectralEstimate(d, lam, None, True, res, "power", lo, hi)
    mu2, mun = float(top[0]), float(bot[0])
    res = max(float(np.linalg.norm(a @ vt[:, 0] - mu2 * vt[:, 0])),
              float(np.linalg.norm(a @ vb[:, 0] - mun * vb[:, 0])))
    return SpectralEstimate(d, max(abs(mu2), abs(mun)), mu2, True, res, "lanczos", lo, hi)


def mixing_audit(g, lam, trials=100, seed=0):
    """Worst observed |e(S,T) - d|S||T|/n| / (lam sqrt(|S||T|)) over sampled disjoint S, T."""
    degs = set(g.degrees())
    if len(degs) > 1:
        raise InvalidInput("mixing_audit needs a regular graph")
    n = g.n
    if n < 2 or trials <= 0:
        return 0.0
    d = degs.pop()
    rng = random.Random(seed)
    worst = 0.0

    def dev(s, t):
        if not s or not t:
            return 0.0
        e = sum(len(g.nbrset(v) & t) for v in s)
        num = abs(e - d * len(s) * len(t) / n)
        if num == 0:
            return 0.0
        if lam <= 0:
            return float("inf")
        return num / (lam * math.sqrt(len(s) * len(t)))

    for t in range(trials):
        if t % 2 == 0:
            s = set(_ball(g, rng.randrange(n), rng.randint(1, max(1, n // 2)), rng))
            tt = set(range(n)) - s - _nbhd(g, s)
            if not tt:
                tt = set(range(n)) - s
        else:
            perm = list(range(n))
            rng.shuffle(perm)
            cut = rng.randint(1, n - 1)
            s = set(perm[:cut])
            tt = set(perm[cut:][: rng.randint(1, n - cut)])
        worst = max(worst, dev(s, tt))
    return worst
