"""Composite rotation procedures: closing two paths, steering an endpoint, merging."""
import json
from dataclasses import dataclass, field

from .config import SolverConfig
from .errors import InvalidInput, StageFailure
from .expansion import extract_forest_expanders
from .forest import edge_key, forest_zone, interior
from .rotation import (ReachSearch, RotationRecord, apply_step, make_step, replay,
                       rotation_targets)


@dataclass
class MergeReport:
    x: int
    y: int
    status: str = "success"
    edges_changed: int = 0
    stage: str = None  # failing stage, if any
    message: str = ""
    trace: list = field(default_factory=list)
    forest: object = None

    @property
    def ok(self):
        return self.status == "success"

    def note(self, stage, **info):
        self.trace.append({"stage": stage, **info})

    def to_dict(self):
        return {"x": self.x, "y": self.y, "status": self.status,
                "edges_changed": self.edges_changed, "stage": self.stage,
                "message": self.message, "trace": self.trace}

    def to_json(self):
        return json.dumps(self.to_dict())


def net_change(records, extra=()):
    """Edges in the symmetric difference produced by a sequence of records."""
    broken, added = set(), set()
    for r in records:
        broken.update(r.broken_edges())
        added.update(r.added_edges())
    added.update(extra)
    return broken ^ added


def _require_no_isolated(f):
    iso = f.isolated()
    if iso:
        raise InvalidInput(f"forest has isolated vertices, e.g. {iso[0]}")


# -- closing ----------------------------------------------------------------

def _close(g, f, x, y, X, Y, cfg, depth):
    """Rotate x within X and y within Y until some new endpoints are adjacent."""
    per_side = min(cfg.depth_cap, depth)
    sx = ReachSearch(g, f, x, X, state_cap=cfg.reach_state_cap)
    sy = ReachSearch(g, f, y, Y, state_cap=cfg.reach_state_cap)

    def crossing(new, other):
        for a in sorted(new):
            for b in g.adj[a]:
                if b in other.records:
                    return a, b
        return None

    pair = crossing([x], sy)
    used = [0, 0]
    while pair is None:
        # grow the side that has used fewer layers, if it can still grow
        order = (0, 1) if used[0] <= used[1] else (1, 0)
        grown = False
        for side in order:
            s = sx if side == 0 else sy
            if used[side] >= per_side or used[0] + used[1] >= depth or s.exhausted():
                continue
            layer = s.expand_layer()
            used[side] += 1
            grown = True
            if side == 0:
                pair = crossing(layer, sy)
            else:
                hit = crossing(layer, sx)
                pair = None if hit is None else (hit[1], hit[0])
            break
        if not grown:
            raise StageFailure("close", "no crossing edge between the two endpoint reaches")
    a, b = pair
    rx, ry = sx.records[a], sy.records[b]
    if set(rx.pivots) & set(ry.pivots) or set(rx.broken_edges()) & set(ry.broken_edges()):
        raise StageFailure("close", "rotation records overlap")
    out = f.copy()
    try:
        rx.apply(out)
        ry.apply(out)
        if out.same_path(a, b):
            raise StageFailure("close", "crossing edge would close a cycle")
        out.add_edge(a, b)
    except InvalidInput as exc:
        raise StageFailure("close", str(exc)) from None
    return out, rx, ry, (a, b)


def _check_close_pre(f, x, y, X, Y, strict=True):
    if x not in X or y not in Y:
        raise InvalidInput("need x in X and y in Y")
    if not (f.is_endpoint(x) and f.is_endpoint(y)):
        raise InvalidInput("x and y must be endpoints")
    px = {f.pid[v] for v in X}
    py = {f.pid[v] for v in Y}
    if strict and px & py:
        raise InvalidInput("a path of the forest meets both X and Y")
    for v in X:
        if v != x and f.is_endpoint(v):
            raise InvalidInput(f"X contains another endpoint {v}")
    for v in Y:
        if v != y and f.is_endpoint(v):
            raise InvalidInput(f"Y contains another endpoint {v}")


def close_pair(g, f, x, y, X, Y, cfg=None, depth=None):
    """Join the paths ending at x and y via rotations inside X and Y.

    Returns (forest, report).  On failure the input forest is returned with
    report.status == "failed".
    """
    cfg = cfg or SolverConfig()
    X, Y = set(g.check_set(X)), set(g.check_set(Y))
    _require_no_isolated(f)
    _check_close_pre(f, x, y, X, Y)
    report = MergeReport(x, y)
    depth = 2 * cfg.depth_cap if depth is None else depth
    try:
        out, rx, ry, (a, b) = _close(g, f, x, y, X, Y, cfg, depth)
    except StageFailure as exc:
        report.status, report.stage, report.message, report.forest = "failed", exc.stage, exc.message, f
        return f, report
    report.edges_changed = len(net_change([rx, ry], [edge_key(a, b)]))
    report.note("close", x_end=a, y_end=b, x_steps=len(rx), y_steps=len(ry),
                pivots_x=rx.pivots, pivots_y=ry.pivots)
    report.forest = out
    return out, report


# -- steering ---------------------------------------------------------------

def _untouched(record, V, v):
    """F'[V - v] == F[V - v], read off the record's net edge change."""
    inside = V - {v}
    for a, b in net_change([record]):
        if a in inside and b in inside:
            return False
    return True


def steer_endpoint(g, f, u, U, V, cfg=None, depth=None):
    """Rotate endpoint u (pivots in int_F(U)) until the endpoint lands in V.

    Either some layer of the reach meets V directly, or a reached endpoint w
    has a graph neighbour z in int_F(V) away from the pivot zone; one more
    rotation with pivot z finishes.  Returns (forest, v, record).
    """
    cfg = cfg or SolverConfig()
    depth = cfg.depth_cap if depth is None else min(depth, cfg.depth_cap)
    U, V = set(U), set(V)
    if not f.is_endpoint(u):
        raise InvalidInput(f"{u} is not an endpoint")
    if u not in U:
        raise InvalidInput("u must lie in U")
    for v in V:
        if f.is_endpoint(v):
            raise InvalidInput(f"V contains endpoint {v}")
    _require_no_isolated(f)
    if depth < 1:
        raise StageFailure("steer", "no rotation budget left")
    search = ReachSearch(g, f, u, U, state_cap=cfg.reach_state_cap)
    int_v = interior(f, V)
    checked = 0
    for level in range(depth + 1):
        if level + 1 <= depth:
            # one-extra-rotation finish on the records not tried yet
            fresh = search.order[checked:]
            checked = len(search.order)
            for w in fresh:
                res = _finish_by_rotation(g, f, search, search.records[w], int_v, V)
                if res is not None:
                    return res
        if level == depth or search.exhausted():
            break
        layer = search.expand_layer(stop=lambda y: y in V)
        for y in layer:
            if y in V:
                rec = search.finalize(search.records[y])
                if _untouched(rec, V, y):
                    return replay(rec, f), y, rec
    raise StageFailure("steer", f"endpoint {u} could not be steered into the target set")


def _finish_by_rotation(g, f, search, rec, int_v, V):
    w = rec.u
    if w in V:
        return None
    zone = forest_zone(f, [rec.v] + rec.pivots, 2)
    for z in g.adj[w]:
        if z not in int_v or z in zone:
            continue
        work = replay(rec, f)
        options = [y for y in rotation_targets(work, w, z)
                   if y == z or edge_key(y, z) not in f.protected]
        if not options:
            continue
        step = make_step(work, w, z, min(options))
        full = search.finalize(rec.extended(step))
        if not _untouched(full, V, step.y):
            continue
        apply_step(work, step)
        return work, step.y, full
    return None


# -- merging ----------------------------------------------------------------

GROUPS = ("H1", "H2", "H3", "H4", "Hhop")


def medium_paths(f, cfg, skip=()):
    """Pieces of the paths whose vertex count is at least the medium floor.

    Paths are cut into consecutive pieces of at most the window's upper size
    (smaller still when needed so five groups can be balanced).  Pieces that
    contain a vertex of `skip`, and paths with protected edges, are left out.
    """
    lo, hi = cfg.medium_range(f.n)
    skip = set(skip)
    mass = sum(p[2] for p in f.paths.values() if p[2] >= lo)
    hi = max(lo, min(hi, mass // 30))
    out = []
    for e1, _, length in f.paths.values():
        if length < lo:
            continue
        p = list(f.walk(e1))
        if f.protected and any(f.is_protected(a, b) for a, b in zip(p, p[1:])):
            continue
        pieces = -(-length // hi)
        step = -(-length // pieces)
        out.extend(q for q in (p[i:i + step] for i in range(0, length, step)) if not skip & set(q))
    out.sort(key=lambda p: (-len(p), min(p)))
    return out


def split_groups(paths, k=5, family=None, classes=((0, 1), (2,), (3,), (4,))):
    """Balance pieces over k groups by mass, lightest group first.

    Pieces sharing a `family` value (pieces of one forest path) stay inside
    one class of groups; by default only the first two groups share.
    """
    if family is None:
        family = id
    if k != 5:
        classes = tuple((j,) for j in range(k))
    fams = {}
    for p in paths:
        fams.setdefault(family(p), []).append(p)
    order = sorted(fams.values(), key=lambda ps: (-sum(map(len, ps)), min(min(q) for q in ps)))
    groups = [[] for _ in range(k)]
    mass = [0] * k
    for ps in order:
        cls = min(classes, key=lambda c: (sum(mass[j] for j in c) / len(c), c))
        for p in sorted(ps, key=lambda q: (-len(q), min(q))):
            i = min(cls, key=lambda j: (mass[j], j))
            groups[i].append(p)
            mass[i] += len(p)
    return groups


def _stripped(paths):
    out = set()
    for p in paths:
        out.update(p[1:-1])
    return out


def _intact(f, p):
    return all(f.has_edge(a, b) for a, b in zip(p, p[1:]))


def merge_two_paths(g, f, x, y, cfg=None):
    """Remove endpoints x and y: one fewer path, End' = End - {x, y}.

    Returns (forest, report).  On any stage failure the ORIGINAL forest is
    returned and report.status == "failed".
    """
    cfg = cfg or SolverConfig()
    report = MergeReport(x, y)
    try:
        out = _merge(g, f, x, y, cfg, report)
    except StageFailure as exc:
        report.status, report.stage, report.message = "failed", exc.stage, exc.message
        report.forest = f
        return f, report
    report.forest = out
    return out, report


def _merge(g, f, x, y, cfg, report):
    n = f.n
    if x == y or not (f.is_endpoint(x) and f.is_endpoint(y)):
        raise InvalidInput("x and y must be two distinct endpoints")
    _require_no_isolated(f)
    orig, ends = f, {x, y}
    pre = None
    if f.same_path(x, y):
        # both ends of one path: first rotate one of them onto another path
        f, x, y, pre = _split_ends(g, f, x, y, cfg)
        report.note("split-ends", x=x, y=y)
    paths = medium_paths(f, cfg, skip=(x, y))
    mass = sum(len(p) for p in paths)
    if mass < cfg.mass_fraction * n or len(paths) < 5:
        raise StageFailure("precondition", f"medium path mass {mass} below {cfg.mass_fraction * n:.0f}")
    classes = ((0, 1), (2,), (3,), (4,)) if cfg.strict_close else (tuple(range(5)),)
    groups = split_groups(paths, family=lambda p: f.pid[p[0]], classes=classes)
    sets = [_stripped(gr) for gr in groups]
    report.note("partition", sizes=[len(s) for s in sets], paths=[len(gr) for gr in groups])
    budget = 2 * cfg.depth_cap + 3  # rotations; each changes at most two edges
    records = []

    def spend(rec):
        nonlocal budget
        budget -= len(rec)
        records.append(rec)
        if budget < 0:
            raise StageFailure("budget", "rotation budget exhausted")

    if pre is not None:
        spend(pre)

    def check(forest, stage):
        if cfg.self_check:
            forest.validate()

    try:
        # steering inside U1 and U2 needs self-expansion; the landing hop is checked when used
        U1, U2 = extract_forest_expanders(g, f, sets[:2], cfg, demands=[(0,), (1,)])
    except InvalidInput as exc:
        raise StageFailure("extract-12", str(exc)) from None
    report.note("extract-12", sizes=[len(U1), len(U2)])

    # land x and y in U1 and U2, protecting H3, H4, Hhop
    shielded = set()
    for gr in groups[2:]:
        for p in gr:
            shielded.update(p)
    Uall = set(range(n)) - shielded
    target = set(U1) | set(U2)
    f1, x1, r1 = steer_endpoint(g, f, x, Uall, target, cfg, depth=min(cfg.depth_cap, budget))
    spend(r1)
    check(f1, "steer-x")
    T = forest_zone(f, [x1], 2) | forest_zone(f1, [x1], 2)
    f2, y1, r2 = steer_endpoint(g, f1, y, Uall - T, target - T, cfg, depth=min(cfg.depth_cap, budget))
    spend(r2)
    check(f2, "steer-y")
    report.note("land", x1=x1, y1=y1, steps=[len(r1), len(r2)])
    cur = f2
    if (x1 in U1) == (y1 in U1):
        # both landed on the same side: one more hop for y1
        home = set(U2) if y1 in U1 else set(U1)
        zone = forest_zone(cur, [x1], 2)
        side = home - zone
        cur, y2, r3 = _hop(g, cur, y1, side, cfg)
        spend(r3)
        check(cur, "land-hop")
        report.note("land-hop", frm=y1, to=y2)
        y1 = y2
    a, b = (x1, y1) if x1 in U1 else (y1, x1)

    # next: expanders on the untouched paths of H3, H4, Hhop
    survivors = [[p for p in gr if _intact(cur, p)] for gr in groups[2:]]
    parts = [_stripped(gr) for gr in survivors]
    try:
        # close needs U3 and U4 to expand into themselves; the hop needs Uhop -> U3
        U3, U4, Uhop = extract_forest_expanders(g, cur, parts, cfg, demands=[(0,), (1,), (0, 2)])
    except InvalidInput as exc:
        raise StageFailure("extract-34h", str(exc)) from None
    report.note("extract-34h", sizes=[len(U3), len(U4), len(Uhop)])

    cur, h, r4 = steer_endpoint(g, cur, a, set(U1) | {a}, Uhop, cfg, depth=min(cfg.depth_cap, budget))
    spend(r4)
    check(cur, "hop-steer")
    cur, x4, r5 = steer_endpoint(g, cur, b, set(U2) | {b}, U4, cfg, depth=min(cfg.depth_cap, budget))
    spend(r5)
    check(cur, "steer-4")
    if cur.same_path(h, x4):
        report.note("hop-needed", h=h, x4=x4)
    cur, x3, r6 = _hop(g, cur, h, set(U3), cfg)
    spend(r6)
    check(cur, "hop")
    report.note("hop", h=h, x3=x3, x4=x4)
    if cur.same_path(x3, x4):
        raise StageFailure("hop", "x3 and x4 ended on the same path")
    try:
        # shared paths are tolerated unless strict: _close and the final audit catch conflicts
        _check_close_pre(cur, x3, x4, set(U3) | {x3}, set(U4) | {x4}, strict=cfg.strict_close)
    except InvalidInput as exc:
        raise StageFailure("close-pre", str(exc)) from None
    out, rx, ry, (c1, c2) = _close(g, cur, x3, x4, set(U3) | {x3}, set(U4) | {x4}, cfg, max(0, budget))
    spend(rx)
    spend(ry)
    report.note("close", crossing=[c1, c2], steps=[len(rx), len(ry)])

    # contract audit, against the forest we were given
    f, (x, y) = orig, sorted(ends)
    delta = f.edges() ^ out.edges()
    cap = 4 * cfg.depth_cap + 8
    if len(delta) > cap:
        raise StageFailure("budget", f"{len(delta)} edges changed, cap {cap}")
    if out.path_count() != f.path_count() - 1:
        raise StageFailure("audit", "path count did not drop by one")
    if out.endpoints() != f.endpoints() - {x, y}:
        raise StageFailure("audit", "endpoint set is not End - {x, y}")
    if out.isolated():
        raise StageFailure("audit", "isolated vertex created")
    for e in delta:
        if e in f.protected and e not in out.edges():
            raise StageFailure("audit", "protected edge broken")
    out.validate()
    report.edges_changed = len(delta)
    return out


def _split_ends(g, f, x, y, cfg):
    """x and y end the same path: rotate one end until it sits on another path."""
    for a, b in ((x, y), (y, x)):
        search = ReachSearch(g, f, a, None, state_cap=cfg.reach_state_cap)
        for _ in range(cfg.depth_cap):
            if search.exhausted():
                break
            for v in search.expand_layer():
                out = replay(search.records[v], f)
                if (not out.same_path(v, b) and out.is_endpoint(b)
                        and not out.isolated() and out.endpoints() == f.endpoints() - {a} | {v}):
                    return out, v, b, search.records[v]
    raise StageFailure("split-ends", "neither end can rotate onto another path")


def _hop(g, f, w, target, cfg):
    """One rotation from endpoint w whose pivot lies in int_F(target)."""
    inner = interior(f, target)
    for z in g.adj[w]:
        if z not in inner:
            continue
        options = [y for y in rotation_targets(f, w, z)
                   if y != w and (y == z or edge_key(y, z) not in f.protected)]
        options = [y for y in options if y in target and not f.is_endpoint(y)]
        if not options:
            continue
        step = make_step(f, w, z, min(options))
        if step.trivial:
            continue
        rec = RotationRecord(w, [step])
        return replay(rec, f), step.y, rec
    raise StageFailure("hop", f"endpoint {w} has no neighbour in the target interior")
