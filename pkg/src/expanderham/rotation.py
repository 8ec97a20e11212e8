"""1-rotations, k-rotations and the endpoint-reach search."""
import json
from dataclasses import dataclass, field

from .errors import InvalidInput
from .forest import edge_key, forest_zone, interior


@dataclass(frozen=True)
class RotationStep:
    x: int  # old endpoint of this 1-rotation
    z: int  # pivot
    y: int  # new endpoint
    broken: tuple = None  # forest edge yz removed (None when z was isolated)
    added: tuple = None  # graph edge xz added

    @property
    def trivial(self):
        return self.broken is not None and self.broken == self.added


@dataclass
class RotationRecord:
    """Replayable log of a k-rotation starting at endpoint v and ending at u."""

    v: int
    steps: list = field(default_factory=list)
    excluded: frozenset = frozenset()

    @property
    def u(self):
        return self.steps[-1].y if self.steps else self.v

    @property
    def pivots(self):
        return [s.z for s in self.steps]

    @property
    def new_endpoints(self):
        return [s.y for s in self.steps]

    def broken_edges(self):
        return [s.broken for s in self.steps if s.broken is not None]

    def added_edges(self):
        return [s.added for s in self.steps]

    def __len__(self):
        return len(self.steps)

    def extended(self, step):
        return RotationRecord(self.v, self.steps + [step])

    def apply(self, f):
        for s in self.steps:
            apply_step(f, s)
        return f

    def undo(self, f):
        for s in reversed(self.steps):
            undo_step(f, s)
        return f

    def to_dict(self):
        return {
            "v": self.v,
            "u": self.u,
            "steps": [{"x": s.x, "z": s.z, "y": s.y,
                       "broken": list(s.broken) if s.broken else None,
                       "added": list(s.added)} for s in self.steps],
            "excluded": sorted(self.excluded),
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d):
        steps = [RotationStep(s["x"], s["z"], s["y"],
                              tuple(s["broken"]) if s["broken"] else None, tuple(s["added"]))
                 for s in d["steps"]]
        return cls(d["v"], steps, frozenset(d.get("excluded", ())))


def apply_step(f, s):
    if s.broken is not None:
        f.remove_edge(*s.broken)
    f.add_edge(*s.added)


def undo_step(f, s):
    f.remove_edge(*s.added)
    if s.broken is not None:
        f.add_edge(*s.broken)


def closer_neighbor(f, x, z):
    """For z on x's path: the forest neighbour of z on the z..x stretch."""
    a, b = f.nb[z]
    if a == x or b == x:
        return x
    if a < 0 or b < 0:
        # z is the far end of x's path
        return a if a >= 0 else b
    wa, wb = f.walk(a, z), f.walk(b, z)
    while True:
        va = next(wa, None)
        if va is None:
            # a-direction ended without meeting x: x lies the other way
            return b
        if va == x:
            return a
        vb = next(wb, None)
        if vb is None:
            return a
        if vb == x:
            return b


def rotation_targets(f, x, z):
    """Legal new endpoints y for a 1-rotation with old endpoint x and pivot z."""
    if f.is_isolated(z):
        return [z]
    if f.pid[x] == f.pid[z]:
        return [closer_neighbor(f, x, z)]
    return f.neighbors(z)


def make_step(f, x, z, y):
    if y == z:
        return RotationStep(x, z, z, None, edge_key(x, z))
    return RotationStep(x, z, y, edge_key(y, z), edge_key(x, z))


def rotate1(g, f, x, z, side=None):
    """One rotation on a copy of f.  Returns (new forest, record)."""
    if not 0 <= x < f.n or not 0 <= z < f.n:
        raise InvalidInput("vertex out of range")
    if not f.is_endpoint(x):
        raise InvalidInput(f"{x} is not an endpoint")
    if x == z or not g.has_edge(x, z):
        raise InvalidInput(f"({x},{z}) is not a graph edge")
    options = rotation_targets(f, x, z)
    if side is None:
        y = min(options)
    elif side in options:
        y = side
    else:
        raise InvalidInput(f"{side} is not a legal new endpoint for pivot {z}")
    if y != z and f.is_protected(y, z):
        raise InvalidInput(f"edge ({y},{z}) is protected")
    step = make_step(f, x, z, y)
    out = f.copy()
    apply_step(out, step)
    return out, RotationRecord(x, [step])


class ReachSearch:
    """Layered search over k-rotations from endpoint v with pivots in int_F(U).

    States are distinct rotation sequences up to their effect (current
    endpoint, pivots used, edges broken and added).  Every state is expanded
    until `state_cap` states exist; beyond that only states that reach a new
    endpoint are kept.  Pivots are tried in ascending id order and the first
    record per endpoint is kept.
    """

    def __init__(self, g, f, v, u=None, state_cap=20000, protected=None):
        if not f.is_endpoint(v):
            raise InvalidInput(f"{v} is not an endpoint")
        self.g = g
        self.f = f
        self.v = v
        self.work = f.copy()
        self.pos, self.opid = f.positions()
        self.int_u = None if u is None else interior(f, u)
        self.state_cap = state_cap
        self.protected = f.protected if protected is None else frozenset(protected)
        self.records = {v: RotationRecord(v, [])}
        self.order = [v]
        self.layers = [[v]]
        self.frontier = [(v, ())]
        self.seen = {(v, frozenset(), frozenset(), frozenset())}
        self.states = 1
        self._applied = ()

    def far(self, a, b):
        return self.opid[a] != self.opid[b] or abs(self.pos[a] - self.pos[b]) >= 3

    def _switch(self, steps):
        cur = self._applied
        i = 0
        while i < len(cur) and i < len(steps) and cur[i] is steps[i]:
            i += 1
        for s in reversed(cur[i:]):
            undo_step(self.work, s)
        for s in steps[i:]:
            apply_step(self.work, s)
        self._applied = steps

    def legal_pivots(self, x, pivots):
        g, int_u, v = self.g, self.int_u, self.v
        for z in g.adj[x]:
            if int_u is not None and z not in int_u:
                continue
            if not self.far(z, v):
                continue
            ok = True
            for p in pivots:
                if not self.far(z, p):
                    ok = False
                    break
            if ok:
                yield z

    def expand_layer(self, stop=None):
        """Grow one layer.  Returns the list of endpoints first reached in it."""
        new_layer = []
        nxt = []
        work = self.work
        for x, steps in self.frontier:
            self._switch(steps)
            pivots = [s.z for s in steps]
            for z in self.legal_pivots(x, pivots):
                for y in rotation_targets(work, x, z):
                    if y != z and edge_key(y, z) in self.protected:
                        continue
                    step = make_step(work, x, z, y)
                    if step.trivial:
                        continue
                    key = (y, frozenset(pivots + [z]),
                           frozenset(s.broken for s in steps + (step,) if s.broken),
                           frozenset(s.added for s in steps + (step,)))
                    if key in self.seen:
                        continue
                    fresh = y not in self.records
                    if self.states >= self.state_cap and not fresh:
                        continue
                    self.seen.add(key)
                    self.states += 1
                    new_steps = steps + (step,)
                    nxt.append((y, new_steps))
                    if fresh:
                        self.records[y] = RotationRecord(self.v, list(new_steps))
                        self.order.append(y)
                        new_layer.append(y)
                        if stop is not None and stop(y):
                            self._switch(())
                            self.layers.append(new_layer)
                            self.frontier = nxt
                            return new_layer
        self._switch(())
        self.layers.append(new_layer)
        self.frontier = nxt
        return new_layer

    def exhausted(self):
        return not self.frontier

    def pivot_zone(self, radius=2):
        """Vertices within `radius` (in the original forest) of v and all pivots used."""
        centers = {self.v}
        for r in self.records.values():
            centers.update(r.pivots)
        return forest_zone(self.f, centers, radius)

    def finalize(self, rec):
        """Attach the materialised exclusion zone (forest distance < 3)."""
        rec.excluded = frozenset(forest_zone(self.f, [rec.v] + rec.pivots, 2))
        return rec


class ReachMap(dict):
    """Endpoint -> witnessing RotationRecord, plus search metadata."""

    layers = ()
    states = 0


def endpoint_reach(g, f, v, u, k, cfg=None, stop=None, target_size=None, state_cap=None):
    """Endpoints reachable from v by at most k rotations with pivots in int_F(U).

    `u=None` means U = V(G).
    """
    if cfg is not None and k > cfg.depth_cap:
        raise InvalidInput(f"depth {k} exceeds depth_cap {cfg.depth_cap}")
    cap = state_cap if state_cap is not None else (cfg.reach_state_cap if cfg else 20000)
    search = ReachSearch(g, f, v, u, state_cap=cap)
    for _ in range(k):
        if search.exhausted():
            break
        layer = search.expand_layer(stop=stop)
        if stop is not None and any(stop(y) for y in layer):
            break
        if target_size is not None and len(search.records) >= target_size:
            break
    out = ReachMap()
    for y in search.order:
        out[y] = search.finalize(search.records[y])
    out.layers = [list(layer) for layer in search.layers]
    out.states = search.states
    return out


def endpoint_change_audit(record, before, after):
    """Check the endpoint bookkeeping of a rotation record.

    End(after) = (End(before) + {u}) - {v}; u is the only possible isolated
    vertex of `after`; and every pivot is a forest neighbour in `before` of one
    of the record's new endpoints (or equals one), so at most 2|S| pivots.
    """
    v, u = record.v, record.u
    end_b = before.endpoints()
    end_a = after.endpoints()
    if end_a != (end_b | {u}) - {v} and not (u == v and end_a == end_b):
        return False
    iso = set(after.isolated())
    if iso - {u}:
        return False
    if u in iso and u not in end_b:
        return False
    s = set(record.new_endpoints)
    if len(set(record.pivots)) > 2 * max(1, len(s)):
        return False
    for st in record.steps:
        z = st.z
        if z in s:
            continue
        if not any(w in s for w in before.neighbors(z)):
            return False
    return True


def replay(record, f):
    """Apply a record to a copy of f."""
    out = f.copy()
    record.apply(out)
    return out
