import random
import time

import pytest

from expanderham.forest import LinearForest
from expanderham.graph import Graph

_START = time.monotonic()
_CRITERIA = {}
RUNTIME_LIMIT = 600.0


def record_criterion(num, ok, detail=""):
    prev = _CRITERIA.get(num)
    if prev is not None:
        ok = ok and prev[0]
        detail = f"{prev[1]}; {detail}" if detail else prev[1]
    _CRITERIA[num] = (bool(ok), detail)


def elapsed():
    return time.monotonic() - _START


@pytest.fixture
def criterion():
    return record_criterion


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    total = elapsed()
    ok1, detail1 = _CRITERIA.get(1, (True, ""))
    ok1 = ok1 and total < RUNTIME_LIMIT
    _CRITERIA[1] = (ok1, f"{detail1 + '; ' if detail1 else ''}full suite {total:.1f}s (limit {RUNTIME_LIMIT:.0f}s)")
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        ok, detail = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_sessionfinish(session, exitstatus):
    if _CRITERIA and elapsed() >= RUNTIME_LIMIT:
        session.exitstatus = 1


# -- shared builders ------------------------------------------------------------

def random_forest_graph(rng, n, p=0.5, path_prob=0.5, isolated_ok=True):
    """A random graph together with a linear forest made of some of its edges.

    With isolated_ok=False every vertex lies on a path with at least 2 vertices.
    """
    perm = list(range(n))
    rng.shuffle(perm)
    paths = []
    i = 0
    while i < n:
        size = rng.randint(1, 5)
        if not isolated_ok:
            size = max(2, size)
            if n - (i + size) == 1:
                size += 1
        paths.append(perm[i:i + size])
        i += size
    if not isolated_ok and len(paths[-1]) == 1:
        paths[-2].extend(paths.pop())
    if isolated_ok:
        # randomly break some paths further
        out = []
        for path in paths:
            if len(path) > 1 and rng.random() > path_prob:
                cut = rng.randint(1, len(path) - 1)
                out += [path[:cut], path[cut:]]
            else:
                out.append(path)
        paths = out
    f = LinearForest.from_paths(n, paths)
    edges = {(min(u, v), max(u, v)) for u in range(n) for v in range(u + 1, n) if rng.random() < p}
    edges |= f.edges()
    return Graph(n, sorted(edges)), f


@pytest.fixture
def rng():
    return random.Random(12345)
