"""Command-line entry point: gen, check, solve, verify, bench, selftest.

Exit codes: 0 success (cycle/path found, check not refuted, cycle verified),
2 negative answer (not found, refuted, verification failed), 1 input error.
"""
import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from .config import SolverConfig
from .errors import InvalidInput, StageFailure
from .graph import read_graph_file, save_graph, write_graph_file

SUITES = {
    "small": (200, 8),
    "desk": (1000, 20),
    "large": (5000, 30),
    "path500": (500, 20),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser():
    p = _Parser(prog="expanderham", description="Hamilton cycles in expander graphs")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="generate a graph")
    gen.add_argument("kind", choices=["regular", "gnp", "cayley", "fixture"])
    gen.add_argument("params", nargs="*",
                     help="regular: n d | gnp: n p | cayley: group param d | fixture: name [args]")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("-o", "--output")

    chk = sub.add_parser("check", help="certify or refute C-expansion")
    chk.add_argument("file")
    chk.add_argument("--c", type=float, required=True, dest="C")
    mode = chk.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_const", const="exact", dest="mode")
    mode.add_argument("--sampled", action="store_const", const="sampled", dest="mode")
    mode.add_argument("--spectral", action="store_const", const="spectral", dest="mode")
    chk.add_argument("--seed", type=int, default=0)

    sol = sub.add_parser("solve", help="find a Hamilton cycle (or an x-y Hamilton path)")
    sol.add_argument("file")
    sol.add_argument("--path", nargs=2, type=int, metavar=("X", "Y"))
    sol.add_argument("--seed", type=int)
    sol.add_argument("--config")
    sol.add_argument("--trace", action="store_true", help="stage timings and merge counts on stderr")
    sol.add_argument("--json", action="store_true")
    sol.add_argument("--deterministic", action="store_true", help="omit timings from JSON output")
    sol.add_argument("--emit-potential-log", metavar="CSV")

    ver = sub.add_parser("verify", help="check a cycle file against a graph")
    ver.add_argument("graph")
    ver.add_argument("cycle")

    ben = sub.add_parser("bench", help="solve a seeded suite of random regular graphs")
    ben.add_argument("--suite", default="desk", choices=sorted(SUITES))
    ben.add_argument("--seeds", default="0..4", help="inclusive range a..b")
    ben.add_argument("--csv")
    ben.add_argument("--jobs", type=int, default=1)
    ben.add_argument("--config")

    sub.add_parser("selftest", help="quick end-to-end sanity checks")
    return p


# -- helpers ---------------------------------------------------------------

def _label(g, v):
    return g.labels[v] if g.labels is not None else v


def _unlabel(g, v):
    if g.labels is None:
        return v
    try:
        return g.labels.index(v)
    except ValueError:
        raise InvalidInput(f"unknown vertex {v}") from None


def _seed_range(text):
    a, sep, b = text.partition("..")
    try:
        lo = int(a)
        hi = int(b) if sep else lo
    except ValueError:
        raise InvalidInput(f"bad seed range {text!r}, expected a..b") from None
    if hi < lo:
        raise InvalidInput("empty seed range")
    return range(lo, hi + 1)


def _config(path=None, **overrides):
    if path:
        return SolverConfig.from_file(path, **overrides)
    return SolverConfig(**{k: v for k, v in overrides.items() if v is not None})


# -- commands ----------------------------------------------------------------

def cmd_gen(args):
    from .generators import fixture, gnp, random_cayley, random_regular

    ps = args.params
    try:
        if args.kind == "regular":
            g = random_regular(int(ps[0]), int(ps[1]), seed=args.seed)
        elif args.kind == "gnp":
            g = gnp(int(ps[0]), float(ps[1]), seed=args.seed)
        elif args.kind == "cayley":
            g = random_cayley(ps[0], int(ps[1]), int(ps[2]), seed=args.seed)
        else:
            g = fixture(ps[0], *(int(x) for x in ps[1:]))
    except (IndexError, ValueError):
        raise InvalidInput(f"bad parameters for {args.kind}: {' '.join(ps)}") from None
    if args.output:
        write_graph_file(g, args.output)
    else:
        sys.stdout.write(save_graph(g))
    return 0


def cmd_check(args):
    from .expansion import (check_c_expander, check_c_expander_exact, check_c_expander_sampled,
                            estimate_lambda)

    g = read_graph_file(args.file)
    cfg = SolverConfig(seed=args.seed)
    if args.mode == "spectral":
        est = estimate_lambda(g, cfg)
        print(json.dumps({"d": est.d, "lambda": est.lam, "mu2": est.mu2, "regular": est.regular,
                          "mode": est.mode, "ratio": est.lam / est.d if est.d else None}))
        return 0
    if args.mode == "exact":
        verdict = check_c_expander_exact(g, args.C, cfg)
    elif args.mode == "sampled":
        verdict = check_c_expander_sampled(g, args.C, cfg)
    else:
        verdict = check_c_expander(g, args.C, cfg)
    out = verdict.to_dict()
    if verdict.witness and g.labels is not None:
        out["witness"] = [sorted(_label(g, v) for v in part) for part in verdict.witness]
    print(json.dumps(out))
    return 2 if verdict.refuted else 0


def cmd_solve(args):
    from .pipeline import find_hamilton_cycle, find_hamilton_path

    g = read_graph_file(args.file)
    cfg = _config(args.config, seed=args.seed)
    if args.path:
        x, y = (_unlabel(g, v) for v in args.path)
        report = find_hamilton_path(g, x, y, cfg)
    else:
        report = find_hamilton_cycle(g, cfg)
    if args.emit_potential_log:
        with open(args.emit_potential_log, "w") as fh:
            fh.write(report.potential_csv())
    if args.trace:
        t = ", ".join(f"{k}={v:.3f}s" for k, v in report.timings.items())
        print(f"[trace] outcome={report.outcome} merges={report.merges} "
              f"merge_failures={report.merge_failures} fallback={report.fallback_used} {t}",
              file=sys.stderr)
        if report.stage:
            print(f"[trace] last stage failure: {report.stage}: {report.message}", file=sys.stderr)
    seq = None if report.cycle is None else [_label(g, v) for v in report.cycle]
    if args.json:
        out = report.to_dict()
        out["cycle"] = seq
        if args.deterministic:
            out.pop("timings")
        print(json.dumps(out, sort_keys=True))
    elif seq is not None:
        sys.stdout.write("".join(f"{v}\n" for v in seq))
    else:
        print("not found", file=sys.stderr)
    return 0 if report.found else 2


def _read_cycle(path):
    out = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                out.append(int(line))
            except ValueError:
                raise InvalidInput(f"{path} line {lineno}: expected one vertex id") from None
    return out


def cmd_verify(args):
    from .pipeline import verify_hamilton_cycle

    g = read_graph_file(args.graph)
    seq = [_unlabel(g, v) for v in _read_cycle(args.cycle)]
    if verify_hamilton_cycle(g, seq):
        print("OK")
        return 0
    print("FAIL")
    return 2


def _bench_one(job):
    from .generators import random_regular
    from .pipeline import find_hamilton_cycle

    n, d, seed, cfg = job
    g = random_regular(n, d, seed=seed)
    t = time.perf_counter()
    report = find_hamilton_cycle(g, cfg.with_(seed=seed))
    ms = int(round((time.perf_counter() - t) * 1000))
    return {"seed": seed, "n": n, "d": d, "outcome": report.outcome, "merges": report.merges,
            "fallback": int(report.fallback_used), "millis": ms}


def cmd_bench(args):
    n, d = SUITES[args.suite]
    cfg = _config(args.config)
    jobs = [(n, d, s, cfg) for s in _seed_range(args.seeds)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_bench_one, jobs))
    else:
        rows = [_bench_one(j) for j in jobs]
    cols = ["seed", "n", "d", "outcome", "merges", "fallback", "millis"]
    text = ",".join(cols) + "\n" + "".join(",".join(str(r[c]) for c in cols) + "\n" for r in rows)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return 0 if all(r["outcome"] == "cycle" for r in rows) else 2


def cmd_selftest(args):
    from .generators import fixture, random_regular
    from .linking import build_linking_blueprint
    from .oracle import held_karp, verify_linking_exhaustive
    from .pipeline import find_hamilton_cycle, find_hamilton_path, verify_hamilton_path

    checks = []
    r = find_hamilton_cycle(fixture("complete", 8))
    checks.append(("K8 cycle", r.found and r.verified))
    r = find_hamilton_cycle(fixture("petersen"))
    checks.append(("Petersen not found", not r.found and not held_karp(fixture("petersen"))[0]))
    g = fixture("complete", 6)
    r = find_hamilton_path(g, 0, 5)
    checks.append(("K6 path", r.found and verify_hamilton_path(g, r.cycle, 0, 5)))
    checks.append(("linking N=3", verify_linking_exhaustive(build_linking_blueprint(3))))
    g = random_regular(1000, 20, seed=0)
    r = find_hamilton_cycle(g)
    checks.append(("random 20-regular n=1000", r.found and r.verified))
    for name, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    return 0 if all(ok for _, ok in checks) else 2


COMMANDS = {"gen": cmd_gen, "check": cmd_check, "solve": cmd_solve, "verify": cmd_verify,
            "bench": cmd_bench, "selftest": cmd_selftest}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return COMMANDS[args.cmd](args)
    except (InvalidInput, StageFailure, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
