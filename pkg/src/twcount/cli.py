"""Command-line front door: treewidth, counting, backdoor search, generators.

JSON goes to stdout, diagnostics to stderr. Exit codes: 0 success, 2 input or
cap errors, 3 conclusive negative (no backdoor / size bound exceeded),
4 inconclusive (caps prevented a decision).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import backdoor as bd
from . import counting, generators, graphs, treewidth
from .formula import CnfFormula, DimacsError, FormulaError, parse_dimacs, write_dimacs

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NEGATIVE = 3
EXIT_INCONCLUSIVE = 4


def _emit(obj: dict) -> None:
    print(json.dumps(obj, sort_keys=True))


def _fail(msg: str, code: int = EXIT_INPUT) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def _load_graph(path: str, graph_mode: str) -> graphs.Graph:
    with open(path) as fh:
        text = fh.read()
    if path.endswith(".gr"):
        if graph_mode == "incidence":
            raise FormulaError(".gr input has no incidence form; use --graph raw")
        return graphs.read_gr(text)
    f = parse_dimacs(text)
    if graph_mode == "raw":
        raise FormulaError("DIMACS input is a formula; use --graph incidence")
    return graphs.build_incidence(f)


def _load_formula(path: str) -> CnfFormula:
    with open(path) as fh:
        return parse_dimacs(fh.read())


def cmd_tw(args) -> int:
    try:
        mode = args.graph or ("raw" if args.path.endswith(".gr") else "incidence")
        g = _load_graph(args.path, mode)
    except (OSError, FormulaError, ValueError) as exc:
        return _fail(str(exc))
    lower = treewidth.lower_bound(g)
    upper, td = treewidth.upper_bound_heuristic(g)
    exact = None
    if g.num_vertices() <= args.exact_cap:
        exact, td = treewidth.exact_treewidth(g, args.exact_cap)
    report = {
        "graph": mode,
        "n": g.num_vertices(),
        "m": g.num_edges(),
        "lower": lower,
        "upper": upper,
        "exact": exact,
        "width": exact if exact is not None else upper,
    }
    if args.out_td:
        _, id_map = graphs.write_gr(g)
        with open(args.out_td, "w") as fh:
            fh.write(treewidth.write_td(td, id_map))
        with open(args.out_td + ".map.json", "w") as fh:
            json.dump({str(k): v for k, v in id_map.items()}, fh, sort_keys=True)
        report["td"] = args.out_td
    _emit(report)
    return EXIT_OK


def cmd_count(args) -> int:
    try:
        f = _load_formula(args.path)
    except (OSError, FormulaError) as exc:
        return _fail(str(exc))
    start = time.monotonic()
    note = None
    try:
        if args.mode == "brute":
            count, mode, verdict = counting.count_bruteforce(f, cap=args.brute_cap), "brute", "counted"
            backdoor_vars, widths = None, None
        elif args.mode == "td":
            width, td = treewidth.upper_bound_heuristic(graphs.build_incidence(f))
            count, mode, verdict = counting.count_td(f, td), "td", "counted"
            backdoor_vars, widths = None, (width,)
        else:
            if args.mode == "backdoor":
                report = bd.approx_backdoor(
                    f, args.t, args.k, tw_threshold=args.tw_threshold, vertex_cap=args.exact_cap
                )
                if report is None:
                    result = counting.SolveResult("sb_exceeded", None, "backdoor", args.t, args.k)
                else:
                    count_val = counting.count_via_backdoor(
                        f, report.variables, args.t, verify=False,
                        vertex_cap=args.exact_cap, jobs=args.jobs,
                    )
                    result = counting.SolveResult(
                        "counted", count_val, "backdoor", args.t, args.k, backdoor=report.variables
                    )
            else:
                result = counting.solve(
                    f, args.t, args.k, tw_threshold=args.tw_threshold, vertex_cap=args.exact_cap
                )
            count, mode, verdict = result.count, result.mode, result.outcome
            backdoor_vars = list(result.backdoor) if result.backdoor else None
            widths = result.branch_widths
            note = result.note
    except (counting.VariableCapExceeded, FormulaError) as exc:
        return _fail(str(exc))
    except bd.InconclusiveTreewidth as exc:
        _emit({"verdict": "inconclusive", "reason": str(exc), "t": args.t, "k": args.k})
        return EXIT_INCONCLUSIVE
    report = {
        "mode": mode,
        "verdict": verdict,
        "count": str(count) if count is not None else None,
        "t": args.t,
        "k": args.k,
        "backdoor": backdoor_vars,
        "branch_widths": list(widths) if widths else None,
        "wall_clock_ms": round(1000 * (time.monotonic() - start), 3),
        "note": note,
    }
    _emit(report)
    if verdict == "sb_exceeded":
        return EXIT_NEGATIVE
    if verdict == "inconclusive":
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _report_json(report: bd.BackdoorReport) -> dict:
    return {
        "kind": report.kind,
        "t": report.t,
        "variables": list(report.variables),
        "size": report.size,
        "valid": report.valid,
        "failing_assignment": dict(report.failing_assignment.items())
        if report.failing_assignment is not None
        else None,
        "failing_bound": report.failing_bound,
        "stats": {"nodes": report.stats.nodes, "checks": report.stats.checks}
        if report.stats
        else None,
    }


def cmd_backdoor(args) -> int:
    try:
        f = _load_formula(args.path)
    except (OSError, FormulaError) as exc:
        return _fail(str(exc))
    try:
        if args.action == "verify":
            if not args.vars:
                return _fail("verify needs --vars")
            b = frozenset(int(x) for x in args.vars.split(","))
            if args.deletion:
                report = bd.is_deletion_backdoor(f, b, args.t, vertex_cap=args.exact_cap)
            else:
                report = bd.is_strong_backdoor(f, b, args.t, vertex_cap=args.exact_cap)
            _emit(_report_json(report))
            return EXIT_OK if report.valid else EXIT_NEGATIVE
        if args.mode == "exact":
            report = bd.find_smallest_strong_backdoor(f, args.t, args.kmax, vertex_cap=args.exact_cap)
        else:
            report = bd.approx_backdoor(
                f, args.t, args.kmax, tw_threshold=args.tw_threshold, vertex_cap=args.exact_cap
            )
        if report is None:
            _emit({"found": False, "t": args.t, "kmax": args.kmax})
            return EXIT_NEGATIVE
        _emit({"found": True, **_report_json(report)})
        return EXIT_OK
    except FormulaError as exc:
        return _fail(str(exc))
    except bd.InconclusiveTreewidth as exc:
        _emit({"verdict": "inconclusive", "reason": str(exc)})
        return EXIT_INCONCLUSIVE


def cmd_generate(args) -> int:
    try:
        if args.family == "grid":
            text = write_dimacs(generators.gen_grid_formula(args.n))
        elif args.family == "grid-x":
            text = write_dimacs(generators.gen_grid_formula_x(args.n))
        elif args.family == "random":
            text = write_dimacs(
                generators.gen_random_cnf(args.n, args.m, args.width, args.seed)
            )
        elif args.family == "planted":
            f, planted = generators.gen_planted(args.n, args.t, args.k, args.seed)
            comment = "c planted " + " ".join(str(v) for v in sorted(planted))
            text = comment + "\n" + write_dimacs(f)
        elif args.family == "wall":
            g, _ = graphs.make_wall(args.n)
            text, id_map = graphs.write_gr(g)
            if args.out:
                with open(args.out + ".map.json", "w") as fh:
                    json.dump({str(k): v for k, v in id_map.items()}, fh, sort_keys=True)
        else:  # pragma: no cover
            return _fail(f"unknown family {args.family}")
    except (FormulaError, ValueError) as exc:
        return _fail(str(exc))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twcount", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    tw = sub.add_parser("tw", help="treewidth bounds and exact value")
    tw.add_argument("path")
    tw.add_argument("--exact-cap", type=int, default=treewidth.DEFAULT_VERTEX_CAP)
    tw.add_argument("--graph", choices=["incidence", "raw"], default=None)
    tw.add_argument("--out-td", default=None)
    tw.set_defaults(func=cmd_tw)

    cnt = sub.add_parser("count", help="model counting")
    cnt.add_argument("path")
    cnt.add_argument("--t", type=int, default=1)
    cnt.add_argument("--k", type=int, default=2)
    cnt.add_argument("--mode", choices=["auto", "td", "brute", "backdoor"], default="auto")
    cnt.add_argument("--tw-threshold", type=int, default=8)
    cnt.add_argument("--exact-cap", type=int, default=treewidth.DEFAULT_VERTEX_CAP)
    cnt.add_argument("--brute-cap", type=int, default=counting.BRUTE_FORCE_CAP)
    cnt.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    cnt.set_defaults(func=cmd_count)

    b = sub.add_parser("backdoor", help="find or verify strong backdoor sets")
    b.add_argument("path")
    b.add_argument("action", choices=["find", "verify"])
    b.add_argument("--t", type=int, default=1)
    b.add_argument("--kmax", type=int, default=2)
    b.add_argument("--vars", default=None, help="comma-separated variable ids (verify)")
    b.add_argument("--deletion", action="store_true", help="verify as a deletion backdoor")
    b.add_argument("--mode", choices=["exact", "approx"], default="exact")
    b.add_argument("--tw-threshold", type=int, default=8)
    b.add_argument("--exact-cap", type=int, default=treewidth.DEFAULT_VERTEX_CAP)
    b.set_defaults(func=cmd_backdoor)

    g = sub.add_parser("generate", help="emit benchmark instances")
    g.add_argument("--family", choices=["grid", "grid-x", "planted", "random", "wall"], required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, default=0)
    g.add_argument("--width", type=int, default=3)
    g.add_argument("--t", type=int, default=1)
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_generate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DimacsError as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
