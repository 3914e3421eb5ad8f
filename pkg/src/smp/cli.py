"""Command-line interface.

Exit codes: 0 success, 1 domain error (reported as a JSON body on stdout),
2 usage error.  All output is deterministic JSON (or DOT with --dot).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .iteration import solve_quota_filling, solve_xmin_modified
from .mincost import min_cost_stable
from .model import (
    Instance,
    InstanceError,
    format_rational,
    full_assignment,
    parse_assignment,
    parse_instance,
    parse_rational,
    serialize_assignment,
    serialize_instance,
)
from .poset import build_poset, grid_sublattice, enumerate_fully_closed, gamma, omega, run_route
from .rotations import build_active_structure, extract_rotation, maximal_components
from .stability import stability_report


def _load_instance(path: str) -> Instance:
    return parse_instance(Path(path).read_text())


def _emit(doc) -> None:
    json.dump(doc, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _rotation_doc(rot) -> dict:
    return {
        "component": list(rot.component.vertices),
        "values": {e: format_rational(v) for e, v in sorted(rot.values.items()) if v},
        "tau": format_rational(rot.tau),
    }


def _cmd_check(args) -> int:
    inst = _load_instance(args.instance)
    x = parse_assignment(Path(args.assignment).read_text(), inst)
    report = stability_report(inst, x)
    _emit(
        {
            "stable": report.stable,
            "blocking_edges": report.blocking_edges,
            "fully_filled": sorted(report.fully_filled),
            "deficit": sorted(report.deficit),
        }
    )
    return 0


def _cmd_solve(args) -> int:
    inst = _load_instance(args.instance)
    trace: list = [] if args.trace else None
    if args.method == "quota-filling":
        res = solve_quota_filling(inst)
        if not res.quota_filling:
            _emit({"quota_filling": False})
            return 0
        x = res.assignment
        if args.side == "firms":
            from .rotations import route_to_terminal

            x, _ = route_to_terminal(inst.swapped(), x)
            x = full_assignment(inst, x)
    else:
        x = solve_xmin_modified(inst, trace=trace)
        if args.side == "workers":
            from .rotations import route_to_terminal

            x, _ = route_to_terminal(inst, x)
    doc = serialize_assignment(x)
    if args.trace:
        doc["trace"] = [
            {"kind": kind, "round": rnd, "values": {e: format_rational(v) for e, v in sorted(y.items())}}
            for kind, rnd, y in trace
        ]
    _emit(doc)
    return 0


def _cmd_rotations(args) -> int:
    inst = _load_instance(args.instance)
    if args.at:
        x = parse_assignment(Path(args.at).read_text(), inst)
    else:
        x = solve_xmin_modified(inst)
    act = build_active_structure(inst, x)
    comps = maximal_components(inst, act)
    rots = [extract_rotation(inst, x, c, act) for c in comps]
    if args.dot:
        lines = ["digraph active {"]
        for v in sorted(act.regular):
            lines.append(f'  "{v}";')
        for f in sorted(act.regular_firms):
            for e in sorted(act.potential_head[f]):
                lines.append(f'  "{f}" -> "{inst.edge_by_id[e].other(f)}" [label="{e}"];')
        for w in sorted(act.regular_workers):
            for e in sorted(act.head[w]):
                lines.append(f'  "{w}" -> "{inst.edge_by_id[e].other(w)}" [label="{e}"];')
        lines.append("}")
        sys.stdout.write("\n".join(lines) + "\n")
        return 0
    _emit([_rotation_doc(r) for r in rots])
    return 0


def _cmd_poset(args) -> int:
    inst = _load_instance(args.instance)
    poset = build_poset(inst)
    if args.dot:
        lines = ["digraph poset {"]
        for i, rot in enumerate(poset.rotations):
            lines.append(f'  r{i} [label="r{i} (tau={format_rational(poset.tau[i])})"];')
        for (a, b) in poset.hasse:
            lines.append(f"  r{a} -> r{b};")
        lines.append("}")
        sys.stdout.write("\n".join(lines) + "\n")
        return 0
    _emit(
        {
            "rotations": [_rotation_doc(r) for r in poset.rotations],
            "tau": {str(i): format_rational(t) for i, t in poset.tau.items()},
            "hasse_edges": [[a, b] for (a, b) in poset.hasse],
        }
    )
    return 0


def _cmd_mincost(args) -> int:
    inst = _load_instance(args.instance)
    costs = None
    if args.costs:
        raw = json.loads(Path(args.costs).read_text())
        costs = {str(e): parse_rational(c) for e, c in raw.items()}
    res = min_cost_stable(inst, costs)
    _emit(
        {
            "assignment": serialize_assignment(res.assignment)["values"],
            "cost": format_rational(res.cost),
            "ideal": sorted(res.ideal),
        }
    )
    return 0


def _cmd_enumerate(args) -> int:
    inst = _load_instance(args.instance)
    poset = build_poset(inst)
    if args.grid:
        assignments = grid_sublattice(inst, poset, args.grid)
    else:
        assignments = [
            gamma(inst, poset, lam) for lam in enumerate_fully_closed(poset)
        ]
    _emit([serialize_assignment(x)["values"] for x in assignments])
    return 0


def _cmd_verify(args) -> int:
    inst = _load_instance(args.instance)
    ledger: dict[str, str] = {}

    def run(name, fn):
        try:
            fn()
            ledger[name] = "pass"
        except Exception as exc:  # noqa: BLE001 - ledger reports, not raises
            ledger[name] = f"fail: {exc}"

    state = {}

    def roundtrip():
        assert parse_instance(serialize_instance(inst)).edge_ids == inst.edge_ids

    def solve():
        state["xmin"] = solve_xmin_modified(inst)
        assert stability_report(inst, state["xmin"]).stable

    def route():
        state["route"] = run_route(inst, state["xmin"])
        assert len(state["route"].steps) <= 2 * len(inst.edges)

    def poset_checks():
        state["poset"] = build_poset(inst, state["xmin"])

    def bijection():
        poset = state["poset"]
        for lam in enumerate_fully_closed(poset):
            x = gamma(inst, poset, lam)
            assert omega(inst, poset, x).key() == lam.key()

    run("parse_roundtrip", roundtrip)
    run("solve_stable", solve)
    if "xmin" in state:
        run("route_bound", route)
        run("poset_consistency", poset_checks)
    if "poset" in state:
        run("closed_function_bijection", bijection)
    _emit(ledger)
    return 0 if all(v == "pass" for v in ledger.values()) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="smp", description="Stable assignments on capacitated bipartite graphs"
    )
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="stability of an assignment")
    c.add_argument("instance")
    c.add_argument("assignment")
    c.set_defaults(fn=_cmd_check)

    s = sub.add_parser("solve", help="side-optimal stable assignment")
    s.add_argument("instance")
    s.add_argument("--side", choices=["firms", "workers"], default="firms")
    s.add_argument("--method", choices=["modified", "quota-filling"], default="modified")
    s.add_argument("--trace", action="store_true")
    s.set_defaults(fn=_cmd_solve)

    r = sub.add_parser("rotations", help="applicable rotations at an assignment")
    r.add_argument("instance")
    r.add_argument("--at")
    r.add_argument("--dot", action="store_true")
    r.set_defaults(fn=_cmd_rotations)

    o = sub.add_parser("poset", help="rotation poset")
    o.add_argument("instance")
    o.add_argument("--dot", action="store_true")
    o.set_defaults(fn=_cmd_poset)

    m = sub.add_parser("mincost", help="minimum-cost stable assignment")
    m.add_argument("instance")
    m.add_argument("--costs")
    m.set_defaults(fn=_cmd_mincost)

    e = sub.add_parser("enumerate", help="enumerate stable assignments")
    e.add_argument("instance")
    e.add_argument("--grid", type=int)
    e.set_defaults(fn=_cmd_enumerate)

    v = sub.add_parser("verify", help="run the invariant suite on an instance")
    v.add_argument("instance")
    v.set_defaults(fn=_cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (InstanceError, FileNotFoundError, json.JSONDecodeError, ValueError) as exc:
        _emit({"error": str(exc)})
        return 1


if __name__ == "__main__":
    sys.exit(main())
