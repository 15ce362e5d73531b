"""Command line front end.

Subcommands: validate, eval, axioms, moves, apply, search, optimize,
faultsim.  All outputs are machine readable with stable ordering, all
randomness is seed controlled, and exit codes are 0 for success, 1 for
domain errors or failed validation, 2 for usage and parse errors.  Set
QNET_LOG to a level name (debug, info, ...) for diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from .axioms import check_axioms
from .errors import QnetError
from .faults import FaultMask, RegionSpec, Timeline, adaptive_run, slide_isolate, taint_propagate
from .netfile import ParseError, encode_colour, parse, serialize, to_doc
from .network import canonical_key, processes, propagate, terminal_colours, validate
from .optimize import (
    COORDINATE,
    GRID,
    Objective,
    ObjectiveKind,
    chernoff_objective,
    local_objective,
    optimize_params,
)
from .rewrite import ALL_KINDS, MoveKind, apply_move, equivalence_class, find_moves

log = logging.getLogger("qnet")

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


def _emit(payload) -> None:
    print(json.dumps(payload, sort_keys=True))


def _load(path):
    nf = parse(path)
    return nf


def cmd_validate(args) -> int:
    nf = _load(args.path)
    report = validate(nf.network)
    _emit({
        "path": args.path,
        "valid": report.ok,
        "violations": [
            {"code": v.code, "message": v.message, "ids": list(v.ids)}
            for v in report.violations
        ],
    })
    return EXIT_OK if report.ok else EXIT_DOMAIN


def _flatten_colour(eid, colour):
    row = {"edge": eid}
    for key, value in sorted(encode_colour(colour).items()):
        arr = np.asarray(value)
        if arr.ndim == 0:
            row[key] = float(arr)
        elif arr.ndim == 1:
            for i, x in enumerate(arr):
                row[f"{key}_{i}"] = float(x)
        else:
            for i in range(arr.shape[0]):
                for j in range(arr.shape[1]):
                    row[f"{key}_{i}_{j}"] = float(arr[i, j])
    return row


def cmd_eval(args) -> int:
    nf = _load(args.path)
    colouring = propagate(nf.network, nf.inputs)
    terminals = terminal_colours(nf.network, colouring)
    if args.format == "json":
        _emit({
            "edges": {eid: encode_colour(c) for eid, c in sorted(colouring.edge_colour.items())},
            "terminals": {eid: encode_colour(c) for eid, c in sorted(terminals.items())},
            "processes": processes(nf.network),
        })
    else:
        rows = [_flatten_colour(eid, c) for eid, c in sorted(colouring.edge_colour.items())]
        headers = sorted({k for row in rows for k in row} - {"edge"})
        print(",".join(["edge"] + headers))
        for row in rows:
            print(",".join([row["edge"]] + [repr(row.get(h, "")) for h in headers]))
    return EXIT_OK


def cmd_axioms(args) -> int:
    report = check_axioms(args.quandloid, args.samples, args.seed, dim=args.dim)
    _emit({
        "quandloid": report.kind,
        "samples": report.samples,
        "max_violation": report.max_violation,
        "skipped": report.skipped,
        "definedness_mismatches": report.definedness_mismatches,
    })
    return EXIT_OK


def _parse_kinds(spec: str):
    if not spec:
        return ALL_KINDS
    try:
        return {MoveKind(k.strip().upper()) for k in spec.split(",")}
    except ValueError as exc:
        raise ParseError(f"unknown move kind in {spec!r}") from exc


def cmd_moves(args) -> int:
    nf = _load(args.path)
    colouring = propagate(nf.network, nf.inputs)
    sites = find_moves(nf.network, colouring, kinds=_parse_kinds(args.kinds))
    _emit({
        "sites": [
            {"index": i, "kind": s.kind.value, "anchors": list(s.anchors),
             "params": [p.s for p in s.params]}
            for i, s in enumerate(sites)
        ]
    })
    return EXIT_OK


def cmd_apply(args) -> int:
    nf = _load(args.path)
    colouring = propagate(nf.network, nf.inputs)
    sites = find_moves(nf.network, colouring, kinds=_parse_kinds(args.kinds))
    if not 0 <= args.site < len(sites):
        raise QnetError(f"site index {args.site} out of range ({len(sites)} sites)")
    net2, col2 = apply_move(nf.network, colouring, sites[args.site])
    sys.stdout.write(serialize(
        net2, inputs=nf.inputs, dim=nf.dim, region=nf.region,
        timeline=nf.timeline, fault_streams=nf.fault_streams,
    ))
    return EXIT_OK


def _objective_from_args(args, nf) -> Objective | None:
    name = getattr(args, "objective", None)
    if not name:
        return None
    kind = ObjectiveKind(name)
    region = None
    if getattr(args, "region", None):
        region = frozenset(args.region.split(","))
    elif nf.region is not None:
        region = nf.region.member_edges
    true_cov = None
    if getattr(args, "true_cov", None):
        true_cov = np.asarray(json.loads(args.true_cov), dtype=float)
    mask = None
    if getattr(args, "mask", None):
        mask = FaultMask(frozenset(args.mask.split(",")))
    return Objective(kind=kind, region=region, true_cov=true_cov, mask=mask)


def cmd_search(args) -> int:
    nf = _load(args.path)
    colouring = propagate(nf.network, nf.inputs)
    obj = _objective_from_args(args, nf)
    result = equivalence_class(
        nf.network, colouring, depth=args.depth, max_nodes=args.max_nodes,
        kinds=_parse_kinds(args.kinds),
    )
    members = []
    for m in result.members:
        entry = {
            "key": m.key,
            "moves": [
                {"kind": s.kind.value, "anchors": list(s.anchors), "params": [p.s for p in s.params]}
                for s in m.moves
            ],
        }
        if obj is not None:
            try:
                entry["objective"] = local_objective(m.network, m.colouring, obj)
            except QnetError as exc:
                entry["objective_error"] = str(exc)
        members.append(entry)
    _emit({"members": members, "count": len(members), "truncated": result.truncated})
    return EXIT_OK


def cmd_optimize(args) -> int:
    nf = _load(args.path)
    free = args.free.split(",") if args.free else sorted(nf.network.interactions)
    params = optimize_params(
        nf.network, nf.inputs, free, method=args.method, grid_step=args.grid_step,
    )
    ops = {vid: op for vid, op in params.items()}
    value = chernoff_objective(nf.network, nf.inputs, ops)
    _emit({
        "params": {vid: op.s for vid, op in sorted(params.items())},
        "objective": value,
        "method": args.method,
    })
    return EXIT_OK


def _timeline_from_args(args, nf) -> Timeline:
    spec = getattr(args, "timeline", None)
    if spec:
        if nf.fault_streams is None:
            raise QnetError("--timeline with fault codes needs fault_streams in the file")
        masks = []
        for i, code in enumerate(spec.split(",")):
            code = code.strip()
            if len(code) != len(nf.fault_streams) or any(ch not in "0X" for ch in code):
                raise QnetError(f"bad fault code {code!r}")
            faulty = frozenset(s for ch, s in zip(code, nf.fault_streams) if ch == "X")
            masks.append((i, FaultMask(faulty)))
        return Timeline(tuple(masks))
    if nf.timeline is None:
        raise QnetError("no timeline given and none embedded in the file")
    return nf.timeline


def cmd_faultsim(args) -> int:
    nf = _load(args.path)
    timeline = _timeline_from_args(args, nf)
    if args.region:
        region = RegionSpec(frozenset(args.region.split(",")))
    elif nf.region is not None:
        region = nf.region
    else:
        raise QnetError("no region given and none embedded in the file")
    trace = adaptive_run(
        nf.network, nf.inputs, timeline, region,
        depth=args.depth, method=args.method, grid_step=args.grid_step,
        max_nodes=args.max_nodes,
    )
    sys.stdout.write(trace.to_jsonl())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qnet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a network file's structural invariants")
    p.add_argument("path")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("eval", help="propagate inputs and print the colouring")
    p.add_argument("path")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("axioms", help="run the randomized law checks")
    p.add_argument("--quandloid", required=True,
                   choices=("vec", "ci", "gaussian", "info", "entropy", "density"))
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim", type=int, default=3)
    p.set_defaults(fn=cmd_axioms)

    p = sub.add_parser("moves", help="list applicable rewrite sites")
    p.add_argument("path")
    p.add_argument("--kinds", default="")
    p.set_defaults(fn=cmd_moves)

    p = sub.add_parser("apply", help="apply a rewrite site by index")
    p.add_argument("path")
    p.add_argument("--site", type=int, required=True)
    p.add_argument("--kinds", default="")
    p.set_defaults(fn=cmd_apply)

    p = sub.add_parser("search", help="enumerate the bounded equivalence class")
    p.add_argument("path")
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--max-nodes", type=int, default=1000)
    p.add_argument("--kinds", default="")
    p.add_argument("--objective", choices=[k.value for k in ObjectiveKind], default="")
    p.add_argument("--true-cov", default="")
    p.add_argument("--region", default="")
    p.add_argument("--mask", default="")
    p.set_defaults(fn=cmd_search)

    p = sub.add_parser("optimize", help="optimize interaction weights globally")
    p.add_argument("path")
    p.add_argument("--method", choices=(GRID, COORDINATE), default=GRID)
    p.add_argument("--grid-step", type=float, default=0.05)
    p.add_argument("--free", default="")
    p.set_defaults(fn=cmd_optimize)

    p = sub.add_parser("faultsim", help="run the adaptive fault-tolerance loop")
    p.add_argument("path")
    p.add_argument("--timeline", default="")
    p.add_argument("--region", default="")
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--max-nodes", type=int, default=2000)
    # the grid is a product over every free interaction; coordinate
    # sweeps stay tractable on networks with many interactions
    p.add_argument("--method", choices=(GRID, COORDINATE), default=COORDINATE)
    p.add_argument("--grid-step", type=float, default=0.05)
    p.set_defaults(fn=cmd_faultsim)

    return parser


def main(argv=None) -> int:
    level = os.environ.get("QNET_LOG", "").upper()
    if level:
        logging.basicConfig(level=getattr(logging, level, logging.INFO), stream=sys.stderr)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QnetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
