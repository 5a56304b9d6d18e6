"""Command-line front end.

Exit codes: 0 affirmative (s-decomposable, finite, ...), 1 negative,
2 undecided, 64 malformed input, 78 unreadable exceptional catalog.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence

from . import __version__
from .blocks import assemble, catalog_hash
from .classify import ConfigurationError, classify, load_catalog
from .decompose import case_table_hash, s_decompose
from .formats import format_diagram, format_matrix, parse, to_dot
from .model import Diagram, ExchangeMatrix, MalformedInput, matrix_to_diagram
from .mutation import NonRealizable, mutate_diagram, mutate_matrix
from .oracle import oracle_decompose, oracle_is_finite
from .realize import realize_diagram
from .unfold import build_unfolding

EXIT_YES, EXIT_NO, EXIT_UNDECIDED, EXIT_INPUT, EXIT_CONFIG = 0, 1, 2, 64, 78
SCHEMA = "sdecomp/output"
SCHEMA_VERSION = 1


class InputError(Exception):
    pass


def _read(path: str) -> ExchangeMatrix | Diagram:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return parse(text)
    except MalformedInput as exc:
        raise InputError(f"{path}: {exc}") from None


def _diagram(obj) -> Diagram:
    """The input's diagram with nodes numbered from 1, as in the text formats."""
    G = matrix_to_diagram(obj) if isinstance(obj, ExchangeMatrix) else obj
    return G.relabel({v: i + 1 for i, v in enumerate(G.nodes)})


def _matrix(obj) -> ExchangeMatrix:
    if isinstance(obj, ExchangeMatrix):
        return obj
    try:
        return realize_diagram(obj)
    except NonRealizable as exc:
        raise InputError(f"diagram has no exchange matrix: {exc}") from None


def _emit(doc: dict, out) -> None:
    doc = {"schema": SCHEMA, "version": SCHEMA_VERSION, **doc}
    out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _seq(text: str) -> list[int]:
    try:
        ks = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--seq expects comma-separated integers, got {text!r}") from None
    if any(k < 1 for k in ks):
        raise argparse.ArgumentTypeError("mutation indices start at 1")
    return ks


def cmd_check(args, out) -> int:
    G = _diagram(_read(args.file))
    res = s_decompose(G, all_decompositions=args.all_decompositions)
    _emit({"command": "check", **res.to_json(trace=args.trace)}, out)
    return EXIT_YES if res.decomposable else EXIT_NO


def cmd_classify(args, out) -> int:
    B = _matrix(_read(args.file))
    cat = None if args.no_catalog else load_catalog()
    v = classify(B, use_catalog=not args.no_catalog, catalog=cat, cutoff=args.cutoff, budget=args.budget)
    _emit({"command": "classify", "verdict": v.to_json()}, out)
    return {True: EXIT_YES, False: EXIT_NO, None: EXIT_UNDECIDED}[v.finite]


def cmd_mutate(args, out) -> int:
    obj = _read(args.file)
    if any(k > len(_diagram(obj)) for k in args.seq):
        raise InputError(f"mutation index out of range 1..{len(_diagram(obj))}")
    if isinstance(obj, ExchangeMatrix):
        for k in args.seq:
            obj = mutate_matrix(obj, k - 1)
        out.write(format_matrix(obj))
    else:
        obj = _diagram(obj)
        try:
            for k in args.seq:
                obj = mutate_diagram(obj, k)
        except NonRealizable as exc:
            raise InputError(f"diagram mutation impossible: {exc}") from None
        out.write(format_diagram(obj))
    return EXIT_YES


def cmd_unfold(args, out) -> int:
    obj = _read(args.file)
    G = _diagram(obj)
    res = s_decompose(G, all_decompositions=False)
    if not res.decomposable:
        _emit({"command": "unfold", "s_decomposable": False,
               "reject_certificate": res.certificate.to_json() if res.certificate else None}, out)
        return EXIT_NO
    D = res.decompositions[0]
    B = obj if isinstance(obj, ExchangeMatrix) else None
    try:
        U = build_unfolding(G, D, B)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.format == "json":
        _emit({"command": "unfold", "s_decomposable": True, "decomposition": D.to_json(), "unfolding": U.to_json()}, out)
        return EXIT_YES
    names = U.names
    out.write(f"# unfolding of {len(G)} nodes into {U.m} vertices\n")
    for v in G.nodes:
        out.write(f"# E_{v} = {{{', '.join(names[a] for a in U.E[v])}}}\n")
    out.write(f"# columns: {' '.join(names)}\n")
    out.write(f"{U.m}\n")
    for r in U.Bhat:
        out.write(" ".join(map(str, r)) + "\n")
    return EXIT_YES


def cmd_oracle(args, out) -> int:
    obj = _read(args.file)
    G = _diagram(obj)
    if len(G) > args.max_nodes:
        raise InputError(f"oracle limited to {args.max_nodes} nodes (got {len(G)}); raise --max-nodes to force")
    res = oracle_decompose(G, max_blocks=args.max_blocks)
    doc = {
        "command": "oracle",
        "s_decomposable": res.decomposable,
        "complete": res.complete,
        "decompositions": [d.to_json() for d in sorted(res.decompositions, key=lambda d: json.dumps(d.to_json()))],
        "distinct_signatures": len(res.signatures()),
    }
    try:
        B = _matrix(obj)
    except InputError:
        B = None
    if B is not None:
        f = oracle_is_finite(B, args.cutoff, args.budget)
        doc["finiteness"] = {"outcome": f.outcome, "class_size": f.class_size, "scan": f.scan_reason,
                             "criterion": f.criterion}
    _emit(doc, out)
    if res.decomposable:
        return EXIT_YES
    return EXIT_NO if res.complete else EXIT_UNDECIDED


def cmd_export_dot(args, out) -> int:
    G = _diagram(_read(args.file))
    res = s_decompose(G, all_decompositions=False)
    if res.decomposable:
        G = assemble(res.decompositions[0], G.nodes)
    out.write(to_dot(G))
    return EXIT_YES


def _version() -> str:
    try:
        exc = load_catalog().digest
    except ConfigurationError:
        exc = "unavailable"
    return (f"sdecomp {__version__} (block catalog {catalog_hash()}, case table {case_table_hash()}, "
            f"exceptional catalog {exc})")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sdecomp", description="Block decompositions and finite mutation type.",
                                formatter_class=argparse.RawTextHelpFormatter)
    p.add_argument("--version", action="version", version=_version())
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def cmd(name, fn, help_):
        s = sub.add_parser(name, help=help_, description=help_)
        s.add_argument("file", help="input file in matrix or diagram format, '-' for stdin")
        s.set_defaults(func=fn)
        return s

    s = cmd("check", cmd_check, "decide s-decomposability and print decompositions")
    s.add_argument("--all-decompositions", action="store_true", help="list every decomposition, not just one")
    s.add_argument("--trace", action="store_true", help="include the reduction trace")

    s = cmd("classify", cmd_classify, "decide finite mutation type")
    s.add_argument("--no-catalog", action="store_true", help="skip the exceptional catalog")
    s.add_argument("--cutoff", type=int, default=5, help="weight that proves infiniteness (default 5)")
    s.add_argument("--budget", type=int, default=100_000, help="diagrams to scan before giving up")

    s = cmd("mutate", cmd_mutate, "apply a mutation sequence (1-based indices)")
    s.add_argument("--seq", type=_seq, required=True, help="comma-separated indices, e.g. 1,3,2")

    s = cmd("unfold", cmd_unfold, "build the skew-symmetric unfolding")
    s.add_argument("--format", choices=("text", "json"), default="text")

    s = cmd("oracle", cmd_oracle, "brute-force decompositions and mutation-class scan")
    s.add_argument("--max-blocks", type=int, default=None)
    s.add_argument("--max-nodes", type=int, default=7)
    s.add_argument("--cutoff", type=int, default=5)
    s.add_argument("--budget", type=int, default=20_000)

    cmd("export-dot", cmd_export_dot, "print the colored diagram as Graphviz DOT")
    return p


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else 0
    try:
        return args.func(args, out)
    except InputError as exc:
        print(f"sdecomp: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConfigurationError as exc:
        print(f"sdecomp: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
