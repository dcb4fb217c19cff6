"""Command line front end.

Exit codes: 0 success, 1 usage, 2 query/update text failed to parse,
3 update rejected (semantics or reserved names), 4 integrity problem
(broken chains, replay mismatch, corrupt store, verify findings),
5 file system trouble.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime

from filelock import Timeout

from .algebra import eval_query
from .ast import Select
from .model import DEFAULT, Atom, GraphName, Iri
from .nquads import (
    ParseError, format_atom, format_triple, parse_atom, serialize_dataset,
    serialize_graph, triple_key,
)
from .parser import parse_query
from .printer import format_select_rows
from .provenance import (
    BrokenChain, NoCurrentVersion, ProvenanceError, ReplayMismatch, parse_minted,
)
from .store import CorruptStoreError, DEFAULT_USER, Store
from .update import UpdateError
from .vocab import DEFAULT_GRAPH_IRI

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_UPDATE = 3
EXIT_INTEGRITY = 4
EXIT_IO = 5


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; 2 is taken, usage problems are 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read_text(args) -> str:
    if getattr(args, "text", None) is not None:
        return args.text
    if getattr(args, "file", None):
        with open(args.file, encoding="utf-8") as fh:
            return fh.read()
    return sys.stdin.read()


def _parse_user(value: str) -> Atom:
    if value.startswith("<") or value.startswith('"'):
        return parse_atom(value)
    if ":" in value:
        return Iri(value)
    return Iri(f"urn:user:{value}")


def _parse_when(value: str) -> datetime:
    try:
        return datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError:
        raise _UsageError(f"bad --time value: {value!r}") from None


def _graph_arg(args) -> GraphName:
    if getattr(args, "default", False):
        return DEFAULT
    raw = getattr(args, "graph", None)
    if raw is None:
        raise _UsageError("pick a graph with --graph IRI or --default")
    if raw.startswith("<") and raw.endswith(">"):
        raw = raw[1:-1]
    return Iri(raw)


def _cmd_init(args) -> int:
    if args.snapshot_interval == "none":
        interval = None
    else:
        try:
            interval = int(args.snapshot_interval)
        except ValueError:
            raise _UsageError(f"bad --snapshot-interval: {args.snapshot_interval!r}") from None
        if interval < 1:
            raise _UsageError("--snapshot-interval must be >= 1 or none")
    try:
        Store.init(args.root, snapshot_interval=interval,
                   materialize_data_graphs=not args.no_data_graphs)
    except FileExistsError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    print(f"initialized store at {args.root}")
    return EXIT_OK


def _cmd_apply(args) -> int:
    store = Store.open(args.root)
    user = _parse_user(args.user) if args.user else DEFAULT_USER
    when = _parse_when(args.time) if args.time else None
    minted = store.apply(_read_text(args), user=user, time=when)
    for v in minted:
        print(format_atom(v))
    return EXIT_OK


def _cmd_query(args) -> int:
    store = Store.open(args.root)
    q = parse_query(_read_text(args))
    result = eval_query(q, store.dataset)
    if isinstance(q, Select):
        sys.stdout.write(format_select_rows(q.variables, result))
    else:
        sys.stdout.write(serialize_dataset(result))
    return EXIT_OK


def _cmd_log(args) -> int:
    store = Store.open(args.root)
    g = _graph_arg(args)
    for e in store.history(g):
        print(f"{e.index}\t{e.verb}\t{e.time}\t{format_atom(e.user)}\t{json.dumps(e.text)}")
    return EXIT_OK


def _cmd_checkout(args) -> int:
    store = Store.open(args.root)
    if args.version:
        raw = args.version
        if raw.startswith("<") and raw.endswith(">"):
            raw = raw[1:-1]
        parsed = parse_minted(raw)
        if not parsed or parsed[1] != "v":
            raise _UsageError(f"not a version IRI: {args.version!r}")
        base, _, index = parsed
        g: GraphName = DEFAULT if base == DEFAULT_GRAPH_IRI.value else Iri(base)
    else:
        g = _graph_arg(args)
        index = args.index
    content = store.reconstruct(g, index, validate=args.validate)
    sys.stdout.write(serialize_graph(content))
    return EXIT_OK


def _cmd_diff(args) -> int:
    store = Store.open(args.root)
    g = _graph_arg(args)
    before = store.reconstruct(g, args.from_index)
    after = store.reconstruct(g, args.to_index)  # None means current
    for t in sorted(before - after, key=triple_key):
        print(f"- {format_triple(t)}")
    for t in sorted(after - before, key=triple_key):
        print(f"+ {format_triple(t)}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    store = Store.open(args.root)
    problems = store.verify()
    for p in problems:
        print(p)
    if problems:
        return EXIT_INTEGRITY
    print("ok")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    top = _ArgumentParser(prog="quadvc",
                          description="versioned quad store with update provenance")
    top.set_defaults(func=None)
    sub = top.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--root", default=".", help="store directory (default: .)")

    p = sub.add_parser("init", help="create a new store")
    common(p)
    p.add_argument("--snapshot-interval", default="1", metavar="N",
                   help="materialize every Nth version, or 'none' for chain starts only")
    p.add_argument("--no-data-graphs", action="store_true",
                   help="do not store insert/delete deltas (text replay instead)")
    p.set_defaults(func=_cmd_init)

    p = sub.add_parser("apply", help="apply one update statement")
    common(p)
    p.add_argument("text", nargs="?", help="update text (reads stdin when omitted)")
    p.add_argument("-f", "--file", help="read the update from a file")
    p.add_argument("--user", help="author, an IRI or bare name")
    p.add_argument("--time", help="timestamp, ISO 8601")
    p.set_defaults(func=_cmd_apply)

    p = sub.add_parser("query", help="run a query over the full dataset")
    common(p)
    p.add_argument("text", nargs="?", help="query text (reads stdin when omitted)")
    p.add_argument("-f", "--file", help="read the query from a file")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("log", help="list the update history of one graph")
    common(p)
    p.add_argument("--graph", help="graph IRI")
    p.add_argument("--default", action="store_true", help="the default graph")
    p.set_defaults(func=_cmd_log)

    p = sub.add_parser("checkout", help="print one version of a graph")
    common(p)
    p.add_argument("--version", help="a minted version IRI")
    p.add_argument("--graph", help="graph IRI")
    p.add_argument("--default", action="store_true", help="the default graph")
    p.add_argument("--index", type=int, help="version index (default: current)")
    p.add_argument("--validate", action="store_true",
                   help="replay and cross-check even when a snapshot exists")
    p.set_defaults(func=_cmd_checkout)

    p = sub.add_parser("diff", help="compare two versions of a graph")
    common(p)
    p.add_argument("--graph", help="graph IRI")
    p.add_argument("--default", action="store_true", help="the default graph")
    p.add_argument("--from", dest="from_index", type=int, required=True,
                   metavar="N", help="older version index")
    p.add_argument("--to", dest="to_index", type=int, default=None,
                   metavar="N", help="newer version index (default: current)")
    p.set_defaults(func=_cmd_diff)

    p = sub.add_parser("verify", help="check store integrity")
    common(p)
    p.set_defaults(func=_cmd_verify)

    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_OK
    if args.func is None:
        parser.print_help()
        return EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (BrokenChain, ReplayMismatch, NoCurrentVersion) as e:
        print(f"integrity error: {e}", file=sys.stderr)
        return EXIT_INTEGRITY
    except (UpdateError, ProvenanceError) as e:
        print(f"update error: {e}", file=sys.stderr)
        return EXIT_UPDATE
    except CorruptStoreError as e:
        print(f"integrity error: {e}", file=sys.stderr)
        return EXIT_INTEGRITY
    except Timeout as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_IO
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
