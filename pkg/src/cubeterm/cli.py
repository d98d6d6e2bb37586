"""Command-line interface.

Every command prints a human-readable summary (or, with ``--json``, the
structured report) and can also write the structured report to a file with
``--report``. Reports are JSON with sorted keys; the only run-dependent
field is ``timestamp``, which ``--no-timestamp`` omits.

Exit codes: 0 success / positive answer, 1 negative answer (incompatible
cross, no blocker, dichotomy violated), 2 usage or input error, 3 undecided.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from datetime import datetime, timezone
from typing import Callable, Sequence

from . import __version__
from .algebra import FiniteAlgebra, Subset
from .blockers import find_blocker
from .constructions import (
    chain_semilattice,
    example_51,
    example_52,
    example_52_maltsev,
    idempotent_groupoids,
    majority,
    meet_semilattice,
    two_element_semilattice,
    z3_groupoid,
)
from .crosses import Cross, is_compatible_cross
from .cube import min_cube_dimension
from .errors import CubeTermError
from .fileformat import dumps_algebra, load_algebra
from .subpower import DEFAULT_CAP, free_algebra_on_two

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR, EXIT_UNDECIDED = 0, 1, 2, 3


def _env_int(name: str, default: int | None) -> int | None:
    value = os.environ.get(name)
    if value is None or value == "":
        return default
    try:
        return int(float(value))
    except ValueError:
        raise CubeTermError(f"environment variable {name} must be a number, got {value!r}")


def parse_bases(text: str, size: int) -> list[Subset]:
    """Parse ``"{0},{0,1}"`` into subsets of ``range(size)``."""
    groups = re.findall(r"\{([^{}]*)\}", text)
    leftover = re.sub(r"\{[^{}]*\}", "", text).replace(",", "").strip()
    if not groups or leftover:
        raise CubeTermError(f"cannot parse bases {text!r}; expected e.g. '{{0}},{{0,1}}'")
    bases = []
    for g in groups:
        try:
            elems = [int(x) for x in g.replace(" ", "").split(",") if x]
        except ValueError:
            raise CubeTermError(f"base {{{g}}} contains a non-integer")
        if any(e < 0 or e >= size for e in elems):
            raise CubeTermError(f"base {{{g}}} has elements outside 0..{size - 1}")
        bases.append(Subset.of(size, elems))
    return bases


def _algebra_summary(algebra: FiniteAlgebra) -> dict:
    return {"size": algebra.size,
            "ops": [{"name": n, "arity": a} for n, a in zip(algebra.names, algebra.arities)]}


# ---------------------------------------------------------------------------
# Commands: each returns (exit code, report, human-readable lines)
# ---------------------------------------------------------------------------

def cmd_check_cross(args) -> tuple[int, dict, list[str]]:
    algebra = load_algebra(args.algebra)
    cross = Cross(tuple(parse_bases(args.bases, algebra.size)))
    check = is_compatible_cross(algebra, cross)
    result = {"compatible": check.compatible, "bases": cross.to_list()}
    lines = ["compatible" if check.compatible else "incompatible"]
    if check.certificate is not None:
        cert = check.certificate
        result["certificate"] = cert.to_dict()
        lines.append(f"operation {cert.symbol}, map {list(cert.map)}")
        lines += [f"  {list(row)} -> {out}" for row, out in zip(cert.matrix, cert.output)]
    report = {"algebra": _algebra_summary(algebra), "result": result}
    return (EXIT_OK if check.compatible else EXIT_NEGATIVE), report, lines


def cmd_cube_dim(args) -> tuple[int, dict, list[str]]:
    algebra = load_algebra(args.algebra)
    res = min_cube_dimension(algebra, cap=args.cap, threads=args.threads,
                             max_d=args.max_d, max_work=args.max_work, order=args.order)
    report = {"algebra": _algebra_summary(algebra), "result": res.to_dict(algebra)}
    if res.status == "finite":
        lines = [str(res.dimension)]
        if res.witness is not None:
            lines.append(f"witness: {res.witness.to_text()}")
        lines.append(f"reason: {res.reason}")
        return EXIT_OK, report, lines
    if res.status == "infinite":
        lines = ["none (blocker found)" if res.blocker is not None else "none"]
        if res.blocker is not None:
            lines.append(f"blocker: U={res.blocker.U!r} B={res.blocker.B!r}")
        lines.append(f"reason: {res.reason}")
        return EXIT_OK, report, lines
    return EXIT_UNDECIDED, report, ["undecided", f"reason: {res.reason}"]


def cmd_find_blocker(args) -> tuple[int, dict, list[str]]:
    algebra = load_algebra(args.algebra)
    blocker = find_blocker(algebra)
    report = {"algebra": _algebra_summary(algebra),
              "result": {"blocker": None if blocker is None else blocker.to_dict(algebra)}}
    if blocker is None:
        return EXIT_NEGATIVE, report, ["no blocker"]
    return EXIT_OK, report, [f"blocker: U={blocker.U!r} B={blocker.B!r}"]


def _int_params(params: Sequence[str], what: str) -> list[int]:
    try:
        return [int(p) for p in params]
    except ValueError:
        raise CubeTermError(f"{what} needs integer parameters, got {list(params)}")


EXAMPLES: dict[str, Callable[[list[int]], FiniteAlgebra]] = {
    "e51": lambda p: example_51(p).algebra,
    "e52": lambda p: example_52(p).algebra,
    "e52-maltsev": lambda p: example_52_maltsev(p).algebra,
    "z3": lambda p: z3_groupoid(),
    "meet": lambda p: meet_semilattice(),
    "maj": lambda p: majority(),
    "semilattice": lambda p: two_element_semilattice(*p),
    "chain": lambda p: chain_semilattice(*p),
}


def cmd_gen_example(args) -> tuple[int, dict, list[str]]:
    params = _int_params(args.params, args.name)
    try:
        algebra = EXAMPLES[args.name](params)
    except TypeError:
        raise CubeTermError(f"wrong number of parameters for {args.name}")
    text = dumps_algebra(algebra)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    # the algebra file itself is the human output
    return EXIT_OK, {"algebra": json.loads(text)}, [text.rstrip("\n")]


def cmd_free_algebra(args) -> tuple[int, dict, list[str]]:
    algebra = load_algebra(args.algebra)
    free = free_algebra_on_two(algebra, cap=args.cap, threads=args.threads)
    elements, lines = [], [f"{len(free)} elements"]
    for i in range(len(free)):
        term = free.witness(i).to_text()
        values = [int(v) for v in free.elements[i]]
        elements.append({"index": i, "term": term, "values": values})
        lines.append(f"{i}: {term}  {values}")
    report = {"algebra": _algebra_summary(algebra),
              "result": {"size": len(free), "elements": elements}}
    return EXIT_OK, report, lines


SWEEPS = {"groupoids-2": lambda: idempotent_groupoids(2),
          "groupoids-3": lambda: idempotent_groupoids(3)}


def cmd_sweep(args) -> tuple[int, dict, list[str]]:
    entries, lines = [], []
    holds = undecided = 0
    for i, algebra in enumerate(SWEEPS[args.suite]()):
        res = min_cube_dimension(algebra, cap=args.cap, threads=args.threads,
                                 max_work=args.max_work, order=args.order)
        blocker = find_blocker(algebra)
        dim = "infinity" if res.status == "infinite" else res.dimension
        ok = (res.status == "finite" and res.dimension == 2 and blocker is None) or \
             (res.status == "infinite" and blocker is not None)
        holds += ok
        undecided += res.status == "undecided"
        table = [int(v) for v in algebra.tables[0]]
        entries.append({"index": i, "table": table, "dimension": dim, "reason": res.reason,
                        "blocker": None if blocker is None else blocker.to_dict(algebra),
                        "dichotomy": bool(ok)})
        lines.append(f"{i} {''.join(map(str, table))} dim={dim} "
                     f"blocker={'yes' if blocker else 'no'} {'ok' if ok else 'FAIL'}")
    total = len(entries)
    summary = f"dichotomy holds: {holds}/{total}"
    lines.append(summary)
    report = {"suite": args.suite, "algebras": entries,
              "summary": {"holds": holds, "total": total, "undecided": undecided,
                          "text": summary}}
    if undecided:
        return EXIT_UNDECIDED, report, lines
    return (EXIT_OK if holds == total else EXIT_NEGATIVE), report, lines


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the structured report")
    common.add_argument("--report", metavar="PATH", help="also write the structured report here")
    common.add_argument("--no-timestamp", action="store_true",
                        help="omit the timestamp so reports are byte-identical across runs")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads for closures (default: $CUBETERM_THREADS or 1)")
    common.add_argument("--cap", type=float, default=None,
                        help=f"closure element cap (default: $CUBETERM_CAP or {DEFAULT_CAP:.0e})")
    common.add_argument("--order", choices=["auto", "bfs", "guided"], default="auto",
                        help="closure expansion order for cube term searches")
    common.add_argument("--max-work", type=float, default=None,
                        help="closure table-lookup budget (default: $CUBETERM_MAX_WORK or none)")

    parser = argparse.ArgumentParser(prog="cubeterm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-cross", parents=[common], help="test a cross for compatibility")
    p.add_argument("algebra")
    p.add_argument("--bases", required=True, help="e.g. '{0},{0,1}'")
    p.set_defaults(func=cmd_check_cross)

    p = sub.add_parser("cube-dim", parents=[common], help="minimal cube term dimension")
    p.add_argument("algebra")
    p.add_argument("--max-d", type=int, default=None)
    p.set_defaults(func=cmd_cube_dim)

    p = sub.add_parser("find-blocker", parents=[common], help="search for a cube term blocker")
    p.add_argument("algebra")
    p.set_defaults(func=cmd_find_blocker)

    p = sub.add_parser("gen-example", parents=[common], help="write a built-in algebra file")
    p.add_argument("name", choices=sorted(EXAMPLES))
    p.add_argument("params", nargs="*", help="arities (e51, e52, e52-maltsev) or a size/arity")
    p.add_argument("-o", "--output", help="write the algebra file here")
    p.set_defaults(func=cmd_gen_example)

    p = sub.add_parser("free-algebra", parents=[common],
                       help="list the binary term operations with witness terms")
    p.add_argument("algebra")
    p.set_defaults(func=cmd_free_algebra)

    p = sub.add_parser("sweep", parents=[common], help="run an exhaustive small-algebra suite")
    p.add_argument("suite", choices=sorted(SWEEPS))
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.cap is None:
            args.cap = _env_int("CUBETERM_CAP", DEFAULT_CAP)
        if args.max_work is None:
            args.max_work = _env_int("CUBETERM_MAX_WORK", None)
        args.cap = int(args.cap)
        args.max_work = None if args.max_work is None else int(args.max_work)
        code, report, lines = args.func(args)
    except (CubeTermError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    report = {"command": args.command, "exit_code": code, **report}
    if not args.no_timestamp:
        report["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    text = json.dumps(report, sort_keys=True, indent=1) + "\n"
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    if args.json:
        sys.stdout.write(text)
    else:
        print("\n".join(lines))
    return code


if __name__ == "__main__":
    sys.exit(main())
