"""Command-line front end.

Exit codes: 0 when everything passes, 2 on a failed check or a rejected
non-homogeneous equation, 1 on usage and parse errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Sequence

from polysym import engine
from polysym.dsl import ParseError, Script, parse, print_script
from polysym.expr import FactError, UndeclaredSymbol
from polysym.maps import Report
from polysym.models import MODELS, TARGETS, UsageError, field_map, run_verify
from polysym.moments import (
    bell, build_quadratic_moment_family, check_symbolic_closure, index_label, indices,
)

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class Output:
    """Buffers lines so that output is emitted in one deterministic block."""

    def __init__(self, fmt: str):
        self.fmt = fmt
        self.lines: list[str] = []
        self.failed = False

    def record(self, text: str, data: dict) -> None:
        self.lines.append(json.dumps(data) if self.fmt == "json" else text)

    def report(self, r: Report) -> None:
        self.failed |= not r.passed
        self.record(r.to_text(), r.to_dict())

    def flush(self, stream) -> None:
        for line in self.lines:
            print(line, file=stream)


def _load_script(args) -> Script:
    if args.input and args.expr:
        raise UsageError("give either --input or --expr, not both")
    if args.input:
        try:
            source = Path(args.input).read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read {args.input}: {exc.strerror}") from None
    elif args.expr:
        source = args.expr
    else:
        raise UsageError("a script is required (--input PATH or --expr TEXT)")
    return parse(source)


def _degree(script: Script, name: str, args) -> int:
    if args.degree is not None:
        return args.degree
    if name not in script.degrees:
        raise UsageError(f"equation {name!r} has no degree directive (use --degree)")
    return script.degrees[name]


def _single_variable(script: Script, name: str) -> tuple[str, object]:
    e = script.equation(name).expr
    names = sorted(e.variables())
    if len(names) > 1:
        raise UsageError(f"equation {name!r} has variables {names}; symmetrize needs one")
    return (names[0] if names else "x"), e


def _symmetrized(script: Script, name: str, args):
    var, e = _single_variable(script, name)
    degree = _degree(script, name, args)
    return var, degree, engine.symmetrize(script.signature, e, degree, var)


def cmd_symmetrize(args, out: Output) -> None:
    script = _load_script(args)
    names = [e.name for e in script.equations if e.name in script.degrees
             or args.degree is not None]
    if not names:
        raise UsageError("no equation with a degree directive")
    for name in names:
        _, degree, a = _symmetrized(script, name, args)
        out.record(f"{name}: {a}", {"equation": name, "degree": degree, "result": str(a)})


def cmd_specialize(args, out: Output) -> None:
    script = _load_script(args)
    if not script.specializations:
        raise UsageError("no specialize directive in the script")
    sig = script.signature
    for sp in script.specializations:
        var, degree, a = _symmetrized(script, sp.equation, args)
        if len(sp.values) != degree:
            raise UsageError(f"specialize {sp.equation}: {len(sp.values)} values for degree "
                             f"{degree}")
        slots = engine.slot_names(degree, var)
        try:
            facts = script.fact_set(sp.facts)
        except FactError as exc:
            raise UsageError(f"specialize {sp.equation}: {exc}") from None
        result = engine.specialize(sig, a, dict(zip(slots, sp.values)), facts)
        point = ", ".join(map(str, sp.values))
        out.record(f"{sp.equation}({point}) = {result}",
                   {"equation": sp.equation, "at": [str(v) for v in sp.values],
                    "facts": list(sp.facts), "result": str(result)})


def cmd_verify(args, out: Output) -> None:
    if args.model is None:
        raise UsageError("verify needs --model")
    for r in run_verify(args.target, args.model, args.samples, random.Random(args.seed)):
        out.report(r)


def cmd_moments(args, out: Output) -> None:
    rng = random.Random(args.seed)
    jobs = []
    if args.input or args.expr:
        script = _load_script(args)
        if not script.moments:
            raise UsageError("no moment directive in the script")
        for m in script.moments:
            jobs.append((m.rank, m.bound if m.bound is not None else args.bound))
    else:
        jobs.append((args.rank, args.bound))
    d = field_map(args.model or "d")
    for rank, bound in jobs:
        if rank < 1 or bound < 0:
            raise UsageError("rank must be at least 1 and bound nonnegative")
        for alpha in indices(rank, bound):
            label = index_label(alpha)
            b = bell(alpha)
            out.record(f"B_{label} = {b}", {"bell": label, "expansion": str(b)})
        out.report(check_symbolic_closure(rank, bound))
        family_d = {alpha: d for alpha in indices(rank, bound) if sum(alpha)}
        _, reports = build_quadratic_moment_family(rank, family_d, bound, args.samples, rng)
        for r in reports:
            out.report(r)


def cmd_parse(args, out: Output) -> None:
    script = _load_script(args)
    text = print_script(script)
    if out.fmt == "json":
        out.record("", {"script": text})
    else:
        out.lines.append(text.rstrip("\n"))


COMMANDS = {
    "symmetrize": cmd_symmetrize,
    "specialize": cmd_specialize,
    "verify": cmd_verify,
    "moments": cmd_moments,
    "parse": cmd_parse,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", metavar="PATH", help="script file")
    common.add_argument("--expr", metavar="TEXT", help="inline script")
    common.add_argument("--samples", type=int, default=20, help="random tuples per check")
    common.add_argument("--seed", type=int, default=0, help="random seed")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--degree", type=int, help="symmetrization degree override")
    common.add_argument("--rank", type=int, default=1, help="moment rank")
    common.add_argument("--bound", type=int, default=2, help="moment bound on |alpha|")
    common.add_argument("--model", help=f"concrete model ({', '.join(MODELS)})")

    parser = argparse.ArgumentParser(
        prog="polysym",
        description="Symmetrization of functional equations and exact model checks.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("symmetrize", parents=[common], help="print the symmetric form A_N")
    sub.add_parser("specialize", parents=[common], help="run specialize directives")
    v = sub.add_parser("verify", parents=[common], help="check a model against an identity")
    v.add_argument("target", help=f"one of: {', '.join(TARGETS)}")
    sub.add_parser("moments", parents=[common], help="Bell polynomials and moment families")
    sub.add_parser("parse", parents=[common], help="parse and pretty-print a script")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.samples < 1:
        print("error: --samples must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    out = Output(args.format)
    try:
        COMMANDS[args.command](args, out)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, UndeclaredSymbol) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except engine.NonHomogeneousError as exc:
        out.flush(sys.stdout)
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_FAIL
    out.flush(sys.stdout)
    return EXIT_FAIL if out.failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
