"""Command-line interface: `polyres <command> ...`.

Exit codes: 0 success, 1 negative analysis verdict, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .branchings import critical_nfold
from .cellalg import render
from .core import (
    MultiplicationTable,
    Path,
    as_polygraph,
    epi,
    format_word,
    load_polygraph,
    parse_polygraph,
    parse_word,
    reduced_standard,
    serialize_polygraph,
    validate,
)
from .errors import (
    DegreeOutOfRange,
    InvalidTruncation,
    MismatchedEndpoints,
    NonAssociativeTable,
    PolyresError,
    PresentationSyntaxError,
    TypingError,
)
from .homology import syzygy_generators, verify_complex
from .resolution import build_resolution, resolution_report
from .rewriting import (
    check_confluence,
    check_termination,
    is_reduced,
    normal_form,
    reduce,
    word_problem,
)

INPUT_ERRORS = (PresentationSyntaxError, TypingError, NonAssociativeTable,
                InvalidTruncation, DegreeOutOfRange, OSError, ValueError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class Output:
    """Collects the payload so that `main` decides where it goes."""

    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.lines = []
        self.data = None

    def line(self, text=""):
        self.lines.append(text)

    def render(self) -> str:
        if self.as_json:
            return json.dumps(self.data, indent=2, ensure_ascii=False) + "\n"
        return "".join(l + "\n" for l in self.lines)


# ---------------------------------------------------------------- helpers

def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load(path: str):
    return parse_polygraph(_read(path))


def _write(path, text: str):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _word(w: Path) -> str:
    return format_word(w)


def _step_json(p, s):
    return {"position": s.position, "rule": s.rule, "step": str(s), "target": _word(s.target(p))}


def _branching_json(b):
    return {
        "rules": list(b.rules),
        "positions": list(b.positions),
        "source": _word(b.source),
        "steps": [str(s) for s in b.steps],
    }


# ---------------------------------------------------------------- commands

def cmd_validate(args, out: Output) -> int:
    try:
        data = json.loads(_read(args.file))
    except json.JSONDecodeError as exc:
        raise PresentationSyntaxError(f"invalid JSON: {exc}") from None
    problems = validate(load_polygraph(data))
    out.data = {
        "valid": not problems,
        "diagnostics": [{"kind": d.kind, "location": d.location, "message": d.message} for d in problems],
    }
    if problems:
        for d in problems:
            out.line(str(d))
    else:
        out.line("valid")
    return 1 if problems else 0


def cmd_nf(args, out: Output) -> int:
    p = _load(args.file)
    w = parse_word(p, args.word)
    target, trace = normal_form(p, w, args.side)
    out.data = {"word": _word(w), "side": args.side, "normal_form": _word(target)}
    if args.trace:
        out.data["trace"] = [_step_json(p, s) for s in trace.steps]
    out.line(_word(target))
    if args.trace:
        for s in trace.steps:
            out.line(f"  {s}  ->  {_word(s.target(p))}")
    return 0


def cmd_eq(args, out: Output) -> int:
    p = _load(args.file)
    u, v = parse_word(p, args.w1), parse_word(p, args.w2)
    try:
        equal = word_problem(p, u, v)
        reason = "equal normal forms" if equal else "distinct normal forms"
    except MismatchedEndpoints as exc:
        equal, reason = False, str(exc)
    out.data = {"w1": _word(u), "w2": _word(v), "equal": equal, "reason": reason}
    out.line("true" if equal else "false")
    return 0 if equal else 1


def cmd_check(args, out: Output) -> int:
    p = _load(args.file)
    cert = check_termination(p)
    term = {
        "method": cert.method,
        "verdict": cert.verdict,
        "detail": cert.detail,
        "witness": [_word(w) for w in cert.witness],
    }
    out.line(f"termination: {cert.verdict} ({cert.method}){': ' + cert.detail if cert.detail else ''}")
    if cert.witness:
        out.line("  cycle: " + " -> ".join(_word(w) for w in cert.witness))
    confluence = None
    convergent = False
    if cert.verdict != "refuted":
        report = check_confluence(p)
        confluence = {
            "verdict": report.verdict,
            "branchings": [
                dict(_branching_json(e.branching),
                     targets=[_word(t) for t in e.targets],
                     normal_forms=[_word(t) for t in e.normal_forms],
                     joinable=e.joinable)
                for e in report.entries
            ],
        }
        out.line(f"confluence: {report.verdict} ({len(report.entries)} critical branchings)")
        for e in report.entries:
            if not e.joinable:
                nfs = ", ".join(_word(t) for t in e.normal_forms)
                out.line(f"  not joinable: {e.branching}  normal forms {nfs}")
        convergent = report.confluent and cert.verdict in ("proved", "assumed")
    reduced = is_reduced(p)
    out.line(f"reduced: {'yes' if reduced else 'no'}")
    out.line(f"convergent: {'yes' if convergent else 'no'}")
    out.data = {"termination": term, "confluence": confluence, "reduced": reduced, "convergent": convergent}
    return 0 if convergent else 1


def cmd_reduce(args, out: Output) -> int:
    p = _load(args.file)
    q = reduce(p)
    text = serialize_polygraph(q)
    kept = [r.name for r in q.rules]
    dropped = [r.name for r in p.rules if r.name not in set(kept)]
    out.data = {"rules": kept, "dropped": dropped, "termination": q.termination.method if q.termination else None}
    if args.output:
        _write(args.output, text)
        out.line(f"{len(kept)} rules kept, {len(dropped)} dropped; written to {args.output}")
        for name in dropped:
            out.line(f"  dropped {name}")
    else:
        out.lines.append(text.rstrip("\n"))
        if out.as_json:
            out.data["presentation"] = json.loads(text)
    return 0


def cmd_branchings(args, out: Output) -> int:
    p = _load(args.file)
    found = critical_nfold(p, args.order)
    out.data = {"order": args.order, "count": len(found), "branchings": [_branching_json(b) for b in found]}
    out.line(f"{len(found)} critical branchings of order {args.order}")
    for b in found:
        out.line(f"  {b}")
    return 0


def cmd_resolve(args, out: Output) -> int:
    p = _load(args.file)
    R = build_resolution(p, args.dim)
    out.data = resolution_report(R)
    counts = R.counts()
    out.line("cells: " + ", ".join(f"dim {d}: {n}" for d, n in sorted(counts.items())))
    for d in sorted(R.cells):
        for c in R.cells[d]:
            out.line(f"{c.name} (dim {c.dim})")
            out.line(f"  source: {render(c.source)}")
            out.line(f"  target: {render(c.target)}")
    return 0


def cmd_syzygies(args, out: Output) -> int:
    if args.dim < 2:
        raise DegreeOutOfRange("syzygies start in degree 2")
    p = _load(args.file)
    R = build_resolution(p, args.dim + 1)
    gens = syzygy_generators(R, args.dim)
    cells = R.cells.get(args.dim + 1, [])
    out.data = {
        "degree": args.dim,
        "generators": [
            {"cell": c.name, "text": str(z), "element": z.to_json()} for c, z in zip(cells, gens)
        ],
    }
    for c, z in zip(cells, gens):
        out.line(f"δ[{c.name}] = {z}")
    return 0


def cmd_verify(args, out: Output) -> int:
    p = _load(args.file)
    R = build_resolution(p, args.dim)
    report = verify_complex(R, args.dim, args.context_len, jobs=args.jobs)
    out.data = dict(report.to_json(), max_degree=args.dim, context_length=args.context_len)
    for c in report.checks:
        out.line(f"{'PASS' if c.passed else 'FAIL'} {c.name} ({c.checked} checked)")
        for w in c.witnesses:
            out.line(f"  {w}")
    return 0 if report.passed else 1


def cmd_builtin(args, out: Output) -> int:
    kind, _, arg = args.kind.partition(":")
    if kind == "as" and not arg:
        p = as_polygraph()
    elif kind == "epi" and arg:
        try:
            m = int(arg)
        except ValueError:
            raise UsageError(f"epi needs an integer level bound, got {arg!r}") from None
        p = epi(m)
    elif kind == "monoid" and arg:
        try:
            data = json.loads(_read(arg))
        except json.JSONDecodeError as exc:
            raise PresentationSyntaxError(f"invalid JSON in table: {exc}") from None
        p = reduced_standard(MultiplicationTable.from_data(data))
    else:
        raise UsageError(f"unknown builtin {args.kind!r}; expected as, epi:M or monoid:TABLEFILE")
    text = serialize_polygraph(p)
    out.data = json.loads(text)
    if args.output:
        _write(args.output, text)
        out.line(f"written to {args.output}")
    else:
        out.lines.append(text.rstrip("\n"))
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable output")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS,
                        help="worker threads for verification")

    parser = _Parser(prog="polyres", description="Polygraphic resolutions of presented categories.")
    parser.add_argument("--version", action="version", version=f"polyres {__version__}")
    parser.add_argument("--json", action="store_true", default=False)
    parser.add_argument("--jobs", type=int, default=1)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", parents=[common], help="type-check a presentation file")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("nf", parents=[common], help="normal form of a word")
    s.add_argument("file")
    s.add_argument("word")
    s.add_argument("--side", choices=["left", "right"], default="right")
    s.add_argument("--trace", action="store_true")
    s.set_defaults(func=cmd_nf)

    s = sub.add_parser("eq", parents=[common], help="decide equality of two words")
    s.add_argument("file")
    s.add_argument("w1")
    s.add_argument("w2")
    s.set_defaults(func=cmd_eq)

    s = sub.add_parser("check", parents=[common], help="termination and confluence report")
    s.add_argument("file")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("reduce", parents=[common], help="reduced presentation")
    s.add_argument("file")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("branchings", parents=[common], help="critical n-fold branchings")
    s.add_argument("file")
    s.add_argument("--order", type=int, default=2)
    s.set_defaults(func=cmd_branchings)

    s = sub.add_parser("resolve", parents=[common], help="build the resolution")
    s.add_argument("file")
    s.add_argument("--dim", type=int, required=True)
    s.set_defaults(func=cmd_resolve)

    s = sub.add_parser("syzygies", parents=[common], help="generators of homological syzygies")
    s.add_argument("file")
    s.add_argument("--dim", type=int, required=True)
    s.set_defaults(func=cmd_syzygies)

    s = sub.add_parser("verify", parents=[common], help="check the chain complex")
    s.add_argument("file")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--context-len", type=int, default=2)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("builtin", parents=[common], help="write a built-in presentation")
    s.add_argument("kind", help="as, epi:M or monoid:TABLEFILE")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_builtin)
    return parser


def run(argv=None):
    """Run a command; returns (exit code, stdout text, stderr text)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return 2, "", f"polyres: error: {exc}\n"
    out = Output(args.json)
    try:
        code = args.func(args, out)
    except UsageError as exc:
        return 2, "", f"polyres: error: {exc}\n"
    except INPUT_ERRORS as exc:
        return 2, "", f"polyres: error: {_one_line(exc)}\n"
    except PolyresError as exc:
        return 1, "", f"polyres: {type(exc).__name__}: {_one_line(exc)}\n"
    return code, out.render(), ""


def _one_line(exc) -> str:
    return " ".join(str(exc).split())


def main(argv=None) -> int:
    code, stdout, stderr = run(argv)
    sys.stdout.write(stdout)
    sys.stderr.write(stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
