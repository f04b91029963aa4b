"""Command-line front end.

Exit codes: 0 success/accept, 1 reject or failed selftest, 2 usage error,
3 I/O or format error, 4 no rational witness for the given assignment.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from pathlib import Path

from .arm import InstanceError, SchemaError, deserialize, format_rat, serialize, stats
from .circuit import dump_circuit
from .emit import TooLarge, emit_factored, emit_minors
from .formula import FormulaSyntaxError
from .normalize import WitnessError
from .pipeline import Compiled, compile_formula
from .verifier import decode, verify
from .witness import (PairingError, build_witness, deserialize_witness, full_assignment,
                      serialize_witness)

EXIT_OK, EXIT_REJECT, EXIT_USAGE, EXIT_IO, EXIT_WITNESS = 0, 1, 2, 3, 4

_ASSIGN_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(-?[0-9]+)(?:/([0-9]+))?\s*$")


class UsageError(Exception):
    pass


class FormatError(Exception):
    pass


def parse_assignment(text: str) -> dict[str, Fraction]:
    out = {}
    for item in text.split(","):
        if not item.strip():
            continue
        m = _ASSIGN_RE.match(item)
        if not m or m.group(3) == "0":
            raise UsageError(f"bad assignment item {item!r}; expected name=p/q")
        name, num, den = m.groups()
        if name in out:
            raise UsageError(f"variable {name!r} assigned twice")
        out[name] = Fraction(int(num), int(den or 1))
    return out


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, data: bytes):
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise FormatError(f"cannot write {path}: {exc.strerror}") from None


def _load_instance(path: str):
    try:
        return deserialize(_read(path))
    except (SchemaError, InstanceError) as exc:
        raise FormatError(f"{path}: {exc}") from None


def _load_witness(path: str):
    try:
        return deserialize_witness(_read(path))
    except (SchemaError, InstanceError) as exc:
        raise FormatError(f"{path}: {exc}") from None


def _recompile(inst, path: str) -> Compiled | None:
    """Rebuild the pipeline from the embedded source and check it matches."""
    source = inst.meta.get("source")
    if source is None:
        return None
    compiled = compile_formula(source)
    if compiled.instance.meta.get("circuit_hash") != inst.meta.get("circuit_hash"):
        raise FormatError(f"{path}: instance/circuit pairing error")
    return compiled


def _emit_json(doc):
    sys.stdout.write(json.dumps(doc, sort_keys=True) + "\n")


def cmd_compile(args, echo):
    text = _read(args.formula).decode("utf-8")
    try:
        compiled = compile_formula(text)
    except FormulaSyntaxError as exc:
        raise FormatError(f"{args.formula}: {exc}") from None
    _write(args.output, serialize(compiled.instance))
    if args.dump_circuit:
        _write(args.dump_circuit, dump_circuit(compiled.circuit).encode("utf-8"))
    st = stats(compiled.instance)
    echo(f"compiled {args.formula}: {len(compiled.circuit)} gates -> "
         f"{st['m']}x{st['n']} matrix, {st['q']} constraints, rank <= 3")
    return EXIT_OK


def cmd_witness(args, echo):
    inst = _load_instance(args.instance)
    compiled = _recompile(inst, args.instance)
    if compiled is None:
        raise FormatError(f"{args.instance}: no embedded source formula; cannot extend an assignment")
    assignment = parse_assignment(args.assign)
    try:
        full = full_assignment(compiled.system, compiled.circuit, assignment)
        w = build_witness(inst, compiled.circuit, full)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    _write(args.output, serialize_witness(w, include_x=args.include_x))
    echo(f"wrote rank-3 witness for {args.instance} to {args.output}")
    return EXIT_OK


def cmd_verify(args, echo):
    inst = _load_instance(args.instance)
    w = _load_witness(args.witness)
    if w.X.shape != (inst.m, inst.n):
        raise FormatError(f"witness is {w.X.rows}x{w.X.cols}, instance is {inst.m}x{inst.n}")
    compiled = _recompile(inst, args.instance)
    verdict = verify(inst, w.X, compiled.circuit if compiled else None)
    _emit_json(verdict.to_json())
    echo("accept" if verdict.accept else f"reject: {', '.join(verdict.violations)}")
    return EXIT_OK if verdict.accept else EXIT_REJECT


def cmd_decode(args, echo):
    inst = _load_instance(args.instance)
    w = _load_witness(args.witness)
    if w.X.shape != (inst.m, inst.n):
        raise FormatError(f"witness is {w.X.rows}x{w.X.cols}, instance is {inst.m}x{inst.n}")
    decoded = decode(inst, w.X)
    _emit_json({occ: {"value": format_rat(d.value), "role": d.role} for occ, d in decoded.items()})
    return EXIT_OK


def cmd_emit(args, echo):
    inst = _load_instance(args.instance)
    try:
        text = emit_factored(inst) if args.mode == "factored" else emit_minors(inst, cap=args.cap)
    except TooLarge as exc:
        raise FormatError(str(exc)) from None
    _write(args.output, text.encode("utf-8"))
    echo(f"wrote {args.mode} ETR encoding to {args.output}")
    return EXIT_OK


def cmd_stats(args, echo):
    _emit_json(stats(_load_instance(args.instance)))
    return EXIT_OK


def cmd_selftest(args, echo):
    from .acceptance import run_all

    return EXIT_OK if run_all(echo=print) else EXIT_REJECT


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="etrarm", description="Compile ETR formulas to ARM(3) instances and verify witnesses.")
    p.add_argument("--quiet", action="store_true", help="suppress human-readable messages on stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compile", help="formula file -> arm-instance/1 JSON")
    c.add_argument("formula")
    c.add_argument("-o", "--output", required=True)
    c.add_argument("--dump-circuit", metavar="PATH")
    c.set_defaults(func=cmd_compile)

    w = sub.add_parser("witness", help="build a rank-3 witness from a source assignment")
    w.add_argument("instance")
    w.add_argument("--assign", required=True, help='e.g. "x=2,y=3/4"')
    w.add_argument("-o", "--output", required=True)
    w.add_argument("--include-x", action="store_true", help="also store X = UV")
    w.set_defaults(func=cmd_witness)

    v = sub.add_parser("verify", help="exact feasibility check; JSON verdict on stdout")
    v.add_argument("instance")
    v.add_argument("witness")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("decode", help="print decoded carrier values")
    d.add_argument("instance")
    d.add_argument("witness")
    d.set_defaults(func=cmd_decode)

    e = sub.add_parser("emit-etr", help="encode an instance back into ETR")
    e.add_argument("instance")
    e.add_argument("--mode", choices=("factored", "minors"), default="factored")
    e.add_argument("--cap", type=int, default=10**6, help="maximum number of minor equalities")
    e.add_argument("-o", "--output", required=True)
    e.set_defaults(func=cmd_emit)

    s = sub.add_parser("stats", help="print m, n, q and total bit-length")
    s.add_argument("instance")
    s.set_defaults(func=cmd_stats)

    t = sub.add_parser("selftest", help="run the built-in acceptance suite")
    t.set_defaults(func=cmd_selftest)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    def echo(msg):
        if not args.quiet:
            print(msg, file=sys.stderr)

    try:
        return args.func(args, echo)
    except UsageError as exc:
        print(f"etrarm: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, PairingError) as exc:
        print(f"etrarm: {exc}", file=sys.stderr)
        return EXIT_IO
    except WitnessError as exc:
        print(f"etrarm: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_WITNESS


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
