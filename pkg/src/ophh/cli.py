"""Command-line front end.

Subcommands: validate, homology, bvcheck, eval.  Exit codes: 0 success,
1 mathematical failure (axiom/identity failure, homology sizing), 2 input
error (bad files, bad expressions, bad flags).  JSON reports are
schema-versioned, sorted, and byte-identical for identical configurations.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction

from .defs import BUILTIN_NAMES, OperadFileError, builtin_spec, parse_operad_file, coeff_to_str
from .hochschild import codegeneracy, coface, hochschild_differential
from .operad import (
    OperadElement,
    OperadError,
    OperadSpec,
    TruncationError,
    validate_cyclic,
    validate_operad,
)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_MATH = 1
EXIT_INPUT = 2


class CliInputError(Exception):
    pass


def _load_spec(args) -> OperadSpec:
    if args.builtin:
        try:
            return builtin_spec(args.builtin, args.cap)
        except KeyError:
            raise CliInputError(
                f"unknown built-in {args.builtin!r}; available: {', '.join(BUILTIN_NAMES)}"
            )
        except OperadError as exc:  # e.g. rank bound exceeded
            raise CliInputError(str(exc))
    if not args.input:
        raise CliInputError("an operad file (or --builtin NAME) is required")
    if args.input == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(args.input, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise CliInputError(f"cannot read {args.input}: {exc}")
    return parse_operad_file(text, lenient=args.lenient)


def _emit(args, payload: dict, text_lines: list) -> None:
    if args.format == "json":
        out = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    else:
        out = "\n".join(text_lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _element_dict(spec: OperadSpec, x: OperadElement) -> dict:
    return {
        "arity": x.arity,
        "terms": {name: coeff_to_str(c) for name, c in sorted(x.terms.items())},
    }


def cmd_validate(args) -> int:
    spec = _load_spec(args)
    report = validate_operad(spec, max_arity=args.cap)
    if spec.has_tau:
        report.merge(validate_cyclic(spec, max_arity=args.cap))
    else:
        report.notes["cyclic"] = "absent (tau not provided)"
    payload = {
        "schema": SCHEMA_VERSION,
        "command": "validate",
        "input": args.builtin or args.input,
        "cap": args.cap,
        "report": report.to_dict(),
    }
    _emit(args, payload, report.summary_lines())
    return EXIT_OK if report.ok else EXIT_MATH


def cmd_homology(args) -> int:
    from .homology import compute_hh

    spec = _load_spec(args)
    vrep = validate_operad(spec, max_arity=args.cap)
    if not vrep.ok:
        _emit(args, {"schema": SCHEMA_VERSION, "command": "homology",
                     "error": "operad axioms fail", "report": vrep.to_dict()},
              ["operad axioms fail:"] + vrep.summary_lines())
        return EXIT_MATH
    try:
        table = compute_hh(spec, args.cap, flavor=args.flavor, ring=args.ring)
    except TruncationError as exc:
        _emit(args, {"schema": SCHEMA_VERSION, "command": "homology", "error": str(exc)},
              [f"sizing error: {exc}"])
        return EXIT_MATH
    entries = {}
    lines = [f"HH({spec.name}) over {args.ring}, flavor={args.flavor}, arities 0..{args.cap - 1}"]
    for (k, g) in table.bidegrees():
        blk = table.entries[(k, g)]
        if blk.betti == 0 and not blk.torsion:
            continue
        entry = {"betti": blk.betti, "torsion": [str(t) for t in blk.torsion]}
        tor = f", torsion {list(blk.torsion)}" if blk.torsion else ""
        lines.append(f"  (arity {k}, grading {g}): betti {blk.betti}{tor}")
        if args.reps:
            reps = []
            for i in range(blk.betti + len(blk.torsion)):
                el = table.representative(k, g, i)
                reps.append({name: coeff_to_str(c) for name, c in sorted(el.terms.items())})
                lines.append(f"    rep[{i}] = {el!r}")
            entry["representatives"] = reps
        entries[f"{k},{g}"] = entry
    if len(lines) == 1:
        lines.append("  (no nonzero homology in range)")
    payload = {
        "schema": SCHEMA_VERSION,
        "command": "homology",
        "input": args.builtin or args.input,
        "cap": args.cap,
        "ring": args.ring,
        "flavor": args.flavor,
        "entries": entries,
    }
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_bvcheck(args) -> int:
    from .bv import verify_identity_suite
    from .homology import compute_hh, verify_bv_on_homology

    spec = _load_spec(args)
    vrep = validate_operad(spec, max_arity=args.cap)
    if spec.has_tau:
        vrep.merge(validate_cyclic(spec, max_arity=args.cap))
    if not vrep.ok:
        _emit(args, {"schema": SCHEMA_VERSION, "command": "bvcheck",
                     "error": "operad validation fails", "report": vrep.to_dict()},
              vrep.summary_lines())
        return EXIT_MATH
    chain = verify_identity_suite(spec, args.cap, samples=args.samples, seed=args.seed)
    table = compute_hh(spec, args.cap, flavor="normalized", ring="Q")
    homol = verify_bv_on_homology(table, probes=20, seed=args.seed)
    payload = {
        "schema": SCHEMA_VERSION,
        "command": "bvcheck",
        "input": args.builtin or args.input,
        "cap": args.cap,
        "samples": args.samples,
        "seed": args.seed,
        "chain_level": chain.to_dict(),
        "homology_level": homol.to_dict(),
        "passed": chain.ok and homol.ok,
    }
    lines = chain.summary_lines() + homol.summary_lines()
    _emit(args, payload, lines)
    return EXIT_OK if (chain.ok and homol.ok) else EXIT_MATH


# -- expression evaluator ------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[()+\-*/^,]))"
)

_INDEXED = re.compile(r"^(o|d|s)_(\d+)$")


class _ExprParser:
    """Recursive-descent evaluator for the small operation grammar:

        expr   := term (('+' | '-') term)*
        term   := [coeff '*'] factor | '-' term
        coeff  := int ['/' int]
        factor := name | fn '(' expr (',' expr)* ')' | '(' expr ')'
        fn     := o_i | d_i | s_i | tau['^' ['-'] int] | B | bullet | bracket | del
    """

    def __init__(self, spec: OperadSpec, cap: int, text: str):
        self.spec = spec
        self.cap = cap
        self.text = text
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if not m or m.end() == pos:
                if text[pos:].strip():
                    raise CliInputError(f"bad character at position {pos}: {text[pos]!r}")
                break
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), pos))
            pos = m.end()
        self.i = 0
        self.names = {}
        for k in range(cap + 1):
            for gen in spec.generators(k):
                self.names[gen.name] = k

    def _peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def _next(self):
        tok = self._peek()
        self.i += 1
        return tok

    def _expect(self, value: str):
        kind, val, pos = self._next()
        if val != value:
            raise CliInputError(f"expected {value!r} at position {pos}, found {val!r}")

    def parse(self) -> OperadElement:
        out = self._expr()
        kind, val, pos = self._peek()
        if kind is not None:
            raise CliInputError(f"unexpected trailing {val!r} at position {pos}")
        return out

    def _expr(self) -> OperadElement:
        out = self._term()
        while True:
            kind, val, pos = self._peek()
            if val == "+":
                self._next()
                rhs = self._term()
                out = self._combine(out, rhs, pos, 1)
            elif val == "-":
                self._next()
                rhs = self._term()
                out = self._combine(out, rhs, pos, -1)
            else:
                return out

    def _combine(self, a: OperadElement, b: OperadElement, pos: int, sign: int) -> OperadElement:
        if a.is_zero():
            return b.scale(sign)
        if b.is_zero():
            return a
        if a.arity != b.arity:
            raise CliInputError(
                f"arity mismatch near position {pos}: {a.arity} vs {b.arity}"
            )
        return a + b.scale(sign)

    def _term(self) -> OperadElement:
        kind, val, pos = self._peek()
        if val == "-":
            self._next()
            return self._term().scale(-1)
        if kind == "int":
            self._next()
            num = int(val)
            kind2, val2, _ = self._peek()
            if val2 == "/":
                self._next()
                kind3, den, p3 = self._next()
                if kind3 != "int":
                    raise CliInputError(f"expected denominator at position {p3}")
                coeff = Fraction(num, int(den))
            else:
                coeff = num
            self._expect("*")
            return self._factor().scale(coeff)
        return self._factor()

    def _factor(self) -> OperadElement:
        kind, val, pos = self._next()
        if val == "(":
            out = self._expr()
            self._expect(")")
            return out
        if kind != "name":
            raise CliInputError(f"expected a name at position {pos}, found {val!r}")
        nxt_kind, nxt_val, _ = self._peek()
        if nxt_val in ("(", "^"):
            return self._apply(val, pos)
        if val not in self.names:
            raise CliInputError(f"unknown basis element {val!r} at position {pos}")
        return OperadElement.basis(self.names[val], val)

    def _args(self, n: int, fn: str, pos: int) -> list:
        self._expect("(")
        out = [self._expr()]
        while True:
            kind, val, p = self._peek()
            if val == ",":
                self._next()
                out.append(self._expr())
            else:
                break
        self._expect(")")
        if len(out) != n:
            raise CliInputError(f"{fn} at position {pos} takes {n} argument(s), got {len(out)}")
        return out

    def _apply(self, fn: str, pos: int) -> OperadElement:
        from . import bv

        spec = self.spec
        m = _INDEXED.match(fn)
        if m:
            head, idx = m.group(1), int(m.group(2))
            if head == "o":
                x, y = self._args(2, fn, pos)
                return spec.compose(x, idx, y)
            arg = self._args(1, fn, pos)[0]
            if head == "d":
                return coface(spec, idx, arg)
            return codegeneracy(spec, idx, arg)
        if fn == "tau":
            power = 1
            kind, val, _ = self._peek()
            if val == "^":
                self._next()
                sign = 1
                kind, val, p = self._next()
                if val == "-":
                    sign = -1
                    kind, val, p = self._next()
                if kind != "int":
                    raise CliInputError(f"expected integer power at position {p}")
                power = sign * int(val)
            arg = self._args(1, fn, pos)[0]
            return spec.tau_pow(arg, power)
        if fn == "B":
            return bv.connes_b(spec, self._args(1, fn, pos)[0])
        if fn == "bullet":
            x, y = self._args(2, fn, pos)
            return bv.bullet(spec, x, y)
        if fn == "bracket":
            x, y = self._args(2, fn, pos)
            return bv.bracket(spec, x, y)
        if fn == "del":
            return hochschild_differential(spec, self._args(1, fn, pos)[0])
        raise CliInputError(f"unknown operation {fn!r} at position {pos}")


def cmd_eval(args) -> int:
    spec = _load_spec(args)
    result = _ExprParser(spec, args.cap, args.expression).parse()
    gradings = {}
    if not result.is_zero():
        for g, part in spec.graded_components(result).items():
            gradings[str(g)] = {n: coeff_to_str(c) for n, c in sorted(part.terms.items())}
    payload = {
        "schema": SCHEMA_VERSION,
        "command": "eval",
        "input": args.builtin or args.input,
        "expression": args.expression,
        "result": _element_dict(spec, result),
        "gradings": gradings,
    }
    lines = [repr(result), f"arity: {result.arity}"]
    for g in sorted(gradings):
        lines.append(f"grading {g}: " + " + ".join(
            f"{c}*{n}" if c != "1" else n for n, c in gradings[g].items()
        ))
    _emit(args, payload, lines)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ophh",
        description="Hochschild homology and BV-structure verification for "
        "graded cyclic multiplicative operads given by finite tables.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, needs_ring=False, needs_samples=False):
        p.add_argument("input", nargs="?", help="operad JSON file, or - for stdin")
        p.add_argument("--builtin", help=f"built-in operad ({', '.join(BUILTIN_NAMES)})")
        p.add_argument("--cap", type=int, default=5, help="arity cap (default 5)")
        p.add_argument("--lenient", action="store_true",
                       help="accept unknown keys in operad files")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--output", help="write the report to this path")
        if needs_ring:
            p.add_argument("--ring", choices=("Q", "Z"), default="Q")
            p.add_argument("--flavor", choices=("full", "normalized"), default="normalized")
        if needs_samples:
            p.add_argument("--samples", type=int, default=100)
            p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("validate", help="check operad (and cyclic) axioms")
    common(p)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("homology", help="bigraded Hochschild homology table")
    common(p, needs_ring=True)
    p.add_argument("--reps", action="store_true", help="print cycle representatives")
    p.set_defaults(fn=cmd_homology)

    p = sub.add_parser("bvcheck", help="chain-level and homology-level BV verification")
    common(p, needs_samples=True)
    p.set_defaults(fn=cmd_bvcheck)

    p = sub.add_parser("eval", help="evaluate an operation expression")
    p.add_argument("expression", help="e.g. 'bracket(a2, a1)' or 'del(a1)'")
    p.add_argument("--input", help="operad JSON file, or - for stdin")
    p.add_argument("--builtin", help=f"built-in operad ({', '.join(BUILTIN_NAMES)})")
    p.add_argument("--cap", type=int, default=5, help="arity cap (default 5)")
    p.add_argument("--lenient", action="store_true",
                   help="accept unknown keys in operad files")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output", help="write the report to this path")
    p.set_defaults(fn=cmd_eval)
    return ap


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except CliInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OperadFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TruncationError as exc:
        print(f"sizing error: {exc}", file=sys.stderr)
        return EXIT_MATH
    except OperadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MATH


if __name__ == "__main__":
    sys.exit(main())
