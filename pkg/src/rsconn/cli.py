"""Command line front end: ``rsconn <command> FILE [options]``.

Exit codes: 0 success, 1 parse/usage/precondition error, 2 system not
logarithmic, 3 resonance, 4 exponents not rational, 5 internal error or
exhausted step budget.  Reports go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Any, Callable

from . import io
from .connection import Connection, exponents, residue, tensor, truncate_params
from .equivalence import hom_space, numeric_monodromy, to_representation
from .errors import (IncompatibleAlgebraError, NotLogarithmicError, ParseError, PreconditionError,
                     ResonanceError, RSConnError, UnsupportedExponentFieldError)
from .normalize import deligne_manin, euler_reduce, shear_once
from .p1 import p1_lattice
from .ring import format_rational, parse_rational

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_LOGARITHMIC = 2
EXIT_RESONANCE = 3
EXIT_EXPONENT_FIELD = 4
EXIT_INTERNAL = 5


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, NotLogarithmicError):
        return EXIT_NOT_LOGARITHMIC
    if isinstance(exc, ResonanceError):
        return EXIT_RESONANCE
    if isinstance(exc, UnsupportedExponentFieldError):
        return EXIT_EXPONENT_FIELD
    if isinstance(exc, (ParseError, PreconditionError, IncompatibleAlgebraError)):
        return EXIT_USAGE
    return EXIT_INTERNAL


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which is taken by non-logarithmic
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class Report:
    """A JSON-able payload plus a plain text rendering."""

    def __init__(self, data: Any, text: str):
        self.data = data
        self.text = text

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return io.dumps(self.data)
        return self.text if self.text.endswith("\n") else self.text + "\n"


# --------------------------------------------------------------------------
# helpers


def _load(path: str) -> Connection:
    try:
        if path == "-":
            data = sys.stdin.buffer.read()
        else:
            with open(path, "rb") as fh:
                data = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return io.parse_system(data)
    except ParseError as exc:
        raise ParseError(str(exc), where=path) from None


def _prepare(path: str, args) -> Connection:
    c = _load(path)
    if args.order_x is not None:
        c = c.truncate_order(args.order_x)
    return c


def _fmt_list(values) -> str:
    return "{" + ", ".join(format_rational(v) for v in values) + "}"


def _fmt_matrix(rows) -> str:
    cells = [[str(v) for v in row] for row in rows]
    if not cells:
        return "  (empty)"
    width = max(len(c) for row in cells for c in row) if cells[0] else 0
    return "\n".join("  [ " + "  ".join(c.rjust(width) for c in row) + " ]" for row in cells)


def _system_report(c: Connection) -> Report:
    return Report(io.system_to_json(c), io.serialize_system(c))


# --------------------------------------------------------------------------
# commands


def cmd_exponents(args) -> Report:
    c = _prepare(args.file, args)
    exps = exponents(c)
    return Report({"exponents": io.rationals_to_json(exps)}, f"exponents: {_fmt_list(exps)}")


def cmd_residue(args) -> Report:
    c = _prepare(args.file, args)
    r = residue(c)
    return Report({"residue": io.matrix_to_json(r)}, "residue:\n" + _fmt_matrix(r.tolist()))


def cmd_normalize(args) -> Report:
    c = _prepare(args.file, args)
    e = euler_reduce(c) if args.no_shear else deligne_manin(c, args.tau_offset)
    data = {
        "tau_offset": None if args.no_shear else format_rational(args.tau_offset),
        "exponents": io.rationals_to_json(e.exponents()),
        "shears": [{"eigenvalue": format_rational(s.eigenvalue), "direction": s.direction} for s in e.shear_log],
        "B": io.matrix_to_json(e.B),
        "P": {"order_x": e.P.order, "matrix": io.series_matrix_to_json(e.P)},
    }
    window = "none (no shearing)" if args.no_shear else f"[{args.tau_offset}, {args.tau_offset + 1})"
    lines = [f"window: {window}",
             f"exponents: {_fmt_list(e.exponents())}",
             f"shears: {len(e.shear_log)}"]
    lines += [f"  move {s.eigenvalue} by {s.direction:+d}" for s in e.shear_log]
    lines += ["B:", _fmt_matrix(e.B.tolist()), f"P (known to x^{e.P.order}):", _fmt_matrix(e.P.tolist())]
    return Report(data, "\n".join(lines))


def cmd_monodromy(args) -> Report:
    c = _prepare(args.file, args)
    z = to_representation(deligne_manin(c, args.tau_offset))
    data = io.zrep_to_json(z)
    lines = [f"classes: {_fmt_list(z.classes)}", "nilpotent:", _fmt_matrix(z.nilpotent.tolist())]
    if args.numeric:
        m = numeric_monodromy(z)
        data["numeric"] = [[[round(float(v.real), 12), round(float(v.imag), 12)] for v in row] for row in m]
        lines += ["numeric exp(2 pi i B) (display only):",
                  _fmt_matrix([[f"{v.real:.6f}{v.imag:+.6f}i" for v in row] for row in m])]
    return Report(data, "\n".join(lines))


def cmd_tensor(args) -> Report:
    c1 = _prepare(args.file, args)
    c2 = _prepare(args.file2, args)
    return _system_report(tensor(c1, c2))


def _as_euler(c: Connection, tau: Fraction):
    if c.is_constant():
        return residue(c)
    return deligne_manin(c, tau).B


def cmd_hom(args) -> Report:
    c1 = _prepare(args.file, args)
    c2 = _prepare(args.file2, args)
    basis = hom_space(_as_euler(c1, args.tau_offset), _as_euler(c2, args.tau_offset))
    data = {"dimension": len(basis),
            "basis": [{"xpow": h.xpow, "matrix": io.matrix_to_json(h.matrix)} for h in basis]}
    lines = [f"dimension: {len(basis)}"]
    for h in basis:
        lines += [f"x^{h.xpow} *", _fmt_matrix(h.matrix.tolist())]
    return Report(data, "\n".join(lines))


def cmd_shear(args) -> Report:
    c = _prepare(args.file, args)
    return _system_report(shear_once(c, args.rho, args.direction))


def cmd_p1_lattice(args) -> Report:
    c = _prepare(args.file, args)
    if not c.algebra.is_field:
        raise PreconditionError("p1-lattice needs a system without parameters (order_t = 0 or num_params = 0)")
    b = deligne_manin(c, args.tau_offset).B.augment()
    lat = p1_lattice(b, args.tau_offset)
    lines = ["euler:", _fmt_matrix(lat.euler), f"twists: {lat.twists}",
             f"exponents at 0: {_fmt_list(lat.exponents_at_zero())}",
             f"exponents at infinity: {_fmt_list(lat.exponents_at_infinity())}"]
    return Report(io.p1_to_json(lat), "\n".join(lines))


def cmd_truncate(args) -> Report:
    c = _prepare(args.file, args)
    return _system_report(truncate_params(c, args.k))


# --------------------------------------------------------------------------
# argument parsing


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tau-offset", type=_rational, default=Fraction(0), metavar="C",
                        help="exponent window [C, C+1), C a rational like 1/2 (default 0)")
    common.add_argument("--order-x", type=int, default=None, metavar="N",
                        help="truncate the input to x-order N (at most the file's order_x)")
    common.add_argument("--output", choices=("json", "text"), default="json")

    parser = _Parser(prog="rsconn", description="Exact normal forms of regular singular systems theta y = A(x) y.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, fn: Callable, help_text: str, two_files: bool = False):
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        p.add_argument("file", help="system file (JSON), '-' for stdin")
        if two_files:
            p.add_argument("file2", help="second system file (JSON)")
        p.set_defaults(func=fn)
        return p

    add("exponents", cmd_exponents, "exponents of a logarithmic system")
    add("residue", cmd_residue, "residue matrix A(0)")
    norm = add("normalize", cmd_normalize, "Euler form with exponents in [C, C+1) and its gauge")
    norm.add_argument("--no-shear", action="store_true",
                      help="reduce directly without moving exponents; fails on resonant exponents")
    mono = add("monodromy", cmd_monodromy, "exponent classes and nilpotent part of the monodromy")
    mono.add_argument("--numeric", action="store_true", help="also print exp(2 pi i B) in floating point")
    add("tensor", cmd_tensor, "tensor product of two systems", two_files=True)
    add("hom", cmd_hom, "horizontal morphisms between the Euler forms of two systems", two_files=True)
    sh = add("shear", cmd_shear, "shift one exponent by +1 or -1")
    sh.add_argument("--rho", type=_rational, required=True, help="exponent to move")
    sh.add_argument("--direction", type=int, choices=(1, -1), required=True)
    add("p1-lattice", cmd_p1_lattice, "twists giving a lattice on P^1 with exponents in [C, C+1) at 0 and infinity")
    tr = add("truncate", cmd_truncate, "reduce parameters modulo m^(K+1)")
    tr.add_argument("--k", type=int, required=True, metavar="K")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except RSConnError as exc:
        print(f"rsconn {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exit_code(exc)
    except RecursionError as exc:
        print(f"rsconn {args.command}: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    sys.stdout.write(report.render(args.output))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
