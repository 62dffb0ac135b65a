"""JSON system files and report encoding.

A system file looks like::

    {"version": 1, "size": 1, "num_params": 0, "order_t": 0, "order_x": 4,
     "matrix": [[[{"xpow": 0, "coeff": {"1": "1/2"}}]]]}

Each matrix entry is a list of terms sorted by strictly increasing ``xpow``;
each ``coeff`` maps canonical monomials (``"1"``, ``"t1"``, ``"t1^2*t2"``) to
canonical rational strings.  Only canonical spellings are accepted, which is
what makes ``serialize_system(parse_system(text)) == text`` hold for every
file produced by :func:`serialize_system`.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

import jsonschema

from .connection import Connection
from .errors import ParseError
from .linalg import LocalMatrix, QMatrix
from .ring import LocalElem, ParamAlgebra, format_monomial, format_rational, parse_monomial, parse_rational
from .series import LaurentSeries, SeriesMatrix

FORMAT_VERSION = 1

_RATIONAL_PATTERN = r"^-?(0|[1-9][0-9]*)(/[1-9][0-9]*)?$"

SYSTEM_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["size", "num_params", "order_t", "order_x", "matrix"],
    "additionalProperties": False,
    "properties": {
        "version": {"const": FORMAT_VERSION},
        "size": {"type": "integer", "minimum": 0},
        "num_params": {"type": "integer", "minimum": 0},
        "order_t": {"type": "integer", "minimum": 0},
        "order_x": {"type": "integer"},
        "matrix": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["xpow", "coeff"],
                        "additionalProperties": False,
                        "properties": {
                            "xpow": {"type": "integer"},
                            "coeff": {
                                "type": "object",
                                "minProperties": 1,
                                "additionalProperties": {"type": "string", "pattern": _RATIONAL_PATTERN},
                            },
                        },
                    },
                },
            },
        },
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(SYSTEM_SCHEMA)


# --------------------------------------------------------------------------
# encoding


def dumps(obj: Any) -> str:
    """Canonical text: fixed key order as constructed, 2-space indent, final newline."""
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def elem_to_json(a: LocalElem) -> dict[str, str]:
    return {format_monomial(m): format_rational(q) for m, q in a.items()}


def series_to_json(f: LaurentSeries) -> list[dict[str, Any]]:
    return [{"xpow": n, "coeff": elem_to_json(a)} for n, a in f.items()]


def scalar_to_json(a: LocalElem):
    """Rational string over Q, monomial map otherwise."""
    if a.algebra.is_field:
        return format_rational(a.augment())
    return elem_to_json(a)


def matrix_to_json(m: LocalMatrix) -> list[list]:
    return [[scalar_to_json(v) for v in row] for row in m.tolist()]


def q_matrix_to_json(m: QMatrix) -> list[list[str]]:
    return [[format_rational(v) for v in row] for row in m]


def series_matrix_to_json(p: SeriesMatrix) -> list[list]:
    return [[series_to_json(f) for f in row] for row in p.tolist()]


def rationals_to_json(values) -> list[str]:
    return [format_rational(v) for v in values]


def system_to_json(c: Connection) -> dict[str, Any]:
    return {
        "version": FORMAT_VERSION,
        "size": c.size,
        "num_params": c.algebra.num_params,
        "order_t": c.algebra.trunc_order,
        "order_x": c.order,
        "matrix": series_matrix_to_json(c.matrix),
    }


def serialize_system(c: Connection) -> str:
    return dumps(system_to_json(c))


def zrep_to_json(z) -> dict[str, Any]:
    return {"classes": rationals_to_json(z.classes), "nilpotent": matrix_to_json(z.nilpotent)}


def p1_to_json(lat) -> dict[str, Any]:
    return {"euler": q_matrix_to_json(lat.euler), "twists": lat.twists}


# --------------------------------------------------------------------------
# decoding


def _reject_duplicates(pairs):
    out = {}
    for key, value in pairs:
        if key in out:
            raise ParseError(f"duplicate key {key!r}")
        out[key] = value
    return out


def _path(parts) -> str:
    text = ""
    for p in parts:
        text += f"[{p}]" if isinstance(p, int) else (f".{p}" if text else p)
    return text or "<root>"


def load_json(text: str | bytes) -> Any:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from None
    try:
        return json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, where=f"line {exc.lineno}, column {exc.colno}") from None


def elem_from_json(obj: dict[str, str], algebra: ParamAlgebra, where: str) -> LocalElem:
    coeffs = {}
    for key, value in obj.items():
        try:
            mono = parse_monomial(key, algebra)
            q = parse_rational(value)
        except ParseError as exc:
            raise ParseError(str(exc), where=where) from None
        if q == 0:
            raise ParseError(f"explicit zero coefficient for monomial {key!r}", where=where)
        coeffs[mono] = q
    return LocalElem(algebra, coeffs)


def series_from_json(terms: list, algebra: ParamAlgebra, order: int, where: str) -> LaurentSeries:
    coeffs = {}
    last = None
    for idx, term in enumerate(terms):
        n = term["xpow"]
        here = f"{where}[{idx}]"
        if not isinstance(n, int):
            raise ParseError(f"expected an integer literal, got {n!r}", where=f"{here}.xpow")
        if last is not None and n <= last:
            raise ParseError(f"xpow {n} does not increase strictly (previous {last})", where=here)
        if n > order:
            raise ParseError(f"xpow {n} exceeds order_x = {order}", where=here)
        last = n
        coeffs[n] = elem_from_json(term["coeff"], algebra, f"{here}.coeff")
    return LaurentSeries(algebra, coeffs, order)


def system_from_json(obj: Any) -> Connection:
    err = jsonschema.exceptions.best_match(_VALIDATOR.iter_errors(obj))
    if err is not None:
        raise ParseError(f"schema violation: {err.message}", where=_path(err.absolute_path))
    for key in ("size", "num_params", "order_t", "order_x"):
        if not isinstance(obj[key], int):
            raise ParseError(f"expected an integer literal, got {obj[key]!r}", where=key)
    n = obj["size"]
    matrix = obj["matrix"]
    if len(matrix) != n or any(len(row) != n for row in matrix):
        raise ParseError(f"matrix is not {n} x {n}", where="matrix")
    algebra = ParamAlgebra(obj["num_params"], obj["order_t"])
    order = obj["order_x"]
    rows = [[series_from_json(entry, algebra, order, f"matrix[{i}][{j}]") for j, entry in enumerate(row)]
            for i, row in enumerate(matrix)]
    return Connection(SeriesMatrix(algebra, rows, cols=n), order)


def parse_system(text: str | bytes) -> Connection:
    """Parse and validate a system file."""
    return system_from_json(load_json(text))


def parse_tau_offset(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ParseError as exc:
        raise ParseError(str(exc), where="--tau-offset") from None
