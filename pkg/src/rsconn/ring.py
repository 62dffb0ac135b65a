"""Exact arithmetic in the truncated parameter algebras Q[t1..tr]/m^(k+1).

Rationals are plain :class:`fractions.Fraction` objects.  An element of the
truncated algebra is a :class:`LocalElem`: a sparse map from exponent
multi-indices to nonzero rationals, with every monomial of total degree above
the truncation order discarded.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping, Union

from .errors import IncompatibleAlgebraError, NonUnitError, ParseError

Monomial = tuple[int, ...]
Scalar = Union[int, Fraction]

_RATIONAL_RE = re.compile(r"-?(0|[1-9][0-9]*)(/[1-9][0-9]*)?")
_FACTOR_RE = re.compile(r"t([1-9][0-9]*)(?:\^([0-9]+))?")


def parse_rational(text: str) -> Fraction:
    """Parse a canonical ``"p/q"`` (or ``"p"``) string.

    Only lowest-terms forms with a positive denominator other than 1 are
    accepted, so that printing the result reproduces ``text`` exactly.
    """
    if not isinstance(text, str) or not _RATIONAL_RE.fullmatch(text):
        raise ParseError(f"malformed rational {text!r}")
    value = Fraction(text)
    if str(value) != text:
        raise ParseError(f"non-canonical rational {text!r} (write {str(value)!r})")
    return value


def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


@dataclass(frozen=True)
class ParamAlgebra:
    """The algebra R_k = Q[t1..tr]/m^(k+1) with m = (t1, ..., tr)."""

    num_params: int = 0
    trunc_order: int = 0

    def __post_init__(self):
        if self.num_params < 0 or self.trunc_order < 0:
            raise ValueError("num_params and trunc_order must be non-negative")

    @cached_property
    def basis(self) -> tuple[Monomial, ...]:
        """All monomials of degree <= k, graded, then lex with t1 > t2 > ..."""
        r, k = self.num_params, self.trunc_order
        if r == 0:
            return ((),)
        monos = [m for m in product(range(k + 1), repeat=r) if sum(m) <= k]
        monos.sort(key=monomial_key)
        return tuple(monos)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def is_field(self) -> bool:
        """True when the algebra degenerates to Q."""
        return self.num_params == 0 or self.trunc_order == 0

    @property
    def unit(self) -> Monomial:
        return (0,) * self.num_params

    def zero(self) -> LocalElem:
        return LocalElem(self, {})

    def one(self) -> LocalElem:
        return LocalElem(self, {self.unit: Fraction(1)})

    def const(self, q: Scalar) -> LocalElem:
        return LocalElem(self, {self.unit: Fraction(q)})

    def gen(self, i: int) -> LocalElem:
        """The parameter t_i (1-based)."""
        if not 1 <= i <= self.num_params:
            raise ValueError(f"no parameter t{i} in {self}")
        mono = tuple(1 if j == i - 1 else 0 for j in range(self.num_params))
        return LocalElem(self, {mono: Fraction(1)})

    def coerce(self, value) -> LocalElem:
        if isinstance(value, LocalElem):
            if value.algebra != self:
                raise IncompatibleAlgebraError(f"{value.algebra} vs {self}")
            return value
        return self.const(value)

    def __str__(self) -> str:
        if self.num_params == 0:
            return "Q"
        gens = ",".join(f"t{i + 1}" for i in range(self.num_params))
        return f"Q[{gens}]/m^{self.trunc_order + 1}"


def monomial_key(mono: Monomial):
    # graded, then larger exponent of earlier variables first
    return (sum(mono), tuple(-e for e in mono))


def format_monomial(mono: Monomial) -> str:
    parts = []
    for i, e in enumerate(mono):
        if e == 1:
            parts.append(f"t{i + 1}")
        elif e > 1:
            parts.append(f"t{i + 1}^{e}")
    return "*".join(parts) if parts else "1"


def parse_monomial(text: str, algebra: ParamAlgebra) -> Monomial:
    """Parse ``"1"``, ``"t2"``, ``"t1^2*t2"`` into an exponent tuple."""
    if text == "1":
        return algebra.unit
    exps = [0] * algebra.num_params
    for factor in text.split("*"):
        m = _FACTOR_RE.fullmatch(factor)
        if not m:
            raise ParseError(f"malformed monomial {text!r}")
        idx = int(m.group(1))
        if idx > algebra.num_params:
            raise ParseError(f"monomial {text!r} uses t{idx} but num_params = {algebra.num_params}")
        if exps[idx - 1]:
            raise ParseError(f"variable t{idx} repeated in monomial {text!r}")
        e = int(m.group(2)) if m.group(2) is not None else 1
        if e < 1:
            raise ParseError(f"zero exponent in monomial {text!r}")
        exps[idx - 1] = e
    mono = tuple(exps)
    if format_monomial(mono) != text:
        raise ParseError(f"non-canonical monomial {text!r} (write {format_monomial(mono)!r})")
    if sum(mono) > algebra.trunc_order:
        raise ParseError(
            f"degree overflow: monomial {text!r} has degree {sum(mono)} > order_t = {algebra.trunc_order}")
    return mono


class LocalElem:
    """An element of R_k, immutable."""

    __slots__ = ("algebra", "_c", "_hash")

    def __init__(self, algebra: ParamAlgebra, coeffs: Mapping[Monomial, Scalar] | None = None):
        self.algebra = algebra
        k = algebra.trunc_order
        clean: dict[Monomial, Fraction] = {}
        for mono, q in (coeffs or {}).items():
            if len(mono) != algebra.num_params:
                raise ValueError(f"monomial {mono} does not match {algebra}")
            if q and sum(mono) <= k:
                clean[mono] = Fraction(q)
        self._c = clean
        self._hash = None

    @classmethod
    def _raw(cls, algebra: ParamAlgebra, coeffs: dict[Monomial, Fraction]) -> LocalElem:
        obj = cls.__new__(cls)
        obj.algebra = algebra
        obj._c = coeffs
        obj._hash = None
        return obj

    @property
    def coeffs(self) -> dict[Monomial, Fraction]:
        return dict(self._c)

    def items(self):
        """Nonzero (monomial, coefficient) pairs in graded-lex order."""
        return sorted(self._c.items(), key=lambda kv: monomial_key(kv[0]))

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self) -> bool:
        return bool(self._c)

    def augment(self) -> Fraction:
        """Image in R_k/m = Q, i.e. the constant term."""
        return self._c.get(self.algebra.unit, Fraction(0))

    def is_unit(self) -> bool:
        return self.augment() != 0

    def min_degree(self) -> int | None:
        """Lowest total degree present (m-adic order), None for zero."""
        return min((sum(m) for m in self._c), default=None)

    def _other(self, other) -> LocalElem | None:
        if isinstance(other, LocalElem):
            if other.algebra != self.algebra:
                raise IncompatibleAlgebraError(f"{self.algebra} vs {other.algebra}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.algebra.const(other)
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        out = dict(self._c)
        for m, q in o._c.items():
            s = out.get(m, 0) + q
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return LocalElem._raw(self.algebra, out)

    __radd__ = __add__

    def __neg__(self):
        return LocalElem._raw(self.algebra, {m: -q for m, q in self._c.items()})

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return LocalElem._raw(self.algebra, {})
            return LocalElem._raw(self.algebra, {m: q * other for m, q in self._c.items()})
        o = self._other(other)
        if o is None:
            return NotImplemented
        return local_mul(self, o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        o = self._other(other)
        if o is None:
            return NotImplemented
        return local_mul(self, local_inv(o))

    def __pow__(self, n: int):
        if n < 0:
            return local_inv(self) ** (-n)
        result = self.algebra.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, LocalElem):
            return self.algebra == other.algebra and self._c == other._c
        if isinstance(other, (int, Fraction)):
            if not other:
                return not self._c
            return self._c == {self.algebra.unit: Fraction(other)}
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.algebra, frozenset(self._c.items())))
        return self._hash

    def inv(self) -> LocalElem:
        return local_inv(self)

    def truncate(self, k_new: int) -> LocalElem:
        """Reduce modulo m^(k_new+1), landing in R_{k_new}."""
        alg = ParamAlgebra(self.algebra.num_params, k_new)
        return LocalElem(alg, {m: q for m, q in self._c.items() if sum(m) <= k_new})

    def __repr__(self) -> str:
        return f"LocalElem({self})"

    def __str__(self) -> str:
        if not self._c:
            return "0"
        terms = []
        for mono, q in self.items():
            name = format_monomial(mono)
            if name == "1":
                terms.append(str(q))
            elif q == 1:
                terms.append(name)
            elif q == -1:
                terms.append(f"-{name}")
            else:
                terms.append(f"{q}*{name}")
        return " + ".join(terms).replace("+ -", "- ")


def local_mul(a: LocalElem, b: LocalElem) -> LocalElem:
    """Product in R_k, monomials of degree > k discarded."""
    if a.algebra != b.algebra:
        raise IncompatibleAlgebraError(f"{a.algebra} vs {b.algebra}")
    alg = a.algebra
    if not a._c or not b._c:
        return LocalElem._raw(alg, {})
    if alg.num_params == 0:
        return LocalElem._raw(alg, {(): a._c[()] * b._c[()]})
    k = alg.trunc_order
    out: dict[Monomial, Fraction] = {}
    for ma, qa in a._c.items():
        da = sum(ma)
        for mb, qb in b._c.items():
            if da + sum(mb) > k:
                continue
            m = tuple(x + y for x, y in zip(ma, mb))
            out[m] = out.get(m, 0) + qa * qb
    return LocalElem._raw(alg, {m: q for m, q in out.items() if q})


def local_inv(a: LocalElem) -> LocalElem:
    """Inverse of a unit of R_k via the terminating geometric series.

    With a = a0 (1 + n) and n in m, a^-1 = a0^-1 sum_{j<=k} (-n)^j.
    """
    a0 = a.augment()
    if a0 == 0:
        raise NonUnitError(f"{a} has zero constant term and is not a unit of {a.algebra}")
    alg = a.algebra
    n = a * (1 / a0) - 1
    result = alg.one()
    power = alg.one()
    for _ in range(alg.trunc_order):
        power = -(power * n)
        if power.is_zero():
            break
        result = result + power
    return result * (1 / a0)


def augment(a: LocalElem) -> Fraction:
    return a.augment()


def elements_from(algebra: ParamAlgebra, values: Iterable) -> list[LocalElem]:
    return [algebra.coerce(v) for v in values]
