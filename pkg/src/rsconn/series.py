"""Truncated Laurent series over R_k and the derivation theta = x d/dx.

A :class:`LaurentSeries` stores the coefficients it knows together with the
order ``N`` up to which they are reliable: the true series equals the stored
one plus O(x^(N+1)).  ``order=None`` marks an exact Laurent polynomial (used
for gauge matrices such as diag(x, 1), which carry no truncation error).
Every binary operation computes the largest order it can prove.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import IncompatibleAlgebraError, NonUnitError, PreconditionError
from .linalg import LocalMatrix
from .ring import LocalElem, ParamAlgebra, Scalar

INF = float("inf")


def _min_order(*orders):
    finite = [o for o in orders if o is not None and o != INF]
    return min(finite) if finite else None


class LaurentSeries:
    """An element of R_k((x)) known modulo x^(order+1)."""

    __slots__ = ("algebra", "_c", "order")

    def __init__(self, algebra: ParamAlgebra, coeffs: Mapping[int, LocalElem | Scalar] | None = None,
                 order: int | None = None):
        self.algebra = algebra
        self.order = order
        clean: dict[int, LocalElem] = {}
        for n, a in (coeffs or {}).items():
            a = algebra.coerce(a)
            if a and (order is None or n <= order):
                clean[int(n)] = a
        self._c = clean

    @classmethod
    def _raw(cls, algebra, coeffs, order):
        obj = cls.__new__(cls)
        obj.algebra = algebra
        obj._c = coeffs
        obj.order = order
        return obj

    # constructors -------------------------------------------------------

    @classmethod
    def zero(cls, algebra: ParamAlgebra, order: int | None = None) -> LaurentSeries:
        return cls._raw(algebra, {}, order)

    @classmethod
    def const(cls, algebra: ParamAlgebra, value, order: int | None = None) -> LaurentSeries:
        return cls(algebra, {0: value}, order)

    @classmethod
    def monomial(cls, algebra: ParamAlgebra, power: int, value=1, order: int | None = None) -> LaurentSeries:
        return cls(algebra, {power: value}, order)

    @classmethod
    def x(cls, algebra: ParamAlgebra | None = None, order: int | None = None) -> LaurentSeries:
        return cls.monomial(algebra or ParamAlgebra(), 1, 1, order)

    # inspection ---------------------------------------------------------

    @property
    def coeffs(self) -> dict[int, LocalElem]:
        return dict(self._c)

    def items(self):
        return sorted(self._c.items())

    def coeff(self, n: int) -> LocalElem:
        if self.order is not None and n > self.order:
            raise PreconditionError(f"coefficient of x^{n} is beyond the known order {self.order}")
        return self._c.get(n, self.algebra.zero())

    def is_exact(self) -> bool:
        return self.order is None

    def is_zero(self) -> bool:
        """True when every known coefficient vanishes."""
        return not self._c

    @property
    def valuation(self) -> int:
        """Lowest x-power with a nonzero coefficient; 0 for the canonical zero."""
        return min(self._c) if self._c else 0

    def val_bound(self):
        """A lower bound for the valuation of the true series (may be inf)."""
        if self._c:
            return min(self._c)
        return INF if self.order is None else self.order + 1

    def reduced(self) -> LaurentSeries:
        """Image in Q((x)) (parameters set to zero), over the trivial algebra."""
        alg = ParamAlgebra()
        return LaurentSeries._raw(
            alg, {n: alg.const(a.augment()) for n, a in self._c.items() if a.augment()}, self.order)

    def reduced_valuation(self):
        vals = [n for n, a in self._c.items() if a.augment()]
        return min(vals) if vals else None

    # arithmetic ---------------------------------------------------------

    def _check(self, other: LaurentSeries):
        if other.algebra != self.algebra:
            raise IncompatibleAlgebraError(f"{self.algebra} vs {other.algebra}")

    def _lift(self, other) -> LaurentSeries | None:
        if isinstance(other, LaurentSeries):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, LocalElem)):
            return LaurentSeries.const(self.algebra, other)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        order = _min_order(self.order, o.order)
        out = {n: a for n, a in self._c.items() if order is None or n <= order}
        for n, a in o._c.items():
            if order is not None and n > order:
                continue
            s = out[n] + a if n in out else a
            if s:
                out[n] = s
            else:
                out.pop(n, None)
        return LaurentSeries._raw(self.algebra, out, order)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries._raw(self.algebra, {n: -a for n, a in self._c.items()}, self.order)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, LocalElem)):
            if isinstance(other, LocalElem):
                self.algebra.coerce(other)
            out = {}
            for n, a in self._c.items():
                p = a * other
                if p:
                    out[n] = p
            return LaurentSeries._raw(self.algebra, out, self.order)
        if isinstance(other, LaurentSeries):
            return series_mul(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        if isinstance(other, LocalElem):
            return self * other.inv()
        if isinstance(other, LaurentSeries):
            return series_mul(self, series_inv(other))
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            return series_inv(self) ** (-n)
        result = LaurentSeries.const(self.algebra, 1)
        for _ in range(n):
            result = result * self
        return result

    def shift(self, m: int) -> LaurentSeries:
        """Multiply by x^m (exact)."""
        return LaurentSeries._raw(self.algebra, {n + m: a for n, a in self._c.items()},
                                  None if self.order is None else self.order + m)

    def truncate(self, order: int) -> LaurentSeries:
        """Forget everything above x^order."""
        if self.order is not None and order > self.order:
            raise PreconditionError(f"cannot raise precision from {self.order} to {order}")
        return LaurentSeries._raw(self.algebra, {n: a for n, a in self._c.items() if n <= order}, order)

    def truncate_params(self, k_new: int) -> LaurentSeries:
        alg = ParamAlgebra(self.algebra.num_params, k_new)
        out = {}
        for n, a in self._c.items():
            b = a.truncate(k_new)
            if b:
                out[n] = b
        return LaurentSeries._raw(alg, out, self.order)

    def map_coeffs(self, fn) -> LaurentSeries:
        out = {}
        for n, a in self._c.items():
            b = fn(a)
            if b:
                out[n] = b
        return LaurentSeries._raw(self.algebra, out, self.order)

    def same_to(self, other: LaurentSeries, order: int | None = None) -> bool:
        """Equality of all coefficients up to ``order`` (default: common known order)."""
        if order is None:
            order = _min_order(self.order, other.order)
        for n in set(self._c) | set(other._c):
            if order is not None and n > order:
                continue
            if self._c.get(n, self.algebra.zero()) != other._c.get(n, other.algebra.zero()):
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return self.algebra == other.algebra and self.order == other.order and self._c == other._c

    def __hash__(self):
        return hash((self.algebra, self.order, frozenset(self._c.items())))

    def __repr__(self):
        return f"LaurentSeries({self})"

    def __str__(self):
        terms = []
        for n, a in self.items():
            c = str(a)
            if " " in c:
                c = f"({c})"
            if n == 0:
                terms.append(c)
            else:
                xp = "x" if n == 1 else f"x^{n}"
                terms.append(xp if c == "1" else f"-{xp}" if c == "-1" else f"{c}*{xp}")
        body = " + ".join(terms).replace("+ -", "- ") if terms else "0"
        return body if self.order is None else f"{body} + O(x^{self.order + 1})"


def theta(f: LaurentSeries) -> LaurentSeries:
    """The logarithmic derivation: sum a_n x^n -> sum n a_n x^n."""
    return LaurentSeries._raw(f.algebra, {n: a * n for n, a in f._c.items() if n}, f.order)


def series_mul(f: LaurentSeries, g: LaurentSeries) -> LaurentSeries:
    """Cauchy product, known to min(N_f + v_g, N_g + v_f)."""
    f._check(g)
    vf, vg = f.val_bound(), g.val_bound()
    cands = []
    if f.order is not None:
        cands.append(f.order + vg)
    if g.order is not None:
        cands.append(g.order + vf)
    order = min(cands) if cands else None
    if order == INF:
        order = None
    if order is not None and order == -INF:
        raise PreconditionError("product of two series known to no order")
    out: dict[int, LocalElem] = {}
    for i, a in f._c.items():
        for j, b in g._c.items():
            n = i + j
            if order is not None and n > order:
                continue
            p = a * b
            if not p:
                continue
            if n in out:
                s = out[n] + p
                if s:
                    out[n] = s
                else:
                    del out[n]
            else:
                out[n] = p
    return LaurentSeries._raw(f.algebra, out, None if order is None else int(order))


def _inv_power_series_q(coeffs: dict[int, Fraction], order: int) -> dict[int, Fraction]:
    """Inverse of a Q power series with unit constant term, through x^order."""
    c0 = coeffs[0]
    inv = {0: 1 / c0}
    for n in range(1, order + 1):
        s = sum((coeffs.get(i, 0) * inv.get(n - i, 0) for i in range(1, n + 1)), Fraction(0))
        if s:
            inv[n] = -s / c0
    return inv


def series_inv(f: LaurentSeries, order: int | None = None) -> LaurentSeries:
    """Multiplicative inverse in R_k((x)).

    f is a unit exactly when its image in Q((x)) is nonzero.  Writing
    f = x^w u with the reduction of u a unit power series, take g = inverse
    of that reduction; then u g = 1 + e with e having all coefficients in m,
    so u^-1 = g * sum_{j<=k} (-e)^j.

    ``order`` is only consulted for exact inputs whose inverse is an
    infinite series; it sets the absolute order of the result.
    """
    alg = f.algebra
    w = f.reduced_valuation()
    if w is None:
        raise NonUnitError(f"{f} is not invertible: its image modulo the parameters is zero")
    u = f.shift(-w)
    ubar = {n: a.augment() for n, a in u._c.items() if n >= 0 and a.augment()}
    exact_g = u.order is None and len(ubar) == 1
    if exact_g:
        g = LaurentSeries(alg, {0: 1 / ubar[0]}, None)
    else:
        vu = u.val_bound()
        k = alg.trunc_order
        if u.order is not None:
            m = u.order
        elif order is not None:
            # room for the (k+1)-fold products of negative-power nilpotent terms
            m = order + w - (k + 1) * min(0, vu) + 1
            m = max(m, 0)
        else:
            raise PreconditionError(f"inverse of exact series {f} is infinite; pass an order")
        g = LaurentSeries(alg, {n: alg.const(q) for n, q in _inv_power_series_q(ubar, m).items()}, m)
    e = u * g - 1
    total = LaurentSeries.const(alg, 1)
    power = LaurentSeries.const(alg, 1)
    for _ in range(alg.trunc_order):
        power = -(power * e)
        if power.is_zero() and power.order is None:
            break
        total = total + power
    result = (g * total).shift(-w)
    if order is not None and result.order is not None and result.order > order:
        result = result.truncate(order)
    return result


def dlog(b: LaurentSeries, order: int | None = None) -> LaurentSeries:
    """theta(b) / b."""
    out = series_mul(theta(b), series_inv(b, order))
    if order is not None and (out.order is None or out.order > order):
        out = out.truncate(order)
    return out


def from_terms(algebra: ParamAlgebra, terms: Iterable[tuple[int, object]], order: int | None) -> LaurentSeries:
    out: dict[int, LocalElem] = {}
    for n, a in terms:
        out[n] = out.get(n, algebra.zero()) + algebra.coerce(a)
    return LaurentSeries(algebra, out, order)


class SeriesMatrix:
    """A rectangular matrix of Laurent series over a common algebra."""

    __slots__ = ("algebra", "rows", "cols", "_e")

    def __init__(self, algebra: ParamAlgebra, entries: Iterable[Iterable[LaurentSeries]], cols: int | None = None):
        self.algebra = algebra
        self._e = tuple(tuple(entries_row) for entries_row in entries)
        self.rows = len(self._e)
        self.cols = len(self._e[0]) if self._e else (cols or 0)
        for row in self._e:
            if len(row) != self.cols:
                raise PreconditionError("ragged series matrix")
            for f in row:
                if f.algebra != algebra:
                    raise IncompatibleAlgebraError(f"{f.algebra} vs {algebra}")

    @classmethod
    def identity(cls, algebra: ParamAlgebra, n: int, order: int | None = None) -> SeriesMatrix:
        return cls(algebra, [[LaurentSeries.const(algebra, int(i == j), order) for j in range(n)]
                             for i in range(n)], cols=n)

    @classmethod
    def zeros(cls, algebra: ParamAlgebra, m: int, n: int | None = None, order: int | None = None) -> SeriesMatrix:
        n = m if n is None else n
        return cls(algebra, [[LaurentSeries.zero(algebra, order) for _ in range(n)] for _ in range(m)], cols=n)

    @classmethod
    def constant(cls, a: LocalMatrix, order: int | None = None) -> SeriesMatrix:
        return cls(a.algebra, [[LaurentSeries.const(a.algebra, v, order) for v in row] for row in a.tolist()],
                   cols=a.cols)

    @classmethod
    def diag_monomials(cls, algebra: ParamAlgebra, powers: Sequence[int]) -> SeriesMatrix:
        """The exact matrix diag(x^p1, ..., x^pn)."""
        n = len(powers)
        return cls(algebra, [[LaurentSeries.monomial(algebra, powers[i]) if i == j else LaurentSeries.zero(algebra)
                              for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def from_coefficients(cls, algebra: ParamAlgebra, mats: dict[int, LocalMatrix], rows: int, cols: int,
                          order: int | None) -> SeriesMatrix:
        """sum_n mats[n] x^n, known to ``order``."""
        entries = []
        for i in range(rows):
            row = []
            for j in range(cols):
                row.append(LaurentSeries(algebra, {n: m[i, j] for n, m in mats.items()}, order))
            entries.append(row)
        return cls(algebra, entries, cols=cols)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij) -> LaurentSeries:
        i, j = ij
        return self._e[i][j]

    def tolist(self) -> list[list[LaurentSeries]]:
        return [list(r) for r in self._e]

    def entries(self):
        for i, r in enumerate(self._e):
            for j, f in enumerate(r):
                yield i, j, f

    @property
    def order(self) -> int | None:
        return _min_order(*(f.order for _, _, f in self.entries()))

    @property
    def valuation(self) -> int:
        vals = [f.valuation for _, _, f in self.entries() if not f.is_zero()]
        return min(vals) if vals else 0

    def coeff_matrix(self, n: int) -> LocalMatrix:
        return LocalMatrix(self.algebra, [[f.coeff(n) for f in r] for r in self._e], cols=self.cols)

    def map(self, fn) -> SeriesMatrix:
        return SeriesMatrix(self.algebra, [[fn(f) for f in r] for r in self._e], cols=self.cols)

    def __add__(self, other: SeriesMatrix) -> SeriesMatrix:
        if self.shape != other.shape:
            raise PreconditionError(f"shape mismatch {self.shape} vs {other.shape}")
        return SeriesMatrix(self.algebra, [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self._e, other._e)],
                            cols=self.cols)

    def __neg__(self) -> SeriesMatrix:
        return self.map(lambda f: -f)

    def __sub__(self, other: SeriesMatrix) -> SeriesMatrix:
        return self + (-other)

    def __mul__(self, c) -> SeriesMatrix:
        if isinstance(c, SeriesMatrix):
            return NotImplemented
        return self.map(lambda f: f * c)

    __rmul__ = __mul__

    def __matmul__(self, other: SeriesMatrix) -> SeriesMatrix:
        if isinstance(other, LocalMatrix):
            other = SeriesMatrix.constant(other)
        if other.algebra != self.algebra:
            raise IncompatibleAlgebraError(f"{self.algebra} vs {other.algebra}")
        if self.cols != other.rows:
            raise PreconditionError(f"shape mismatch {self.shape} @ {other.shape}")
        out = []
        for r in self._e:
            row = []
            for j in range(other.cols):
                acc = None
                for l, f in enumerate(r):
                    g = other._e[l][j]
                    if f.is_zero() and f.order is None or g.is_zero() and g.order is None:
                        continue
                    p = series_mul(f, g)
                    acc = p if acc is None else acc + p
                row.append(acc if acc is not None else LaurentSeries.zero(self.algebra))
            out.append(row)
        return SeriesMatrix(self.algebra, out, cols=other.cols)

    def __rmatmul__(self, other):
        if isinstance(other, LocalMatrix):
            return SeriesMatrix.constant(other) @ self
        return NotImplemented

    def theta(self) -> SeriesMatrix:
        return self.map(theta)

    def truncate(self, order: int) -> SeriesMatrix:
        return self.map(lambda f: f.truncate(order) if f.order is None or f.order > order else f)

    def truncate_params(self, k_new: int) -> SeriesMatrix:
        alg = ParamAlgebra(self.algebra.num_params, k_new)
        return SeriesMatrix(alg, [[f.truncate_params(k_new) for f in r] for r in self._e], cols=self.cols)

    def transpose(self) -> SeriesMatrix:
        return SeriesMatrix(self.algebra, list(zip(*self._e)) if self._e else [], cols=self.rows)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> SeriesMatrix:
        return SeriesMatrix(self.algebra, [[self._e[i][j] for j in cols] for i in rows], cols=len(cols))

    def is_zero(self) -> bool:
        """All known coefficients vanish."""
        return all(f.is_zero() for _, _, f in self.entries())

    def same_to(self, other: SeriesMatrix, order: int | None = None) -> bool:
        return self.shape == other.shape and all(
            a.same_to(b, order) for ra, rb in zip(self._e, other._e) for a, b in zip(ra, rb))

    def inverse(self, order: int | None = None) -> SeriesMatrix:
        """Inverse over R_k((x)) by Gauss-Jordan elimination with unit pivots.

        A series is a unit iff its reduction modulo the parameters is
        nonzero; among the candidates the one of lowest reduced valuation is
        used.  ``order`` bounds the precision of otherwise infinite inverses
        of exact entries.
        """
        if self.rows != self.cols:
            raise PreconditionError("only square series matrices are invertible")
        n = self.rows
        alg = self.algebra
        left = [list(r) for r in self._e]
        right = [list(r) for r in SeriesMatrix.identity(alg, n)._e]
        for c in range(n):
            best, best_val = None, None
            for i in range(c, n):
                w = left[i][c].reduced_valuation()
                if w is not None and (best_val is None or w < best_val):
                    best, best_val = i, w
            if best is None:
                raise NonUnitError("series matrix is not invertible over R_k((x))")
            left[c], left[best] = left[best], left[c]
            right[c], right[best] = right[best], right[c]
            pinv = series_inv(left[c][c], order)
            left[c] = [f * pinv for f in left[c]]
            right[c] = [f * pinv for f in right[c]]
            for i in range(n):
                if i == c or left[i][c].is_zero() and left[i][c].order is None:
                    continue
                fac = left[i][c]
                left[i] = [a - fac * b for a, b in zip(left[i], left[c])]
                right[i] = [a - fac * b for a, b in zip(right[i], right[c])]
        return SeriesMatrix(alg, right, cols=n)

    def __eq__(self, other):
        if not isinstance(other, SeriesMatrix):
            return NotImplemented
        return self.algebra == other.algebra and self._e == other._e

    def __hash__(self):
        return hash((self.algebra, self._e))

    def __repr__(self):
        return f"SeriesMatrix({[[str(f) for f in r] for r in self._e]})"
