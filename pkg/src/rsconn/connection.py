"""Differential systems theta y = A(x) y over R_k((x)).

A :class:`Connection` is the coefficient matrix A(x) in a chosen basis,
truncated at a shared x-order N.  Gauge transformations follow the substitution
y = P z, which turns A into P^-1 A P - P^-1 theta(P).
"""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from typing import Sequence

from .errors import IncompatibleAlgebraError, NotLogarithmicError, PreconditionError
from .linalg import LocalMatrix, eigen_multiset
from .ring import ParamAlgebra
from .series import LaurentSeries, SeriesMatrix

ExponentSet = tuple[Fraction, ...]


def tau_representative(q: Fraction, tau_offset: Fraction = Fraction(0)) -> Fraction:
    """The unique element of [c, c+1) congruent to q modulo Z."""
    q, c = Fraction(q), Fraction(tau_offset)
    return q - math.floor(q - c)


def in_tau(q: Fraction, tau_offset: Fraction = Fraction(0)) -> bool:
    return tau_offset <= q < tau_offset + 1


class Connection:
    """The system theta y = A y with A an n x n matrix over R_k((x))."""

    def __init__(self, matrix: SeriesMatrix, order: int | None = None):
        if matrix.rows != matrix.cols:
            raise PreconditionError(f"connection matrix must be square, got {matrix.shape}")
        if order is None:
            order = matrix.order
            if order is None:
                raise PreconditionError("exact connection matrices need an explicit x-order")
        known = matrix.order
        if known is not None and known < order:
            raise PreconditionError(f"entries are only known to x^{known}, not x^{order}")
        self.matrix = matrix.truncate(order)
        self.order = order
        self.algebra = matrix.algebra

    @classmethod
    def euler(cls, b: LocalMatrix, order: int) -> Connection:
        """eul(V, B): the constant system theta y = B y."""
        return cls(SeriesMatrix.constant(b), order)

    @classmethod
    def from_coefficients(cls, algebra: ParamAlgebra, mats: dict[int, LocalMatrix], size: int,
                          order: int) -> Connection:
        return cls(SeriesMatrix.from_coefficients(algebra, mats, size, size, order), order)

    @classmethod
    def unit(cls, algebra: ParamAlgebra, order: int) -> Connection:
        return cls.euler(LocalMatrix.zeros(algebra, 1), order)

    @property
    def size(self) -> int:
        return self.matrix.rows

    def coeff_matrix(self, n: int) -> LocalMatrix:
        return self.matrix.coeff_matrix(n)

    def pole_entries(self) -> list[tuple[int, int, int]]:
        return [(i, j, f.valuation) for i, j, f in self.matrix.entries() if not f.is_zero() and f.valuation < 0]

    def is_logarithmic(self) -> bool:
        return not self.pole_entries()

    def is_constant(self) -> bool:
        return all(f.is_zero() or set(f.coeffs) == {0} for _, _, f in self.matrix.entries())

    def require_logarithmic(self) -> None:
        bad = self.pole_entries()
        if bad:
            where = ", ".join(f"A[{i}][{j}] has a pole of order {-v}" for i, j, v in bad)
            raise NotLogarithmicError(f"system is not logarithmic at x = 0: {where}", entries=bad)

    def truncate_order(self, order: int) -> Connection:
        if order > self.order:
            raise PreconditionError(f"cannot raise the x-order from {self.order} to {order}")
        return Connection(self.matrix, order)

    def __eq__(self, other):
        if not isinstance(other, Connection):
            return NotImplemented
        return self.order == other.order and self.matrix == other.matrix

    def __hash__(self):
        return hash((self.order, self.matrix))

    def __repr__(self):
        return f"Connection(size={self.size}, algebra={self.algebra}, order={self.order})"


def residue(c: Connection) -> LocalMatrix:
    """A(0) for a logarithmic system."""
    c.require_logarithmic()
    return c.coeff_matrix(0)


def exponents(c: Connection) -> ExponentSet:
    """Eigenvalues, with multiplicity, of the residue reduced modulo the parameters."""
    return tuple(eigen_multiset(residue(c).augment()))


def distinct_exponents(c: Connection) -> list[Fraction]:
    return sorted(set(exponents(c)))


def gauge_transform(c: Connection, p: SeriesMatrix, inverse_order: int | None = None) -> Connection:
    """The system satisfied by z where y = P z: P^-1 (A P - theta P)."""
    if p.algebra != c.algebra:
        raise IncompatibleAlgebraError(f"{p.algebra} vs {c.algebra}")
    if p.shape != (c.size, c.size):
        raise PreconditionError(f"gauge of shape {p.shape} for a system of size {c.size}")
    if inverse_order is None:
        inverse_order = c.order + 2 * (abs(p.valuation) + 1)
    p_inv = p.inverse(inverse_order)
    b = p_inv @ (c.matrix @ p - p.theta())
    order = b.order
    if order is None:
        order = c.order
    return Connection(b, min(order, c.order + 2 * (abs(p.valuation) + 1)))


def gauge_residual(a: Connection | SeriesMatrix, p: SeriesMatrix, b: LocalMatrix | SeriesMatrix) -> SeriesMatrix:
    """theta(P) - A P + P B; vanishes to its known order for a valid gauge."""
    a_mat = a.matrix if isinstance(a, Connection) else a
    b_mat = SeriesMatrix.constant(b) if isinstance(b, LocalMatrix) else b
    return p.theta() - a_mat @ p + p @ b_mat


def _common(c1: Connection, c2: Connection) -> int:
    if c1.algebra != c2.algebra:
        raise IncompatibleAlgebraError(f"{c1.algebra} vs {c2.algebra}")
    return min(c1.order, c2.order)


def _kron(a: SeriesMatrix, b: SeriesMatrix) -> SeriesMatrix:
    rows = []
    for ra in a.tolist():
        for rb in b.tolist():
            rows.append([f * g for f in ra for g in rb])
    return SeriesMatrix(a.algebra, rows, cols=a.cols * b.cols)


def tensor(c1: Connection, c2: Connection) -> Connection:
    """A1 (x) I + I (x) A2 on the basis (i, j) -> i*n2 + j."""
    order = _common(c1, c2)
    alg = c1.algebra
    i1 = SeriesMatrix.identity(alg, c1.size)
    i2 = SeriesMatrix.identity(alg, c2.size)
    return Connection(_kron(c1.matrix, i2) + _kron(i1, c2.matrix), order)


def internal_hom(c1: Connection, c2: Connection) -> Connection:
    """System for H with theta H = A2 H - H A1, H of shape n2 x n1 stored row-major."""
    order = _common(c1, c2)
    alg = c1.algebra
    i1 = SeriesMatrix.identity(alg, c1.size)
    i2 = SeriesMatrix.identity(alg, c2.size)
    return Connection(_kron(c2.matrix, i1) - _kron(i2, c1.matrix.transpose()), order)


def dual(c: Connection) -> Connection:
    return internal_hom(c, Connection.unit(c.algebra, c.order))


def direct_sum(c1: Connection, c2: Connection) -> Connection:
    order = _common(c1, c2)
    alg = c1.algebra
    n1, n2 = c1.size, c2.size
    rows = []
    for i in range(n1 + n2):
        row = []
        for j in range(n1 + n2):
            if i < n1 and j < n1:
                row.append(c1.matrix[i, j])
            elif i >= n1 and j >= n1:
                row.append(c2.matrix[i - n1, j - n1])
            else:
                row.append(LaurentSeries.zero(alg))
        rows.append(row)
    return Connection(SeriesMatrix(alg, rows, cols=n1 + n2), order)


def direct_sum_all(conns: Sequence[Connection], algebra: ParamAlgebra, order: int) -> Connection:
    out = Connection(SeriesMatrix.zeros(algebra, 0), order)
    for c in conns:
        out = direct_sum(out, c)
    return out


def rank_one_class(c: Connection, tau_offset: Fraction = Fraction(0)) -> Fraction:
    """Isomorphism class of a rank-one logarithmic system: its exponent modulo Z."""
    if c.size != 1:
        raise PreconditionError(f"rank_one_class needs a rank-one system, got size {c.size}")
    (rho,) = exponents(c)
    return tau_representative(rho, tau_offset)


def truncate_params(c: Connection, k_new: int) -> Connection:
    """Reduce every coefficient modulo m^(k_new+1)."""
    if k_new < 0 or k_new > c.algebra.trunc_order:
        raise PreconditionError(
            f"can only truncate to 0 <= k <= {c.algebra.trunc_order}, got {k_new}")
    return Connection(c.matrix.truncate_params(k_new), c.order)


def exponent_counter(values) -> Counter:
    return Counter(Fraction(v) for v in values)
