"""Reduction of logarithmic systems to constant (Euler) form."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

from .connection import (
    Connection,
    distinct_exponents,
    exponents,
    gauge_residual,
    in_tau,
    residue,
)
from .errors import PreconditionError, ResonanceError, StepBudgetExceeded
from .linalg import LocalMatrix, block_decompose, sylvester_solve
from .series import SeriesMatrix

DEFAULT_MAX_STEPS = 10_000


@dataclass(frozen=True)
class ShearRecord:
    eigenvalue: Fraction
    direction: int
    gauge: SeriesMatrix


@dataclass
class EulerForm:
    """A constant system theta z = B z together with the gauge y = P z."""

    B: LocalMatrix
    P: SeriesMatrix
    tau_offset: Fraction | None = None
    shear_log: list[ShearRecord] = field(default_factory=list)
    source: Connection | None = None

    @property
    def size(self) -> int:
        return self.B.rows

    @property
    def algebra(self):
        return self.B.algebra

    @property
    def order(self) -> int | None:
        return self.P.order

    def exponents(self) -> tuple[Fraction, ...]:
        from .linalg import eigen_multiset
        return tuple(eigen_multiset(self.B.augment()))

    def connection(self, order: int | None = None) -> Connection:
        if order is None:
            order = self.source.order if self.source is not None else 0
        return Connection.euler(self.B, order)

    def residual(self, a: Connection | None = None) -> SeriesMatrix:
        """theta(P) - A P + P B for the source system (or ``a``)."""
        a = a if a is not None else self.source
        if a is None:
            raise PreconditionError("no source system recorded for this Euler form")
        return gauge_residual(a, self.P, self.B)


def resonant_pairs(values) -> list[tuple[Fraction, Fraction]]:
    vals = sorted(set(values))
    return [(a, b) for i, a in enumerate(vals) for b in vals[i + 1:] if (b - a).denominator == 1]


def euler_reduce(c: Connection) -> EulerForm:
    """Find P = I + P_1 x + ... with P^-1 A P - P^-1 theta P = A(0).

    Requires that no two exponents differ by a nonzero integer.  The gauge is
    computed from (nu - ad A0) P_nu = sum_{i=1..nu} A_i P_{nu-i}.
    """
    a0 = residue(c)
    pairs = resonant_pairs(exponents(c))
    if pairs:
        lo, hi = pairs[0]
        raise ResonanceError(
            f"exponents {lo} and {hi} differ by the integer {hi - lo}; reduce with deligne_manin first",
            pair=(lo, hi), difference=hi - lo)
    alg, n, order = c.algebra, c.size, c.order
    coeffs = [c.coeff_matrix(i) for i in range(order + 1)]
    ps: dict[int, LocalMatrix] = {0: LocalMatrix.identity(alg, n)}
    for nu in range(1, order + 1):
        rhs = LocalMatrix.zeros(alg, n)
        for i in range(1, nu + 1):
            if nu - i in ps and not coeffs[i].is_zero():
                rhs = rhs + coeffs[i] @ ps[nu - i]
        if rhs.is_zero():
            continue
        ps[nu] = sylvester_solve(nu, a0, a0, rhs)
    p = SeriesMatrix.from_coefficients(alg, ps, n, n, order)
    return EulerForm(B=a0, P=p, tau_offset=None, shear_log=[], source=c)


def _shear(c: Connection, rho: Fraction, direction: int) -> tuple[Connection, SeriesMatrix]:
    if direction not in (1, -1):
        raise PreconditionError(f"shear direction must be +1 or -1, got {direction}")
    rho = Fraction(rho)
    bd = block_decompose(residue(c))
    if rho not in [v for v, _ in bd.eigenvalues]:
        raise PreconditionError(f"{rho} is not an exponent of the system")
    idx = set(bd.indices(rho))
    n = c.size
    s = [-direction if i in idx else 0 for i in range(n)]
    conj = bd.P_inv @ (c.matrix @ bd.P)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            f = conj[i, j].shift(s[j] - s[i])
            if i == j and s[i]:
                f = f - s[i]
            row.append(f)
        rows.append(row)
    sheared = SeriesMatrix(c.algebra, rows, cols=n)
    gauge = SeriesMatrix.constant(bd.P) @ SeriesMatrix.diag_monomials(c.algebra, s)
    return Connection(sheared), gauge


def shear_once(c: Connection, rho: Fraction, direction: int) -> Connection:
    """Move the exponent rho to rho + direction, other exponents unchanged.

    The residue is first block-diagonalised by a constant change of basis;
    then the basis vectors of the rho-block are scaled by x^(-direction).
    """
    return _shear(c, rho, direction)[0]


def shear_with_gauge(c: Connection, rho: Fraction, direction: int) -> tuple[Connection, SeriesMatrix]:
    """Like :func:`shear_once`, also returning the gauge P with y = P z."""
    return _shear(c, rho, direction)


def _budget(max_steps: int | None) -> int:
    if max_steps is not None:
        return max_steps
    env = os.environ.get("RSCONN_MAX_STEPS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise PreconditionError(f"RSCONN_MAX_STEPS must be an integer, got {env!r}") from None
    return DEFAULT_MAX_STEPS


def tau_distance(rho: Fraction, tau_offset: Fraction) -> int:
    """Number of unit shifts needed to bring rho into [c, c+1)."""
    if rho < tau_offset:
        return math.ceil(tau_offset - rho)
    return math.floor(rho - tau_offset)


def predicted_shears(c: Connection, tau_offset: Fraction = Fraction(0)) -> int:
    return sum(tau_distance(rho, Fraction(tau_offset)) for rho in distinct_exponents(c))


def deligne_manin(c: Connection, tau_offset: Fraction = Fraction(0), max_steps: int | None = None) -> EulerForm:
    """Gauge a logarithmic system to Euler form with exponents in [c, c+1).

    Exponents outside the window are moved by single shears, farthest first;
    afterwards no two exponents differ by a nonzero integer and
    :func:`euler_reduce` finishes the job.
    """
    tau_offset = Fraction(tau_offset)
    budget = _budget(max_steps)
    c.require_logarithmic()
    cur = c
    total = SeriesMatrix.identity(c.algebra, c.size)
    log: list[ShearRecord] = []
    while True:
        if cur.order is not None and cur.order < 0:
            raise PreconditionError(
                f"x-precision exhausted after {len(log)} shears; the input needs more terms (order_x)")
        outside = [(tau_distance(r, tau_offset), r) for r in distinct_exponents(cur) if not in_tau(r, tau_offset)]
        if not outside:
            break
        if len(log) >= budget:
            raise StepBudgetExceeded(
                f"shear budget of {budget} steps exhausted with exponents {[str(r) for _, r in outside]} "
                f"outside [{tau_offset}, {tau_offset + 1})")
        _, rho = max(outside)
        direction = -1 if rho >= tau_offset + 1 else 1
        cur, gauge = _shear(cur, rho, direction)
        total = total @ gauge
        log.append(ShearRecord(rho, direction, gauge))
    reduced = euler_reduce(cur)
    return EulerForm(B=reduced.B, P=total @ reduced.P, tau_offset=tau_offset, shear_log=log, source=c)


def check_gauge(a: Connection, e: EulerForm) -> bool:
    """True when theta(P) = A P - P B holds to the known precision."""
    return gauge_residual(a, e.P, e.B).is_zero()

