"""Exact linear algebra over Q and over R_k.

Rational matrices (``QMatrix``) are plain lists of lists of Fractions.
Matrices over R_k are :class:`LocalMatrix` objects.  The heavy lifting for
R_k is always reduced to Q: an element of R_k is a vector over Q indexed by
monomials, and every linear problem below is either solved monomial by
monomial in increasing degree (the system is block lower triangular in that
grading) or written out as one Q-linear system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (IncompatibleAlgebraError, InternalError, NonUnitError, PreconditionError,
                     ResonanceError, UnsupportedExponentFieldError)
from .ring import LocalElem, Monomial, ParamAlgebra

QMatrix = list[list[Fraction]]
Poly = list[Fraction]  # coefficients, lowest degree first

# --------------------------------------------------------------------------
# rational matrices


def q_matrix(rows: Iterable[Iterable]) -> QMatrix:
    return [[Fraction(v) for v in row] for row in rows]


def q_identity(n: int) -> QMatrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def q_zeros(m: int, n: int) -> QMatrix:
    return [[Fraction(0)] * n for _ in range(m)]


def q_mul(a: QMatrix, b: QMatrix) -> QMatrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        nz = [(l, v) for l, v in enumerate(row) if v]
        out.append([sum((v * b[l][j] for l, v in nz), Fraction(0)) for j in range(cols)])
    assert all(len(row) == inner for row in a)
    return out


def q_add(a: QMatrix, b: QMatrix) -> QMatrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def q_sub(a: QMatrix, b: QMatrix) -> QMatrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def q_scale(a: QMatrix, c) -> QMatrix:
    return [[x * c for x in row] for row in a]


def q_kron(a: QMatrix, b: QMatrix) -> QMatrix:
    return [[x * y for x in ra for y in rb] for ra in a for rb in b]


def q_transpose(a: QMatrix) -> QMatrix:
    return [list(col) for col in zip(*a)] if a else []


def q_rref(a: QMatrix) -> tuple[QMatrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [list(row) for row in a]
    rows = len(m)
    cols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        m[r] = [v / piv for v in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def q_rank(a: QMatrix) -> int:
    return len(q_rref(a)[1])


def q_nullspace(a: QMatrix, ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of {v : a v = 0}, one vector per free column, in column order."""
    cols = len(a[0]) if a else (ncols or 0)
    r, pivots = q_rref(a)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -r[i][f]
        basis.append(v)
    return basis


class QLinearSolver:
    """LU factorisation of a square rational matrix, reused across solves."""

    def __init__(self, a: QMatrix):
        n = len(a)
        m = [list(row) for row in a]
        perm = list(range(n))
        for c in range(n):
            p = next((i for i in range(c, n) if m[i][c]), None)
            if p is None:
                raise NonUnitError("singular rational matrix")
            if p != c:
                m[c], m[p] = m[p], m[c]
                perm[c], perm[p] = perm[p], perm[c]
            piv = m[c][c]
            for i in range(c + 1, n):
                if m[i][c]:
                    f = m[i][c] / piv
                    m[i][c] = f
                    row_i, row_c = m[i], m[c]
                    for j in range(c + 1, n):
                        if row_c[j]:
                            row_i[j] -= f * row_c[j]
        self.n = n
        self.lu = m
        self.perm = perm

    def solve(self, b: Sequence[Fraction]) -> list[Fraction]:
        n, lu = self.n, self.lu
        y = [b[p] for p in self.perm]
        for i in range(n):
            row = lu[i]
            s = y[i]
            for j in range(i):
                if row[j] and y[j]:
                    s -= row[j] * y[j]
            y[i] = s
        for i in reversed(range(n)):
            row = lu[i]
            s = y[i]
            for j in range(i + 1, n):
                if row[j] and y[j]:
                    s -= row[j] * y[j]
            y[i] = s / row[i]
        return y


def q_inverse(a: QMatrix) -> QMatrix:
    n = len(a)
    solver = QLinearSolver(a)
    cols = [solver.solve([Fraction(int(i == j)) for i in range(n)]) for j in range(n)]
    return q_transpose(cols)


# --------------------------------------------------------------------------
# polynomials over Q


def poly_trim(p: Poly) -> Poly:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def poly_mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return poly_trim(out)


def poly_eval(p: Poly, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_deflate(p: Poly, root: Fraction) -> Poly:
    """Quotient of p by (X - root); assumes root is a root."""
    n = len(p) - 1
    q = [Fraction(0)] * n
    acc = Fraction(0)
    for i in range(n, 0, -1):
        acc = acc * root + p[i]
        q[i - 1] = acc
    return q


def q_charpoly(a: QMatrix) -> Poly:
    """det(X I - a), monic, via similarity reduction to Hessenberg form."""
    n = len(a)
    h = [list(row) for row in a]
    for m in range(1, n - 1):
        p = next((i for i in range(m, n) if h[i][m - 1]), None)
        if p is None:
            continue
        if p != m:
            h[m], h[p] = h[p], h[m]
            for row in h:
                row[m], row[p] = row[p], row[m]
        piv = h[m][m - 1]
        for i in range(m + 1, n):
            if h[i][m - 1]:
                u = h[i][m - 1] / piv
                h[i] = [x - u * y for x, y in zip(h[i], h[m])]
                for row in h:
                    row[m] += u * row[i]
    polys: list[Poly] = [[Fraction(1)]]
    for m in range(1, n + 1):
        pm = poly_mul([-h[m - 1][m - 1], Fraction(1)], polys[m - 1])
        t = Fraction(1)
        for i in range(1, m):
            t *= h[m - i][m - i - 1]
            coef = t * h[m - i - 1][m - 1]
            if coef:
                prev = polys[m - i - 1]
                pm = pm + [Fraction(0)] * (len(prev) - len(pm))
                for j, c in enumerate(prev):
                    pm[j] -= coef * c
        polys.append(pm)
    return polys[n] if n else [Fraction(1)]


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def rational_roots(p: Poly) -> tuple[list[tuple[Fraction, int]], Poly]:
    """Rational roots with multiplicity, plus the root-free cofactor."""
    p = poly_trim(p)
    if not p:
        raise PreconditionError("the zero polynomial has no finite root set")
    roots: dict[Fraction, int] = {}
    zeros = 0
    while len(p) > 1 and p[0] == 0:
        p = p[1:]
        zeros += 1
    if zeros:
        roots[Fraction(0)] = zeros
    while len(p) > 1:
        lcm = 1
        for c in p:
            lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
        ints = [int(c * lcm) for c in p]
        g = 0
        for c in ints:
            g = math.gcd(g, c)
        ints = [c // g for c in ints]
        bound = 1 + max(abs(Fraction(c, ints[-1])) for c in ints[:-1])
        found = None
        for q in _divisors(ints[-1]):
            for num in _divisors(ints[0]):
                if Fraction(num, q) > bound:
                    break
                for cand in (Fraction(num, q), Fraction(-num, q)):
                    if poly_eval(p, cand) == 0:
                        found = cand
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            break
        while len(p) > 1 and poly_eval(p, found) == 0:
            p = poly_deflate(p, found)
            roots[found] = roots.get(found, 0) + 1
    return sorted(roots.items()), p


def rational_eigenvalues(a: QMatrix) -> list[tuple[Fraction, int]]:
    """Eigenvalues of a rational matrix with multiplicities, ascending.

    Raises UnsupportedExponentFieldError when the characteristic polynomial
    does not split over Q.
    """
    if any(len(row) != len(a) for row in a):
        raise PreconditionError("eigenvalues need a square matrix")
    roots, rest = rational_roots(q_charpoly(a))
    if len(rest) > 1:
        raise UnsupportedExponentFieldError(
            "characteristic polynomial does not split over Q: leftover factor of degree "
            f"{len(rest) - 1} with coefficients {[str(c) for c in rest]}", factor=rest)
    return roots


def eigen_multiset(a: QMatrix) -> list[Fraction]:
    return [v for v, m in rational_eigenvalues(a) for _ in range(m)]


# --------------------------------------------------------------------------
# matrices over R_k


class LocalMatrix:
    """A rectangular matrix over R_k, immutable."""

    __slots__ = ("algebra", "rows", "cols", "_e")

    def __init__(self, algebra: ParamAlgebra, entries: Iterable[Iterable], cols: int | None = None):
        self.algebra = algebra
        self._e = tuple(tuple(algebra.coerce(v) for v in row) for row in entries)
        self.rows = len(self._e)
        self.cols = len(self._e[0]) if self._e else (cols or 0)
        if any(len(row) != self.cols for row in self._e):
            raise PreconditionError("ragged matrix")

    @classmethod
    def _raw(cls, algebra, entries, rows, cols):
        obj = cls.__new__(cls)
        obj.algebra = algebra
        obj._e = entries
        obj.rows = rows
        obj.cols = cols
        return obj

    @classmethod
    def identity(cls, algebra: ParamAlgebra, n: int) -> LocalMatrix:
        one, zero = algebra.one(), algebra.zero()
        return cls._raw(algebra, tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)), n, n)

    @classmethod
    def zeros(cls, algebra: ParamAlgebra, m: int, n: int | None = None) -> LocalMatrix:
        n = m if n is None else n
        zero = algebra.zero()
        return cls._raw(algebra, tuple(tuple(zero for _ in range(n)) for _ in range(m)), m, n)

    @classmethod
    def from_q(cls, algebra: ParamAlgebra, a: Iterable[Iterable]) -> LocalMatrix:
        rows = [list(r) for r in a]
        return cls(algebra, [[algebra.const(Fraction(v)) for v in r] for r in rows], cols=0)

    @classmethod
    def block_diag(cls, algebra: ParamAlgebra, blocks: Sequence[LocalMatrix]) -> LocalMatrix:
        n = sum(b.rows for b in blocks)
        out = [[algebra.zero()] * n for _ in range(n)]
        off = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    out[off + i][off + j] = b._e[i][j]
            off += b.rows
        return cls(algebra, out, cols=n)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij) -> LocalElem:
        i, j = ij
        return self._e[i][j]

    def tolist(self) -> list[list[LocalElem]]:
        return [list(r) for r in self._e]

    def row(self, i: int) -> tuple[LocalElem, ...]:
        return self._e[i]

    def column(self, j: int) -> list[LocalElem]:
        return [r[j] for r in self._e]

    def augment(self) -> QMatrix:
        return [[v.augment() for v in r] for r in self._e]

    def components(self) -> dict[Monomial, QMatrix]:
        """Split A = sum_alpha A_alpha t^alpha into rational matrices."""
        out: dict[Monomial, QMatrix] = {}
        for i, r in enumerate(self._e):
            for j, v in enumerate(r):
                for mono, q in v._c.items():
                    if mono not in out:
                        out[mono] = q_zeros(self.rows, self.cols)
                    out[mono][i][j] = q
        return out

    @classmethod
    def from_components(cls, algebra: ParamAlgebra, comps: dict[Monomial, QMatrix], m: int, n: int) -> LocalMatrix:
        acc: list[list[dict]] = [[{} for _ in range(n)] for _ in range(m)]
        for mono, mat in comps.items():
            for i in range(m):
                for j in range(n):
                    if mat[i][j]:
                        acc[i][j][mono] = mat[i][j]
        return cls._raw(algebra, tuple(tuple(LocalElem(algebra, acc[i][j]) for j in range(n)) for i in range(m)), m, n)

    def _same(self, other: LocalMatrix):
        if other.algebra != self.algebra:
            raise IncompatibleAlgebraError(f"{self.algebra} vs {other.algebra}")

    def __add__(self, other: LocalMatrix) -> LocalMatrix:
        self._same(other)
        if self.shape != other.shape:
            raise PreconditionError(f"shape mismatch {self.shape} vs {other.shape}")
        return LocalMatrix._raw(self.algebra, tuple(tuple(a + b for a, b in zip(ra, rb))
                                                    for ra, rb in zip(self._e, other._e)), self.rows, self.cols)

    def __neg__(self) -> LocalMatrix:
        return LocalMatrix._raw(self.algebra, tuple(tuple(-a for a in r) for r in self._e), self.rows, self.cols)

    def __sub__(self, other: LocalMatrix) -> LocalMatrix:
        return self + (-other)

    def __mul__(self, c) -> LocalMatrix:
        if isinstance(c, LocalMatrix):
            return NotImplemented
        return LocalMatrix._raw(self.algebra, tuple(tuple(a * c for a in r) for r in self._e), self.rows, self.cols)

    __rmul__ = __mul__

    def __matmul__(self, other: LocalMatrix) -> LocalMatrix:
        if not isinstance(other, LocalMatrix):
            return NotImplemented
        self._same(other)
        if self.cols != other.rows:
            raise PreconditionError(f"shape mismatch {self.shape} @ {other.shape}")
        zero = self.algebra.zero()
        cols = [other.column(j) for j in range(other.cols)]
        out = []
        for r in self._e:
            nz = [(l, v) for l, v in enumerate(r) if v]
            row = []
            for col in cols:
                acc = zero
                for l, v in nz:
                    w = col[l]
                    if w:
                        acc = acc + v * w
                row.append(acc)
            out.append(tuple(row))
        return LocalMatrix._raw(self.algebra, tuple(out), self.rows, other.cols)

    def transpose(self) -> LocalMatrix:
        return LocalMatrix._raw(self.algebra, tuple(zip(*self._e)) if self._e else (), self.cols, self.rows)

    @property
    def T(self) -> LocalMatrix:
        return self.transpose()

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> LocalMatrix:
        return LocalMatrix._raw(self.algebra, tuple(tuple(self._e[i][j] for j in cols) for i in rows),
                                len(rows), len(cols))

    def hstack(self, other: LocalMatrix) -> LocalMatrix:
        return LocalMatrix._raw(self.algebra, tuple(a + b for a, b in zip(self._e, other._e)),
                                self.rows, self.cols + other.cols)

    def kron(self, other: LocalMatrix) -> LocalMatrix:
        self._same(other)
        out = tuple(tuple(a * b for a in ra for b in rb) for ra in self._e for rb in other._e)
        return LocalMatrix._raw(self.algebra, out, self.rows * other.rows, self.cols * other.cols)

    def is_zero(self) -> bool:
        return all(not v for r in self._e for v in r)

    def truncate(self, k_new: int) -> LocalMatrix:
        alg = ParamAlgebra(self.algebra.num_params, k_new)
        return LocalMatrix._raw(alg, tuple(tuple(v.truncate(k_new) for v in r) for r in self._e),
                                self.rows, self.cols)

    def inverse(self) -> LocalMatrix:
        """Inverse over R_k; exists iff the reduction is invertible over Q."""
        if self.rows != self.cols:
            raise PreconditionError("only square matrices are invertible")
        try:
            q = q_inverse(self.augment())
        except NonUnitError:
            raise NonUnitError("matrix is not invertible: its reduction modulo the parameters is singular")
        qm = LocalMatrix.from_q(self.algebra, q)
        n = self.rows
        eye = LocalMatrix.identity(self.algebra, n)
        err = eye - self @ qm  # entries in m, nilpotent
        total, power = eye, eye
        for _ in range(self.algebra.trunc_order):
            power = power @ err
            if power.is_zero():
                break
            total = total + power
        return qm @ total

    def __eq__(self, other):
        if not isinstance(other, LocalMatrix):
            return NotImplemented
        return self.algebra == other.algebra and self.shape == other.shape and self._e == other._e

    def __hash__(self):
        return hash((self.algebra, self._e))

    def __repr__(self):
        return f"LocalMatrix({[[str(v) for v in r] for r in self._e]})"


def poly_at_matrix(p: Poly, a: LocalMatrix) -> LocalMatrix:
    """p(A) by Horner's rule."""
    n = a.rows
    alg = a.algebra
    acc = LocalMatrix.zeros(alg, n)
    eye = LocalMatrix.identity(alg, n)
    for c in reversed(p):
        acc = acc @ a + eye * c
    return acc


# --------------------------------------------------------------------------
# Sylvester operators


def sylvester_operator_q(nu, a: QMatrix, b: QMatrix) -> QMatrix:
    """Matrix of X -> nu X - (a X - X b) on row-major vec(X)."""
    m, n = len(a), len(b)
    op = q_scale(q_identity(m * n), Fraction(nu))
    op = q_sub(op, q_kron(a, q_identity(n)))
    return q_add(op, q_kron(q_identity(m), q_transpose(b)))


def _resonance_diagnosis(nu, a: QMatrix, b: QMatrix) -> ResonanceError:
    try:
        sa, sb = rational_eigenvalues(a), rational_eigenvalues(b)
    except UnsupportedExponentFieldError:
        return ResonanceError(f"operator nu*id - (A X - X B) is singular for nu = {nu}", difference=Fraction(nu))
    for x, _ in sa:
        for y, _ in sb:
            if x - y == nu:
                diff = x - y
                rel = "a positive integer" if diff > 0 and diff.denominator == 1 else f"{diff}"
                return ResonanceError(
                    f"exponents {x} and {y} differ by {rel} (nu = {nu} lies in Sp(A) - Sp(B))",
                    pair=(x, y), difference=Fraction(nu))
    raise InternalError("singular Sylvester operator without a matching eigenvalue pair")


def sylvester_solve(nu, a: LocalMatrix, b: LocalMatrix, c: LocalMatrix) -> LocalMatrix:
    """Solve nu X - (A X - X B) = C exactly over R_k.

    The Q-linear system behind this equation is block lower triangular when
    the unknowns are graded by monomial degree; its diagonal blocks are all
    the rational operator built from the reductions of A and B, which is
    invertible iff nu is not a difference of their eigenvalues.
    """
    for other in (b, c):
        a._same(other)
    m, n = a.rows, b.rows
    if a.cols != m or b.cols != n or c.shape != (m, n):
        raise PreconditionError(f"incompatible shapes A{a.shape}, B{b.shape}, C{c.shape}")
    alg = a.algebra
    abar, bbar = a.augment(), b.augment()
    try:
        solver = QLinearSolver(sylvester_operator_q(nu, abar, bbar)) if m * n else None
    except NonUnitError:
        raise _resonance_diagnosis(nu, abar, bbar) from None
    if solver is None:
        return LocalMatrix.zeros(alg, m, n)
    ac = {mono: mat for mono, mat in a.components().items() if sum(mono)}
    bc = {mono: mat for mono, mat in b.components().items() if sum(mono)}
    cc = c.components()
    xs: dict[Monomial, QMatrix] = {}
    for gamma in alg.basis:
        rhs = [list(r) for r in cc.get(gamma, q_zeros(m, n))]
        for beta, mat in ac.items():
            alpha = tuple(g - e for g, e in zip(gamma, beta))
            if min(alpha, default=0) >= 0 and alpha in xs:
                rhs = q_add(rhs, q_mul(mat, xs[alpha]))
        for beta, mat in bc.items():
            alpha = tuple(g - e for g, e in zip(gamma, beta))
            if min(alpha, default=0) >= 0 and alpha in xs:
                rhs = q_sub(rhs, q_mul(xs[alpha], mat))
        if not any(v for r in rhs for v in r):
            continue
        sol = solver.solve([v for r in rhs for v in r])
        xs[gamma] = [sol[i * n:(i + 1) * n] for i in range(m)]
    return LocalMatrix.from_components(alg, xs, m, n)


# --------------------------------------------------------------------------
# idempotents and block decomposition


@dataclass(frozen=True)
class SpectralData:
    eigenvalues: list[tuple[Fraction, int]]
    projectors: list[LocalMatrix]
    blocks: list[LocalMatrix]  # per eigenvalue: columns spanning the image of its projector


def _hermite_projector_poly(eigs: list[tuple[Fraction, int]], idx: int) -> Poly:
    """p with p = 1 mod (X - rho)^m and p = 0 mod (X - sigma)^m' elsewhere."""
    rho, mult = eigs[idx]
    g: Poly = [Fraction(1)]
    for j, (sigma, m) in enumerate(eigs):
        if j != idx:
            for _ in range(m):
                g = poly_mul(g, [-sigma, Fraction(1)])
    # Taylor coefficients of g around rho, then the inverse series mod u^mult
    shifted = _taylor_shift(g, rho)
    inv = [Fraction(0)] * mult
    inv[0] = 1 / shifted[0]
    for n in range(1, mult):
        s = sum((shifted[i] * inv[n - i] for i in range(1, min(n, len(shifted) - 1) + 1)), Fraction(0))
        inv[n] = -s / shifted[0]
    # h(X) = sum inv[n] (X - rho)^n
    h: Poly = []
    base: Poly = [Fraction(1)]
    for c in inv:
        term = [c * v for v in base]
        h = [x + y for x, y in _zip_pad(h, term)]
        base = poly_mul(base, [-rho, Fraction(1)])
    return poly_trim(poly_mul(g, h))


def _zip_pad(p: Poly, q: Poly):
    n = max(len(p), len(q))
    return zip(p + [Fraction(0)] * (n - len(p)), q + [Fraction(0)] * (n - len(q)))


def _taylor_shift(p: Poly, a: Fraction) -> Poly:
    """Coefficients of p(a + u) in u."""
    out = list(p)
    n = len(out)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            out[j] += a * out[j + 1]
    return out


def lift_idempotents(a: LocalMatrix) -> SpectralData:
    """Spectral projectors of A over R_k lifting those of its reduction.

    Each projector starts as p(A) with p the Hermite interpolation
    polynomial of the residue-level spectral projector, and is refined by
    e <- 3e^2 - 2e^3, which doubles the m-adic precision of idempotency.
    """
    if a.rows != a.cols:
        raise PreconditionError("spectral data needs a square matrix")
    eigs = rational_eigenvalues(a.augment())
    k = a.algebra.trunc_order
    max_steps = max(1, math.ceil(math.log2(k + 1))) + 1
    projectors, blocks = [], []
    for idx in range(len(eigs)):
        e = poly_at_matrix(_hermite_projector_poly(eigs, idx), a)
        for _ in range(max_steps + 1):
            e2 = e @ e
            if e2 == e:
                break
            e = e2 * 3 - (e2 @ e) * 2
        else:
            raise InternalError("idempotent refinement did not converge")
        projectors.append(e)
        _, pivots = q_rref(e.augment())
        blocks.append(e.submatrix(range(e.rows), pivots))
    return SpectralData(eigs, projectors, blocks)


@dataclass(frozen=True)
class BlockDecomposition:
    """P^-1 A P = diag(blocks), one block per eigenvalue of the reduction."""

    P: LocalMatrix
    P_inv: LocalMatrix
    blocks: list[LocalMatrix]
    eigenvalues: list[tuple[Fraction, int]]

    @property
    def sizes(self) -> list[int]:
        return [b.rows for b in self.blocks]

    def indices(self, rho: Fraction) -> list[int]:
        off = 0
        for (val, m), b in zip(self.eigenvalues, self.blocks):
            if val == rho:
                return list(range(off, off + m))
            off += b.rows
        raise PreconditionError(f"{rho} is not an eigenvalue")


def block_decompose(a: LocalMatrix) -> BlockDecomposition:
    spectral = lift_idempotents(a)
    n = a.rows
    if n == 0:
        empty = LocalMatrix.zeros(a.algebra, 0)
        return BlockDecomposition(empty, empty, [], [])
    p = spectral.blocks[0]
    for b in spectral.blocks[1:]:
        p = p.hstack(b)
    p_inv = p.inverse()
    d = p_inv @ a @ p
    blocks, off = [], 0
    for val, m in spectral.eigenvalues:
        idx = range(off, off + m)
        rest = [j for j in range(n) if j not in idx]
        if not d.submatrix(idx, rest).is_zero() or not d.submatrix(rest, idx).is_zero():
            raise InternalError("lifted projectors failed to block-diagonalise")
        blocks.append(d.submatrix(idx, idx))
        off += m
    return BlockDecomposition(p, p_inv, blocks, spectral.eigenvalues)


# --------------------------------------------------------------------------
# kernels


def kernel(a: LocalMatrix) -> list[list[LocalElem]]:
    """Q-basis of {v in R_k^n : A v = 0}.

    Unknowns are the rational coordinates v_{j, beta}; the result lists one
    vector of R_k^n per free coordinate.
    """
    alg = a.algebra
    basis = alg.basis
    pos = {mono: i for i, mono in enumerate(basis)}
    D = len(basis)
    m, n = a.rows, a.cols
    big = q_zeros(m * D, n * D)
    for i in range(m):
        for j in range(n):
            for mono_a, q in a[i, j]._c.items():
                for beta in basis:
                    gamma = tuple(x + y for x, y in zip(mono_a, beta))
                    if sum(gamma) > alg.trunc_order:
                        continue
                    big[i * D + pos[gamma]][j * D + pos[beta]] += q
    out = []
    for v in q_nullspace(big, n * D):
        out.append([LocalElem(alg, {basis[b]: v[j * D + b] for b in range(D)}) for j in range(n)])
    return out
