"""Seeded random inputs and sympy-based oracles shared by the test modules."""

from __future__ import annotations

import random
from fractions import Fraction

import sympy
from sympy.polys.domains import QQ
from sympy.polys.rings import ring

from rsconn.connection import Connection
from rsconn.linalg import LocalMatrix, q_inverse, q_mul
from rsconn.ring import LocalElem, ParamAlgebra
from rsconn.series import LaurentSeries, SeriesMatrix


def rand_rational(rng: random.Random, num: int = 3, den: int = 3) -> Fraction:
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def rand_elem(rng: random.Random, alg: ParamAlgebra, density: float = 0.5, constant: bool = True,
              num: int = 3) -> LocalElem:
    coeffs = {}
    for mono in alg.basis:
        if not constant and sum(mono) == 0:
            continue
        if rng.random() < density:
            coeffs[mono] = rand_rational(rng, num)
    return LocalElem(alg, coeffs)


def rand_local_matrix(rng, alg, n, m=None, density=0.5, constant=True) -> LocalMatrix:
    m = n if m is None else m
    return LocalMatrix(alg, [[rand_elem(rng, alg, density, constant) for _ in range(m)] for _ in range(n)],
                       cols=m)


def rand_unimodular(rng: random.Random, n: int) -> list[list[Fraction]]:
    """Integer matrix of determinant 1 with small entries (L times U)."""
    lower = [[Fraction(1 if i == j else (rng.randint(-1, 1) if j < i else 0)) for j in range(n)] for i in range(n)]
    upper = [[Fraction(1 if i == j else (rng.randint(-1, 1) if j > i else 0)) for j in range(n)] for i in range(n)]
    return q_mul(lower, upper)


def jordan_matrix(blocks: list[tuple[Fraction, int]], lower: bool = False) -> list[list[Fraction]]:
    n = sum(m for _, m in blocks)
    out = [[Fraction(0)] * n for _ in range(n)]
    off = 0
    for lam, m in blocks:
        for i in range(m):
            out[off + i][off + i] = Fraction(lam)
            if i + 1 < m:
                if lower:
                    out[off + i + 1][off + i] = Fraction(1)
                else:
                    out[off + i][off + i + 1] = Fraction(1)
        off += m
    return out


def rand_jordan_blocks(rng: random.Random, eigs: list[Fraction]) -> list[tuple[Fraction, int]]:
    """Split equal eigenvalues into random Jordan block sizes."""
    blocks = []
    for lam in sorted(set(eigs)):
        mult = eigs.count(lam)
        while mult:
            size = rng.randint(1, mult)
            blocks.append((lam, size))
            mult -= size
    return blocks


def split_q_matrix(rng: random.Random, eigs: list[Fraction], blocks=None) -> list[list[Fraction]]:
    """A rational matrix with the given eigenvalues, conjugated by a random unimodular matrix."""
    blocks = blocks or rand_jordan_blocks(rng, eigs)
    s = rand_unimodular(rng, len(eigs))
    return q_mul(q_mul(s, jordan_matrix(blocks)), q_inverse(s))


def rand_residue(rng, alg: ParamAlgebra, eigs: list[Fraction], density=0.4) -> LocalMatrix:
    """Residue whose reduction has spectrum ``eigs``, plus random terms in m."""
    base = LocalMatrix.from_q(alg, split_q_matrix(rng, eigs))
    if alg.is_field:
        return base
    return base + rand_local_matrix(rng, alg, len(eigs), density=density, constant=False)


def rand_log_system(rng, alg: ParamAlgebra, eigs: list[Fraction], order: int, density=0.3) -> Connection:
    n = len(eigs)
    mats = {0: rand_residue(rng, alg, eigs)}
    for i in range(1, order + 1):
        if rng.random() < 0.7:
            mats[i] = rand_local_matrix(rng, alg, n, density=density)
    return Connection.from_coefficients(alg, mats, n, order)


def non_resonant_exponents(rng, n: int, den: int = 4, spread: int = 2) -> list[Fraction]:
    """n exponents, no two differing by a nonzero integer (repeats allowed)."""
    out: list[Fraction] = []
    while len(out) < n:
        q = Fraction(rng.randint(-spread * den, spread * den), den)
        if any(q != p and (q - p).denominator == 1 for p in out):
            continue
        out.append(q)
        if len(out) < n and rng.random() < 0.3:
            out.append(q)
    return out[:n]


def spread_exponents(rng, n: int, den: int = 3, spread: int = 3) -> list[Fraction]:
    """Exponents scattered over integer translates of a few classes."""
    classes = [Fraction(rng.randint(0, den - 1), den) for _ in range(rng.randint(1, n))]
    return [rng.choice(classes) + rng.randint(-spread, spread) for _ in range(n)]


# --------------------------------------------------------------------------
# sympy oracles


class PolyOracle:
    """Arithmetic in Q[x, t1..tr] (sympy sparse polynomials) with truncation."""

    def __init__(self, alg: ParamAlgebra):
        self.alg = alg
        names = ["x"] + [f"t{i + 1}" for i in range(alg.num_params)]
        self.ring, *gens = ring(",".join(names), QQ)
        self.x = gens[0]

    def elem(self, a: LocalElem, xpow: int = 0):
        p = self.ring.zero
        for mono, q in a.items():
            p += self.ring({(xpow, *mono): QQ(q.numerator, q.denominator)})
        return p

    def series(self, f: LaurentSeries, shift: int = 0):
        p = self.ring.zero
        for n, a in f.items():
            if n + shift < 0:
                raise ValueError("shift too small for this series")
            p += self.elem(a, n + shift)
        return p

    def matrix(self, m: SeriesMatrix | LocalMatrix, shift: int = 0):
        if isinstance(m, LocalMatrix):
            return [[self.elem(v, shift) for v in row] for row in m.tolist()]
        return [[self.series(f, shift) for f in row] for row in m.tolist()]

    def mul(self, a, b):
        n, m, p = len(a), len(b), len(b[0]) if b else 0
        return [[sum((a[i][l] * b[l][j] for l in range(m)), self.ring.zero) for j in range(p)] for i in range(n)]

    def theta(self, a):
        return [[sum((self.ring({mon: c * mon[0]}) for mon, c in p.items()), self.ring.zero) for p in row]
                for row in a]

    def truncate(self, p, x_max: int):
        """Drop monomials with parameter degree > k or x-degree > x_max."""
        k = self.alg.trunc_order
        return self.ring({mon: c for mon, c in p.items() if sum(mon[1:]) <= k and mon[0] <= x_max})


def gauge_residual_oracle(a: Connection, p: SeriesMatrix, b: LocalMatrix | SeriesMatrix, upto: int) -> bool:
    """Check theta(P) - A P + P B = 0 through x^upto using sympy polynomials.

    Poles are cleared first: with P = x^-s Q and A = x^-u A', the identity
    times x^(s+u) reads x^u (theta Q - s Q) - A' Q + x^u Q B.
    """
    o = PolyOracle(a.algebra)
    s = max(0, -p.valuation)
    u = max(0, -a.matrix.valuation)
    q = o.matrix(p, s)
    am = o.matrix(a.matrix, u)
    bm = o.matrix(b)
    xu = o.ring.gens[0] ** u
    tq = o.theta(q)
    aq = o.mul(am, q)
    qb = o.mul(q, bm)
    n = len(q)
    for i in range(n):
        for j in range(n):
            expr = xu * (tq[i][j] - s * q[i][j] + qb[i][j]) - aq[i][j]
            if o.truncate(expr, upto + s + u) != 0:
                return False
    return True


def to_sympy(m) -> sympy.Matrix:
    rows = m.augment() if isinstance(m, LocalMatrix) else m
    return sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in rows])
