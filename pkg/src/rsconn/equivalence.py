"""Euler forms versus representations of Z, and morphisms between Euler forms.

A logarithmic system in Euler form with exponents in one window [c, c+1) is
determined by the monodromy data (classes of exponents modulo Z, nilpotent
parts), recorded here as :class:`ZRepData`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .connection import tau_representative
from .errors import IncompatibleAlgebraError, PreconditionError
from .linalg import LocalMatrix, block_decompose, eigen_multiset, kernel
from .normalize import EulerForm
from .series import SeriesMatrix


@dataclass(frozen=True)
class ZRepData:
    """Monodromy data: exponent classes in [0, 1) and a nilpotent matrix.

    ``classes`` has one entry per basis vector, sorted ascending; consecutive
    equal classes form one block and ``nilpotent`` is block diagonal with
    respect to these blocks.
    """

    classes: tuple[Fraction, ...]
    nilpotent: LocalMatrix

    def __post_init__(self):
        n = len(self.classes)
        if self.nilpotent.shape != (n, n):
            raise PreconditionError(f"nilpotent part has shape {self.nilpotent.shape}, expected {(n, n)}")
        if list(self.classes) != sorted(self.classes):
            raise PreconditionError("classes must be sorted ascending")
        if any(not 0 <= q < 1 for q in self.classes):
            raise PreconditionError("classes must lie in [0, 1)")
        for i in range(n):
            for j in range(n):
                if self.classes[i] != self.classes[j] and not self.nilpotent[i, j].is_zero():
                    raise PreconditionError("nilpotent part must be block diagonal with respect to the classes")
        if any(eigen_multiset(self.nilpotent.augment())):
            raise PreconditionError("nilpotent part is not nilpotent")

    @property
    def size(self) -> int:
        return len(self.classes)

    @property
    def algebra(self):
        return self.nilpotent.algebra

    def blocks(self) -> list[tuple[Fraction, int, int]]:
        """(class, start, size) for each run of equal classes."""
        out: list[tuple[Fraction, int, int]] = []
        for i, q in enumerate(self.classes):
            if out and out[-1][0] == q:
                cls, start, m = out[-1]
                out[-1] = (cls, start, m + 1)
            else:
                out.append((q, i, 1))
        return out


def _euler_matrix(e: EulerForm | LocalMatrix) -> LocalMatrix:
    return e.B if isinstance(e, EulerForm) else e


def to_representation(e: EulerForm | LocalMatrix) -> ZRepData:
    """Monodromy data of an Euler form whose exponents fit in one unit window."""
    b = _euler_matrix(e)
    bd = block_decompose(b)
    eigs = [v for v, _ in bd.eigenvalues]
    if eigs and max(eigs) - min(eigs) >= 1:
        raise PreconditionError(
            f"exponents {[str(v) for v in eigs]} do not lie in a single window [c, c+1); run deligne_manin first")
    alg = b.algebra
    parts = []
    for (rho, m), block in zip(bd.eigenvalues, bd.blocks):
        parts.append((rho - math.floor(rho), block - LocalMatrix.identity(alg, m) * rho))
    parts.sort(key=lambda p: p[0])
    classes = tuple(q for q, nil in parts for _ in range(nil.rows))
    return ZRepData(classes, LocalMatrix.block_diag(alg, [nil for _, nil in parts]))


def from_representation(z: ZRepData, tau_offset: Fraction = Fraction(0)) -> EulerForm:
    """The Euler form B = blockdiag(rho I + N) with each rho in [c, c+1)."""
    alg = z.algebra
    blocks = []
    for q, start, m in z.blocks():
        rho = tau_representative(q, tau_offset)
        idx = list(range(start, start + m))
        blocks.append(LocalMatrix.identity(alg, m) * rho + z.nilpotent.submatrix(idx, idx))
    b = LocalMatrix.block_diag(alg, blocks)
    return EulerForm(B=b, P=SeriesMatrix.identity(alg, z.size), tau_offset=Fraction(tau_offset))


@dataclass(frozen=True)
class HomElement:
    """The morphism phi * x^xpow from one Euler form to another."""

    xpow: int
    matrix: LocalMatrix


def hom_space(e1: EulerForm | LocalMatrix, e2: EulerForm | LocalMatrix) -> list[HomElement]:
    """Q-basis of the horizontal morphisms between two Euler forms.

    A morphism x^d phi is horizontal iff B2 phi - phi (B1 + d I) = 0, which
    can only have solutions when d is an integer difference of exponents.
    """
    b1, b2 = _euler_matrix(e1), _euler_matrix(e2)
    if b1.algebra != b2.algebra:
        raise IncompatibleAlgebraError(f"{b1.algebra} vs {b2.algebra}")
    alg = b1.algebra
    n1, n2 = b1.rows, b2.rows
    s1, s2 = set(eigen_multiset(b1.augment())), set(eigen_multiset(b2.augment()))
    shifts = sorted({r2 - r1 for r1 in s1 for r2 in s2 if (r2 - r1).denominator == 1})
    out = []
    for d in shifts:
        shifted = b1 + LocalMatrix.identity(alg, n1) * d
        op = b2.kron(LocalMatrix.identity(alg, n1)) - LocalMatrix.identity(alg, n2).kron(shifted.transpose())
        for v in kernel(op):
            phi = LocalMatrix(alg, [v[i * n1:(i + 1) * n1] for i in range(n2)], cols=n1)
            out.append(HomElement(int(d), phi))
    return out


def horizontal_sections(e: EulerForm | LocalMatrix) -> list[list]:
    """Q-basis of the formal solutions of theta y = B y, namely ker B.

    Valid when no exponent is a negative integer; otherwise sections with
    poles could exist and the kernel would not describe them.
    """
    b = _euler_matrix(e)
    bad = [r for r in eigen_multiset(b.augment()) if r.denominator == 1 and r < 0]
    if bad:
        raise PreconditionError(f"negative integer exponent {bad[0]}; shift with deligne_manin first")
    return kernel(b)


def numeric_monodromy(z: ZRepData):
    """Floating point exp(2 pi i (diag(classes) + N)) for display only."""
    if not z.algebra.is_field:
        raise PreconditionError("numeric monodromy is only available without parameters")
    import numpy as np
    from math import factorial

    n = z.size
    m = np.array([[float(z.nilpotent[i, j].augment()) for j in range(n)] for i in range(n)], dtype=complex)
    semisimple = np.diag([np.exp(2j * np.pi * float(q)) for q in z.classes])
    unip = np.zeros((n, n), dtype=complex)
    power = np.eye(n, dtype=complex)
    for j in range(n):
        unip += power * (2j * np.pi) ** j / factorial(j)
        power = power @ m
    return semisimple @ unip
