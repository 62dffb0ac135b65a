"""Logarithmic lattices on the projective line for Euler systems on G_m.

The constant system theta y = A y on P^1 minus {0, infinity} has exponents
Sp(A) at 0 and Sp(-A) at infinity (with u = 1/x, theta_u = -theta_x).
Twisting the rho-block at infinity by x^d moves its exponent there to
-rho + d, so one integer per block picks the lattice whose exponents at
both punctures lie in the window [c, c+1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .connection import in_tau
from .errors import PreconditionError
from .linalg import QMatrix, q_matrix, rational_eigenvalues


def infinity_exponents(a: QMatrix) -> tuple[Fraction, ...]:
    """Exponents at infinity of theta y = A y, with multiplicity."""
    return tuple(sorted(-rho for rho, m in rational_eigenvalues(a) for _ in range(m)))


@dataclass(frozen=True)
class P1Lattice:
    euler: QMatrix
    tau_offset: Fraction
    blocks: tuple[tuple[Fraction, int, int], ...]  # (eigenvalue, multiplicity, twist)

    @property
    def size(self) -> int:
        return len(self.euler)

    @property
    def twists(self) -> list[int]:
        return [d for _, _, d in self.blocks]

    def exponents_at_zero(self) -> tuple[Fraction, ...]:
        return tuple(sorted(rho for rho, m, _ in self.blocks for _ in range(m)))

    def exponents_at_infinity(self) -> tuple[Fraction, ...]:
        return tuple(sorted(-rho + d for rho, m, d in self.blocks for _ in range(m)))


def block_twist(rho: Fraction, tau_offset: Fraction) -> int:
    """The unique integer d with -rho + d in [c, c+1)."""
    return math.ceil(tau_offset + rho)


def p1_lattice(a: QMatrix, tau_offset: Fraction = Fraction(0)) -> P1Lattice:
    a = q_matrix(a)
    c = Fraction(tau_offset)
    eigs = rational_eigenvalues(a)
    outside = [rho for rho, _ in eigs if not in_tau(rho, c)]
    if outside:
        raise PreconditionError(
            f"exponents {[str(r) for r in outside]} at 0 lie outside [{c}, {c + 1}); run deligne_manin first")
    blocks = tuple((rho, m, block_twist(rho, c)) for rho, m in eigs)
    return P1Lattice(a, c, blocks)
