from fractions import Fraction

import pytest

from rsconn.errors import PreconditionError, UnsupportedExponentFieldError
from rsconn.p1 import infinity_exponents, p1_lattice

half = Fraction(1, 2)


def test_infinity_exponents():
    assert infinity_exponents([[half]]) == (-half,)
    assert infinity_exponents([[0]]) == (0,)
    assert infinity_exponents([[Fraction(1, 3), 0], [0, Fraction(2, 3)]]) == (Fraction(-2, 3), Fraction(-1, 3))
    with pytest.raises(UnsupportedExponentFieldError):
        infinity_exponents([[0, 3], [1, 0]])


def test_half_exponent_twist():
    lat = p1_lattice([[half]])
    assert lat.twists == [1]
    assert lat.exponents_at_zero() == lat.exponents_at_infinity() == (half,)


def test_trivial_and_mixed_twists():
    assert p1_lattice([[0]]).twists == [0]
    assert p1_lattice([[0, 0], [0, half]]).twists == [0, 1]


def test_twist_lands_in_window():
    for c in (Fraction(0), Fraction(-1, 2), Fraction(1, 3)):
        for num in range(-6, 6):
            rho = c + Fraction(num % 6, 6)
            lat = p1_lattice([[rho]], c)
            (d,) = lat.twists
            assert c <= -rho + d < c + 1
            assert not c <= -rho + d - 1 < c + 1


def test_needs_window():
    with pytest.raises(PreconditionError):
        p1_lattice([[1]])
