from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from rsconn.errors import NonUnitError, PreconditionError
from rsconn.ring import LocalElem, ParamAlgebra
from rsconn.series import LaurentSeries, SeriesMatrix, dlog, series_inv, series_mul, theta

Q = ParamAlgebra()
R = ParamAlgebra(1, 2)
t = R.gen(1)
x = sympy.Symbol("x")


def qs(coeffs, order=None, alg=Q):
    return LaurentSeries(alg, coeffs, order)


def to_sympy(f: LaurentSeries):
    return sum((sympy.Rational(a.augment().numerator, a.augment().denominator) * x ** n for n, a in f.items()),
               sympy.Integer(0))


def test_inverse_of_geometric_series():
    f = qs({0: 1, 1: -1})
    assert series_inv(f, 3) == qs({0: 1, 1: 1, 2: 1, 3: 1}, 3)


def test_inverse_with_pole():
    f = qs({1: 2, 2: 1})
    assert series_inv(f, 1) == qs({-1: Fraction(1, 2), 0: Fraction(-1, 4), 1: Fraction(1, 8)}, 1)


def test_inverse_of_monomial_is_exact():
    assert series_inv(LaurentSeries.x(Q)) == qs({-1: 1})


def test_exact_non_monomial_needs_order():
    with pytest.raises(PreconditionError):
        series_inv(qs({0: 1, 1: 1}))


def test_non_unit_series():
    with pytest.raises(NonUnitError):
        series_inv(LaurentSeries(R, {0: t, 3: t}, 5))


def test_dlog_example():
    assert dlog(qs({1: 1, 2: -1}), 2) == qs({0: 1, 1: -1, 2: -1}, 2)


def test_theta_is_x_derivative():
    f = qs({-2: 3, 0: 5, 4: Fraction(1, 2)}, 6)
    assert theta(f) == qs({-2: -6, 4: 2}, 6)


def test_product_precision():
    f = qs({0: 1, 1: 1}, 3)
    g = qs({2: 1}, 4)
    # f is known mod x^4 and g mod x^5, valuations 0 and 2
    assert (f * g).order == 4
    assert (f * qs({2: 1})).order == 5


def test_coefficient_beyond_order():
    with pytest.raises(PreconditionError):
        qs({0: 1}, 2).coeff(3)


def test_parametric_inverse():
    f = LaurentSeries(R, {0: 1 + t, 1: t}, 4)
    g = series_inv(f)
    assert (f * g).same_to(LaurentSeries.const(R, 1), 4)


series_strategy = st.dictionaries(st.integers(-2, 5), st.fractions(-4, 4, max_denominator=4), max_size=5)


@given(series_strategy, series_strategy)
@settings(max_examples=60, deadline=None)
def test_product_agrees_with_sympy(a, b):
    f, g = qs(a), qs(b)
    assert sympy.expand(to_sympy(f * g) - to_sympy(f) * to_sympy(g)) == 0


@given(series_strategy, st.integers(0, 6))
@settings(max_examples=60, deadline=None)
def test_inverse_agrees_with_sympy(a, order):
    f = qs(a)
    if f.is_zero():
        return
    g = series_inv(f, order)
    if g.order is None:
        assert sympy.simplify(to_sympy(g) * to_sympy(f)) == 1
        return
    ref = sympy.series(1 / to_sympy(f), x, 0, g.order + 1).removeO()
    assert sympy.expand(to_sympy(g) - ref) == 0
    assert g.order == order


@given(series_strategy, series_strategy)
@settings(max_examples=40, deadline=None)
def test_leibniz_rule(a, b):
    f, g = qs(a, 6), qs(b, 6)
    lhs = theta(f * g)
    rhs = theta(f) * g + f * theta(g)
    assert lhs.same_to(rhs, min(lhs.order, rhs.order))


def test_series_matrix_inverse():
    m = SeriesMatrix(Q, [[qs({0: 1, 1: 1}, 6), qs({1: 1}, 6)], [qs({-1: 1}, 6), qs({0: 2}, 6)]])
    inv = m.inverse(8)
    prod = m @ inv
    ident = SeriesMatrix.identity(Q, 2)
    assert prod.same_to(ident, prod.order)
    assert prod.order >= 4


def test_series_matrix_needs_unit_pivot():
    m = SeriesMatrix(R, [[LaurentSeries(R, {0: t}, 3)]])
    with pytest.raises(NonUnitError):
        m.inverse()


def test_series_mul_mixed_exactness():
    f = LaurentSeries(R, {-1: t}, None)
    g = LaurentSeries(R, {0: 1, 2: t}, 5)
    h = series_mul(f, g)
    assert h.order == 4
    assert h.coeff(-1) == t and h.coeff(1) == t * t


def test_truncate_params_drops_high_degree():
    f = LaurentSeries(R, {0: 1 + t + t * t}, 3)
    g = f.truncate_params(1)
    assert g.coeff(0) == LocalElem(ParamAlgebra(1, 1), {(0,): 1, (1,): 1})
