from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treepgf.rational import (
    PGF,
    BiSeries,
    SingularSeriesError,
    biseries_invert,
    derivative_at_one,
    format_rational,
    parse_rational,
    poly_derivative,
    poly_mul,
)

F = Fraction
small_q = st.fractions(min_value=-5, max_value=5, max_denominator=12)
polys = st.lists(small_q, max_size=6).map(PGF)


def test_poly_mul_examples():
    z = PGF.monomial(1)
    assert poly_mul(z, z) == PGF.monomial(2)
    p = PGF([0, F(1, 2), F(1, 2)])
    assert poly_mul(PGF.one(), p) == p
    assert poly_mul(p, p) == PGF([0, 0, F(1, 4), F(1, 2), F(1, 4)])
    assert poly_mul(p, PGF()) == PGF()


def test_poly_derivative_examples():
    assert poly_derivative(PGF.monomial(1)) == PGF.one()
    assert poly_derivative(PGF([0, F(1, 3), F(2, 3)]))(1) == F(5, 3)
    assert poly_derivative(PGF.monomial(3), 2) == PGF([0, 6])
    with pytest.raises(ValueError):
        poly_derivative(PGF.one(), 0)


def test_derivative_at_one_matches_polynomial_route():
    p = PGF([F(1, 7), F(2, 7), 0, F(4, 7)])
    for r in range(1, 5):
        assert derivative_at_one(p, r) == poly_derivative(p, r)(1)
    assert derivative_at_one(p, 0) == 1


def test_trailing_zeros_and_serialization():
    p = PGF([F(1, 2), F(1, 2), 0, 0])
    assert p.degree == 1 and p == PGF([F(1, 2), F(1, 2)])
    assert p.to_list() == ["1/2", "1/2"]
    assert PGF.from_json(p.to_json()) == p
    assert format_rational(F(4, 2)) == "2"
    assert format_rational(F(-6, 4)) == "-3/2"
    assert parse_rational("-3/2") == F(-3, 2)
    assert PGF().degree == -1


def test_distribution_checks():
    assert PGF([0, F(1, 3), F(2, 3)]).is_distribution()
    assert not PGF([F(1, 2), F(1, 3)]).is_distribution()
    assert PGF([0, F(1, 3), F(2, 3)]).variance() == F(2, 9)


@given(polys, polys)
def test_mul_commutes(a, b):
    assert poly_mul(a, b) == poly_mul(b, a)


@given(polys, polys, polys)
@settings(max_examples=50)
def test_mul_associates(a, b, c):
    assert poly_mul(poly_mul(a, b), c) == poly_mul(a, poly_mul(b, c))


@given(polys, polys)
def test_leibniz(a, b):
    lhs = poly_derivative(poly_mul(a, b))
    rhs = poly_mul(poly_derivative(a), b) + poly_mul(a, poly_derivative(b))
    assert lhs == rhs


@given(polys, polys)
def test_canonical_form(a, b):
    for c in poly_mul(a, b).coeffs:
        assert c.denominator > 0
        assert Fraction(c.numerator, c.denominator) == c


@given(polys, small_q)
def test_evaluation_is_ring_homomorphism(p, z):
    q = poly_mul(p, p)
    assert q(z) == p(z) ** 2


def test_geometric_inverse():
    s = BiSeries.linear(1, -1, 0, 2, 0)
    assert biseries_invert(s) == BiSeries(2, 0, {(0, 0): 1, (1, 0): 1, (2, 0): 1})
    assert BiSeries.linear(2, -1, -1, 3, 3).invert()[0, 0] == F(1, 2)


def test_singular_series():
    with pytest.raises(SingularSeriesError):
        BiSeries.linear(0, 1, 1, 2, 2).invert()
    with pytest.raises(ZeroDivisionError):
        BiSeries(1, 1).invert()


def test_two_variable_geometric():
    # 1/(1 - x - y) = sum C(i+j, i) x^i y^j
    from math import comb

    inv = BiSeries.linear(1, -1, -1, 5, 4).invert()
    assert all(inv[i, j] == comb(i + j, i) for i in range(6) for j in range(5))


coeff_grid = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(-4, 4), max_size=8
)


@given(st.integers(-4, 4).filter(bool), coeff_grid)
@settings(max_examples=60)
def test_invert_multiplies_back_to_one(c0, rest):
    rest = {k: v for k, v in rest.items() if k != (0, 0)}
    s = BiSeries(3, 3, {(0, 0): c0, **rest})
    assert s * s.invert() == BiSeries.constant(1, 3, 3)


def test_mixed_orders_truncate_to_minimum():
    a = BiSeries.linear(1, 1, 1, 4, 2)
    b = BiSeries.linear(1, 1, 1, 2, 3)
    prod = a * b
    assert (prod.nx, prod.ny) == (2, 2)
    assert prod[1, 1] == 2
    with pytest.raises(IndexError):
        prod[3, 0]
