from fractions import Fraction

import pytest
from hypothesis import given
import hypothesis.strategies as st

from conftest import small_fractions, small_polys
from symgram.polycore import (
    PolySyntaxError,
    SparsePoly,
    apply_linear_substitution,
    evaluate,
    parse_poly,
    render,
    substitute_squares,
)
from symgram.symfunc import monomial_symmetric

AMGM_SEXTIC = "1/54*x1^6 + 1/54*x2^6 + 1/54*x3^6 - 1/18*x1^2*x2^2*x3^2"
BINARY_OCTIC = "7/16*x1^8 - 1/4*x1^6*x2^2 - 3/8*x1^4*x2^4 - 1/4*x1^2*x2^6 + 7/16*x2^8"


def test_parse_exact_coefficients():
    f = parse_poly(AMGM_SEXTIC, 3)
    assert f.coeff((6, 0, 0)) == Fraction(1, 54)
    assert f.coeff((2, 2, 2)) == Fraction(-1, 18)
    assert len(f) == 4


def test_parse_zero():
    f = parse_poly("0", 2)
    assert f.is_zero() and f.n == 2


def test_parse_decimal_is_exact():
    assert parse_poly("0.1*x1", 1).coeff((1,)) == Fraction(1, 10)


def test_parse_errors_carry_position():
    with pytest.raises(PolySyntaxError) as info:
        parse_poly("x1 + $", 2)
    assert info.value.position == 5
    with pytest.raises(PolySyntaxError):
        parse_poly("x3", 2)


def test_render_round_trip_examples():
    for text, n in ((AMGM_SEXTIC, 3), (BINARY_OCTIC, 2), ("0", 2)):
        f = parse_poly(text, n)
        assert parse_poly(render(f), n) == f


@given(small_polys(n=3))
def test_render_round_trip_property(f):
    assert parse_poly(render(f), 3) == f


def test_render_float_coefficients_parse_back():
    f = SparsePoly(2, {(1, 0): 0.1, (0, 1): -2.5e-17})
    g = parse_poly(render(f), 2).to_float()
    assert f.max_abs_difference(g) == 0.0


def test_substitute_squares():
    x = parse_poly("x1 + x2", 2)
    assert substitute_squares(x) == parse_poly("x1^2 + x2^2", 2)
    assert substitute_squares(SparsePoly.constant(2, Fraction(3))) == SparsePoly.constant(2, Fraction(3))


def test_binary_octic_from_power_means():
    p4 = parse_poly("1/2*x1^4 + 1/2*x2^4", 2)
    p1111 = parse_poly("1/16*(x1 + x2)^4", 2)
    assert substitute_squares(p4 - p1111) == parse_poly(BINARY_OCTIC, 2)


def test_evaluate_quartic_example():
    f = monomial_symmetric((4,), 3) + 2 * monomial_symmetric((3, 1), 3) + monomial_symmetric((2, 2), 3)
    assert evaluate(f, (1, -2, 1)) == -9
    assert evaluate(f, (0, 0, 0)) == 0
    assert evaluate(parse_poly("x1*x2", 2), (2, 3)) == 6


def test_evaluate_dimension_mismatch():
    with pytest.raises(ValueError):
        evaluate(parse_poly("x1*x2", 2), (1, 2, 3))


@given(small_polys(n=2), small_polys(n=2), st.tuples(small_fractions(), small_fractions()))
def test_evaluation_is_multiplicative(f, g, point):
    assert evaluate(f * g, point) == evaluate(f, point) * evaluate(g, point)


def test_linear_substitution_examples():
    f = parse_poly("x1^2*x2", 2)
    assert apply_linear_substitution(f, [[1, 0], [0, 1]]) == f
    assert apply_linear_substitution(f, [[0, 1], [1, 0]]) == parse_poly("x1*x2^2", 2)
    sym = monomial_symmetric((2, 1), 3)
    assert apply_linear_substitution(sym, [[0, 0, 1], [1, 0, 0], [0, 1, 0]]) == sym


def test_linear_substitution_dimension_mismatch():
    with pytest.raises(ValueError):
        apply_linear_substitution(parse_poly("x1", 2), [[1]])


matrices = st.lists(st.lists(st.integers(-2, 2), min_size=2, max_size=2), min_size=2, max_size=2)


@given(small_polys(n=2, max_degree=2, max_terms=3), matrices, matrices)
def test_linear_substitution_composes(f, a, b):
    # x -> A x then x -> B x gives f(A B x)
    ab = [[sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
    lhs = apply_linear_substitution(f, ab)
    rhs = apply_linear_substitution(apply_linear_substitution(f, a), b)
    assert lhs == rhs
