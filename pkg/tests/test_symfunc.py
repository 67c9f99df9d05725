import itertools
from fractions import Fraction

import pytest

from symgram.polycore import evaluate, parse_poly, substitute_squares
from symgram.symfunc import (
    Dominance,
    basis_poly,
    dominance,
    normalized_basis_poly,
    partitions_of,
    term_normalize,
)


def test_dominance_examples():
    assert dominance((5, 2, 1), (4, 4)) is Dominance.INCOMPARABLE
    assert dominance((1, 1, 1), (2, 1)) is Dominance.LESS
    assert dominance((2, 1), (1, 1, 1)) is Dominance.GREATER
    assert dominance((3, 1), (3, 1)) is Dominance.EQUAL
    with pytest.raises(ValueError):
        dominance((2,), (1, 1, 1))


@pytest.mark.parametrize("weight", range(1, 11))
def test_dominance_is_partial_order(weight):
    parts = partitions_of(weight)
    le = {(a, b): dominance(a, b) in (Dominance.LESS, Dominance.EQUAL) for a in parts for b in parts}
    for a in parts:
        assert dominance(a, a) is Dominance.EQUAL
    for a, b in itertools.permutations(parts, 2):
        assert not (le[a, b] and le[b, a])
    for a, b, c in itertools.product(parts, repeat=3):
        if le[a, b] and le[b, c]:
            assert le[a, c]


def test_basis_examples():
    assert basis_poly("h", (1,), 3) == parse_poly("x1 + x2 + x3", 3)
    assert basis_poly("p", (2,), 2) == parse_poly("x1^2 + x2^2", 2)
    assert basis_poly("m", (1, 1, 1, 1), 3).is_zero()
    assert basis_poly("s", (1, 1, 1, 1), 3).is_zero()


def test_amgm_sextic_from_h_functions():
    diff = normalized_basis_poly("h", (2, 1), 3) - normalized_basis_poly("h", (1, 1, 1), 3)
    expected = parse_poly("1/54*x1^6 + 1/54*x2^6 + 1/54*x3^6 - 1/18*x1^2*x2^2*x3^2", 3)
    assert substitute_squares(diff) == expected


def test_term_normalize_examples():
    assert normalized_basis_poly("h", (4,), 2) == parse_poly("1/5*(x1^4 + x1^3*x2 + x1^2*x2^2 + x1*x2^3 + x2^4)", 2)
    assert normalized_basis_poly("p", (4,), 2) == parse_poly("1/2*x1^4 + 1/2*x2^4", 2)
    for n in range(1, 6):
        expected = basis_poly("e", (1,), n) * Fraction(1, n)
        assert normalized_basis_poly("e", (1,), n) == expected
    with pytest.raises(ZeroDivisionError):
        term_normalize(parse_poly("x1 - x2", 2))


@pytest.mark.parametrize("kind", ["m", "e", "p", "h", "s"])
def test_term_normalized_value_at_ones(kind):
    for lam in partitions_of(4, 3):
        if basis_poly(kind, lam, 3).is_zero():
            continue
        assert evaluate(normalized_basis_poly(kind, lam, 3), (1, 1, 1)) == 1


def test_partitions_of_examples():
    assert partitions_of(2) == [(2,), (1, 1)]
    assert partitions_of(3, 3) == [(3,), (2, 1), (1, 1, 1)]
    assert len(partitions_of(8)) == 22
    assert partitions_of(0) == [()]


@pytest.mark.parametrize("n", range(1, 7))
def test_degree_one_bases_agree(n):
    assert basis_poly("e", (1,), n) == basis_poly("h", (1,), n) == basis_poly("p", (1,), n)


@pytest.mark.parametrize("n", range(1, 5))
def test_jacobi_trudi_spot_check(n):
    assert basis_poly("s", (2, 1), n) == basis_poly("h", (2, 1), n) - basis_poly("h", (3,), n)
