import itertools
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from symgram.repsn import (
    compose,
    cycle_type,
    frobenius_schur,
    group_closure,
    hook_data,
    icosahedral_generators,
    induced_action,
    inverse,
    multiplicity,
    multiplicity_oracle,
    quasi_poly_check,
    symmetric_group_rep,
    young_orthogonal_irrep,
)
from symgram.symfunc import partitions_of


@pytest.mark.parametrize("d, expected", [(2, [2, 2, 0]), (3, [3, 3, 1])])
def test_ternary_multiplicities(d, expected):
    assert [multiplicity(lam, d) for lam in [(3,), (2, 1), (1, 1, 1)]] == expected


def test_binary_multiplicities():
    assert multiplicity((2,), 4) == 3
    assert multiplicity((1, 1), 4) == 2


def test_hook_data():
    data = hook_data((3, 1))
    assert sorted(data.hooks) == [1, 1, 2, 4]
    assert data.n_stat == 1


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_multiplicity_matches_character_oracle(n):
    for d in range(9):
        dims = {lam: young_orthogonal_irrep(lam).dim for lam in partitions_of(n)}
        total = 0
        for lam in partitions_of(n):
            m = multiplicity(lam, d)
            assert m == multiplicity_oracle(lam, d)
            total += dims[lam] * m
        assert total == comb(n + d - 1, d)


def test_oracle_small_degrees():
    for n in range(2, 6):
        assert multiplicity_oracle((n,), 0) == 1
        assert multiplicity_oracle((n,), 1) == 1


def test_oracle_rejects_large_n():
    with pytest.raises(ValueError):
        multiplicity_oracle((9,), 2)


def test_quasi_polynomials_match_hook_counts():
    assert quasi_poly_check(2)[0] == 2
    assert quasi_poly_check(0)[0] == 1
    for d in range(25):
        q, _ = quasi_poly_check(d)
        assert q == multiplicity((3,), d)
        if d >= 1:
            assert quasi_poly_check(d - 1)[1] == multiplicity((2, 1), d)


def test_young_trivial_and_sign():
    perms = list(itertools.permutations(range(4)))
    trivial = young_orthogonal_irrep((4,))
    sign = young_orthogonal_irrep((1, 1, 1, 1))
    for p in perms:
        assert np.allclose(trivial.matrices[p], [[1.0]])
        parity = (-1) ** (4 - len(cycle_type(p)))
        assert np.allclose(sign.matrices[p], [[parity]])


def test_standard_character_values():
    irrep = young_orthogonal_irrep((2, 1))
    assert irrep.dim == 2
    by_class = {}
    for p, m in irrep.matrices.items():
        by_class.setdefault(cycle_type(p), set()).add(round(float(np.trace(m)), 9))
    assert by_class == {(1, 1, 1): {2.0}, (2, 1): {0.0}, (3,): {-1.0}}


@pytest.mark.parametrize("lam", [(2, 1), (3, 1), (2, 2), (2, 1, 1), (3, 2), (2, 2, 1)])
def test_young_orthogonal_and_homomorphism(lam):
    irrep = young_orthogonal_irrep(lam)
    eye = np.eye(irrep.dim)
    for p, m in irrep.matrices.items():
        assert np.abs(m.T @ m - eye).max() < 1e-12
    keys = list(irrep.matrices)
    rng = np.random.default_rng(0)
    for _ in range(20):
        a, b = (keys[i] for i in rng.integers(0, len(keys), size=2))
        assert np.abs(irrep.matrices[compose(a, b)] - irrep.matrices[a] @ irrep.matrices[b]).max() < 1e-12


def test_young_braid_relations():
    n = 4
    irrep = young_orthogonal_irrep((2, 1, 1))
    s = []
    for k in range(n - 1):
        perm = list(range(n))
        perm[k], perm[k + 1] = perm[k + 1], perm[k]
        s.append(irrep.matrices[tuple(perm)])
    eye = np.eye(irrep.dim)
    for k in range(n - 1):
        assert np.abs(s[k] @ s[k] - eye).max() < 1e-12
    for k in range(n - 2):
        assert np.abs(s[k] @ s[k + 1] @ s[k] - s[k + 1] @ s[k] @ s[k + 1]).max() < 1e-12
    assert np.abs(s[0] @ s[2] - s[2] @ s[0]).max() < 1e-12


def test_induced_action_examples():
    for d in range(1, 6):
        mat = induced_action((1, 0), 2, d)
        assert np.array_equal(mat, np.fliplr(np.eye(d + 1)))
    assert np.array_equal(induced_action(np.eye(3), 3, 2), np.eye(6))
    rng = np.random.default_rng(1)
    g = rng.standard_normal((3, 3))
    mat = induced_action(g, 3, 2)
    # rows and columns follow x1^2, x1x2, x1x3, x2^2, x2x3, x3^2
    assert mat[1, 0] == pytest.approx(2 * g[0, 0] * g[0, 1])
    assert mat[0, 0] == pytest.approx(g[0, 0] ** 2)
    assert mat[1, 1] == pytest.approx(g[0, 1] * g[1, 0] + g[0, 0] * g[1, 1])


@given(st.integers(0, 2**31 - 1))
def test_group_rep_is_homomorphism(seed):
    rep = symmetric_group_rep(3, 3)
    rng = np.random.default_rng(seed)
    i, j = rng.integers(0, rep.order, size=2)
    index = {p: k for k, p in enumerate(rep.permutations)}
    k = index[compose(rep.permutations[i], rep.permutations[j])]
    assert np.abs(rep.matrices[k] - rep.matrices[i] @ rep.matrices[j]).max() < 1e-10


def test_matrix_induced_action_anti_homomorphism():
    rng = np.random.default_rng(2)
    g, h = rng.standard_normal((2, 3, 3))
    lhs = induced_action(g @ h, 3, 3)
    assert np.abs(lhs - induced_action(h, 3, 3) @ induced_action(g, 3, 3)).max() < 1e-10


def test_group_closure_examples():
    assert len(group_closure(icosahedral_generators())) == 120
    assert len(group_closure([np.eye(3)])) == 1
    assert len(group_closure([-np.eye(3), np.eye(3)])) == 2


def test_group_closure_cap():
    theta = 1.0  # irrational rotation angle generates an infinite group
    rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    with pytest.raises(OverflowError):
        group_closure([rot], cap=500)


def test_frobenius_schur_indicators():
    perms = list(itertools.permutations(range(3)))
    for lam in [(3,), (2, 1), (1, 1, 1)]:
        irrep = young_orthogonal_irrep(lam)
        assert frobenius_schur(irrep.character, perms) == 1
    elements = group_closure(icosahedral_generators())
    assert frobenius_schur(lambda g: 1.0, elements) == 1


def test_permutation_helpers():
    p = (2, 0, 1)
    assert compose(p, inverse(p)) == (0, 1, 2)
    assert cycle_type(p) == (3,)
    assert cycle_type((1, 0, 2)) == (2, 1)
