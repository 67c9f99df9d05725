"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line in the summary."""

import math
import time
from fractions import Fraction
from math import comb

import numpy as np
import pytest

from symgram.certify import adapted_basis_for, certify, rank_profile, verify
from symgram.families import (
    QuarticCoeffs,
    SexticCoeffs,
    quadratic_analyze,
    quadratic_sos_ratio,
    quartic_analyze,
    quartic_boundary_rank,
    random_rational,
    random_symmetric_sos,
    sextic_rank3_obstructions,
)
from symgram.gramspec import cone_dimension
from symgram.hposet import Verdict, build_poset, certify_h_pair, export_dot, h_difference
from symgram.polycore import SparsePoly, parse_poly, substitute_squares
from symgram.repsn import (
    group_closure,
    icosahedral_generators,
    matrix_group_rep,
    multiplicity,
    multiplicity_oracle,
    quasi_poly_check,
    symmetric_group_rep,
    young_orthogonal_irrep,
)
from symgram.sdpcore import numerical_rank
from symgram.survey import rank_survey
from symgram.symadapt import copy_deviation, invariant_gram, orthogonalize_rep, symmetry_adapted_basis, verify_block_structure
from symgram.symfunc import Dominance, normalized_basis_poly, partitions_of

SQRT2 = math.sqrt(2.0)
BINARY_OCTIC = "7/16*x1^8 - 1/4*x1^6*x2^2 - 3/8*x1^4*x2^4 - 1/4*x1^2*x2^6 + 7/16*x2^8"
ICOSAHEDRAL_S = np.array([
    [7, 0, 0, -1, 0, -1],
    [0, 4, 0, 0, 0, 0],
    [0, 0, 4, 0, 0, 0],
    [-1, 0, 0, 7, 0, -1],
    [0, 0, 0, 0, 4, 0],
    [-1, 0, 0, -1, 0, 7],
]) / 5


def expand(gram, basis) -> SparsePoly:
    terms: dict = {}
    for i, a in enumerate(basis):
        for j, b in enumerate(basis):
            exp = tuple(x + y for x, y in zip(a, b))
            terms[exp] = terms.get(exp, 0.0) + float(gram[i, j])
    return SparsePoly(len(basis[0]), terms)


def within(start: float, budget: float, notes: list) -> None:
    elapsed = time.perf_counter() - start
    notes.append(f"runtime {elapsed:.1f}s of {budget:.0f}s")
    assert elapsed < budget


def test_criterion_01_multiplicities(criterion):
    with criterion(1, "multiplicity formula = character oracle, dimension count") as notes:
        start = time.perf_counter()
        for n in range(2, 6):
            dims = {lam: young_orthogonal_irrep(lam).dim for lam in partitions_of(n)}
            for d in range(9):
                total = 0
                for lam in partitions_of(n):
                    m = multiplicity(lam, d)
                    assert m == multiplicity_oracle(lam, d), (lam, d)
                    total += dims[lam] * m
                assert total == comb(n + d - 1, d)
        within(start, 30, notes)


def test_criterion_02_quasi_polynomials(criterion):
    with criterion(2, "ternary quasi-polynomials match hook-length counts") as notes:
        start = time.perf_counter()
        for d in range(25):
            q, _ = quasi_poly_check(d)
            assert q == multiplicity((3,), d)
            if d >= 1:
                assert quasi_poly_check(d - 1)[1] == multiplicity((2, 1), d)
        within(start, 1, notes)


def test_criterion_03_binary_dimension(criterion):
    with criterion(3, "binary cone dimension closed form, d <= 15"):
        for d in range(16):
            dim = cone_dimension([multiplicity((2,), d), multiplicity((1, 1), d)])
            assert dim == ((d + 1) * (d + 3) // 4 if d % 2 else (d + 2) ** 2 // 4)


def test_criterion_04_block_diagonalization(criterion):
    with criterion(4, "block structure and copy agreement, n <= 4, d <= 4") as notes:
        start = time.perf_counter()
        worst_block = worst_copy = 0.0
        for n in range(2, 5):
            for d in range(1, 5):
                rep = symmetric_group_rep(n, d)
                sab = symmetry_adapted_basis(rep)
                worst_block = max(worst_block, verify_block_structure(rep, sab.change_of_basis, sab.layout))
                worst_copy = max(worst_copy, copy_deviation(rep, sab.change_of_basis, sab.layout))
        notes.append(f"block error {worst_block:.1e}, copy deviation {worst_copy:.1e}")
        assert worst_block <= 1e-9 and worst_copy <= 1e-9
        within(start, 120, notes)


def test_criterion_05_sextic_example(criterion):
    with criterion(5, "(H_21 - H_111)(x^2): rank 4, 4 squares, invariant partial sums") as notes:
        start = time.perf_counter()
        f = substitute_squares(normalized_basis_poly("h", (2, 1), 3) - normalized_basis_poly("h", (1, 1, 1), 3))
        assert f == parse_poly("1/54*x1^6 + 1/54*x2^6 + 1/54*x3^6 - 1/18*x1^2*x2^2*x3^2", 3)
        outcome = certify(f, objective="min-rank")
        assert outcome.feasible
        cert = outcome.certificate
        total, ranks = rank_profile(cert)
        report = verify(f, cert)
        notes.append(f"rank {total} {ranks}, residual {report.residual:.1e}")
        assert total == 4 and len(cert.squares) == 4
        assert report.residual <= 1e-8
        assert report.partial_defects["2,1"] <= 1e-8
        within(start, 10, notes)


def test_criterion_06_binary_octic(criterion):
    with criterion(6, "binary octic known rank-2 point, certify feasible") as notes:
        start = time.perf_counter()
        f = parse_poly(BINARY_OCTIC, 2)
        rep = symmetric_group_rep(2, 4)
        sab = adapted_basis_for(rep)
        sym = np.array([[7 / 8, 0, -7 * SQRT2 / 8], [0, 0, 0], [-7 * SQRT2 / 8, 0, 7 / 4]])
        alt = np.array([[0, 0], [0, 3.0]])
        gram = sab.gram_from_blocks([sym, alt])
        residual = expand(gram, rep.basis).max_abs_difference(f.to_float())
        eigs = np.concatenate([np.linalg.eigvalsh(sym), np.linalg.eigvalsh(alt)])
        notes.append(f"constraint residual {residual:.1e}, rank {numerical_rank(gram)}")
        assert residual <= 1e-9
        assert eigs.min() >= -1e-12
        assert numerical_rank(gram) == 2
        assert certify(f).feasible
        within(start, 5, notes)


def test_criterion_07_quadratics(criterion):
    with criterion(7, "quadratic closed form vs eigenvalue oracle, ratio, Monte Carlo") as notes:
        rng = np.random.default_rng(7)
        rank_kinds: set[str] = set()
        compared = 0
        for _ in range(10_000):
            n = int(rng.integers(2, 13))
            a = Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 4)))
            b = Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 4)))
            result = quadratic_analyze(a, b, n)
            gram = np.full((n, n), float(b)) + float(a - b) * np.eye(n)
            low = np.linalg.eigvalsh(gram)[0]
            if abs(low) >= 1e-6:
                assert result.sos == (low > 0), (a, b, n)
                compared += 1
            if result.sos:
                assert result.rank in (0, 1, n - 1, n)
                rank_kinds.add({0: "0", 1: "1", n - 1: "n-1", n: "n"}[result.rank])
        assert abs(quadratic_sos_ratio(10**6) - 0.125) <= 1e-6
        n, samples = 4, 10**6
        theta = np.random.default_rng(70).uniform(0, 2 * math.pi, samples)
        hits = sum(quadratic_analyze(math.cos(t), math.sin(t), n).sos for t in theta)
        p = quadratic_sos_ratio(n)
        sigma = math.sqrt(p * (1 - p) / samples)
        notes.append(f"ranks seen {sorted(rank_kinds)}; {compared} oracle comparisons; MC {hits / samples:.5f} vs {p:.5f} (sigma {sigma:.1e})")
        assert abs(hits / samples - p) <= 3 * sigma


def test_criterion_08_quartic_geometry(criterion):
    with criterion(8, "ternary quartic vertices and rank strata over 200 SOS instances") as notes:
        start = time.perf_counter()
        rng = np.random.default_rng(8)
        for index in range(200):
            c = QuarticCoeffs.from_poly(random_symmetric_sos(3, 2, rng))
            result = quartic_analyze(c)
            assert result.sos.is_feasible, (index, c)
            assert all(result.necessary_ineqs), (index, c)
            psd = result.psd_vertices
            assert len(psd) == 2, (index, c)
            for vertex in psd:
                assert quartic_boundary_rank(c, vertex.point) == 3
            assert quartic_boundary_rank(c, result.interior_point()) == 6
            witnesses = result.boundary_witnesses()
            assert quartic_boundary_rank(c, witnesses["K2"]) == 4, (index, c)
            assert quartic_boundary_rank(c, witnesses["K1"]) == 5, (index, c)
        bad = quartic_analyze(QuarticCoeffs.of(1, 2, 1, 0))
        assert all(bad.necessary_ineqs) and not bad.sos.is_feasible
        assert bad.witness == ((1, -2, 1), -9)
        within(start, 300, notes)


@pytest.mark.slow
def test_criterion_09_sextics(criterion):
    with criterion(9, "sextic rank-3 obstructions nonzero, surveys never below rank 4") as notes:
        start = time.perf_counter()
        for seed in range(100):
            residuals = sextic_rank3_obstructions(SexticCoeffs.of(*random_rational(np.random.default_rng(seed), 7)))
            assert residuals["case_a"] != 0 and residuals["case_b"] != 0
        rng = np.random.default_rng(9)
        lowest = []
        for _ in range(3):
            report = rank_survey(random_symmetric_sos(3, 3, rng), samples=100, seed=int(rng.integers(1 << 30)))
            lowest.append(min(report.histogram))
            notes.append(f"histogram {report.histogram}")
            assert min(report.histogram) >= 4
        within(start, 600, notes)


@pytest.mark.slow
def test_criterion_10_inequality_poset(criterion):
    with criterion(10, "H_44 >= H_521 certified (blue), weight-6 poset re-verified") as notes:
        start = time.perf_counter()
        blue = certify_h_pair((5, 2, 1), (4, 4), 3)
        assert blue.status is Verdict.CERTIFIED
        assert blue.dominance is Dominance.INCOMPARABLE
        assert '"5,2,1" -> "4,4" [color=blue];' in export_dot([blue])
        result = build_poset(6, 3)
        certified = result.certified()
        for v in certified:
            g = substitute_squares(h_difference(v.lam, v.mu, 3))
            assert verify(g, v.certificate).residual <= 1e-7
        notes.append(f"{len(certified)} certified of {len(result.verdicts)} pairs")
        within(start, 900, notes)


def test_criterion_11_icosahedral(criterion):
    with criterion(11, "icosahedral closure, invariant inner product, identity-Gram invariant"):
        assert len(group_closure(icosahedral_generators())) == 120
        rep = matrix_group_rep(icosahedral_generators(), 2, name="Ih")
        assert np.abs(invariant_gram(rep) - ICOSAHEDRAL_S).max() <= 1e-9
        u, _ = orthogonalize_rep(rep)
        expected = parse_poly("3/4*x1^4 + 3/2*x1^2*x2^2 + 3/4*x2^4 + 3/2*x1^2*x3^2 + 3/2*x2^2*x3^2 + 3/4*x3^4", 3)
        assert expand(u @ u.T, rep.basis).max_abs_difference(expected.to_float()) <= 1e-9
