import numpy as np
import pytest

from symgram.certify import adapted_basis_for
from symgram.families import binary_blocks
from symgram.gramspec import build_spectrahedron
from symgram.polycore import parse_poly
from symgram.repsn import symmetric_group_rep
from symgram.sdpcore import SdpOptions, SdpProblem, Status, numerical_rank, psd_factor, solve

SQRT2 = np.sqrt(2.0)
BINARY_OCTIC = "7/16*x1^8 - 1/4*x1^6*x2^2 - 3/8*x1^4*x2^4 - 1/4*x1^2*x2^6 + 7/16*x2^8"


def quadratic_problem(a, b, n):
    """Blocks of the symmetric quadratic with diagonal Gram entry a and off-diagonal b,
    coupled through one parameter so the interior-point path is exercised."""
    const = np.array([[a + (n - 1) * b, 0.0], [0.0, a - b]])
    coef = np.array([[[0.0, 1.0], [1.0, 0.0]]])
    return SdpProblem([const], [coef])


def quadratic_is_sos(a, b, n):
    return -a / (n - 1) <= b <= a


def test_quadratic_boundary_is_feasible():
    sol = solve(quadratic_problem(1.0, 1.0, 3))
    assert sol.status.is_feasible
    assert sol.min_eig == pytest.approx(0.0, abs=1e-8)


def test_quadratic_outside_is_infeasible():
    assert solve(quadratic_problem(1.0, 1.01, 3)).status is Status.INFEASIBLE


def test_constant_problem_statuses():
    assert solve(SdpProblem([np.eye(2)], [np.zeros((0, 2, 2))])).status is Status.FEASIBLE
    assert solve(SdpProblem([-np.eye(2)], [np.zeros((0, 2, 2))])).status is Status.INFEASIBLE


def test_optimization_hits_boundary():
    # minimize p subject to [[1, p], [p, 1]] >= 0 gives p = -1
    prob = SdpProblem([np.eye(2)], [np.array([[[0.0, 1.0], [1.0, 0.0]]])], objective=np.array([1.0]))
    sol = solve(prob)
    assert sol.status is Status.OPTIMAL
    assert sol.params[0] == pytest.approx(-1.0, abs=1e-6)
    assert sol.objective_value == pytest.approx(-1.0, abs=1e-6)


def test_binary_octic_feasible_and_displayed_point():
    f = parse_poly(BINARY_OCTIC, 2)
    rep = symmetric_group_rep(2, 4)
    spec = build_spectrahedron(f, rep, adapted_basis_for(rep))
    assert solve(spec.to_problem()).status.is_feasible
    sym = np.array([[7 / 8, 0, -7 * SQRT2 / 8], [0, 0, 0], [-7 * SQRT2 / 8, 0, 7 / 4]])
    alt = np.array([[0, 0], [0, 3.0]])
    target = np.concatenate([sym.ravel(), alt.ravel()])

    def flattened(params):
        s, a = binary_blocks(4, spec.gram_at(params))
        return np.concatenate([s.ravel(), a.ravel()])

    # the blocks are affine in the parameters: recover the displayed point by least squares
    base = flattened(np.zeros(spec.num_params))
    columns = np.array([flattened(np.eye(spec.num_params)[k]) - base for k in range(spec.num_params)]).T
    params, *_ = np.linalg.lstsq(columns, target - base, rcond=None)
    assert np.abs(flattened(params) - target).max() < 1e-12
    assert min(spec.to_problem().min_eigs(params)) >= -1e-12
    assert spec.residual(params) < 1e-12


def test_min_eigs_match_direct_evaluation():
    rng = np.random.default_rng(11)
    for _ in range(20):
        const = rng.standard_normal((3, 3))
        const = const + const.T + 4 * np.eye(3)
        coef = rng.standard_normal((2, 3, 3))
        coef = coef + coef.transpose(0, 2, 1)
        sol = solve(SdpProblem([const], [coef]))
        direct = np.linalg.eigvalsh(const + np.tensordot(sol.params, coef, axes=1))[0]
        assert sol.min_eig_per_block[0] == pytest.approx(direct, abs=1e-6)
        assert sol.status.is_feasible


def test_closed_form_agreement_sweep():
    rng = np.random.default_rng(2024)
    margin = 1e-6
    checked = 0
    for _ in range(10_000):
        n = int(rng.integers(2, 8))
        a = float(rng.uniform(-1, 2))
        b = float(rng.uniform(-2, 2))
        # distance to the boundary of the closed-form region, in block-eigenvalue units
        if min(abs(a + (n - 1) * b), abs(a - b)) < margin:
            continue
        prob = SdpProblem([np.diag([a + (n - 1) * b, a - b])], [np.zeros((0, 2, 2))])
        assert solve(prob).status.is_feasible == quadratic_is_sos(a, b, n)
        checked += 1
    assert checked > 9_900


def test_closed_form_agreement_with_parameter():
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(2, 6))
        a = float(rng.uniform(-1, 2))
        b = float(rng.uniform(-2, 2))
        if min(abs(a + (n - 1) * b), abs(a - b)) < 1e-3:
            continue
        status = solve(quadratic_problem(a, b, n)).status
        assert status is not Status.INDETERMINATE
        assert status.is_feasible == quadratic_is_sos(a, b, n)


def test_deterministic():
    prob = quadratic_problem(2.0, 0.5, 4)
    prob.objective = np.array([1.0])
    first, second = solve(prob), solve(prob)
    assert np.array_equal(first.params, second.params)
    assert first.iterations == second.iterations


def test_caps():
    with pytest.raises(ValueError):
        solve(SdpProblem([np.eye(5)], [np.zeros((1, 5, 5))]), SdpOptions(block_cap=4))


def test_iteration_cap_never_claims_infeasible():
    prob = quadratic_problem(1.0, 0.5, 3)
    sol = solve(prob, SdpOptions(max_iters=1))
    assert sol.status in (Status.FEASIBLE, Status.INDETERMINATE)


def test_numerical_rank():
    assert numerical_rank(np.zeros((3, 3))) == 0
    assert numerical_rank(np.eye(4)) == 4
    example = np.zeros((10, 10))
    example[:2, :2] = [[4, -2 * SQRT2], [-2 * SQRT2, 2]]
    example[3:5, 3:5] = [[1, SQRT2], [SQRT2, 2]]
    example[6:8, 6:8] = [[1, SQRT2], [SQRT2, 2]]
    example[9, 9] = 6
    assert numerical_rank(example / 108) == 4


def test_psd_factor_examples():
    (w,) = psd_factor(np.diag([4.0, 0.0]))
    assert np.allclose(np.abs(w), [2.0, 0.0])
    units = psd_factor(np.eye(3))
    assert len(units) == 3
    assert np.allclose(sum(np.outer(u, u) for u in units), np.eye(3))


def test_psd_factor_trivial_square_of_sextic_example():
    block = np.array([[4, -2 * SQRT2], [-2 * SQRT2, 2]]) / 108
    (w,) = psd_factor(block)
    w = w * np.sign(w[0])
    # in the orthonormal trivial basis (sum x_i^3)/sqrt3, (sum x_i^2 x_j)/sqrt6 the square reads
    # (2 sqrt3/3 * sum x_i^3 - sqrt3/3 * sum x_i^2 x_j)^2 / 108
    coefficients = np.array([w[0] / np.sqrt(3), w[1] / np.sqrt(6)]) * np.sqrt(108)
    assert np.allclose(coefficients, [2 * np.sqrt(3) / 3, -np.sqrt(3) / 3])


def test_psd_factor_clips_and_rejects():
    tiny = np.diag([1.0, -1e-12])
    assert len(psd_factor(tiny)) == 1
    with pytest.raises(ValueError):
        psd_factor(np.diag([1.0, -0.1]))


@pytest.mark.parametrize("seed", range(5))
def test_psd_factor_residual(seed):
    rng = np.random.default_rng(seed)
    vecs = rng.standard_normal((6, 3))
    mat = vecs @ vecs.T
    factors = psd_factor(mat)
    assert len(factors) == 3
    assert np.abs(sum(np.outer(u, u) for u in factors) - mat).max() <= 1e-8
