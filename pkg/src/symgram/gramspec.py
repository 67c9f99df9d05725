"""Invariant Gram spectrahedra as affine families of symmetry-adapted blocks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .polycore import Exponent, SparsePoly, evaluate, monomials
from .repsn import GroupRep, polynomial_is_invariant
from .sdpcore import SdpProblem, numerical_rank
from .symadapt import BlockLayout, SymAdaptedBasis


class NotInvariantError(ValueError):
    def __init__(self, defect: float):
        super().__init__(f"polynomial is not invariant under the group (max coefficient change {defect:.3e})")
        self.defect = defect


class DegreeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# structural formulas

def reynolds(gram: np.ndarray, rep: GroupRep) -> np.ndarray:
    """Group average of D(g) Q D(g)^T (the congruence action on Gram matrices)."""
    total = np.zeros_like(np.asarray(gram, dtype=float))
    for mat in rep.matrices:
        total += mat @ gram @ mat.T
    out = total / rep.order
    return (out + out.T) / 2


def cone_dimension(multiplicities: Sequence[int]) -> int:
    """Dimension of the invariant PSD cone: sum of binom(m_i + 1, 2)."""
    return sum(m * (m + 1) // 2 for m in multiplicities)


def extremal_ray_ranks(layout: BlockLayout) -> set[int]:
    return {e.dim for e in layout.entries if e.multiplicity > 0}


def is_extremal(blocks: Sequence[np.ndarray], tol: float = 1e-7) -> bool:
    """Exactly one block of rank one and every other block zero."""
    scale = max((float(np.abs(b).max()) for b in blocks if np.size(b)), default=0.0)
    if scale == 0.0:
        return False
    ranks = [numerical_rank(b, tol, scale=scale) if np.size(b) else 0 for b in blocks]
    return sorted(ranks)[-1] == 1 and sum(ranks) == 1


def _exponent_image(perm: Sequence[int], alpha: Exponent) -> Exponent:
    beta = [0] * len(alpha)
    for i, a in enumerate(alpha):
        beta[perm[i]] = a
    return tuple(beta)


def monomial_orbits(rep: GroupRep) -> list[list[int]]:
    """Orbits of basis monomials under a permutation group, largest exponent pattern first."""
    if rep.permutations is None:
        raise ValueError("monomial orbits need a permutation group")
    index = {e: i for i, e in enumerate(rep.basis)}
    seen: set[int] = set()
    orbits = []
    for i, alpha in enumerate(rep.basis):
        if i in seen:
            continue
        orbit = sorted({index[_exponent_image(p, alpha)] for p in rep.permutations})
        seen.update(orbit)
        orbits.append(orbit)
    orbits.sort(key=lambda o: tuple(sorted(rep.basis[o[0]], reverse=True)), reverse=True)
    return orbits


def trivial_block(gram: np.ndarray, orbits: Sequence[Sequence[int]], tol: float = 1e-9) -> np.ndarray:
    """Trivial-isotypic block from orbit column sums, scaled by s_j / s_i with s = sqrt(|orbit|)."""
    gram = np.asarray(gram, dtype=float)
    size = len(orbits)
    out = np.zeros((size, size))
    for i, rows in enumerate(orbits):
        for j, cols in enumerate(orbits):
            sums = gram[np.ix_(rows, cols)].sum(axis=0)
            if np.max(np.abs(sums - sums[0])) > tol * max(1.0, np.abs(gram).max()):
                raise ValueError("Gram matrix is not invariant: orbit column sums differ")
            out[i, j] = sums[0] * np.sqrt(len(cols)) / np.sqrt(len(rows))
    return out


# ---------------------------------------------------------------------------
# coefficient matching

class _CoefficientMap:
    """Linear map Gram matrix -> coefficient vector of m(x)^T Q m(x)."""

    def __init__(self, basis: Sequence[Exponent]):
        n = len(basis[0])
        degree = sum(basis[0])
        self.targets = monomials(n, 2 * degree)
        position = {e: i for i, e in enumerate(self.targets)}
        size = len(basis)
        self.index = np.empty((size, size), dtype=int)
        for a, alpha in enumerate(basis):
            for b, beta in enumerate(basis):
                self.index[a, b] = position[tuple(x + y for x, y in zip(alpha, beta))]

    def __call__(self, gram: np.ndarray) -> np.ndarray:
        return np.bincount(self.index.ravel(), weights=np.asarray(gram).ravel(), minlength=len(self.targets))

    def vector(self, f: SparsePoly) -> np.ndarray:
        return np.array([float(f.coeff(e)) for e in self.targets])


def _rref_solve(rows: list[list[Fraction]], rhs: list[Fraction], num_vars: int):
    """Exact Gauss-Jordan; returns (pivot columns, reduced rows, reduced rhs) or raises if inconsistent."""
    mat = [row[:] + [r] for row, r in zip(rows, rhs)]
    pivots = []
    r = 0
    for col in range(num_vars):
        pivot = next((i for i in range(r, len(mat)) if mat[i][col] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        lead = mat[r][col]
        mat[r] = [v / lead for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col] != 0:
                factor = mat[i][col]
                mat[i] = [a - factor * b for a, b in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
        if r == len(mat):
            break
    for row in mat[r:]:
        if row[-1] != 0:
            raise ArithmeticError("coefficient-matching system is inconsistent")
    return pivots, mat[:r]


@dataclass
class BlockSpectrahedron:
    """Affine family of invariant Gram matrices representing ``f``.

    ``gram_constant + sum_k p_k gram_directions[k]`` is the Gram matrix over
    the monomial basis; ``block_constants[i] + sum_k p_k block_directions[i][k]``
    is its i-th symmetry-adapted block.
    """

    f: SparsePoly
    rep: GroupRep = field(repr=False)
    basis: SymAdaptedBasis = field(repr=False)
    param_names: list[str]
    gram_constant: np.ndarray = field(repr=False)
    gram_directions: np.ndarray = field(repr=False)
    block_constants: list[np.ndarray] = field(repr=False)
    block_directions: list[np.ndarray] = field(repr=False)
    exact_solution: dict | None = field(default=None, repr=False)
    method: str = "exact"

    @property
    def layout(self) -> BlockLayout:
        return self.basis.layout

    @property
    def num_params(self) -> int:
        return len(self.param_names)

    def blocks_at(self, params) -> list[np.ndarray]:
        params = np.asarray(params, dtype=float)
        out = []
        for const, dirs in zip(self.block_constants, self.block_directions):
            block = const + (np.tensordot(params, dirs, axes=1) if params.size else 0)
            out.append((block + block.T) / 2)
        return out

    def gram_at(self, params) -> np.ndarray:
        params = np.asarray(params, dtype=float)
        if params.size == 0:
            return self.gram_constant.copy()
        return self.gram_constant + np.tensordot(params, self.gram_directions, axes=1)

    def coefficient_residual(self, gram: np.ndarray) -> float:
        """Max coefficient deviation of m^T Q m from f."""
        cmap = _coefficient_map(self.rep.basis)
        return float(np.max(np.abs(cmap(gram) - cmap.vector(self.f)), initial=0.0))

    def residual(self, params) -> float:
        return self.coefficient_residual(self.gram_at(params))

    def trace_objective(self) -> np.ndarray:
        """c with c . p equal to sum_i n_i tr(Q_i(p)) up to a constant."""
        dims = self.layout.dims
        return np.array([
            sum(n * np.trace(dirs[k]) for n, dirs in zip(dims, self.block_directions))
            for k in range(self.num_params)
        ])

    def to_problem(self, objective=None) -> SdpProblem:
        return SdpProblem(self.block_constants, self.block_directions, objective, names=list(self.param_names))


_CMAP_CACHE: dict = {}


def _coefficient_map(basis: Sequence[Exponent]) -> _CoefficientMap:
    key = (len(basis[0]), sum(basis[0]), len(basis))
    if key not in _CMAP_CACHE:
        _CMAP_CACHE[key] = _CoefficientMap(basis)
    return _CMAP_CACHE[key]


def _check_input(f: SparsePoly, rep: GroupRep) -> None:
    if f.n != rep.n:
        raise DegreeError(f"polynomial has {f.n} variables, group acts on {rep.n}")
    if not f.is_zero():
        if not f.is_homogeneous() or f.degree() != 2 * rep.degree:
            raise DegreeError(f"polynomial must be homogeneous of degree {2 * rep.degree}")
    defect = polynomial_is_invariant(f, rep)
    scale = max([abs(float(c)) for _, c in f.items()] + [1.0])
    if defect > 1e-9 * scale:
        raise NotInvariantError(defect)


def _pair_orbits(rep: GroupRep):
    index = {e: i for i, e in enumerate(rep.basis)}
    images = np.array([[index[_exponent_image(p, a)] for a in rep.basis] for p in rep.permutations])
    size = rep.size
    canon = {}
    for a in range(size):
        for b in range(a, size):
            lo = np.minimum(images[:, a], images[:, b])
            hi = np.maximum(images[:, a], images[:, b])
            keys = lo * size + hi
            best = int(keys.min())
            canon[(a, b)] = (best // size, best % size)
    return canon


def _exact_build(f: SparsePoly, rep: GroupRep, sab: SymAdaptedBasis) -> BlockSpectrahedron:
    canon = _pair_orbits(rep)
    variables = sorted(set(canon.values()))
    var_index = {v: i for i, v in enumerate(variables)}
    orbit_of_target: dict[Exponent, Exponent] = {}
    equations: dict[Exponent, dict[int, int]] = {}
    for (a, b), rep_pair in canon.items():
        gamma = tuple(x + y for x, y in zip(rep.basis[a], rep.basis[b]))
        key = orbit_of_target.get(gamma)
        if key is None:
            key = min(_exponent_image(p, gamma) for p in rep.permutations)
            orbit_of_target[gamma] = key
        if key != gamma:
            continue
        row = equations.setdefault(gamma, {})
        v = var_index[rep_pair]
        row[v] = row.get(v, 0) + (1 if a == b else 2)
    targets = sorted(equations, reverse=True)
    num_vars = len(variables)
    # reversed columns so that pivots land on later variables and early ones stay free
    rows = [[Fraction(equations[t].get(num_vars - 1 - c, 0)) for c in range(num_vars)] for t in targets]
    rhs = [Fraction(f.coeff(t)) if f.is_exact() else Fraction(float(f.coeff(t))) for t in targets]
    pivots, reduced = _rref_solve(rows, rhs, num_vars)
    pivot_vars = [num_vars - 1 - c for c in pivots]
    free_vars = sorted(set(range(num_vars)) - set(pivot_vars))
    solution = {}
    for row, pv in zip(reduced, pivot_vars):
        deps = {fv: -row[num_vars - 1 - fv] for fv in free_vars if row[num_vars - 1 - fv] != 0}
        solution[pv] = (row[-1], deps)
    for fv in free_vars:
        solution[fv] = (Fraction(0), {fv: Fraction(1)})

    size = rep.size
    names = [f"q{a + 1}_{b + 1}" for a, b in variables]
    const_vals = np.array([float(solution[v][0]) for v in range(num_vars)])
    dir_vals = np.array([[float(solution[v][1].get(fv, 0)) for v in range(num_vars)] for fv in free_vars])
    pair_var = np.empty((size, size), dtype=int)
    for (a, b), rep_pair in canon.items():
        pair_var[a, b] = pair_var[b, a] = var_index[rep_pair]
    gram_constant = const_vals[pair_var]
    gram_dirs = np.array([d[pair_var] for d in dir_vals]) if free_vars else np.zeros((0, size, size))
    exact = {
        "variables": names,
        "free": [names[v] for v in free_vars],
        "solution": {names[v]: (c, {names[k]: w for k, w in deps.items()}) for v, (c, deps) in solution.items()},
        "pair_variable": pair_var,
    }
    return _assemble(f, rep, sab, [names[v] for v in free_vars], gram_constant, gram_dirs, exact, "exact")


def _numeric_build(f: SparsePoly, rep: GroupRep, sab: SymAdaptedBasis, tol: float = 1e-9) -> BlockSpectrahedron:
    cmap = _coefficient_map(rep.basis)
    unknowns = []
    for i, entry in enumerate(sab.layout.entries):
        for r, c in itertools.combinations_with_replacement(range(entry.multiplicity), 2):
            unknowns.append((i, r, c))
    grams = []
    for i, r, c in unknowns:
        blocks = [np.zeros((e.multiplicity, e.multiplicity)) for e in sab.layout.entries]
        blocks[i][r, c] = blocks[i][c, r] = 1.0
        grams.append(sab.gram_from_blocks(blocks))
    system = np.column_stack([cmap(g) for g in grams])
    target = cmap.vector(f)
    particular, *_ = np.linalg.lstsq(system, target, rcond=None)
    if np.max(np.abs(system @ particular - target), initial=0.0) > tol * max(1.0, np.abs(target).max()):
        raise NotInvariantError(float(np.max(np.abs(system @ particular - target))))
    _, sv, vt = np.linalg.svd(system)
    rank = int(np.sum(sv > tol * max(1.0, sv[0] if sv.size else 0.0)))
    null = vt[rank:]
    gram_constant = np.tensordot(particular, np.array(grams), axes=1)
    gram_dirs = np.tensordot(null, np.array(grams), axes=1) if null.shape[0] else np.zeros((0, rep.size, rep.size))
    names = [f"p{k + 1}" for k in range(null.shape[0])]
    return _assemble(f, rep, sab, names, gram_constant, gram_dirs, None, "numeric")


def _assemble(f, rep, sab, names, gram_constant, gram_dirs, exact, method) -> BlockSpectrahedron:
    block_constants = sab.blocks_from_gram(gram_constant)
    per_dir = [sab.blocks_from_gram(g) for g in gram_dirs]
    block_dirs = []
    for i, entry in enumerate(sab.layout.entries):
        m = entry.multiplicity
        block_dirs.append(np.array([d[i] for d in per_dir]) if per_dir else np.zeros((0, m, m)))
    return BlockSpectrahedron(f, rep, sab, names, gram_constant, gram_dirs, block_constants, block_dirs, exact, method)


def build_spectrahedron(f: SparsePoly, rep: GroupRep, sab: SymAdaptedBasis) -> BlockSpectrahedron:
    """Symmetry-adapted Gram spectrahedron of an invariant form ``f``."""
    _check_input(f, rep)
    if rep.permutations is not None:
        return _exact_build(f, rep, sab)
    return _numeric_build(f, rep, sab)


# ---------------------------------------------------------------------------
# restriction to the face cut out by real zeros of f

@dataclass
class FaceRestriction:
    """Parameters ``offset + directions @ z`` keep every block's kernel containing known zeros.

    Block i is then ``bases[i] @ R_i(z) @ bases[i].T`` with ``R_i`` the blocks of ``problem``.
    """

    problem: SdpProblem
    offset: np.ndarray
    directions: np.ndarray
    bases: list[np.ndarray]
    zeros: list[tuple]

    def params(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return self.offset + (self.directions @ z if z.size else 0.0)


class EmptyFaceError(ArithmeticError):
    """The kernel conditions from real zeros are inconsistent: no PSD Gram matrix exists."""


def candidate_zeros(f: SparsePoly, limit: int = 7) -> list[tuple[int, ...]]:
    """Points of {-1,0,1}^n (one per sign pair) where f vanishes exactly."""
    if f.n > limit or f.is_zero():
        return []
    out = []
    for point in itertools.product((-1, 0, 1), repeat=f.n):
        nonzero = [v for v in point if v != 0]
        if not nonzero or nonzero[0] < 0:
            continue
        value = evaluate(f, point)
        if (value == 0) if f.is_exact() else abs(float(value)) < 1e-12:
            out.append(point)
    return out


def restrict_to_zeros(spec: BlockSpectrahedron, zeros: Sequence[Sequence[float]], tol: float = 1e-9) -> FaceRestriction:
    """Every PSD Gram matrix Q of f has Q m(x0) = 0 at real zeros x0; impose this per block."""
    layout = spec.layout
    change = spec.basis.change_of_basis
    kernels = [[] for _ in layout.entries]
    for point in zeros:
        values = np.array([np.prod([float(x) ** e for x, e in zip(point, alpha)]) for alpha in spec.rep.basis])
        adapted = change.T @ values
        for i, entry in enumerate(layout.entries):
            for k in range(entry.dim):
                kernels[i].append(adapted[entry.indices(k)])
    bases, kernel_bases = [], []
    for entry, vecs in zip(layout.entries, kernels):
        m = entry.multiplicity
        if vecs:
            u, sv, _ = np.linalg.svd(np.array(vecs).T)
            rank = int(np.sum(sv > tol * max(1.0, sv[0])))
        else:
            u, rank = np.eye(m), 0
        kernel_bases.append(u[:, :rank])
        bases.append(u[:, rank:])
    k = spec.num_params
    rows, rhs = [], []
    for const, dirs, ker in zip(spec.block_constants, spec.block_directions, kernel_bases):
        if ker.shape[1] == 0:
            continue
        rows.append(np.einsum("kij,jl->ilk", dirs, ker).reshape(-1, k) if k else np.zeros((const.shape[0] * ker.shape[1], 0)))
        rhs.append(-(const @ ker).reshape(-1))
    if rows:
        system = np.vstack(rows)
        target = np.concatenate(rhs)
        if k:
            offset, *_ = np.linalg.lstsq(system, target, rcond=None)
            defect = np.max(np.abs(system @ offset - target), initial=0.0)
        else:
            offset = np.zeros(0)
            defect = np.max(np.abs(target), initial=0.0)
        if defect > 1e-7 * max(1.0, max(np.abs(c).max() for c in spec.block_constants if c.size)):
            raise EmptyFaceError(f"kernel conditions inconsistent (defect {defect:.3e})")
        if k:
            _, sv, vt = np.linalg.svd(system)
            rank = int(np.sum(sv > tol * max(1.0, sv[0] if sv.size else 0.0)))
            directions = vt[rank:].T
        else:
            directions = np.zeros((0, 0))
    else:
        offset = np.zeros(k)
        directions = np.eye(k)
    constants, coefficients = [], []
    for const, dirs, basis in zip(spec.block_constants, spec.block_directions, bases):
        base = const + (np.tensordot(offset, dirs, axes=1) if k else 0)
        constants.append(basis.T @ base @ basis)
        moved = np.tensordot(directions.T, dirs, axes=1) if k else np.zeros((0,) + const.shape)
        coefficients.append(np.einsum("ai,kab,bj->kij", basis, moved, basis))
    problem = SdpProblem(constants, coefficients)
    return FaceRestriction(problem, offset, directions, bases, [tuple(z) for z in zeros])
