"""Symmetry-adapted bases: isotypic projections, transfer operators, block layouts."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Hashable

import numpy as np
import scipy.linalg

from .polycore import SparsePoly
from .repsn import GroupRep, IrrepData

RANK_TOL = 1e-8


@dataclass(frozen=True)
class BlockEntry:
    label: Hashable
    multiplicity: int
    dim: int
    offset: int

    def indices(self, copy: int) -> np.ndarray:
        """Columns of the ``copy``-th repeated m x m block (copy < dim)."""
        start = self.offset + copy * self.multiplicity
        return np.arange(start, start + self.multiplicity)

    @property
    def width(self) -> int:
        return self.multiplicity * self.dim


@dataclass(frozen=True)
class BlockLayout:
    """Isotypic components in column order; each holds ``dim`` copies of an m x m block."""

    entries: tuple[BlockEntry, ...]
    size: int

    @property
    def multiplicities(self) -> list[int]:
        return [e.multiplicity for e in self.entries]

    @property
    def dims(self) -> list[int]:
        return [e.dim for e in self.entries]

    def to_dict(self) -> list[dict]:
        return [
            {"label": _label_text(e.label), "m": e.multiplicity, "n": e.dim, "offset": e.offset}
            for e in self.entries
        ]


def _label_text(label) -> str:
    if isinstance(label, tuple):
        return ",".join(str(p) for p in label)
    return str(label)


@dataclass
class SymAdaptedBasis:
    """Symmetry-adapted change of basis.

    ``change_of_basis`` (W) expresses the new basis over the monomials, so a Gram
    matrix Q in monomial coordinates becomes ``W^{-1} Q W^{-T}``, block diagonal for
    invariant Q.  ``orthonormal_change`` is the orthogonal factor acting on the
    orthogonalized representation and ``inner_change`` the Gram-Schmidt factor U,
    with ``W = U @ orthonormal_change``.
    """

    change_of_basis: np.ndarray = field(repr=False)
    orthonormal_change: np.ndarray = field(repr=False)
    inner_change: np.ndarray = field(repr=False)
    layout: BlockLayout
    basis_polys: list[SparsePoly] = field(repr=False)
    method: str = "projection"

    @property
    def inverse(self) -> np.ndarray:
        """W^{-1} = T'^T U^{-1}."""
        return self.orthonormal_change.T @ np.linalg.inv(self.inner_change)

    def blocks_from_gram(self, gram: np.ndarray) -> list[np.ndarray]:
        """The m_i x m_i blocks of an invariant Gram matrix (copies averaged)."""
        winv = self.inverse
        adapted = winv @ gram @ winv.T
        out = []
        for entry in self.layout.entries:
            acc = sum(adapted[np.ix_(entry.indices(k), entry.indices(k))] for k in range(entry.dim))
            block = acc / entry.dim
            out.append((block + block.T) / 2)
        return out

    def gram_from_blocks(self, blocks: list[np.ndarray]) -> np.ndarray:
        """Monomial-coordinate Gram matrix W (direct sum of I_n (x) Q_i) W^T."""
        adapted = np.zeros((self.layout.size, self.layout.size))
        for entry, block in zip(self.layout.entries, blocks):
            for k in range(entry.dim):
                idx = entry.indices(k)
                adapted[np.ix_(idx, idx)] = block
        w = self.change_of_basis
        return w @ adapted @ w.T

    def block_basis_polys(self) -> list[list[SparsePoly]]:
        """Per isotypic, the basis polynomials of its first copy."""
        return [[self.basis_polys[c] for c in entry.indices(0)] for entry in self.layout.entries]

    def to_dict(self) -> dict:
        return {"layout": self.layout.to_dict(), "T": self.change_of_basis.tolist(), "method": self.method}


# ---------------------------------------------------------------------------
# invariant inner product

def invariant_gram(rep: GroupRep) -> np.ndarray:
    """Average of D(g)^T D(g) over the group; D(g)^T S D(g) = S for all g."""
    total = np.zeros((rep.size, rep.size))
    for mat in rep.matrices:
        total += mat.T @ mat
    out = total / rep.order
    return (out + out.T) / 2


def is_orthogonal_rep(rep: GroupRep, tol: float = 1e-10) -> bool:
    eye = np.eye(rep.size)
    return all(np.max(np.abs(m.T @ m - eye)) <= tol for m in rep.matrices)


def _modified_gram_schmidt(vectors: np.ndarray, inner: np.ndarray | None = None) -> np.ndarray:
    """Orthonormalize columns in order under v^T inner w (identity if None)."""
    out = np.array(vectors, dtype=float, copy=True)
    metric = np.eye(out.shape[0]) if inner is None else inner
    for j in range(out.shape[1]):
        for i in range(j):
            out[:, j] -= (out[:, i] @ metric @ out[:, j]) * out[:, i]
        norm_sq = out[:, j] @ metric @ out[:, j]
        if norm_sq <= 1e-24:
            raise np.linalg.LinAlgError("Gram-Schmidt breakdown: dependent vectors")
        out[:, j] /= np.sqrt(norm_sq)
    return out


def orthogonalize_rep(rep: GroupRep, gram: np.ndarray | None = None) -> tuple[np.ndarray, GroupRep]:
    """Return (U, rep') with U^T S U = I and D'(g) = U^{-1} D(g) U orthogonal."""
    gram = invariant_gram(rep) if gram is None else gram
    eye = np.eye(rep.size)
    if np.array_equal(gram, eye):
        return eye, rep
    if np.linalg.cond(gram) > 1e12:
        raise np.linalg.LinAlgError("invariant inner product is numerically singular")
    basis = _modified_gram_schmidt(eye, gram)
    inv = basis.T @ gram
    if np.max(np.abs(inv @ basis - eye)) > 1e-9:
        raise ArithmeticError("U^{-1} = U^T S check failed")
    matrices = [inv @ m @ basis for m in rep.matrices]
    return basis, dataclasses.replace(rep, matrices=matrices, is_permutation=False)


# ---------------------------------------------------------------------------
# isotypic projection with explicit irreducible matrices

def _numerical_rank(mat: np.ndarray, scale: float, rel: float = RANK_TOL) -> int:
    """Singular values above ``rel`` times max(sigma_max, scale) count."""
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv.size == 0:
        return 0
    return int(np.sum(sv > rel * max(sv[0], scale)))


def _greedy_pivots(mat: np.ndarray, count: int, tie: float = 1e-9) -> list[int]:
    """Column pivoting by largest residual norm; near-ties go to the lowest index."""
    residual = np.array(mat, dtype=float, copy=True)
    chosen: list[int] = []
    for _ in range(count):
        norms = np.linalg.norm(residual, axis=0)
        norms[chosen] = -1.0
        top = norms.max()
        pick = int(np.flatnonzero(norms >= top * (1 - tie))[0])
        chosen.append(pick)
        unit = residual[:, pick] / norms[pick]
        residual -= np.outer(unit, unit @ residual)
    return chosen


def isotypic_projection(rep: GroupRep, irrep: IrrepData, row: int = 0) -> np.ndarray:
    """sum_g d(g^{-1})_{1,row+1} D(g); d orthogonal so d(g^{-1}) = d(g)^T."""
    total = np.zeros((rep.size, rep.size))
    for key, mat in zip(rep.keys, rep.matrices):
        coeff = irrep.matrices[key][row, 0]
        if coeff != 0:
            total += coeff * mat
    return total


def _projection_basis(rep: GroupRep, irreps: list[IrrepData], expected: list[int] | None):
    columns, entries = [], []
    offset = 0
    for idx, irrep in enumerate(irreps):
        pi = isotypic_projection(rep, irrep)
        rank = _numerical_rank(pi, rep.order / irrep.dim)
        if expected is not None and rank != expected[idx]:
            raise ArithmeticError(
                f"rank of isotypic projection for {irrep.label} is {rank}, expected {expected[idx]}"
            )
        if rank == 0:
            continue
        first = _modified_gram_schmidt(pi[:, sorted(_greedy_pivots(pi, rank))])
        transfers = [
            irrep.dim / rep.order * isotypic_projection(rep, irrep, row=k) for k in range(irrep.dim)
        ]
        for k in range(irrep.dim):
            block = first if k == 0 else transfers[k] @ first
            columns.append(block)
        entries.append(BlockEntry(irrep.label, rank, irrep.dim, offset))
        offset += rank * irrep.dim
    return columns, entries


# ---------------------------------------------------------------------------
# numeric commutant decomposition for groups without irreducible matrices

def _reynolds_orthogonal(rep: GroupRep, mat: np.ndarray) -> np.ndarray:
    total = np.zeros_like(mat)
    for d in rep.matrices:
        total += d @ mat @ d.T
    return total / rep.order


def _cluster(values: np.ndarray, tol: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for i, v in enumerate(values):
        if groups and abs(v - values[groups[-1][-1]]) <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _commutant_basis(rep: GroupRep, seed: int = 20240917):
    rng = np.random.default_rng(seed)
    size = rep.size
    sym = rng.standard_normal((size, size))
    generic = _reynolds_orthogonal(rep, sym + sym.T)
    generic = (generic + generic.T) / 2
    values, vectors = np.linalg.eigh(generic)
    scale = max(1.0, float(np.max(np.abs(values))))
    copies = [vectors[:, g] for g in _cluster(values, 1e-7 * scale)]

    def character(space: np.ndarray) -> np.ndarray:
        return np.array([np.trace(space.T @ d @ space) for d in rep.matrices])

    isotypics: list[tuple[np.ndarray, list[np.ndarray]]] = []
    for space in copies:
        chi = character(space)
        for chi_ref, members in isotypics:
            if chi_ref.shape == chi.shape and np.max(np.abs(chi_ref - chi)) < 1e-6:
                members.append(space)
                break
        else:
            isotypics.append((chi, [space]))

    def sort_key(item):
        chi, members = item
        trivial = np.allclose(chi, 1.0, atol=1e-6)
        return (not trivial, int(round(chi[0])), -len(members))

    isotypics.sort(key=sort_key)

    columns, entries = [], []
    offset = 0
    for number, (chi, members) in enumerate(isotypics):
        dim = int(round(chi[0]))
        reference = members[0]
        aligned = [reference]
        for other in members[1:]:
            for _ in range(10):
                mixer = _reynolds_orthogonal(rep, rng.standard_normal((size, size)))
                link = other.T @ mixer @ reference
                sv = np.linalg.svd(link, compute_uv=False)
                if sv[-1] > 1e-6 * max(1.0, sv[0]):
                    break
            else:
                raise ArithmeticError("could not align isotypic copies")
            left, _, right = np.linalg.svd(link)
            aligned.append(other @ (left @ right))
        label = "trivial" if np.allclose(chi, 1.0, atol=1e-6) else f"iso{number}_dim{dim}"
        for k in range(dim):
            columns.append(np.column_stack([space[:, k] for space in aligned]))
        entries.append(BlockEntry(label, len(members), dim, offset))
        offset += len(members) * dim
    return columns, entries


# ---------------------------------------------------------------------------
# entry point

def symmetry_adapted_basis(rep: GroupRep, method: str | None = None) -> SymAdaptedBasis:
    """Symmetry-adapted basis for ``rep`` (orthogonalized internally if needed).

    ``method`` is ``"projection"`` (needs irreducible matrices covering every
    isotypic component), ``"commutant"`` or ``None`` to choose automatically.
    """
    if is_orthogonal_rep(rep):
        inner, ortho = np.eye(rep.size), rep
    else:
        inner, ortho = orthogonalize_rep(rep)
    if method is None:
        covered = rep.irreps and (
            not rep.multiplicities
            or sum(m * ir.dim for m, ir in zip(rep.multiplicities, rep.irreps)) == rep.size
        )
        method = "projection" if covered else "commutant"
    if method == "projection":
        expected = rep.multiplicities or None
        columns, entries = _projection_basis(ortho, rep.irreps, expected)
        if sum(e.width for e in entries) != rep.size:
            raise ArithmeticError("irreducible data does not cover the representation")
    elif method == "commutant":
        columns, entries = _commutant_basis(ortho)
    else:
        raise ValueError(f"unknown method {method!r}")
    orth = np.column_stack(columns)
    change = inner @ orth
    polys = [
        SparsePoly(rep.n, {exp: float(c) for exp, c in zip(rep.basis, change[:, j]) if abs(c) > 1e-14})
        for j in range(rep.size)
    ]
    layout = BlockLayout(tuple(entries), rep.size)
    return SymAdaptedBasis(change, orth, inner, layout, polys, method)


def _pattern_mask(layout: BlockLayout) -> np.ndarray:
    """True where T^{-1} D(g) T may be nonzero: same isotypic and same copy index."""
    tag = np.full(layout.size, -1)
    for number, entry in enumerate(layout.entries):
        for k in range(entry.dim):
            tag[entry.indices(k)] = number * 100_000 + np.arange(entry.multiplicity)
    return tag[:, None] == tag[None, :]


def verify_block_structure(rep: GroupRep, change: np.ndarray, layout: BlockLayout, tol: float = 1e-9) -> float:
    """Largest entry of T^{-1} D(g) T outside the permitted block pattern."""
    if rep.order == 1:
        return 0.0
    mask = _pattern_mask(layout)
    lu = scipy.linalg.lu_factor(change)
    worst = 0.0
    for mat in rep.matrices:
        adapted = scipy.linalg.lu_solve(lu, mat @ change)
        outside = np.abs(adapted[~mask])
        if outside.size:
            worst = max(worst, float(outside.max()))
    return worst


def copy_deviation(rep: GroupRep, change: np.ndarray, layout: BlockLayout) -> float:
    """Largest disagreement between the n_i x n_i action matrices of different copies."""
    lu = scipy.linalg.lu_factor(change)
    worst = 0.0
    for mat in rep.matrices:
        adapted = scipy.linalg.lu_solve(lu, mat @ change)
        for entry in layout.entries:
            per_copy = []
            for j in range(entry.multiplicity):
                idx = [entry.offset + k * entry.multiplicity + j for k in range(entry.dim)]
                per_copy.append(adapted[np.ix_(idx, idx)])
            for other in per_copy[1:]:
                worst = max(worst, float(np.max(np.abs(other - per_copy[0]))))
    return worst
