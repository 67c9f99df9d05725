"""End-to-end SOS certificates with squares grouped by isotypic component."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .gramspec import (
    BlockSpectrahedron,
    EmptyFaceError,
    build_spectrahedron,
    candidate_zeros,
    restrict_to_zeros,
)
from .polycore import SparsePoly, apply_linear_substitution, monomials, parse_poly, poly_sum, render
from .repsn import GroupRep, parse_matrix, resolve_group, symmetric_group_rep
from .sdpcore import SdpOptions, SdpProblem, SdpSolution, Status, numerical_rank, psd_factor, solve
from .symadapt import SymAdaptedBasis, symmetry_adapted_basis

SCHEMA_VERSION = 1
VERIFY_TOL = 1e-7


@dataclass
class Square:
    label: str
    copy: int
    index: int
    poly: SparsePoly


@dataclass
class CertBlock:
    label: str
    gram: np.ndarray
    rank: int
    dim: int


@dataclass
class SosCertificate:
    f: SparsePoly
    degree: int
    group: dict
    basis: list[tuple[int, ...]] = field(repr=False)
    change_of_basis: np.ndarray = field(repr=False)
    layout: list[dict]
    blocks: list[CertBlock] = field(repr=False)
    squares: list[Square] = field(repr=False)
    residual: float
    params: dict = field(default_factory=dict, repr=False)
    generators: list[np.ndarray] = field(default_factory=list, repr=False)

    @property
    def n(self) -> int:
        return self.f.n

    def partial_sums(self) -> dict[str, SparsePoly]:
        out: dict[str, SparsePoly] = {}
        for block in self.blocks:
            out[block.label] = poly_sum((sq.poly * sq.poly for sq in self.squares if sq.label == block.label), self.n)
        return out

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "n": self.n,
            "degree": self.degree,
            "f": render(self.f),
            "group": self.group,
            "basis": [render(SparsePoly.monomial(e)) for e in self.basis],
            "T": self.change_of_basis.tolist(),
            "layout": self.layout,
            "blocks": [{"label": b.label, "Q": b.gram.tolist(), "rank": b.rank, "n": b.dim} for b in self.blocks],
            "squares": [{"label": s.label, "copy": s.copy, "index": s.index, "poly": render(s.poly)} for s in self.squares],
            "params": self.params,
            "residual": self.residual,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    @classmethod
    def from_dict(cls, data: dict) -> "SosCertificate":
        if data.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"unsupported certificate schema {data.get('schema')!r}")
        try:
            n = int(data["n"])
            degree = int(data["degree"])
            f = parse_poly(data["f"], n)
            basis = [next(iter(parse_poly(b, n).terms)) for b in data["basis"]]
            blocks = [CertBlock(b["label"], np.array(b["Q"], dtype=float), int(b["rank"]), int(b.get("n", 1))) for b in data["blocks"]]
            squares = [Square(s["label"], int(s["copy"]), int(s.get("index", 0)), parse_poly(s["poly"], n).to_float()) for s in data["squares"]]
            change = np.array(data["T"], dtype=float)
        except (KeyError, TypeError, ValueError, StopIteration) as exc:
            raise ValueError(f"malformed certificate: {exc}") from exc
        group = data.get("group", {})
        generators = [parse_matrix(g) for g in group.get("generators", [])]
        return cls(f, degree, group, basis, change, data.get("layout", []), blocks, squares,
                   float(data.get("residual", np.nan)), data.get("params", {}), generators)

    @classmethod
    def from_json(cls, text: str) -> "SosCertificate":
        return cls.from_dict(json.loads(text))


@dataclass
class CertifyOutcome:
    status: Status
    certificate: SosCertificate | None
    spectrahedron: BlockSpectrahedron | None = field(default=None, repr=False)
    solution: SdpSolution | None = field(default=None, repr=False)
    message: str = ""

    @property
    def feasible(self) -> bool:
        return self.status.is_feasible and self.certificate is not None


@lru_cache(maxsize=64)
def _cached_sn_basis(n: int, d: int) -> SymAdaptedBasis:
    return symmetry_adapted_basis(symmetric_group_rep(n, d))


def adapted_basis_for(rep: GroupRep) -> SymAdaptedBasis:
    if rep.name == f"S{rep.n}" and rep.permutations is not None:
        return _cached_sn_basis(rep.n, rep.degree)
    return symmetry_adapted_basis(rep)


def _group_generators(rep: GroupRep) -> list[np.ndarray]:
    return [np.asarray(g) for g in rep.generators()]


def _label(label) -> str:
    if isinstance(label, tuple):
        return ",".join(str(p) for p in label)
    return str(label)


def _zero_certificate(f: SparsePoly, rep: GroupRep, sab: SymAdaptedBasis) -> SosCertificate:
    blocks = [CertBlock(_label(e.label), np.zeros((e.multiplicity, e.multiplicity)), 0, e.dim) for e in sab.layout.entries]
    return SosCertificate(f, 2 * rep.degree, rep.descriptor(), list(rep.basis), sab.change_of_basis,
                          sab.layout.to_dict(), blocks, [], 0.0, {}, _group_generators(rep))


def extract_certificate(spec: BlockSpectrahedron, blocks: Sequence[np.ndarray], params=None,
                        rank_tol: float = 1e-7) -> SosCertificate:
    """Factor each PSD block and contract against every copy of its adapted basis."""
    rep, sab = spec.rep, spec.basis
    scale = max((float(np.abs(np.linalg.eigvalsh(b)).max()) for b in blocks if b.size), default=0.0)
    cert_blocks, squares = [], []
    for entry, block in zip(sab.layout.entries, blocks):
        label = _label(entry.label)
        vectors = psd_factor(block, tol=1e-6, rel_tol=rank_tol, scale=scale) if scale > 0 else []
        cert_blocks.append(CertBlock(label, block, len(vectors), entry.dim))
        for copy in range(entry.dim):
            copy_polys = [sab.basis_polys[c] for c in entry.indices(copy)]
            for alpha, w in enumerate(vectors):
                terms: dict = {}
                for coef, poly in zip(w, copy_polys):
                    for exp, c in poly.items():
                        terms[exp] = terms.get(exp, 0.0) + coef * c
                squares.append(Square(label, copy, alpha, SparsePoly(rep.n, {e: c for e, c in terms.items() if abs(c) > 1e-15})))
    names = spec.param_names
    values = {} if params is None else {name: float(v) for name, v in zip(names, params)}
    cert = SosCertificate(spec.f, 2 * rep.degree, rep.descriptor(), list(rep.basis), sab.change_of_basis,
                          sab.layout.to_dict(), cert_blocks, squares, np.nan, values, _group_generators(rep))
    cert.residual = reconstruction_residual(spec.f, cert)
    return cert


def reconstruction_residual(f: SparsePoly, cert: SosCertificate) -> float:
    total = poly_sum((sq.poly * sq.poly for sq in cert.squares), f.n)
    return total.max_abs_difference(f.to_float())


def _objective_vector(spec: BlockSpectrahedron, objective) -> np.ndarray | None:
    if objective is None:
        return None
    if isinstance(objective, str):
        if objective == "trace":
            return spec.trace_objective()
        raise ValueError(f"unknown objective {objective!r}")
    return np.asarray(objective, dtype=float)


def solve_spectrahedron(spec: BlockSpectrahedron, objective=None, opts: SdpOptions | None = None,
                        zeros: Sequence | None = None) -> tuple[Status, np.ndarray | None, list[np.ndarray] | None, SdpSolution | None, str]:
    """Solve over ``spec`` restricted to the face of the given real zeros.

    Returns (status, params, blocks, raw solution, message).
    """
    opts = opts or SdpOptions()
    scale = max([abs(float(c)) for _, c in spec.f.items()] + [0.0])
    if scale == 0.0:
        scale = 1.0
    try:
        face = restrict_to_zeros(spec, zeros or [])
    except EmptyFaceError as exc:
        return Status.INFEASIBLE, None, None, None, str(exc)
    reduced = face.problem
    c_full = _objective_vector(spec, objective)
    c_reduced = None if c_full is None or reduced.num_params == 0 else face.directions.T @ c_full
    problem = SdpProblem([c / scale for c in reduced.constants], reduced.coefficients, c_reduced)
    solution = solve(problem, opts)
    if not solution.status.is_feasible:
        return solution.status, None, None, solution, "semidefinite feasibility failed"
    z = solution.params * scale
    params = face.params(z)
    blocks = []
    for basis, inner in zip(face.bases, problem.blocks_at(solution.params)):
        values, vectors = np.linalg.eigh(inner * scale)
        values = np.clip(values, 0.0, None)
        psd = (vectors * values) @ vectors.T
        blocks.append(basis @ psd @ basis.T)
    return solution.status, params, blocks, solution, ""


def low_rank_search(spec: BlockSpectrahedron, opts: SdpOptions | None = None, zeros: Sequence | None = None,
                    rounds: int = 8, delta: float = 1e-3):
    """Trace solve followed by reweighted-trace (log-det heuristic) rounds; keeps the lowest rank."""
    opts = opts or SdpOptions()
    result = solve_spectrahedron(spec, "trace", opts, zeros)
    if result[1] is None:
        return result
    dims = spec.layout.dims
    best, best_rank = result, gram_rank(result[2], dims, opts.rank_tol)[0]
    current = result
    for _ in range(rounds):
        blocks = current[2]
        top = max((float(np.linalg.eigvalsh(b)[-1]) for b in blocks if b.size), default=1.0)
        weights = [np.linalg.inv(b + delta * max(top, 1e-12) * np.eye(b.shape[0])) if b.size else b for b in blocks]
        objective = np.array([
            sum(n * np.sum(w * dirs[k]) for n, w, dirs in zip(dims, weights, spec.block_directions) if w.size)
            for k in range(spec.num_params)
        ])
        current = solve_spectrahedron(spec, objective, opts, zeros)
        if current[1] is None:
            break
        rank = gram_rank(current[2], dims, opts.rank_tol)[0]
        if rank < best_rank:
            best, best_rank = current, rank
        elif rank == best_rank:
            best = current
            break
    return best


def certify(f: SparsePoly, group="sn", objective="trace", opts: SdpOptions | None = None,
            use_zeros: bool = True, degree: int | None = None) -> CertifyOutcome:
    """Decide whether the invariant form ``f`` is SOS and extract a certificate."""
    opts = opts or SdpOptions()
    if f.is_zero():
        if degree is None:
            raise ValueError("degree is required for the zero polynomial")
        total = degree
    else:
        if not f.is_homogeneous():
            raise ValueError("polynomial must be homogeneous")
        total = f.degree()
    if total % 2:
        raise ValueError("an SOS form has even degree")
    rep = resolve_group(group, f.n, total // 2)
    sab = adapted_basis_for(rep)
    if f.is_zero():
        return CertifyOutcome(Status.OPTIMAL, _zero_certificate(f, rep, sab))
    spec = build_spectrahedron(f, rep, sab)
    zeros = candidate_zeros(f) if use_zeros else []
    if isinstance(objective, str) and objective == "min-rank":
        status, params, blocks, solution, message = low_rank_search(spec, opts, zeros)
    else:
        status, params, blocks, solution, message = solve_spectrahedron(spec, objective, opts, zeros)
    if params is None:
        return CertifyOutcome(status, None, spec, solution, message)
    cert = extract_certificate(spec, blocks, params, opts.rank_tol)
    if not cert.residual <= VERIFY_TOL * max(1.0, max(abs(float(c)) for _, c in f.items())):
        return CertifyOutcome(Status.INDETERMINATE, cert, spec, solution,
                              f"reconstruction residual {cert.residual:.3e} above tolerance")
    return CertifyOutcome(status, cert, spec, solution, message)


@dataclass
class VerifyReport:
    residual: float
    invariance_defect: float
    partial_defects: dict[str, float]

    def ok(self, tol: float = VERIFY_TOL) -> bool:
        return self.residual <= tol and self.invariance_defect <= tol


def _substitute_float(poly: SparsePoly, matrix: np.ndarray) -> SparsePoly:
    rounded = np.round(matrix)
    if np.array_equal(rounded, matrix):
        return apply_linear_substitution(poly, rounded.astype(int).tolist())
    return apply_linear_substitution(poly, matrix.tolist())


def _certificate_generators(cert: SosCertificate) -> list[np.ndarray]:
    if cert.generators:
        return cert.generators
    rep = resolve_group(cert.group, cert.n, cert.degree // 2)
    return _group_generators(rep)


def verify(f: SparsePoly, cert: SosCertificate) -> VerifyReport:
    """Re-expand the squares and check each isotypic partial sum's invariance."""
    if f.n != cert.n:
        raise ValueError("malformed certificate: variable count mismatch")
    for sq in cert.squares:
        if sq.poly.n != f.n:
            raise ValueError("malformed certificate: square with wrong variable count")
    residual = poly_sum((sq.poly * sq.poly for sq in cert.squares), f.n).max_abs_difference(f.to_float())
    generators = _certificate_generators(cert)
    defects = {}
    for label, partial in cert.partial_sums().items():
        worst = 0.0
        for g in generators:
            worst = max(worst, _substitute_float(partial, np.asarray(g, dtype=float)).max_abs_difference(partial))
        defects[label] = worst
    return VerifyReport(residual, max(defects.values(), default=0.0), defects)


def rank_profile(cert: SosCertificate) -> tuple[int, list[int]]:
    """(total rank sum_i n_i r_i, per-block ranks r_i)."""
    ranks = [b.rank for b in cert.blocks]
    return sum(b.dim * b.rank for b in cert.blocks), ranks


def gram_rank(cert_or_blocks, dims: Sequence[int] | None = None, rel_tol: float = 1e-7) -> tuple[int, list[int]]:
    """Ranks of raw blocks with one global cutoff; total weights block i by dims[i]."""
    if isinstance(cert_or_blocks, SosCertificate):
        blocks = [b.gram for b in cert_or_blocks.blocks]
        dims = [b.dim for b in cert_or_blocks.blocks]
    else:
        blocks = list(cert_or_blocks)
    scale = max((float(np.linalg.svd(b, compute_uv=False)[0]) for b in blocks if np.size(b)), default=0.0)
    ranks = [numerical_rank(b, rel_tol, scale=scale) if np.size(b) and scale > 0 else 0 for b in blocks]
    return sum(n * r for n, r in zip(dims, ranks)), ranks


def full_basis(n: int, d: int) -> list[tuple[int, ...]]:
    return monomials(n, d)
