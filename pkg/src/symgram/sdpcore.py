"""Small dense semidefinite feasibility and optimization over affine block families.

A problem asks for parameters p with every block ``C_i + sum_k p_k F_ik`` PSD,
optionally minimizing ``c . p``.  Internally both phases are cast as the dual
standard form ``max b.y  s.t.  C - sum_k y_k A_k >= 0`` (SDP blocks plus a
diagonal LP block for box constraints) and solved with an infeasible-start
primal-dual interior-point method (HKM direction, Mehrotra corrector).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg


class Status(enum.Enum):
    OPTIMAL = "Optimal"
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    INDETERMINATE = "Indeterminate"

    @property
    def is_feasible(self) -> bool:
        return self in (Status.OPTIMAL, Status.FEASIBLE)


@dataclass
class SdpOptions:
    feas_tol: float = 1e-8
    infeas_margin: float = 1e-7
    rank_tol: float = 1e-7
    max_iters: int = 150
    gap_tol: float = 1e-10
    box: float = 1e3
    phase1_cap: float = 1.0
    block_cap: int = 64
    param_cap: int = 4096


@dataclass
class SdpProblem:
    """Blocks ``constants[i] + sum_k params[k] * coefficients[i][k]``."""

    constants: list[np.ndarray]
    coefficients: list[np.ndarray]
    objective: np.ndarray | None = None
    bounds: float | None = None
    names: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.constants = [np.asarray(c, dtype=float) for c in self.constants]
        k = self.num_params
        self.coefficients = [
            np.asarray(f, dtype=float).reshape(k, c.shape[0], c.shape[0])
            for f, c in zip(self.coefficients, self.constants)
        ]
        if self.objective is not None:
            self.objective = np.asarray(self.objective, dtype=float)

    @property
    def num_params(self) -> int:
        if not self.coefficients:
            return 0
        return int(np.asarray(self.coefficients[0]).shape[0])

    def blocks_at(self, params) -> list[np.ndarray]:
        params = np.asarray(params, dtype=float)
        out = []
        for const, coef in zip(self.constants, self.coefficients):
            block = const + np.tensordot(params, coef, axes=1) if params.size else const.copy()
            out.append((block + block.T) / 2)
        return out

    def min_eigs(self, params) -> list[float]:
        return [float(np.linalg.eigvalsh(b)[0]) if b.size else 0.0 for b in self.blocks_at(params)]


@dataclass
class SdpSolution:
    params: np.ndarray
    min_eig_per_block: list[float]
    status: Status
    iterations: int
    phase1_value: float | None = None
    objective_value: float | None = None

    @property
    def min_eig(self) -> float:
        return min(self.min_eig_per_block, default=0.0)


# ---------------------------------------------------------------------------
# interior-point engine for  max b.y  s.t.  C - A^T y = Z >= 0

@dataclass
class _DualForm:
    c_sdp: list[np.ndarray]
    a_sdp: list[np.ndarray]  # each (K, n, n)
    c_lp: np.ndarray
    a_lp: np.ndarray  # (K, p)
    b: np.ndarray

    @property
    def dim(self) -> int:
        return sum(c.shape[0] for c in self.c_sdp) + self.c_lp.size


@dataclass
class _IpmResult:
    y: np.ndarray
    primal_obj: float
    dual_obj: float
    iterations: int
    converged: bool
    primal_infeas: float
    dual_infeas: float


def _sym(m: np.ndarray) -> np.ndarray:
    return (m + m.T) / 2


def _max_step(x: np.ndarray, dx: np.ndarray) -> float:
    """Largest alpha with x + alpha dx PSD (x positive definite)."""
    if x.size == 0:
        return np.inf
    try:
        top = scipy.linalg.eigh(-_sym(dx), _sym(x), eigvals_only=True, subset_by_index=[x.shape[0] - 1, x.shape[0] - 1])[0]
    except (np.linalg.LinAlgError, ValueError):
        chol = np.linalg.cholesky(_sym(x))
        inv = np.linalg.inv(chol)
        top = np.linalg.eigvalsh(-inv @ dx @ inv.T)[-1]
    return np.inf if top <= 0 else 1.0 / top


def _max_step_lp(x: np.ndarray, dx: np.ndarray) -> float:
    neg = dx < 0
    if not np.any(neg):
        return np.inf
    return float(np.min(-x[neg] / dx[neg]))


def _interior_point(prob: _DualForm, opts: SdpOptions) -> _IpmResult:
    num = prob.b.size
    scale_c = max(1.0, max((np.abs(c).max() for c in prob.c_sdp if c.size), default=0.0),
                  float(np.abs(prob.c_lp).max()) if prob.c_lp.size else 0.0)
    scale_b = max(1.0, float(np.abs(prob.b).max()) if num else 0.0)
    init = 10.0 * max(scale_c, scale_b)
    xs = [init * np.eye(c.shape[0]) for c in prob.c_sdp]
    zs = [init * np.eye(c.shape[0]) for c in prob.c_sdp]
    xl = init * np.ones(prob.c_lp.size)
    zl = init * np.ones(prob.c_lp.size)
    y = np.zeros(num)
    dim = max(prob.dim, 1)

    def a_op(mats, vec):
        out = np.zeros(num)
        for a, m in zip(prob.a_sdp, mats):
            out += np.einsum("kij,ij->k", a, m)
        if vec.size:
            out += prob.a_lp @ vec
        return out

    def at_op(vec):
        mats = [np.tensordot(vec, a, axes=1) if num else np.zeros_like(c) for a, c in zip(prob.a_sdp, prob.c_sdp)]
        lp = prob.a_lp.T @ vec if num else np.zeros_like(prob.c_lp)
        return mats, lp

    iters = 0
    converged = False
    pinf = dinf = np.inf
    for iters in range(1, opts.max_iters + 1):
        aty_s, aty_l = at_op(y)
        rd_s = [c - z - a for c, z, a in zip(prob.c_sdp, zs, aty_s)]
        rd_l = prob.c_lp - zl - aty_l
        rp = prob.b - a_op(xs, xl)
        gap = sum(np.sum(x * z) for x, z in zip(xs, zs)) + float(xl @ zl)
        mu = gap / dim
        pobj = sum(np.sum(c * x) for c, x in zip(prob.c_sdp, xs)) + float(prob.c_lp @ xl)
        dobj = float(prob.b @ y)
        pinf = float(np.linalg.norm(rp)) / (1 + scale_b)
        dinf = max([float(np.abs(r).max()) for r in rd_s if r.size] + ([float(np.abs(rd_l).max())] if rd_l.size else []) + [0.0]) / (1 + scale_c)
        rel_gap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
        if pinf < opts.gap_tol and dinf < opts.gap_tol and rel_gap < opts.gap_tol and gap / dim < opts.gap_tol:
            converged = True
            break
        if not (np.isfinite(pobj) and np.isfinite(dobj)) or max(abs(pobj), abs(dobj)) > 1e14:
            break

        try:
            step = _newton_step(prob, xs, xl, y, zs, zl, rp, rd_s, rd_l, mu, a_op, at_op)
        except np.linalg.LinAlgError:
            break
        xs, xl, y, zs, zl = step

    pobj = sum(np.sum(c * x) for c, x in zip(prob.c_sdp, xs)) + float(prob.c_lp @ xl)
    return _IpmResult(y, pobj, float(prob.b @ y), iters, converged, pinf, dinf)


def _newton_step(prob, xs, xl, y, zs, zl, rp, rd_s, rd_l, mu, a_op, at_op):
    """One Mehrotra predictor-corrector step along the HKM direction."""
    num = prob.b.size
    gap = mu * max(prob.dim, 1)
    zinv = [np.linalg.inv(z) for z in zs]
    zinv = [_sym(z) for z in zinv]
    # Schur complement M_kl = tr(A_k X A_l Z^{-1}) + LP part.
    schur = np.zeros((num, num))
    for a, x, zi in zip(prob.a_sdp, xs, zinv):
        left = np.einsum("kij,jl->kil", a, x)
        right = np.einsum("kij,jl->kil", a, zi)
        schur += np.einsum("kab,lba->kl", left, right)
    if xl.size:
        schur += (prob.a_lp * (xl / zl)) @ prob.a_lp.T
    schur = _sym(schur)
    try:
        factor = scipy.linalg.cho_factor(schur)
        solve_schur = lambda r: scipy.linalg.cho_solve(factor, r)  # noqa: E731
    except np.linalg.LinAlgError:
        solve_schur = lambda r: np.linalg.lstsq(schur, r, rcond=None)[0]  # noqa: E731

    def direction(rc_s, rc_l):
        # dX = Rc - sym(X dZ Z^{-1}),  dZ = Rd - A^T dy,  A(dX) = Rp
        t_s = [rc - _sym(x @ rd @ zi) for rc, x, rd, zi in zip(rc_s, xs, rd_s, zinv)]
        t_l = rc_l - xl * rd_l / zl
        dy = solve_schur(rp - a_op(t_s, t_l))
        atd_s, atd_l = at_op(dy)
        dz_s = [rd - a for rd, a in zip(rd_s, atd_s)]
        dz_l = rd_l - atd_l
        dx_s = [rc - _sym(x @ dz @ zi) for rc, x, dz, zi in zip(rc_s, xs, dz_s, zinv)]
        dx_l = rc_l - xl * dz_l / zl
        return dx_s, dx_l, dy, dz_s, dz_l

    def steps(dx_s, dx_l, dz_s, dz_l):
        ap = min([_max_step(x, d) for x, d in zip(xs, dx_s)] + [_max_step_lp(xl, dx_l)])
        ad = min([_max_step(z, d) for z, d in zip(zs, dz_s)] + [_max_step_lp(zl, dz_l)])
        return ap, ad

    # predictor
    rc_s = [-x for x in xs]
    rc_l = -xl
    dx_s, dx_l, dy, dz_s, dz_l = direction(rc_s, rc_l)
    ap, ad = steps(dx_s, dx_l, dz_s, dz_l)
    ap, ad = min(1.0, ap), min(1.0, ad)
    gap_aff = sum(np.sum((x + ap * dx) * (z + ad * dz)) for x, dx, z, dz in zip(xs, dx_s, zs, dz_s))
    gap_aff += float((xl + ap * dx_l) @ (zl + ad * dz_l))
    sigma = min(1.0, max(0.0, gap_aff / gap)) ** 3 if gap > 0 else 0.0
    # corrector
    rc_s = [sigma * mu * zi - x - _sym(dx @ dz @ zi) for zi, x, dx, dz in zip(zinv, xs, dx_s, dz_s)]
    rc_l = sigma * mu / zl - xl - dx_l * dz_l / zl
    dx_s, dx_l, dy, dz_s, dz_l = direction(rc_s, rc_l)
    ap, ad = steps(dx_s, dx_l, dz_s, dz_l)
    ap, ad = min(1.0, 0.95 * ap), min(1.0, 0.95 * ad)
    xs = [_sym(x + ap * d) for x, d in zip(xs, dx_s)]
    xl = xl + ap * dx_l
    y = y + ad * dy
    zs = [_sym(z + ad * d) for z, d in zip(zs, dz_s)]
    zl = zl + ad * dz_l
    return xs, xl, y, zs, zl


# ---------------------------------------------------------------------------
# public API

def _check_caps(problem: SdpProblem, opts: SdpOptions) -> None:
    for c in problem.constants:
        if c.shape[0] > opts.block_cap:
            raise ValueError(f"block of size {c.shape[0]} exceeds cap {opts.block_cap}")
    if problem.num_params > opts.param_cap:
        raise ValueError(f"{problem.num_params} parameters exceed cap {opts.param_cap}")


def _box_lp(k: int, bound: float, extra: int):
    """Rows for bound - p_j >= 0 and bound + p_j >= 0 (dual form: c - a^T y >= 0)."""
    a = np.zeros((k + extra, 2 * k))
    for j in range(k):
        a[j, 2 * j] = 1.0
        a[j, 2 * j + 1] = -1.0
    return np.full(2 * k, bound), a


def _phase_one(problem: SdpProblem, opts: SdpOptions, bound: float) -> tuple[np.ndarray, float, float, _IpmResult]:
    k = problem.num_params
    blocks = [i for i, c in enumerate(problem.constants) if c.shape[0] > 0]
    c_sdp = [problem.constants[i] for i in blocks]
    a_sdp = []
    for i in blocks:
        size = problem.constants[i].shape[0]
        a = np.concatenate([-problem.coefficients[i], np.eye(size)[None]], axis=0)
        a_sdp.append(a)
    c_lp, a_lp = _box_lp(k, bound, 1)
    # t <= cap
    c_lp = np.append(c_lp, opts.phase1_cap)
    col = np.zeros((k + 1, 1))
    col[k, 0] = 1.0
    a_lp = np.hstack([a_lp, col])
    b = np.zeros(k + 1)
    b[k] = 1.0
    res = _interior_point(_DualForm(c_sdp, a_sdp, c_lp, a_lp, b), opts)
    return res.y[:k], res.y[k], res.primal_obj, res


def _phase_two(problem: SdpProblem, opts: SdpOptions, bound: float) -> _IpmResult:
    k = problem.num_params
    blocks = [i for i, c in enumerate(problem.constants) if c.shape[0] > 0]
    c_lp, a_lp = _box_lp(k, bound, 0)
    form = _DualForm(
        [problem.constants[i] for i in blocks],
        [-problem.coefficients[i] for i in blocks],
        c_lp,
        a_lp,
        -np.asarray(problem.objective, dtype=float),
    )
    return _interior_point(form, opts)


def solve(problem: SdpProblem, opts: SdpOptions | None = None) -> SdpSolution:
    """Phase 1 (maximize the smallest eigenvalue), then optional objective minimization."""
    opts = opts or SdpOptions()
    _check_caps(problem, opts)
    k = problem.num_params
    bound = problem.bounds if problem.bounds is not None else opts.box

    def classify(params, value=None, iters=0, objective=None, optimal=False) -> SdpSolution:
        eigs = problem.min_eigs(params)
        low = min(eigs, default=0.0)
        if low >= -opts.feas_tol:
            status = Status.OPTIMAL if optimal else Status.FEASIBLE
        elif low < -opts.infeas_margin and k == 0:
            status = Status.INFEASIBLE
        else:
            status = Status.INDETERMINATE
        return SdpSolution(np.asarray(params, dtype=float), eigs, status, iters, value, objective)

    if k == 0:
        return classify(np.zeros(0), value=min(problem.min_eigs(np.zeros(0)), default=0.0))

    params, t_value, upper, res1 = _phase_one(problem, opts, bound)
    direct = min(problem.min_eigs(params), default=0.0)
    if upper < -opts.infeas_margin and direct < -opts.infeas_margin:
        return SdpSolution(params, problem.min_eigs(params), Status.INFEASIBLE, res1.iterations, direct)
    phase_one = classify(params, value=direct, iters=res1.iterations)
    if problem.objective is None or not phase_one.status.is_feasible:
        return phase_one

    res2 = _phase_two(problem, opts, bound)
    candidate = res2.y
    eigs = problem.min_eigs(candidate)
    if min(eigs, default=0.0) >= -opts.feas_tol and np.all(np.abs(candidate) <= bound * (1 + 1e-9)):
        objective = float(problem.objective @ candidate)
        status = Status.OPTIMAL if res2.converged else Status.FEASIBLE
        return SdpSolution(candidate, eigs, status, res1.iterations + res2.iterations, direct, objective)
    phase_one.iterations += res2.iterations
    phase_one.objective_value = float(problem.objective @ params)
    return phase_one


def numerical_rank(matrix, rel_tol: float = 1e-7, scale: float | None = None) -> int:
    """Singular values above ``rel_tol`` times sigma_max (or times ``scale`` if given)."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.size == 0:
        return 0
    sv = np.linalg.svd(matrix, compute_uv=False)
    top = sv[0] if scale is None else scale
    if top <= 0:
        return 0
    return int(np.sum(sv > rel_tol * top))


def psd_factor(matrix, tol: float = 1e-8, rel_tol: float = 1e-7, scale: float | None = None) -> list[np.ndarray]:
    """Vectors w with matrix ~ sum w w^T, one per eigenvalue above the rank cutoff."""
    matrix = _sym(np.asarray(matrix, dtype=float))
    if matrix.size == 0:
        return []
    values, vectors = np.linalg.eigh(matrix)
    top = max(float(np.abs(values).max()), 0.0) if scale is None else scale
    if values[0] < -tol * max(1.0, top):
        raise ValueError(f"matrix is not PSD: min eigenvalue {values[0]:.3e}")
    keep = values > rel_tol * top if top > 0 else np.zeros_like(values, dtype=bool)
    return [np.sqrt(values[j]) * vectors[:, j] for j in np.flatnonzero(keep)[::-1]]
