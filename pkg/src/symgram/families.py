"""Closed-form analyzers for small symmetric families.

Covers binary forms under the variable swap, quadratic forms in n variables,
ternary quartics and ternary sextics under S_3.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .polycore import SparsePoly, evaluate, permute_variables, to_fraction
from .sdpcore import SdpOptions, SdpProblem, Status, numerical_rank, solve
from .symfunc import monomial_symmetric

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
SQRT6 = math.sqrt(6.0)

PSD_TOL = 1e-8
RANK_TOL = 1e-7


class FamilyError(ValueError):
    """Input outside the domain of a closed-form analyzer."""


class InfeasiblePointError(FamilyError):
    """The requested Gram point is not positive semidefinite."""


# ---------------------------------------------------------------- binary forms


def _flip_defect(q: np.ndarray) -> float:
    return float(np.abs(q - q[::-1, ::-1]).max()) if q.size else 0.0


def binary_blocks(d: int, q, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Split a flip-invariant Gram matrix of a binary form of degree 2d.

    ``q`` is indexed by the monomials x^d, x^(d-1) y, ..., y^d.  The symmetric
    block collects ``q[i,j] + q[i,N-1-j]`` (with a sqrt(2) scaled middle row
    when d is even) and the alternating block collects ``q[i,j] - q[i,N-1-j]``.
    """
    q = np.asarray(q, dtype=float)
    size = d + 1
    if q.shape != (size, size):
        raise FamilyError(f"expected a {size}x{size} matrix, got {q.shape}")
    scale = max(1.0, float(np.abs(q).max()))
    if float(np.abs(q - q.T).max()) > tol * scale:
        raise FamilyError("Gram matrix is not symmetric")
    defect = _flip_defect(q)
    if defect > tol * scale:
        raise FamilyError(f"Gram matrix is not invariant under the variable swap (defect {defect:.3g})")
    half = size // 2
    mirror = [size - 1 - j for j in range(half)]
    sym = q[:half, :half] + q[np.ix_(range(half), mirror)]
    alt = q[:half, :half] - q[np.ix_(range(half), mirror)]
    if size % 2:
        mid = half
        column = SQRT2 * q[:half, mid]
        sym = np.block([[sym, column[:, None]], [column[None, :], np.array([[q[mid, mid]]])]])
    return sym, alt


def binary_block_sizes(d: int) -> tuple[int, int]:
    return (d // 2 + 1, d // 2) if d % 2 == 0 else ((d + 1) // 2, (d + 1) // 2)


# ----------------------------------------------------------- quadratic forms


@dataclass
class QuadraticAnalysis:
    """Verdict for ``a*sum x_i^2 + 2b*sum_{i<j} x_i x_j``.

    ``a`` and ``b`` are the diagonal and off-diagonal entries of the unique
    invariant Gram matrix; its eigenvalues are ``a+(n-1)b`` (once) and ``a-b``
    (n-1 times).
    """

    a: float
    b: float
    n: int
    sos: bool
    rank: int | None
    on_rank_one_ray: bool
    on_rank_deficient_ray: bool
    eigenvalues: tuple[float, float]


def quadratic_analyze(a, b, n: int, tol: float = 0.0) -> QuadraticAnalysis:
    if n < 2:
        raise FamilyError("need at least two variables")
    exact = isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction))
    if exact:
        a, b = Fraction(a), Fraction(b)
    trivial = a + (n - 1) * b
    standard = a - b
    scale = max(abs(float(a)), abs(float(b)), 1.0) if tol else 1.0
    margin = tol * scale

    def sign(x) -> int:
        if abs(float(x)) <= margin if not exact else x == 0:
            return 0
        return 1 if x > 0 else -1

    s_triv, s_std = sign(trivial), sign(standard)
    sos = s_triv >= 0 and s_std >= 0
    rank = (1 if s_triv > 0 else 0) + (n - 1 if s_std > 0 else 0) if sos else None
    return QuadraticAnalysis(
        a=float(a), b=float(b), n=n, sos=sos, rank=rank,
        on_rank_one_ray=sos and s_std == 0 and s_triv > 0,
        on_rank_deficient_ray=sos and s_triv == 0 and s_std > 0,
        eigenvalues=(float(trivial), float(standard)),
    )


def quadratic_gram(a, b, n: int) -> np.ndarray:
    """The full n x n invariant Gram matrix (direct oracle)."""
    return np.full((n, n), float(b)) + (float(a) - float(b)) * np.eye(n)


def quadratic_form(a, b, n: int) -> SparsePoly:
    a, b = to_fraction(a), to_fraction(b)
    terms = {}
    for i in range(n):
        exp = [0] * n
        exp[i] = 2
        terms[tuple(exp)] = a
    for i, j in itertools.combinations(range(n), 2):
        exp = [0] * n
        exp[i] = exp[j] = 1
        terms[tuple(exp)] = 2 * b
    return SparsePoly(n, terms)


def quadratic_sos_ratio(n: int) -> float:
    """Fraction of directions (a, b) in the plane that give an SOS quadratic."""
    if n < 2:
        raise FamilyError("need at least two variables")
    return (math.pi / 4 + math.atan(1.0 / (n - 1))) / (2 * math.pi)


# ---------------------------------------------------------- ternary quartics


@dataclass(frozen=True)
class QuarticCoeffs:
    """``a*sum x^4 + b*sum_{i!=j} x_i^3 x_j + c*sum_{i<j} x_i^2 x_j^2 + d*sum x_i^2 x_j x_k``."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    @classmethod
    def of(cls, a, b, c, d) -> "QuarticCoeffs":
        return cls(to_fraction(a), to_fraction(b), to_fraction(c), to_fraction(d))

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.c, self.d)

    def to_poly(self) -> SparsePoly:
        return (monomial_symmetric((4,), 3) * self.a + monomial_symmetric((3, 1), 3) * self.b
                + monomial_symmetric((2, 2), 3) * self.c + monomial_symmetric((2, 1, 1), 3) * self.d)

    @classmethod
    def from_poly(cls, f: SparsePoly) -> "QuarticCoeffs":
        if f.n != 3 or not f.is_homogeneous(4):
            raise FamilyError("expected a homogeneous quartic in three variables")
        coeffs = cls.of(f.coeff((4, 0, 0)), f.coeff((3, 1, 0)), f.coeff((2, 2, 0)), f.coeff((2, 1, 1)))
        if (coeffs.to_poly() - f).is_zero() is False:
            raise FamilyError("quartic is not symmetric")
        return coeffs


class ConicKind(enum.Enum):
    PARABOLA = "Parabola"
    DOUBLE_LINE = "DoubleLine"
    HYPERBOLA = "Hyperbola"
    CROSSING_LINES = "CrossingLines"
    ELLIPSE = "Ellipse"
    POINT = "Point"


@dataclass
class ConicClass:
    """Conic ``[x, y, 1] M [x, y, 1]^T = 0`` in the (q12, q16) plane."""

    kind: ConicKind
    matrix: tuple[tuple[Fraction, ...], ...]

    def as_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.matrix])


def _det3(m) -> Fraction:
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def classify_conic(matrix) -> ConicClass:
    m = tuple(tuple(Fraction(v) for v in row) for row in matrix)
    minor = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    degenerate = _det3(m) == 0
    if minor == 0:
        kind = ConicKind.DOUBLE_LINE if degenerate else ConicKind.PARABOLA
    elif minor < 0:
        kind = ConicKind.CROSSING_LINES if degenerate else ConicKind.HYPERBOLA
    else:
        kind = ConicKind.POINT if degenerate else ConicKind.ELLIPSE
    return ConicClass(kind, m)


def quartic_conic_matrices(c: QuarticCoeffs):
    a, b, cc, d = c.as_tuple()
    m1 = ((Fraction(-4), Fraction(-2), -a + cc + d),
          (Fraction(-2), Fraction(-1), -a - b),
          (-a + cc + d, -a - b, a * cc + a * d - b * b))
    m2 = ((Fraction(2), Fraction(-1, 2), -a - cc / 2 + d / 4),
          (Fraction(-1, 2), Fraction(-1), (a + b) / 2),
          (-a - cc / 2 + d / 4, (a + b) / 2, a * cc - a * d / 2 - b * b / 4))
    return m1, m2


def quartic_blocks(c: QuarticCoeffs, q12, q16) -> tuple[np.ndarray, np.ndarray]:
    """The trivial block K1 and one copy of the standard block K2."""
    a, b, cc, d = (float(v) for v in c.as_tuple())
    k1 = np.array([[a + 2 * q12, b + q16], [b + q16, cc + d - 2 * q12 - 2 * q16]])
    k2 = np.array([[a - q12, b / 2 - q16], [b / 2 - q16, cc - d / 2 - 2 * q12 + q16]])
    return k1, k2


def quartic_gram(c: QuarticCoeffs, q12, q16) -> np.ndarray:
    k1, k2 = quartic_blocks(c, q12, q16)
    out = np.zeros((6, 6))
    out[:2, :2] = k1
    out[2:4, 2:4] = k2
    out[4:, 4:] = k2
    return out


def quartic_problem(c: QuarticCoeffs) -> SdpProblem:
    k1, k2 = quartic_blocks(c, 0.0, 0.0)
    d1 = np.array([[[2.0, 0.0], [0.0, -2.0]], [[0.0, 1.0], [1.0, -2.0]]])
    d2 = np.array([[[-1.0, 0.0], [0.0, -2.0]], [[0.0, -1.0], [-1.0, 1.0]]])
    return SdpProblem([k1, k2], [d1, d2], names=["q12", "q16"])


# univariate polynomial helpers over Fractions (ascending coefficient lists)


def _padd(p, q):
    out = [Fraction(0)] * max(len(p), len(q))
    for i, v in enumerate(p):
        out[i] += v
    for i, v in enumerate(q):
        out[i] += v
    return out


def _pmul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, u in enumerate(p):
        for j, v in enumerate(q):
            out[i + j] += u * v
    return out


def _pscale(p, s):
    return [s * v for v in p]


def _ptrim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _conic_in_y(m):
    """Write the conic as ``alpha*y^2 + beta(x)*y + gamma(x)``."""
    alpha = [m[1][1]]
    beta = [2 * m[1][2], 2 * m[0][1]]
    gamma = [m[2][2], 2 * m[0][2], m[0][0]]
    return alpha, beta, gamma


def quartic_resultant(c: QuarticCoeffs) -> list[Fraction]:
    """Resultant of det K1 and det K2 with respect to q16, as a polynomial in q12.

    Ascending coefficients, trimmed; the nominal degree 4 drops to 3 because
    both conics pass through the point at infinity [1 : -2 : 0].
    """
    (a1, b1, g1), (a2, b2, g2) = (_conic_in_y(m) for m in quartic_conic_matrices(c))
    ag = _padd(_pmul(a1, g2), _pscale(_pmul(a2, g1), -1))
    ab = _padd(_pmul(a1, b2), _pscale(_pmul(a2, b1), -1))
    bg = _padd(_pmul(b1, g2), _pscale(_pmul(b2, g1), -1))
    return _ptrim(_padd(_pmul(ag, ag), _pscale(_pmul(ab, bg), -1)))


def conic_value(m, x, y):
    h = np.array([x, y, 1.0], dtype=complex)
    return complex(h @ np.asarray(m, dtype=complex) @ h)


def _newton_polish(m1, m2, x: complex, y: complex, iters: int = 30, tol: float = 1e-13):
    a1, a2 = np.array(m1, dtype=complex), np.array(m2, dtype=complex)
    for _ in range(iters):
        h = np.array([x, y, 1.0], dtype=complex)
        r = np.array([h @ a1 @ h, h @ a2 @ h])
        if np.abs(r).max() < tol:
            break
        jac = 2 * np.array([(a1 @ h)[:2], (a2 @ h)[:2]])
        try:
            step = np.linalg.solve(jac, r)
        except np.linalg.LinAlgError:
            break
        x, y = x - step[0], y - step[1]
        if np.abs(step).max() < tol:
            break
    return x, y


@dataclass
class QuarticVertex:
    q12: complex
    q16: complex
    real: bool
    psd: bool
    min_eig: float | None
    block_ranks: tuple[int, int] | None

    @property
    def point(self) -> tuple[float, float]:
        return (self.q12.real, self.q16.real)


@dataclass
class QuarticAnalysis:
    coeffs: QuarticCoeffs
    necessary_ineqs: tuple[bool, bool, bool]
    conics: tuple[ConicClass, ConicClass]
    vertices: list[QuarticVertex]
    sos: Status
    point_at_infinity: tuple[int, int, int] = (1, -2, 0)
    ray: tuple[tuple[float, float], tuple[float, float]] | None = None
    witness: tuple[tuple[int, ...], Fraction] | None = None
    feasible_point: tuple[float, float] | None = None
    resultant: list[Fraction] = field(default_factory=list)

    @property
    def psd_vertices(self) -> list[QuarticVertex]:
        return [v for v in self.vertices if v.psd]

    @property
    def is_sos(self) -> bool:
        return self.sos.is_feasible

    def interior_point(self) -> tuple[float, float] | None:
        """Midpoint of the two PSD vertices when there are exactly two."""
        psd = self.psd_vertices
        if len(psd) != 2:
            return None
        (x1, y1), (x2, y2) = psd[0].point, psd[1].point
        return ((x1 + x2) / 2, (y1 + y2) / 2)

    def boundary_hit(self, direction) -> tuple[tuple[float, float], str] | None:
        """First boundary point along a ray from the interior point.

        Returns the point and ``"K1"`` (det K1 vanishes: parabola, rank 5) or
        ``"K2"`` (det K2 vanishes: hyperbola, rank 4).
        """
        start = self.interior_point()
        if start is None:
            return None
        m1, m2 = (np.array(m, dtype=float) for m in quartic_conic_matrices(self.coeffs))
        p = np.array([start[0], start[1], 1.0])
        v = np.array([float(direction[0]), float(direction[1]), 0.0])
        best = None
        for name, m in (("K1", m1), ("K2", m2)):
            # det along the ray is a quadratic in t
            roots = np.roots([v @ m @ v, 2 * (v @ m @ p), p @ m @ p])
            for t in roots:
                if abs(t.imag) < 1e-12 and t.real > 1e-12 and (best is None or t.real < best[0]):
                    best = (t.real, name)
        if best is None:
            return None
        t, name = best
        return ((start[0] + t * v[0], start[1] + t * v[1]), name)

    def sample_boundary(self, count: int, rng: np.random.Generator) -> list[tuple[tuple[float, float], str]]:
        out = []
        for _ in range(count):
            theta = rng.uniform(0, 2 * math.pi)
            hit = self.boundary_hit((math.cos(theta), math.sin(theta)))
            if hit is not None:
                out.append(hit)
        return out

    def boundary_witnesses(self) -> dict[str, tuple[float, float]]:
        """One boundary point on each conic, away from the vertices."""
        psd = self.psd_vertices
        if len(psd) != 2:
            return {}
        (x1, y1), (x2, y2) = psd[0].point, psd[1].point
        normal = np.array([-(y2 - y1), x2 - x1])
        out: dict[str, tuple[float, float]] = {}
        for sgn in (1, -1):
            hit = self.boundary_hit(sgn * normal)
            if hit is not None:
                out.setdefault(hit[1], hit[0])
        return out


def quartic_witness(c: QuarticCoeffs, box: int = 2, max_box: int = 6):
    """Most negative value over primitive integer points in growing boxes.

    Points are sign-normalized (first nonzero coordinate positive); ties go to
    the lexicographically smallest point.
    """
    f = c.to_poly()
    for radius in range(box, max_box + 1):
        best = None
        for point in itertools.product(range(-radius, radius + 1), repeat=3):
            nonzero = [v for v in point if v]
            if not nonzero or nonzero[0] < 0 or math.gcd(*point) != 1:
                continue
            value = evaluate(f, point)
            if value < 0 and (best is None or (value, point) < best[::-1]):
                best = (point, value)
        if best is not None:
            return best
    return None


def _vertex_record(c: QuarticCoeffs, x: complex, y: complex, psd_tol: float) -> QuarticVertex:
    real = abs(x.imag) < 1e-9 * max(1.0, abs(x)) and abs(y.imag) < 1e-9 * max(1.0, abs(y))
    if not real:
        return QuarticVertex(x, y, False, False, None, None)
    k1, k2 = quartic_blocks(c, x.real, y.real)
    eigs = np.concatenate([np.linalg.eigvalsh(k1), np.linalg.eigvalsh(k2)])
    scale = max(1.0, float(np.abs(eigs).max()))
    min_eig = float(eigs.min())
    psd = min_eig >= -psd_tol * scale
    ranks = (numerical_rank(k1, RANK_TOL, scale), numerical_rank(k2, RANK_TOL, scale))
    return QuarticVertex(complex(x.real, 0), complex(y.real, 0), True, psd, min_eig, ranks)


def quartic_vertices(c: QuarticCoeffs, psd_tol: float = PSD_TOL) -> list[QuarticVertex]:
    """Affine intersections of det K1 = 0 and det K2 = 0."""
    m1, m2 = quartic_conic_matrices(c)
    res = quartic_resultant(c)
    if all(v == 0 for v in res) or len(res) < 2:
        return []
    roots = np.roots([float(v) for v in reversed(res)])
    (a1, b1, g1), (a2, b2, g2) = _conic_in_y(m1), _conic_in_y(m2)

    def peval(p, x):
        return sum(complex(float(v)) * x ** i for i, v in enumerate(p))

    out = []
    for x in roots:
        # alpha2*p1 - alpha1*p2 is linear in y
        lin = peval(_padd(_pscale(b1, a2[0]), _pscale(b2, -a1[0])), x)
        const = peval(_padd(_pscale(g1, a2[0]), _pscale(g2, -a1[0])), x)
        if abs(lin) > 1e-14:
            y = -const / lin
        else:
            ys = np.roots([float(a1[0]), peval(b1, x), peval(g1, x)])
            y = min(ys, key=lambda t: abs(conic_value(m2, x, t)))
        x, y = _newton_polish(m1, m2, complex(x), complex(y))
        out.append(_vertex_record(c, x, y, psd_tol))
    out.sort(key=lambda v: (not v.real, v.q12.real, v.q16.real))
    return out


def quartic_feasibility(c: QuarticCoeffs, opts: SdpOptions | None = None):
    scale = max(abs(float(v)) for v in c.as_tuple()) or 1.0
    scaled = QuarticCoeffs(*(v / Fraction(scale) for v in c.as_tuple()))
    sol = solve(quartic_problem(scaled), opts)
    point = tuple(float(p) * scale for p in sol.params) if sol.params is not None else None
    return sol.status, point


def quartic_analyze(c: QuarticCoeffs, opts: SdpOptions | None = None, psd_tol: float = PSD_TOL) -> QuarticAnalysis:
    a, b, cc, d = c.as_tuple()
    ineqs = (a >= 0, a + cc >= 0, a + 2 * b + cc + d >= 0)
    m1, m2 = quartic_conic_matrices(c)
    conics = (classify_conic(m1), classify_conic(m2))
    if all(v == 0 for v in c.as_tuple()):
        return QuarticAnalysis(c, ineqs, conics, [], Status.FEASIBLE, feasible_point=(0.0, 0.0))
    status, point = quartic_feasibility(c, opts)
    ray = None
    vertices: list[QuarticVertex] = []
    if conics[0].kind is ConicKind.DOUBLE_LINE:
        # K1 is PSD only on the ray q16 = -(a+b) - 2 q12, q12 >= -a/2
        ray = ((float(-a / 2), float(-b)), (1.0, -2.0))
    else:
        vertices = quartic_vertices(c, psd_tol)
    witness = None
    if not status.is_feasible:
        witness = quartic_witness(c)
    return QuarticAnalysis(c, ineqs, conics, vertices, status, ray=ray, witness=witness,
                           feasible_point=point, resultant=quartic_resultant(c))


def quartic_boundary_rank(c: QuarticCoeffs, point, tol: float = RANK_TOL) -> int:
    gram = quartic_gram(c, float(point[0]), float(point[1]))
    eigs = np.linalg.eigvalsh(gram)
    scale = max(1.0, float(np.abs(eigs).max()))
    if eigs[0] < -max(tol, PSD_TOL) * scale:
        raise InfeasiblePointError(f"point {tuple(point)} is not PSD (min eigenvalue {eigs[0]:.3g})")
    return numerical_rank(gram, tol, scale)


# ----------------------------------------------------------- ternary sextics

SEXTIC_TYPES: tuple[tuple[int, ...], ...] = ((6,), (5, 1), (4, 2), (4, 1, 1), (3, 3), (3, 2, 1), (2, 2, 2))

# Gram basis order used by the closed-form sextic blocks
SEXTIC_BASIS: tuple[tuple[int, int, int], ...] = (
    (3, 0, 0), (0, 3, 0), (0, 0, 3),
    (2, 1, 0), (2, 0, 1), (1, 2, 0), (1, 0, 2), (0, 2, 1), (0, 1, 2),
    (1, 1, 1),
)

SEXTIC_FREE = ("q12", "q16", "q18", "q110", "q49", "q410")


@dataclass(frozen=True)
class SexticCoeffs:
    """``sum_k a_k m_{lambda_k}`` with lambda running over SEXTIC_TYPES."""

    a1: Fraction
    a2: Fraction
    a3: Fraction
    a4: Fraction
    a5: Fraction
    a6: Fraction
    a7: Fraction

    @classmethod
    def of(cls, *values) -> "SexticCoeffs":
        if len(values) == 1 and not isinstance(values[0], (int, float, Fraction, str)):
            values = tuple(values[0])
        if len(values) != 7:
            raise FamilyError("a ternary symmetric sextic has seven coefficients")
        return cls(*(to_fraction(v) for v in values))

    def as_tuple(self) -> tuple[Fraction, ...]:
        return (self.a1, self.a2, self.a3, self.a4, self.a5, self.a6, self.a7)

    def to_poly(self) -> SparsePoly:
        total = SparsePoly.zero(3)
        for coef, lam in zip(self.as_tuple(), SEXTIC_TYPES):
            total = total + monomial_symmetric(lam, 3) * coef
        return total

    @classmethod
    def from_poly(cls, f: SparsePoly) -> "SexticCoeffs":
        if f.n != 3 or not f.is_homogeneous(6):
            raise FamilyError("expected a homogeneous sextic in three variables")
        reps = [tuple(list(lam) + [0] * (3 - len(lam))) for lam in SEXTIC_TYPES]
        coeffs = cls.of(*(f.coeff(r) for r in reps))
        if not (coeffs.to_poly() - f).is_zero():
            raise FamilyError("sextic is not symmetric")
        return coeffs


def _sym(upper: list[list[float]]) -> np.ndarray:
    m = np.array(upper, dtype=float)
    return np.triu(m) + np.triu(m, 1).T


def sextic_blocks(c: SexticCoeffs, free: Sequence[float]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Trivial, standard (one copy) and sign blocks at the free parameters.

    ``free`` is ``(q12, q16, q18, q110, q49, q410)``, Gram entries with respect
    to SEXTIC_BASIS (1-based indices).
    """
    a1, a2, a3, a4, a5, a6, a7 = (float(v) for v in c.as_tuple())
    if len(free) != 6:
        raise FamilyError("sextic blocks take six free parameters")
    q12, q16, q18, q110, q49, q410 = (float(v) for v in free)
    alpha = a3 + a4 / 2 + a5 / 2 + a6 - q12 - 2 * q16 - 2 * q18 - q110 + q49 - 2 * q410
    beta1 = a3 + a4 / 2 - a5 / 4 - a6 / 2 + q12 / 2 - 2 * q16 + q18 - q110 - q49 / 2 + q410
    beta2 = a3 - a4 / 2 + a5 / 4 - a6 / 2 - q12 / 2 - 2 * q16 + q18 + q110 + q49 / 2 + q410
    trivial = _sym([
        [a1 + 2 * q12, SQRT2 * (a2 / 2 + q16 + q18), SQRT3 * q110],
        [0, alpha, SQRT6 * q410],
        [0, 0, a7 - 6 * q49],
    ])
    standard = _sym([
        [a1 - q12, SQRT2 / 2 * (a2 - q16 - q18), SQRT6 / 2 * (q16 - q18)],
        [0, beta1, SQRT3 / 2 * (a5 / 2 - q12 - q49)],
        [0, 0, beta2],
    ])
    sign = np.array([[a3 - a4 / 2 - a5 / 2 + a6 + q12 - 2 * q16 - 2 * q18 + q110 - q49 - 2 * q410]])
    return trivial, standard, sign


def sextic_gram(c: SexticCoeffs, free: Sequence[float]) -> np.ndarray:
    """Block diagonal 10x10 adapted Gram matrix with both standard copies."""
    trivial, standard, sign = sextic_blocks(c, free)
    out = np.zeros((10, 10))
    out[:3, :3] = trivial
    out[3:6, 3:6] = standard
    out[6:9, 6:9] = standard
    out[9:, 9:] = sign
    return out


def sextic_free_params(gram: np.ndarray, basis: Sequence[Sequence[int]]) -> tuple[float, ...]:
    """Read the six free parameters off a full Gram matrix in any monomial order."""
    index = {tuple(e): i for i, e in enumerate(basis)}
    pos = [index[e] for e in SEXTIC_BASIS]
    g = np.asarray(gram, dtype=float)

    def q(i, j):
        return float(g[pos[i - 1], pos[j - 1]])

    return (q(1, 2), q(1, 6), q(1, 8), q(1, 10), q(4, 9), q(4, 10))


def sextic_problem(c: SexticCoeffs) -> SdpProblem:
    base = sextic_blocks(c, [0.0] * 6)
    coefficients = [np.zeros((6,) + b.shape) for b in base]
    for k in range(6):
        unit = [0.0] * 6
        unit[k] = 1.0
        for i, block in enumerate(sextic_blocks(c, unit)):
            coefficients[i][k] = block - base[i]
    return SdpProblem(list(base), coefficients, names=list(SEXTIC_FREE))


def sextic_rank3_obstructions(c: SexticCoeffs) -> dict[str, Fraction]:
    """Exact residuals of the two polynomial relations forced by rank-3 points."""
    a1, a2, a3, a4, a5, a6, a7 = c.as_tuple()
    h = Fraction(1, 2)
    q = Fraction(1, 4)
    case_a = a5 - 2 * a1 - 2 * a3 + 2 * a2
    case_b = (
        -10 * a1 * a2**2 - 5 * q * a2**3 + 10 * a1 * a2 * a3 - 5 * h * a2**2 * a3 - 4 * a1 * a3**2
        + 5 * h * a2**2 * a4 - 3 * a2 * a3 * a4 + 3 * q * a2 * a4**2 - h * a3 * a4**2
        + 12 * a1 * a2 * a5 + q * a2**2 * a5 - 6 * a1 * a3 * a5 + 3 * a2 * a3 * a5
        - 2 * a2 * a4 * a5 + a3 * a4 * a5 - q * a4**2 * a5 - 3 * a1 * a5**2
        + 5 * q * a2 * a5**2 - h * a3 * a5**2 + h * a4 * a5**2 - q * a5**3
        - 2 * a1 * a2 * a6 + a2**2 * a6 + 4 * a1 * a3 * a6 + a2 * a4 * a6 - a2 * a5 * a6
        - a1 * a6**2 - 3 * a1 * a2 * a7 - a2**2 * a7 + 2 * a1 * a3 * a7 + a1 * a5 * a7
    )
    return {"case_a": case_a, "case_b": case_b}


# -------------------------------------------------------- random instances


def symmetrize(f: SparsePoly) -> SparsePoly:
    """Sum of f over all permutations of the variables."""
    total = SparsePoly.zero(f.n)
    for perm in itertools.permutations(range(f.n)):
        total = total + permute_variables(f, perm)
    return total


def random_symmetric_sos(n: int, half_degree: int, rng: np.random.Generator,
                         squares: int = 2, magnitude: int = 5) -> SparsePoly:
    """Symmetrized sum of squares of random integer forms of degree ``half_degree``."""
    from .polycore import monomials

    basis = monomials(n, half_degree)
    total = SparsePoly.zero(n)
    for _ in range(squares):
        coefs = rng.integers(-magnitude, magnitude + 1, size=len(basis))
        g = SparsePoly(n, {e: Fraction(int(v)) for e, v in zip(basis, coefs)})
        total = total + g * g
    return symmetrize(total)


def random_rational(rng: np.random.Generator, size: int, magnitude: int = 10, denominator: int = 12):
    return [Fraction(int(rng.integers(-magnitude * denominator, magnitude * denominator + 1)),
                     int(rng.integers(1, denominator + 1))) for _ in range(size)]


# ------------------------------------------------------------ serialization


def _complex_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def quartic_analysis_to_dict(result: QuarticAnalysis) -> dict:
    return {
        "format": "symgram-quartic",
        "version": 1,
        "coeffs": [str(v) for v in result.coeffs.as_tuple()],
        "necessary_ineqs": list(result.necessary_ineqs),
        "conics": [{"kind": k.kind.value, "matrix": [[str(v) for v in row] for row in k.matrix]}
                   for k in result.conics],
        "vertices": [{"q12": _complex_pair(v.q12), "q16": _complex_pair(v.q16), "real": v.real, "psd": v.psd,
                      "min_eig": v.min_eig, "block_ranks": list(v.block_ranks) if v.block_ranks else None}
                     for v in result.vertices],
        "sos": result.sos.value,
        "point_at_infinity": list(result.point_at_infinity),
        "ray": [list(result.ray[0]), list(result.ray[1])] if result.ray else None,
        "witness": ({"point": list(result.witness[0]), "value": str(result.witness[1])}
                    if result.witness else None),
        "feasible_point": list(result.feasible_point) if result.feasible_point else None,
        "resultant": [str(v) for v in result.resultant],
    }


def quartic_analysis_from_dict(data: dict) -> QuarticAnalysis:
    if data.get("format") != "symgram-quartic":
        raise ValueError("not a quartic analysis")
    coeffs = QuarticCoeffs.of(*data["coeffs"])
    conics = tuple(ConicClass(ConicKind(k["kind"]), tuple(tuple(Fraction(v) for v in row) for row in k["matrix"]))
                   for k in data["conics"])
    vertices = [QuarticVertex(complex(*v["q12"]), complex(*v["q16"]), v["real"], v["psd"], v["min_eig"],
                              tuple(v["block_ranks"]) if v["block_ranks"] else None) for v in data["vertices"]]
    witness = data.get("witness")
    return QuarticAnalysis(
        coeffs, tuple(data["necessary_ineqs"]), conics, vertices, Status(data["sos"]),
        tuple(data["point_at_infinity"]),
        (tuple(data["ray"][0]), tuple(data["ray"][1])) if data.get("ray") else None,
        (tuple(witness["point"]), Fraction(witness["value"])) if witness else None,
        tuple(data["feasible_point"]) if data.get("feasible_point") else None,
        [Fraction(v) for v in data.get("resultant", [])],
    )


def quadratic_analysis_to_dict(result: QuadraticAnalysis) -> dict:
    data = {"format": "symgram-quadratic", "version": 1}
    data.update({k: getattr(result, k) for k in result.__dataclass_fields__})
    data["eigenvalues"] = list(result.eigenvalues)
    return data


def quadratic_analysis_from_dict(data: dict) -> QuadraticAnalysis:
    if data.get("format") != "symgram-quadratic":
        raise ValueError("not a quadratic analysis")
    fields = {k: data[k] for k in QuadraticAnalysis.__dataclass_fields__}
    fields["eigenvalues"] = tuple(fields["eigenvalues"])
    return QuadraticAnalysis(**fields)


def solve_sextic(c: SexticCoeffs, opts: SdpOptions | None = None):
    """Feasibility of the closed-form sextic blocks; params are the six free entries."""
    scale = max(abs(float(v)) for v in c.as_tuple()) or 1.0
    scaled = SexticCoeffs(*(v / Fraction(scale) for v in c.as_tuple()))
    sol = solve(sextic_problem(scaled), opts)
    if sol.params is not None:
        sol.params = np.asarray(sol.params) * scale
    return sol
