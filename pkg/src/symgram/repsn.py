"""Representations of S_n and of finite matrix groups on polynomial spaces.

Permutations are 0-based tuples ``perm`` with ``perm[i]`` the image of ``i``;
composition ``compose(s, t)`` applies ``t`` first.  The permutation matrix of
``perm`` sends ``e_i`` to ``e_perm[i]`` so that matrix products follow
composition.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable, Hashable, Sequence

import numpy as np

from .polycore import Exponent, SparsePoly, apply_linear_substitution, monomials, to_fraction
from .symfunc import Partition, as_partition, n_statistic, partitions_of

Permutation = tuple[int, ...]


# ---------------------------------------------------------------------------
# permutations

def identity_perm(n: int) -> Permutation:
    return tuple(range(n))


def compose(s: Sequence[int], t: Sequence[int]) -> Permutation:
    """The permutation ``s o t`` (apply ``t`` first)."""
    return tuple(s[i] for i in t)


def inverse(perm: Sequence[int]) -> Permutation:
    out = [0] * len(perm)
    for i, p in enumerate(perm):
        out[p] = i
    return tuple(out)


def cycle_type(perm: Sequence[int]) -> Partition:
    seen = [False] * len(perm)
    lengths = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = perm[i]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths, reverse=True))


def permutation_matrix(perm: Sequence[int]) -> np.ndarray:
    n = len(perm)
    out = np.zeros((n, n))
    for i, p in enumerate(perm):
        out[p, i] = 1.0
    return out


def adjacent_transposition(n: int, k: int) -> Permutation:
    """Swap of positions ``k`` and ``k+1`` (0-based)."""
    perm = list(range(n))
    perm[k], perm[k + 1] = perm[k + 1], perm[k]
    return tuple(perm)


# ---------------------------------------------------------------------------
# hook lengths and multiplicities

@dataclass(frozen=True)
class HookData:
    partition: Partition
    hooks: tuple[int, ...]
    n_stat: int


def hook_data(parts: Sequence[int]) -> HookData:
    parts = as_partition(parts)
    conj = [sum(1 for p in parts if p > j) for j in range(parts[0])] if parts else []
    hooks = tuple(
        (parts[i] - j - 1) + (conj[j] - i - 1) + 1
        for i in range(len(parts))
        for j in range(parts[i])
    )
    return HookData(parts, hooks, n_statistic(parts))


def _count_solutions(weights: Sequence[int], target: int) -> int:
    """Number of y in N^k with sum(w_i y_i) == target (coin-change count)."""
    if target < 0:
        return 0
    ways = [1] + [0] * target
    for w in weights:
        for total in range(w, target + 1):
            ways[total] += ways[total - w]
    return ways[target]


def multiplicity(parts: Sequence[int], d: int) -> int:
    """Multiplicity of the S_n irreducible ``parts`` in degree-d polynomials.

    Counts nonnegative integer solutions of ``h_1 y_1 + ... + h_n y_n = d - n(lambda)``.
    """
    data = hook_data(parts)
    return _count_solutions(data.hooks, d - data.n_stat)


@lru_cache(maxsize=None)
def _mn_character(beta: tuple[int, ...], cycles: tuple[int, ...]) -> int:
    """Murnaghan-Nakayama recursion on a beta-set (abacus) encoding."""
    if not cycles:
        return 1
    r, rest = cycles[0], cycles[1:]
    beads = set(beta)
    total = 0
    for b in beta:
        target = b - r
        if target < 0 or target in beads:
            continue
        height = sum(1 for c in beta if target < c < b)
        moved = tuple(sorted((beads - {b}) | {target}, reverse=True))
        total += (-1) ** height * _mn_character(moved, rest)
    return total


def sn_character(parts: Sequence[int], cycles: Sequence[int]) -> int:
    """chi_lambda evaluated on the class with the given cycle type."""
    parts = as_partition(parts)
    if sum(parts) != sum(cycles):
        raise ValueError("partition and cycle type have different weights")
    length = len(parts)
    beta = tuple(parts[i] + (length - 1 - i) for i in range(length))
    return _mn_character(beta, tuple(sorted(cycles, reverse=True)))


@lru_cache(maxsize=None)
def _fixed_monomial_count(perm: Permutation, d: int) -> int:
    return sum(1 for e in monomials(len(perm), d) if all(e[perm[i]] == e[i] for i in range(len(perm))))


def multiplicity_oracle(parts: Sequence[int], d: int) -> int:
    """<chi_lambda, chi_d> by enumerating all of S_n (independent of the hook rule)."""
    parts = as_partition(parts)
    n = sum(parts)
    if n > 8:
        raise ValueError("the character oracle enumerates n! permutations; n must be <= 8")
    total = 0
    for perm in itertools.permutations(range(n)):
        fixed = _fixed_monomial_count(perm, d)
        if fixed:
            total += sn_character(parts, cycle_type(perm)) * fixed
    value = Fraction(total, math.factorial(n))
    if value.denominator != 1:
        raise ArithmeticError(f"non-integral inner product {value}")
    return int(value)


_Q_CONST = {0: Fraction(1), 1: Fraction(5, 12), 2: Fraction(2, 3),
            3: Fraction(3, 4), 4: Fraction(2, 3), 5: Fraction(5, 12)}
_P_CONST = {0: Fraction(1), 1: Fraction(1), 2: Fraction(2, 3)}


def quasi_poly_q(d: int) -> Fraction:
    return Fraction(d * d, 12) + Fraction(d, 2) + _Q_CONST[d % 6]


def quasi_poly_p(d: int) -> Fraction:
    return Fraction(d * d, 6) + Fraction(5 * d, 6) + _P_CONST[d % 3]


def quasi_poly_check(d: int) -> tuple[Fraction, Fraction]:
    """The ternary quasi-polynomials (Q(d), P(d)) counting S_3 multiplicities."""
    if d < 0:
        raise ValueError("d must be nonnegative")
    return quasi_poly_q(d), quasi_poly_p(d)


# ---------------------------------------------------------------------------
# Young's orthogonal form

def standard_tableaux(parts: Sequence[int]) -> list[tuple[tuple[int, ...], ...]]:
    """Standard Young tableaux (entries 1..n), sorted by their row words."""
    parts = as_partition(parts)
    n = sum(parts)
    out = []

    def fill(rows: list[list[int]], k: int):
        if k > n:
            out.append(tuple(tuple(r) for r in rows))
            return
        for i, length in enumerate(parts):
            if len(rows[i]) < length and (i == 0 or len(rows[i - 1]) > len(rows[i])):
                rows[i].append(k)
                fill(rows, k + 1)
                rows[i].pop()

    fill([[] for _ in parts], 1)
    return sorted(out)


@dataclass
class IrrepData:
    """Real orthogonal irreducible representation, keyed by group element."""

    label: Hashable
    dim: int
    matrices: dict = field(repr=False)

    def character(self, key) -> float:
        return float(np.trace(self.matrices[key]))


def _young_generator(tableaux, k: int) -> np.ndarray:
    """Matrix of the transposition (k, k+1), 1-based letters."""
    index = {t: i for i, t in enumerate(tableaux)}
    dim = len(tableaux)
    out = np.zeros((dim, dim))
    for t, i in index.items():
        pos = {v: (r, c) for r, row in enumerate(t) for c, v in enumerate(row)}
        (r1, c1), (r2, c2) = pos[k], pos[k + 1]
        axial = (c2 - r2) - (c1 - r1)
        out[i, i] = 1.0 / axial
        if r1 != r2 and c1 != c2:
            swapped = tuple(
                tuple(k + 1 if v == k else k if v == k + 1 else v for v in row) for row in t
            )
            out[index[swapped], i] = math.sqrt(1.0 - 1.0 / axial**2)
    return out


def young_orthogonal_irrep(parts: Sequence[int]) -> IrrepData:
    """Young's orthogonal form of the S_n irreducible labelled by ``parts``."""
    parts = as_partition(parts)
    n = sum(parts)
    if n > 8:
        raise ValueError("Young's orthogonal form is enumerated only for n <= 8")
    tableaux = standard_tableaux(parts)
    gens = [(adjacent_transposition(n, k), _young_generator(tableaux, k + 1)) for k in range(n - 1)]
    matrices = {identity_perm(n): np.eye(len(tableaux))}
    queue = deque([identity_perm(n)])
    while queue:
        perm = queue.popleft()
        for s, mat in gens:
            nxt = compose(s, perm)
            if nxt not in matrices:
                matrices[nxt] = mat @ matrices[perm]
                queue.append(nxt)
    return IrrepData(parts, len(tableaux), matrices)


# ---------------------------------------------------------------------------
# induced actions

def _linear_power_table(g: np.ndarray, degree: int) -> dict:
    """Coefficient dicts of (g x)_i ** e for all i and e <= degree."""
    n = g.shape[0]
    table = {}
    for i in range(n):
        form = {tuple(int(j == k) for k in range(n)): g[i, j] for j in range(n) if g[i, j] != 0}
        current = {(0,) * n: 1.0}
        table[(i, 0)] = current
        for e in range(1, degree + 1):
            nxt: dict = {}
            for e1, c1 in current.items():
                for e2, c2 in form.items():
                    key = tuple(a + b for a, b in zip(e1, e2))
                    nxt[key] = nxt.get(key, 0.0) + c1 * c2
            current = nxt
            table[(i, e)] = current
    return table


def induced_action(g, n: int, d: int, basis: Sequence[Exponent] | None = None) -> np.ndarray:
    """Matrix whose column j expands ``basis_j(g x)`` in ``basis``.

    ``g`` is an n x n matrix or a permutation tuple (read as its permutation matrix).
    """
    basis = list(basis) if basis is not None else monomials(n, d)
    index = {e: i for i, e in enumerate(basis)}
    size = len(basis)
    if isinstance(g, tuple) and all(isinstance(v, int) for v in g):
        inv = inverse(g)
        out = np.zeros((size, size))
        for j, alpha in enumerate(basis):
            beta = [0] * n
            for i, a in enumerate(alpha):
                beta[inv[i]] = a
            out[index[tuple(beta)], j] = 1.0
        return out
    mat = np.asarray(g, dtype=float)
    if mat.shape != (n, n):
        raise ValueError(f"group element must be {n}x{n}")
    table = _linear_power_table(mat, d)
    out = np.zeros((size, size))
    for j, alpha in enumerate(basis):
        poly = {(0,) * n: 1.0}
        for i, a in enumerate(alpha):
            if a == 0:
                continue
            factor = table[(i, a)]
            nxt: dict = {}
            for e1, c1 in poly.items():
                for e2, c2 in factor.items():
                    key = tuple(x + y for x, y in zip(e1, e2))
                    nxt[key] = nxt.get(key, 0.0) + c1 * c2
            poly = nxt
        for exp, c in poly.items():
            if exp not in index:
                raise ValueError("basis is not closed under the action")
            out[index[exp], j] = c
    return out


# ---------------------------------------------------------------------------
# finite matrix groups

def _matrix_key(mat: np.ndarray, decimals: int = 7) -> tuple:
    return tuple((np.round(mat, decimals) + 0.0).ravel())


def closure_with_words(generators: Sequence, tol: float = 1e-9, cap: int = 100_000):
    """Group closure returning elements and, per element, (parent, generator) links."""
    gens = [np.asarray(g, dtype=float) for g in generators]
    if not gens:
        raise ValueError("need at least one generator")
    n = gens[0].shape[0]
    identity = np.eye(n)
    elements = [identity]
    links: list[tuple[int, int] | None] = [None]
    seen = {_matrix_key(identity): 0}
    queue = deque([0])
    while queue:
        idx = queue.popleft()
        for gi, g in enumerate(gens):
            prod = g @ elements[idx]
            key = _matrix_key(prod)
            hit = seen.get(key)
            if hit is not None:
                if np.max(np.abs(elements[hit] - prod)) > max(tol, 1e-6):
                    raise ArithmeticError("inconsistent element deduplication")
                continue
            if len(elements) >= cap:
                raise OverflowError(f"group closure exceeded {cap} elements")
            seen[key] = len(elements)
            elements.append(prod)
            links.append((idx, gi))
            queue.append(len(elements) - 1)
    return elements, links


def group_closure(generators: Sequence, tol: float = 1e-9, cap: int = 100_000) -> list[np.ndarray]:
    """All elements of the finite matrix group generated by ``generators``."""
    return closure_with_words(generators, tol, cap)[0]


def frobenius_schur(character: Callable, elements: Sequence, multiply: Callable | None = None):
    """(1/|G|) sum_g chi(g^2); exact when the character values are integers."""
    if multiply is None:
        first = elements[0]
        if isinstance(first, tuple):
            multiply = compose
        else:
            multiply = lambda a, b: np.asarray(a) @ np.asarray(b)  # noqa: E731
    values = [character(multiply(g, g)) for g in elements]
    if all(abs(v - round(v)) < 1e-9 for v in values):
        return Fraction(sum(int(round(v)) for v in values), len(elements))
    return sum(values) / len(elements)


# ---------------------------------------------------------------------------
# group representations on polynomial spaces

@dataclass
class GroupRep:
    """A finite group acting on degree-d forms in n variables by substitution.

    ``matrices[k]`` is D(g) for the k-th element: a homomorphism, acting on
    coefficient vectors over ``basis`` by ``p(x) -> p(g^{-1} x)``.
    """

    name: str
    n: int
    degree: int
    keys: list
    variable_matrices: list[np.ndarray] = field(repr=False)
    matrices: list[np.ndarray] = field(repr=False)
    basis: list[Exponent] = field(repr=False)
    generator_indices: list[int] = field(default_factory=list)
    irreps: list[IrrepData] = field(default_factory=list, repr=False)
    multiplicities: list[int] = field(default_factory=list)
    is_permutation: bool = False
    permutations: list[Permutation] | None = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return len(self.keys)

    @property
    def size(self) -> int:
        return len(self.basis)

    def generators(self) -> list[np.ndarray]:
        return [self.variable_matrices[i] for i in self.generator_indices]

    def descriptor(self) -> dict:
        if self.name.startswith("S") and self.permutations is not None:
            return {"name": self.name}
        return {
            "name": self.name,
            "generators": [self.variable_matrices[i].tolist() for i in self.generator_indices],
        }


@lru_cache(maxsize=None)
def symmetric_group_rep(n: int, d: int) -> GroupRep:
    """S_n permuting variables, acting on degree-d monomials (graded lex order)."""
    basis = monomials(n, d)
    perms = sorted(itertools.permutations(range(n)))
    perms.remove(identity_perm(n))
    perms.insert(0, identity_perm(n))
    index = {e: i for i, e in enumerate(basis)}
    matrices = []
    for perm in perms:
        mat = np.zeros((len(basis), len(basis)))
        for j, alpha in enumerate(basis):
            beta = [0] * n
            for i, a in enumerate(alpha):
                beta[perm[i]] = a
            mat[index[tuple(beta)], j] = 1.0
        matrices.append(mat)
    labels = partitions_of(n)
    irreps = [young_orthogonal_irrep(lam) for lam in labels]
    gens = [adjacent_transposition(n, k) for k in range(n - 1)] if n > 1 else []
    if n > 2:
        gens = [adjacent_transposition(n, 0), tuple(list(range(1, n)) + [0])]
    pos = {p: i for i, p in enumerate(perms)}
    return GroupRep(
        name=f"S{n}",
        n=n,
        degree=d,
        keys=perms,
        variable_matrices=[permutation_matrix(p) for p in perms],
        matrices=matrices,
        basis=basis,
        generator_indices=[pos[g] for g in gens],
        irreps=irreps,
        multiplicities=[multiplicity(lam, d) for lam in labels],
        is_permutation=True,
        permutations=perms,
    )


def matrix_group_rep(
    generators: Sequence,
    d: int,
    name: str = "G",
    irrep_generators: Sequence[tuple[Hashable, Sequence]] | None = None,
    tol: float = 1e-9,
) -> GroupRep:
    """Finite matrix group from generators, acting on degree-d forms.

    ``irrep_generators`` optionally lists ``(label, [image of each generator])``
    so isotypic projections can use real orthogonal irreducible matrices;
    without it the isotypic decomposition is computed numerically.
    """
    elements, links = closure_with_words(generators, tol)
    n = elements[0].shape[0]
    basis = monomials(n, d)
    matrices = [induced_action(np.linalg.inv(g), n, d, basis) for g in elements]
    irreps = []
    for label, images in irrep_generators or []:
        images = [np.atleast_2d(np.asarray(m, dtype=float)) for m in images]
        dim = images[0].shape[0]
        mats = {0: np.eye(dim)}
        for idx in range(1, len(elements)):
            parent, gi = links[idx]
            mats[idx] = images[gi] @ mats[parent]
        irreps.append(IrrepData(label, dim, mats))
    gen_idx = []
    for g in generators:
        key = _matrix_key(np.asarray(g, dtype=float))
        gen_idx.append(next(i for i, e in enumerate(elements) if _matrix_key(e) == key))
    is_perm = all(
        np.all((np.abs(m) < 1e-12) | (np.abs(m - 1) < 1e-12)) and np.allclose(m.sum(axis=0), 1)
        for m in matrices
    )
    return GroupRep(
        name=name,
        n=n,
        degree=d,
        keys=list(range(len(elements))),
        variable_matrices=elements,
        matrices=matrices,
        basis=basis,
        generator_indices=gen_idx,
        irreps=irreps,
        multiplicities=[],
        is_permutation=is_perm,
    )


def parse_matrix(rows) -> np.ndarray:
    """Rows of numbers, ``p/q`` strings or decimal strings."""
    return np.array([[float(to_fraction(v)) if isinstance(v, str) else float(v) for v in row] for row in rows])


def load_group_json(path: str | Path, d: int) -> GroupRep:
    """Load ``{"name", "generators": [...], "irreps": [{"label", "generators"}]}``."""
    data = json.loads(Path(path).read_text())
    gens = [parse_matrix(g) for g in data["generators"]]
    irreps = [(ir["label"], [parse_matrix(m) for m in ir["generators"]]) for ir in data.get("irreps", [])]
    return matrix_group_rep(gens, d, name=data.get("name", "G"), irrep_generators=irreps or None)


def icosahedral_generators() -> list[np.ndarray]:
    """Four generators of the full icosahedral group I_h (order 120)."""
    r5 = math.sqrt(5.0)
    rotation = np.array([
        [0.5, -(r5 + 1) / 4, 1 / (r5 + 1)],
        [(r5 + 1) / 4, 1 / (r5 + 1), -0.5],
        [1 / (r5 + 1), 0.5, (r5 + 1) / 4],
    ])
    return [
        np.diag([-1.0, -1.0, 1.0]),
        np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]),
        rotation,
        -np.eye(3),
    ]


def resolve_group(group, n: int, d: int) -> GroupRep:
    """Accept a GroupRep, ``"S<n>"``/``"sn"``, a JSON path or a descriptor dict."""
    if isinstance(group, GroupRep):
        if group.n != n or group.degree != d:
            raise ValueError("group representation does not match the polynomial")
        return group
    if isinstance(group, dict):
        if "generators" in group:
            gens = [parse_matrix(g) for g in group["generators"]]
            return matrix_group_rep(gens, d, name=group.get("name", "G"))
        group = group["name"]
    text = str(group).strip()
    low = text.lower()
    if low in ("sn", "symmetric") or (low.startswith("s") and low[1:].isdigit()):
        if low[1:].isdigit() and int(low[1:]) != n:
            raise ValueError(f"group {text} does not act on {n} variables")
        return symmetric_group_rep(n, d)
    if low in ("ih", "icosahedral"):
        return matrix_group_rep(icosahedral_generators(), d, name="Ih")
    return load_group_json(text, d)


def polynomial_is_invariant(f: SparsePoly, rep: GroupRep, tol: float = 1e-9) -> float:
    """Largest coefficient change of ``f`` under the group generators."""
    worst = 0.0
    for g in rep.generators():
        if rep.permutations is not None:
            mat = [[int(round(v)) for v in row] for row in g]
        else:
            mat = g.tolist()
        image = apply_linear_substitution(f, mat)
        worst = max(worst, image.max_abs_difference(f))
    return worst
