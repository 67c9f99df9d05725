"""Partitions, dominance order and the classical symmetric polynomial bases."""

from __future__ import annotations

import enum
import itertools
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .polycore import SparsePoly, evaluate, monomials

Partition = tuple[int, ...]


def as_partition(parts: Iterable[int]) -> Partition:
    """Validate and normalize to a weakly decreasing tuple of positive ints."""
    parts = tuple(int(p) for p in parts)
    if any(p <= 0 for p in parts):
        raise ValueError(f"partition parts must be positive: {parts}")
    if any(a < b for a, b in zip(parts, parts[1:])):
        raise ValueError(f"partition parts must be weakly decreasing: {parts}")
    return parts


def parse_partition(text: str) -> Partition:
    """``"5,2,1"`` -> ``(5, 2, 1)``; the empty string is the empty partition."""
    text = text.strip().strip("()")
    if not text:
        return ()
    return as_partition(int(p) for p in text.split(","))


def format_partition(parts: Sequence[int]) -> str:
    return ",".join(str(p) for p in parts)


def weight(parts: Sequence[int]) -> int:
    return sum(parts)


def conjugate(parts: Sequence[int]) -> Partition:
    if not parts:
        return ()
    return tuple(sum(1 for p in parts if p > i) for i in range(parts[0]))


def n_statistic(parts: Sequence[int]) -> int:
    """sum_i (i-1) * lambda_i."""
    return sum(i * p for i, p in enumerate(parts))


class Dominance(enum.Enum):
    LESS = "Less"
    GREATER = "Greater"
    EQUAL = "Equal"
    INCOMPARABLE = "Incomparable"


def dominance(lam: Sequence[int], mu: Sequence[int]) -> Dominance:
    """Where ``lam`` sits relative to ``mu`` in dominance order.

    ``LESS`` means ``mu`` dominates ``lam``, e.g. (1,1,1) is LESS than (2,1).
    """
    if sum(lam) != sum(mu):
        raise ValueError(f"partitions of different weights: {lam} vs {mu}")
    length = max(len(lam), len(mu))
    a = list(itertools.accumulate(list(lam) + [0] * (length - len(lam))))
    b = list(itertools.accumulate(list(mu) + [0] * (length - len(mu))))
    le = all(x <= y for x, y in zip(a, b))
    ge = all(x >= y for x, y in zip(a, b))
    if le and ge:
        return Dominance.EQUAL
    if le:
        return Dominance.LESS
    if ge:
        return Dominance.GREATER
    return Dominance.INCOMPARABLE


def partitions_of(total: int, max_parts: int | None = None) -> list[Partition]:
    """All partitions of ``total`` in reverse lexicographic order."""
    if total < 0:
        raise ValueError("cannot partition a negative number")
    limit = total if max_parts is None else max_parts

    def gen(remaining: int, largest: int, slots: int):
        if remaining == 0:
            yield ()
            return
        if slots == 0:
            return
        for first in range(min(remaining, largest), 0, -1):
            for rest in gen(remaining - first, first, slots - 1):
                yield (first,) + rest

    return list(gen(total, total, limit))


# ---------------------------------------------------------------------------
# generators

def _one(n: int) -> SparsePoly:
    return SparsePoly.constant(n, Fraction(1))


@lru_cache(maxsize=None)
def monomial_symmetric(parts: Partition, n: int) -> SparsePoly:
    if len(parts) > n:
        return SparsePoly.zero(n)
    lead = tuple(parts) + (0,) * (n - len(parts))
    return SparsePoly(n, {p: Fraction(1) for p in set(itertools.permutations(lead))})


@lru_cache(maxsize=None)
def elementary(k: int, n: int) -> SparsePoly:
    if k == 0:
        return _one(n)
    terms = {}
    for subset in itertools.combinations(range(n), k):
        exp = [0] * n
        for i in subset:
            exp[i] = 1
        terms[tuple(exp)] = Fraction(1)
    return SparsePoly(n, terms)


@lru_cache(maxsize=None)
def power_sum(k: int, n: int) -> SparsePoly:
    if k == 0:
        return SparsePoly.constant(n, Fraction(n))
    terms = {}
    for i in range(n):
        exp = [0] * n
        exp[i] = k
        terms[tuple(exp)] = Fraction(1)
    return SparsePoly(n, terms)


@lru_cache(maxsize=None)
def complete_homogeneous(k: int, n: int) -> SparsePoly:
    if k < 0:
        return SparsePoly.zero(n)
    return SparsePoly(n, {e: Fraction(1) for e in monomials(n, k)})


def _product(factors: Iterable[SparsePoly], n: int) -> SparsePoly:
    result = _one(n)
    for f in factors:
        result = result * f
    return result


def _determinant(matrix: list[list[SparsePoly]], n: int) -> SparsePoly:
    """Cofactor expansion along the first row (matrices here are tiny)."""
    size = len(matrix)
    if size == 0:
        return _one(n)
    if size == 1:
        return matrix[0][0]
    total = SparsePoly.zero(n)
    for j in range(size):
        if matrix[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        term = matrix[0][j] * _determinant(minor, n)
        total = total + term if j % 2 == 0 else total - term
    return total


@lru_cache(maxsize=None)
def schur(parts: Partition, n: int) -> SparsePoly:
    """Jacobi-Trudi determinant det[h_{lambda_i - i + j}]."""
    if len(parts) > n:
        return SparsePoly.zero(n)
    size = len(parts)
    matrix = [
        [complete_homogeneous(parts[i] - i + j, n) for j in range(size)]
        for i in range(size)
    ]
    return _determinant(matrix, n)


def basis_poly(kind: str, parts: Sequence[int], n: int) -> SparsePoly:
    """One of the five classical bases: ``m``, ``e``, ``p``, ``h`` or ``s``."""
    parts = as_partition(parts)
    if kind == "m":
        return monomial_symmetric(parts, n)
    if kind == "e":
        return _product((elementary(k, n) for k in parts), n)
    if kind == "p":
        return _product((power_sum(k, n) for k in parts), n)
    if kind == "h":
        return _product((complete_homogeneous(k, n) for k in parts), n)
    if kind == "s":
        return schur(parts, n)
    raise ValueError(f"unknown basis kind {kind!r}; expected one of m, e, p, h, s")


def term_normalize(g: SparsePoly) -> SparsePoly:
    """Divide by the value at the all-ones point, so the result is 1 there."""
    at_ones = evaluate(g, [1] * g.n)
    if at_ones == 0:
        raise ZeroDivisionError("polynomial vanishes at the all-ones point")
    return g / at_ones


def normalized_basis_poly(kind: str, parts: Sequence[int], n: int) -> SparsePoly:
    """Term-normalized basis polynomial, e.g. ``H_lambda`` for ``kind='h'``."""
    return term_normalize(basis_poly(kind, parts, n))


def is_symmetric(f: SparsePoly) -> bool:
    for exp, c in f.items():
        for perm in set(itertools.permutations(exp)):
            if f.coeff(perm) != c:
                return False
    return True
