"""Sparse multivariate polynomials with exact rational coefficients.

Polynomials are immutable maps from exponent tuples to coefficients.  Parsed
input is always exact (``fractions.Fraction``); float coefficients only show up
when a polynomial is built from floating point data such as a symmetry adapted
basis.
"""

from __future__ import annotations

import re
from collections import defaultdict
from fractions import Fraction
from functools import reduce
from numbers import Number, Rational
from typing import Iterable, Iterator, Mapping, Sequence

Exponent = tuple[int, ...]


def to_fraction(value) -> Fraction:
    """Convert ints, Fractions, decimal strings and ``p/q`` strings exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        return Fraction(value)
    raise TypeError(f"cannot convert {value!r} to a rational")


def monomial_key(exponent: Exponent) -> tuple:
    """Sort key for graded lexicographic order (use with ``reverse=True``)."""
    return (sum(exponent), exponent)


def monomials(n: int, degree: int) -> list[Exponent]:
    """All exponent vectors of the given degree, in descending lex order.

    For ``n=3, degree=2`` this is x1^2, x1x2, x1x3, x2^2, x2x3, x3^2.
    """
    if n == 0:
        return [()] if degree == 0 else []
    if n == 1:
        return [(degree,)]
    out = []
    for first in range(degree, -1, -1):
        out.extend((first,) + rest for rest in monomials(n - 1, degree - first))
    return out


class SparsePoly:
    """Polynomial in ``n`` variables stored as ``{exponent: coefficient}``."""

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms: Mapping[Exponent, object] | None = None):
        if n < 0:
            raise ValueError("number of variables must be nonnegative")
        self.n = n
        clean: dict[Exponent, object] = {}
        for exp, coef in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n:
                raise ValueError(f"exponent {exp} does not have length {n}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            if coef != 0:
                clean[exp] = coef
        self._terms = clean

    # construction helpers
    @classmethod
    def zero(cls, n: int) -> "SparsePoly":
        return cls(n)

    @classmethod
    def constant(cls, n: int, value) -> "SparsePoly":
        return cls(n, {(0,) * n: value})

    @classmethod
    def variable(cls, n: int, index: int) -> "SparsePoly":
        """The variable x_{index+1} (0-based index)."""
        if not 0 <= index < n:
            raise IndexError(f"variable index {index} out of range for n={n}")
        exp = [0] * n
        exp[index] = 1
        return cls(n, {tuple(exp): Fraction(1)})

    @classmethod
    def monomial(cls, exponent: Sequence[int], coef=Fraction(1)) -> "SparsePoly":
        return cls(len(exponent), {tuple(exponent): coef})

    # mapping-like access
    @property
    def terms(self) -> dict[Exponent, object]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Exponent, object]]:
        """Terms in canonical (graded lex, descending) order."""
        for exp in sorted(self._terms, key=monomial_key, reverse=True):
            yield exp, self._terms[exp]

    def coeff(self, exponent: Sequence[int]):
        return self._terms.get(tuple(exponent), 0)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def is_homogeneous(self, degree: int | None = None) -> bool:
        degrees = {sum(e) for e in self._terms}
        if not degrees:
            return True
        if len(degrees) != 1:
            return False
        return degree is None or degrees == {degree}

    def is_exact(self) -> bool:
        return all(isinstance(c, (int, Fraction)) for c in self._terms.values())

    # arithmetic
    def _check(self, other: "SparsePoly") -> None:
        if other.n != self.n:
            raise ValueError(f"variable count mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if isinstance(other, Number):
            other = SparsePoly.constant(self.n, other)
        if not isinstance(other, SparsePoly):
            return NotImplemented
        self._check(other)
        out = dict(self._terms)
        for exp, c in other._terms.items():
            out[exp] = out.get(exp, 0) + c
        return SparsePoly(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return SparsePoly(self.n, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, Number):
            other = SparsePoly.constant(self.n, other)
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return SparsePoly(self.n, {e: c * other for e, c in self._terms.items()})
        if not isinstance(other, SparsePoly):
            return NotImplemented
        self._check(other)
        out: dict[Exponent, object] = defaultdict(int)
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                out[tuple(a + b for a, b in zip(e1, e2))] += c1 * c2
        return SparsePoly(self.n, out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if not isinstance(scalar, Number):
            return NotImplemented
        if isinstance(scalar, int):
            scalar = Fraction(scalar)
        return SparsePoly(self.n, {e: c / scalar for e, c in self._terms.items()})

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers are supported")
        result = SparsePoly.constant(self.n, Fraction(1))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Number):
            other = SparsePoly.constant(self.n, other)
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self):
        return hash((self.n, frozenset(self._terms.items())))

    def __repr__(self):
        return f"SparsePoly({self.n}, {render(self)!r})"

    def __str__(self):
        return render(self)

    def map_coefficients(self, func) -> "SparsePoly":
        return SparsePoly(self.n, {e: func(c) for e, c in self._terms.items()})

    def to_float(self) -> "SparsePoly":
        return self.map_coefficients(float)

    def max_abs_difference(self, other: "SparsePoly") -> float:
        """Largest coefficient deviation, in floating point."""
        self._check(other)
        keys = set(self._terms) | set(other._terms)
        return max(
            (abs(float(self.coeff(k)) - float(other.coeff(k))) for k in keys),
            default=0.0,
        )


def poly_sum(polys: Iterable[SparsePoly], n: int) -> SparsePoly:
    return reduce(lambda a, b: a + b, polys, SparsePoly.zero(n))


# ---------------------------------------------------------------------------
# text format

class PolySyntaxError(ValueError):
    """Raised by :func:`parse_poly` with the offending character position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][-+]?\d+)?|\.\d+)|(?P<var>x(?P<idx>\d+))"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            pos += len(text[pos:]) - len(text[pos:].lstrip())
            raise PolySyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup) if m.lastgroup else pos
        if m.group("num") is not None:
            tokens.append(("num", m.group("num"), start))
        elif m.group("var") is not None:
            tokens.append(("var", m.group("idx"), start))
        else:
            tokens.append(("op", m.group("op"), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive descent over sums, products, powers and parentheses."""

    def __init__(self, text: str, n: int):
        self.n = n
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_end(self):
        kind, value, pos = self.peek()
        if kind != "end":
            raise PolySyntaxError(f"unexpected token {value!r}", pos)

    def expression(self) -> SparsePoly:
        sign = 1
        kind, value, _ = self.peek()
        if kind == "op" and value in "+-":
            self.take()
            sign = -1 if value == "-" else 1
        result = self.term() * sign
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.take()
                t = self.term()
                result = result + t if value == "+" else result - t
            else:
                return result

    def term(self) -> SparsePoly:
        result = self.power()
        while True:
            kind, value, pos = self.peek()
            if kind == "op" and value == "*":
                self.take()
                result = result * self.power()
            elif kind == "op" and value == "/":
                self.take()
                kind2, value2, pos2 = self.take()
                if kind2 != "num":
                    raise PolySyntaxError("division only by a number", pos2)
                divisor = Fraction(value2)
                if divisor == 0:
                    raise PolySyntaxError("division by zero", pos2)
                result = result / divisor
            else:
                return result

    def power(self) -> SparsePoly:
        base = self.atom()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.take()
            kind2, value2, pos2 = self.take()
            if kind2 != "num" or not value2.isdigit():
                raise PolySyntaxError("exponent must be a nonnegative integer", pos2)
            return base ** int(value2)
        return base

    def atom(self) -> SparsePoly:
        kind, value, pos = self.take()
        if kind == "num":
            return SparsePoly.constant(self.n, Fraction(value))
        if kind == "var":
            index = int(value)
            if not 1 <= index <= self.n:
                raise PolySyntaxError(
                    f"variable x{index} out of range for n={self.n}", pos
                )
            return SparsePoly.variable(self.n, index - 1)
        if kind == "op" and value == "(":
            inner = self.expression()
            kind2, value2, pos2 = self.take()
            if not (kind2 == "op" and value2 == ")"):
                raise PolySyntaxError("expected ')'", pos2)
            return inner
        if kind == "op" and value == "-":
            return -self.atom()
        raise PolySyntaxError(f"unexpected token {value!r}" if value else "unexpected end", pos)


def parse_poly(text: str, n: int) -> SparsePoly:
    """Parse ``c*x1^a1*...`` sums with exact rational coefficients.

    >>> str(parse_poly("1/2*x1^2 - x2", 2))
    '1/2*x1^2 - x2'
    """
    parser = _Parser(text, n)
    result = parser.expression()
    parser.expect_end()
    return result


def render_coefficient(c) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    if isinstance(c, float):
        return repr(float(c))
    return str(c)


def render_monomial(exponent: Exponent) -> str:
    parts = []
    for i, e in enumerate(exponent, start=1):
        if e == 1:
            parts.append(f"x{i}")
        elif e > 1:
            parts.append(f"x{i}^{e}")
    return "*".join(parts)


def render(f: SparsePoly) -> str:
    """Canonical text form, terms in descending graded lex order."""
    if f.is_zero():
        return "0"
    pieces = []
    for exp, c in f.items():
        negative = c < 0
        mag = -c if negative else c
        mono = render_monomial(exp)
        if not mono:
            body = render_coefficient(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{render_coefficient(mag)}*{mono}"
        if not pieces:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f"- {body}" if negative else f"+ {body}")
    return " ".join(pieces)


render_poly = render


# ---------------------------------------------------------------------------
# evaluation and substitutions

def evaluate(f: SparsePoly, point: Sequence) -> object:
    """Evaluate ``f`` at ``point``; exact when point and coefficients are rational."""
    if len(point) != f.n:
        raise ValueError(f"point has length {len(point)}, expected {f.n}")
    values = [to_fraction(v) if isinstance(v, (int, str)) else v for v in point]
    total = 0
    for exp, c in f.items():
        term = c
        for v, e in zip(values, exp):
            if e:
                term = term * v**e
        total = total + term
    return total


def substitute_squares(f: SparsePoly) -> SparsePoly:
    """Return f(x1^2, ..., xn^2)."""
    return SparsePoly(f.n, {tuple(2 * e for e in exp): c for exp, c in f.items()})


def apply_linear_substitution(f: SparsePoly, matrix) -> SparsePoly:
    """Substitute x_i -> sum_j A[i][j] x_j and expand.

    ``matrix`` may hold Fractions/ints (exact result) or floats.
    """
    rows = [list(row) for row in matrix]
    if len(rows) != f.n or any(len(r) != f.n for r in rows):
        raise ValueError(f"substitution matrix must be {f.n}x{f.n}")
    forms = []
    for row in rows:
        terms = {}
        for j, a in enumerate(row):
            if a != 0:
                exp = [0] * f.n
                exp[j] = 1
                terms[tuple(exp)] = a if isinstance(a, (float, Fraction)) else Fraction(a)
        forms.append(SparsePoly(f.n, terms))
    powers: dict[tuple[int, int], SparsePoly] = {}

    def power(i: int, e: int) -> SparsePoly:
        if (i, e) not in powers:
            powers[(i, e)] = forms[i] ** e
        return powers[(i, e)]

    result = SparsePoly.zero(f.n)
    for exp, c in f.items():
        term = SparsePoly.constant(f.n, c)
        for i, e in enumerate(exp):
            if e:
                term = term * power(i, e)
        result = result + term
    return result


def permute_variables(f: SparsePoly, perm: Sequence[int]) -> SparsePoly:
    """Exact relabelling x_i -> x_{perm[i]} (0-based permutation)."""
    out = {}
    for exp, c in f.items():
        new = [0] * f.n
        for i, e in enumerate(exp):
            new[perm[i]] = e
        out[tuple(new)] = c
    return SparsePoly(f.n, out)
