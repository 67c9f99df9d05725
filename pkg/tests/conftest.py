import contextlib
import time
from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import settings

from symgram.polycore import SparsePoly

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def small_fractions(limit: int = 6):
    return st.builds(Fraction, st.integers(-limit, limit), st.integers(1, 4))


@st.composite
def small_polys(draw, n: int = 2, max_degree: int = 3, max_terms: int = 4):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exp = tuple(draw(st.lists(st.integers(0, max_degree), min_size=n, max_size=n)))
        terms[exp] = draw(small_fractions())
    return SparsePoly(n, terms)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one pass/fail line for an acceptance criterion; re-raises failures."""

    @contextlib.contextmanager
    def record(number: int, title: str):
        start = time.perf_counter()
        notes: list[str] = []
        try:
            yield notes
        except BaseException:
            elapsed = time.perf_counter() - start
            ACCEPTANCE_LINES.append(f"criterion {number:>2} FAIL  {title} ({elapsed:.1f}s) {'; '.join(notes)}".rstrip())
            raise
        elapsed = time.perf_counter() - start
        ACCEPTANCE_LINES.append(f"criterion {number:>2} PASS  {title} ({elapsed:.1f}s) {'; '.join(notes)}".rstrip())

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
