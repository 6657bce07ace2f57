from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from specreg.determinant import BoundaryData
from specreg.funspace import SmoothFunction
from specreg.scalars import RATIONAL

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

small_fractions = st.fractions(min_value=-4, max_value=4, max_denominator=5)


@st.composite
def rational_polys(draw, max_degree: int = 5, min_size: int = 0):
    coeffs = draw(st.lists(small_fractions, min_size=min_size, max_size=max_degree + 1))
    return SmoothFunction.poly(coeffs)


def poly(*coeffs) -> SmoothFunction:
    return SmoothFunction.poly([Fraction(c) for c in coeffs])


def tail_boundary(a, b, c, d) -> BoundaryData:
    """Reduced forms with a vanishing leading sum and minor; ``a20 b11 = a b c``."""
    a, b, c, d = map(Fraction, (a, b, c, d))
    return BoundaryData(a11=a, b11=b, a20=a * c, b20=-b * c, a10=a * c * d, b10=-b * c * d)


@st.composite
def tail_boundaries(draw):
    nz = small_fractions.filter(bool)
    return tail_boundary(draw(nz), draw(nz), draw(nz), draw(small_fractions))


@st.composite
def reduced_boundaries(draw):
    """Arbitrary reduced forms with a derivative in U1 and a value in U2."""
    vals = {n: draw(small_fractions) for n in ("a11", "a10", "b11", "b10", "a20", "b20")}
    if not (vals["a11"] or vals["b11"]):
        vals["a11"] = Fraction(1)
    if not (vals["a20"] or vals["b20"]):
        vals["b20"] = Fraction(1)
    return BoundaryData(**vals)


def random_fraction(rng: random.Random, lo: int = -4, hi: int = 4, nonzero: bool = False) -> Fraction:
    while True:
        v = Fraction(rng.randint(lo, hi), rng.randint(1, 4))
        if v or not nonzero:
            return v


def random_poly(rng: random.Random, max_degree: int = 5) -> SmoothFunction:
    return SmoothFunction.poly([random_fraction(rng) for _ in range(rng.randint(1, max_degree + 1))])


def random_tail_boundary(rng: random.Random) -> BoundaryData:
    return tail_boundary(*(random_fraction(rng, nonzero=True) for _ in range(3)), random_fraction(rng))


def random_reduced_boundary(rng: random.Random) -> BoundaryData:
    vals = {n: random_fraction(rng) for n in ("a11", "a10", "b11", "b10", "a20", "b20")}
    vals["a11"] = vals["a11"] or Fraction(1)
    vals["a20"] = vals["a20"] or Fraction(1)
    return BoundaryData(**vals)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)


@pytest.fixture
def backend():
    return RATIONAL


ACCEPTANCE_LINES: list[str] = []


def report_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
