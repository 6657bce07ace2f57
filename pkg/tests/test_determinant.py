from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings

from specreg.asymptotics import build_g_table
from specreg.determinant import (
    BoundaryData,
    ConditionError,
    collapsed_delta,
    delta_closed_forms,
    delta_table,
    reduced_delta,
)
from specreg.funspace import SmoothFunction
from specreg.scalars import RATIONAL

from conftest import poly, rational_polys, reduced_boundaries, tail_boundaries, tail_boundary

LAM, E = sp.symbols("lam E")


def frac(v) -> Fraction:
    re, im = RATIONAL.parts(v)
    assert im == 0
    return re


def brute_force_deltas(bc: BoundaryData, g) -> dict:
    """Expand det[U_j(y_i)] of the truncated series with sympy, E standing for e^lam."""
    m = g.m

    def ser(i, nu, x):
        return sum(as_sympy(g.g(i, nu, s)(x)) * LAM ** (-s) for s in range(m + 1))

    c = {n: as_sympy(getattr(bc, n)) for n in ("a11", "a10", "b11", "b10", "a20", "b20")}
    y = {}
    for i, e1 in ((1, 1 / E), (2, E)):
        y[i] = (ser(i, 0, 0), LAM * ser(i, 1, 0), e1 * ser(i, 0, 1), e1 * LAM * ser(i, 1, 1))

    def U1(v):
        return c["a11"] * v[1] + c["a10"] * v[0] + c["b11"] * v[3] + c["b10"] * v[2]

    def U2(v):
        return c["a20"] * v[0] + c["b20"] * v[2]

    det = sp.expand(U1(y[1]) * U2(y[2]) - U1(y[2]) * U2(y[1]))
    parts = {-1: det.coeff(E, -1), 0: det.as_independent(E, as_Add=True)[0], 1: det.coeff(E, 1)}
    return {
        (k, i): sp.expand(part).coeff(LAM, 1 - i) for k, part in parts.items() for i in range(m + 1)
    }


def as_sympy(v):
    re, im = RATIONAL.parts(v)
    return sp.Rational(re.numerator, re.denominator) + sp.I * sp.Rational(im.numerator, im.denominator)


def test_linear_potential_worked_values():
    bc = tail_boundary(1, 1, 1, 0)
    assert frac(bc.a20) == 1 and frac(bc.b11) == 1
    dt = delta_table(bc, build_g_table(poly(0, 1), 4))
    assert frac(dt.delta(-1, -1)) == Fraction(1, 2)
    # q'(1) + q'(0) = 2 and the jump of q times its integral adds 1/2
    assert frac(dt.delta(-1, -2)) == Fraction(5, 8)
    assert not dt.delta(-1, 1) and not dt.delta(-1, 0)


@settings(max_examples=15)
@given(bc=reduced_boundaries(), q=rational_polys(3))
def test_table_matches_brute_force_expansion(bc, q):
    g = build_g_table(q, 3)
    dt = delta_table(bc, g)
    bf = brute_force_deltas(bc, g)
    for key, val in bf.items():
        assert sp.simplify(as_sympy(dt[key]) - val) == 0, key


@given(bc=reduced_boundaries(), q=rational_polys(4))
def test_exponential_branch_symmetry(bc, q):
    dt = delta_table(bc, build_g_table(q, 6))
    for i in range(7):
        assert dt[(-1, i)] == dt[(1, i)] * (-1) ** i


@pytest.mark.parametrize("normalization", ["anchored", "split"])
@given(bc=reduced_boundaries(), q=rational_polys(4))
def test_leading_closed_forms_hold_generally(normalization, bc, q):
    dt = delta_table(bc, build_g_table(q, 2, normalization))
    cf = delta_closed_forms(bc, q, normalization, strict=False)
    assert dt.delta(-1, 1) == cf[1]
    assert dt.delta(-1, 0) == cf[0]


@pytest.mark.parametrize("normalization", ["anchored", "split"])
@given(bc=tail_boundaries(), q=rational_polys(5))
def test_tail_closed_forms(normalization, bc, q):
    dt = delta_table(bc, build_g_table(q, 4, normalization))
    cf = delta_closed_forms(bc, q, normalization)
    for p in (1, 0, -1, -2, -3):
        assert dt.delta(-1, p) == cf[p], p


def test_closed_forms_require_tail_conditions():
    bc = BoundaryData(a11=1, b20=1)
    with pytest.raises(ConditionError):
        delta_closed_forms(bc, poly(0, 1))
    assert set(delta_closed_forms(bc, poly(0, 1), strict=False)) == {1, 0}


@given(bc=tail_boundaries(), q=rational_polys(5))
def test_reduced_sum(bc, q):
    g = build_g_table(q, 6)
    dt = delta_table(bc, g)
    for i in range(2, 7):
        assert reduced_delta(bc, g, i) == dt[(-1, i)]


def _perturbed(core: SmoothFunction, i: int, c: Fraction) -> SmoothFunction:
    """Symmetric core plus a term breaking the endpoint symmetry first at order i-2."""
    base = poly(0, 1, -1)  # x(1-x)
    bump = SmoothFunction.constant(1)
    for _ in range(i - 2):
        bump = bump * base
    return core + (bump * poly(1, -2)).scale(c)


@pytest.mark.parametrize("i", [3, 4, 5, 6])
def test_collapsed_identity(i):
    core = poly(2, 0, 0) + poly(0, 1, -1).scale(Fraction(3, 2)) + (poly(0, 1, -1) * poly(0, 1, -1)).scale(-1)
    q = _perturbed(core, i, Fraction(5, 3))
    bc = tail_boundary(Fraction(1, 2), 2, 3, Fraction(-1, 3))
    dt = delta_table(bc, build_g_table(q, i))
    assert dt[(-1, i)] == collapsed_delta(bc, q, i)
    assert dt[(-1, i)]
    for j in range(i):
        assert not dt[(-1, j)]


def test_delta_table_rejects_non_normal_form():
    with pytest.raises(ConditionError):
        delta_table(BoundaryData(a10=1, b20=1), build_g_table(poly(1), 1))
    with pytest.raises(ConditionError):
        delta_table(BoundaryData(a11=1, b20=1, a21=1), build_g_table(poly(1), 1))


def test_scaling_forms_scales_table():
    bc = tail_boundary(1, 2, 3, 4)
    g = build_g_table(poly(1, 2, 3), 4)
    dt, ds = delta_table(bc, g), delta_table(bc.scaled(2, Fraction(-1, 3)), g)
    for key in dt.entries:
        assert ds[key] == dt[key] * Fraction(-2, 3)
