import cmath
import math

import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

from specreg.asymptotics import build_g_table
from specreg.classifier import ProblemSpec
from specreg.determinant import BoundaryData
from specreg.funspace import SmoothFunction
from specreg.numerics import (
    RTOL,
    SpectrumWindow,
    combine,
    determinant_comparison,
    find_eigenvalues,
    fit_slope,
    numeric_Delta,
    remainder_probe,
    solve_ivp,
    standard_Delta,
)

from conftest import poly

X1MX = poly(0, 1, -1)
DIRICHLET = BoundaryData(a10=1, b20=1)
ROBIN = BoundaryData(a11=1, a10=2, b20=1)


def test_decaying_exponential():
    y, dy = solve_ivp(SmoothFunction.zero(), 1.0, 1.0, -1.0)
    assert abs(y - math.exp(-1)) < 1e-12 and abs(dy + math.exp(-1)) < 1e-12


def test_oscillatory_solution():
    y, dy = solve_ivp(SmoothFunction.zero(), 2j, 1.0, 0.0)
    assert abs(y - math.cos(2)) < 1e-12 and abs(dy + 2 * math.sin(2)) < 1e-12


def test_constant_potential_shifts_exponent():
    # y'' = (lambda^2 - c) y with lambda^2 - c = 4
    y, _ = solve_ivp(SmoothFunction.constant(5), 3.0, 1.0, 2.0)
    assert abs(y - math.exp(2)) < 1e-11


def test_round_trip_integration():
    q = poly(0, 1)
    y1, d1 = solve_ivp(q, 3.0 + 1j, 1.0, 0.5)
    y0, d0 = solve_ivp(q, 3.0 + 1j, y1, d1, x_end=0.0, x_start=1.0)
    growth = max(abs(y1), abs(d1))  # relative tolerance is applied to values of this size
    assert abs(y0 - 1.0) < 10 * RTOL * growth and abs(d0 - 0.5) < 10 * RTOL * growth


def test_endpoints_must_lie_in_unit_interval():
    with pytest.raises(ValueError):
        solve_ivp(poly(1), 1.0, 1.0, 0.0, x_end=2.0)


def test_fit_slope_needs_four_samples():
    with pytest.raises(ValueError):
        fit_slope([1, 2, 4], [1, 0.5, 0.25])
    assert fit_slope([1, 2, 4, 8], [1, 0.25, 1 / 16, 1 / 64]) == pytest.approx(-2)


def test_remainder_probe_rejects_small_lambda():
    p = ProblemSpec(ROBIN, X1MX)
    with pytest.raises(ValueError):
        remainder_probe(p, build_g_table(X1MX, 1), [5, 10, 20, 40])


def test_remainder_slopes_do_not_increase_with_order():
    p = ProblemSpec(ROBIN, X1MX)
    lams = [20, 40, 80, 160]
    prev = math.inf
    for m in range(4):
        rep = remainder_probe(p, build_g_table(X1MX, m), lams, grid=41)
        slope = max(rep.slopes.values())
        assert slope == pytest.approx(-(m + 1), abs=0.5)
        assert slope <= prev + 0.05
        prev = slope


def test_zero_potential_remainder_is_noise():
    p = ProblemSpec(ROBIN, SmoothFunction.zero())
    rep = remainder_probe(p, build_g_table(SmoothFunction.zero(), 1), [20, 40, 80, 160, -20, -40, -80, -160], grid=21)
    assert set(rep.slopes.values()) == {None}
    assert "re_lambda,im_lambda,i,nu,max_eta,bound_pred" in rep.to_csv()


def test_determinant_error_shrinks():
    bc = BoundaryData(a11=1, b11=1, a20=1, b20=-1, a10=1)
    q = poly(0, 1)
    p = ProblemSpec(bc, q)
    lams = [20, 40, 80]
    errs = [e for _, e in determinant_comparison(p, build_g_table(q, 2), lams)]
    for a, b in zip(errs, errs[1:]):
        assert a / b >= 2 ** 1.5


def test_dirichlet_zero_potential_spectrum():
    roots = find_eigenvalues(ProblemSpec(DIRICHLET, SmoothFunction.zero()), SpectrumWindow(-1, 1, 0, 10))
    assert len(roots) == 3
    for k, z in enumerate(roots, start=1):
        assert abs(z - 1j * k * math.pi) < 1e-8
        assert isinstance(z, complex)


def test_constant_potential_shifts_spectrum():
    c = 3
    roots = find_eigenvalues(ProblemSpec(DIRICHLET, SmoothFunction.constant(c)), SpectrumWindow(-1, 1, 0, 10))
    expected = [cmath.sqrt(-(k * math.pi) ** 2 + c) for k in (1, 2, 3)]
    assert len(roots) == 3
    for z, e in zip(roots, expected):
        assert abs(z**2 - e**2) < 1e-7


def test_empty_window():
    assert find_eigenvalues(ProblemSpec(DIRICHLET, X1MX), SpectrumWindow(0, 0, 0, 10)) == []


def test_quadratic_potential_against_finite_differences():
    n = 4000
    h = 1.0 / n
    xs = np.linspace(h, 1 - h, n - 1)
    # -y'' - q y = mu y with mu = -lambda^2
    diag = 2 / h**2 - xs * (1 - xs)
    off = -np.ones(n - 2) / h**2
    mu = eigh_tridiagonal(diag, off, select="i", select_range=(0, 2))[0]
    roots = find_eigenvalues(ProblemSpec(DIRICHLET, X1MX), SpectrumWindow(-1, 1, 0, 10))
    assert len(roots) == 3
    for z, m in zip(roots, mu):
        assert abs(z - 1j * math.sqrt(m)) < 1e-3
    for k, z in enumerate(roots, start=1):
        assert abs(z - 1j * k * math.pi) < 1.0 / k


def test_zero_sets_agree_across_normalizations():
    q = X1MX
    p = ProblemSpec(ROBIN, q)
    g = build_g_table(q, 3)
    roots = find_eigenvalues(p, SpectrumWindow(-1, 1, 4, 14, resolution=24))
    assert roots
    for z in roots:
        f = lambda lam: combine(numeric_Delta(p, g, lam), lam)  # noqa: E731
        w = z
        for _ in range(30):
            h = 1e-6 * abs(w)
            step = f(w) / ((f(w + h) - f(w - h)) / (2 * h))
            w -= step
            if abs(step) < 1e-13:
                break
        assert abs(w - z) < 1e-6
        assert abs(standard_Delta(ROBIN, q, z)) < 1e-8


def test_process_pool_matches_serial(monkeypatch):
    p = ProblemSpec(DIRICHLET, SmoothFunction.zero())
    w = SpectrumWindow(-1, 1, 0, 7, resolution=12)
    serial = find_eigenvalues(p, w)
    monkeypatch.setenv("SPECREG_THREADS", "2")
    assert find_eigenvalues(p, w) == serial
