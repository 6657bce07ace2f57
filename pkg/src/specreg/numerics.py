"""Floating-point checks of the asymptotics: remainder decay, determinant, spectrum.

Large-|lambda| work is done on ``u = e^{-sigma lambda x} y`` which solves
``u'' + 2 sigma lambda u' + q u = 0``.  Its two modes are the slowly varying
branch and ``e^{-2 sigma lambda x}``; each branch is integrated from the end
where the other mode decays, so the measurement is not swamped by the
exponentially growing partner.
"""
from __future__ import annotations

import cmath
import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.integrate import solve_ivp as _scipy_solve_ivp

from .asymptotics import GTable, branch_sign, build_g_table, eval_weighted_series
from .classifier import ProblemSpec
from .determinant import BoundaryData, asymptotic_Delta, delta_table
from .funspace import SmoothFunction

__all__ = [
    "IntegrationError",
    "SpectrumWindow",
    "EtaRow",
    "ValidationReport",
    "solve_ivp",
    "default_radius",
    "weighted_branch",
    "remainder_probe",
    "numeric_Delta",
    "determinant_comparison",
    "standard_Delta",
    "find_eigenvalues",
    "fit_slope",
]

RTOL = 1e-12
ATOL = 1e-15
NOISE_FLOOR = 1e-12


class IntegrationError(RuntimeError):
    """The adaptive integrator gave up (typically step-size underflow)."""


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SPECREG_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn: Callable, items: Sequence) -> list:
    n = _threads()
    if n <= 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _qfunc(q: SmoothFunction) -> Callable[[float], complex]:
    qf = q.to_float() if q.backend.exact else q
    terms = [(k, [complex(a) for a in reversed(c)]) for k, c in qf.terms.items()]

    def f(x: float) -> complex:
        acc = 0j
        for k, c in terms:
            v = 0j
            for a in c:
                v = v * x + a
            acc += v if k == 0 else v * cmath.exp(2j * math.pi * k * x)
        return acc

    return f


def _integrate(rhs, x0: float, x1: float, z0, t_eval=None, rtol: float = RTOL, atol: float = ATOL):
    sol = _scipy_solve_ivp(
        rhs, (x0, x1), np.asarray(z0, dtype=complex), method="DOP853",
        rtol=rtol, atol=atol, t_eval=t_eval,
    )
    if sol.status != 0:
        raise IntegrationError(
            f"integration {x0}->{x1} failed: {sol.message}; "
            "for very large |lambda| use the exponentially weighted variables"
        )
    return sol


def solve_ivp(
    q: SmoothFunction, lam: complex, y0: complex, dy0: complex, x_end: float = 1.0,
    x_start: float = 0.0, rtol: float = RTOL,
) -> tuple[complex, complex]:
    """Integrate ``y'' = (lambda^2 - q) y`` from ``x_start`` to ``x_end``; returns ``(y, y')``."""
    if not (0.0 <= x_end <= 1.0 and 0.0 <= x_start <= 1.0):
        raise ValueError("integration endpoints must lie in [0, 1]")
    if x_end == x_start:
        return complex(y0), complex(dy0)
    qf = _qfunc(q)
    l2 = complex(lam) ** 2

    def rhs(x, z):
        return [z[1], (l2 - qf(x)) * z[0]]

    sol = _integrate(rhs, x_start, x_end, [y0, dy0], rtol=rtol, atol=ATOL * (abs(y0) + abs(dy0) + 1))
    return complex(sol.y[0, -1]), complex(sol.y[1, -1])


def default_radius(q: SmoothFunction) -> float:
    return 10.0 * (1.0 + q.sup_norm())


def weighted_branch(g: GTable, i: int, lam: complex, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(u, u')`` of branch ``i`` on ``xs``, anchored to the truncated series.

    The anchor is ``x = 0`` when ``Re(sigma lambda) >= 0`` and ``x = 1``
    otherwise.
    """
    lam = complex(lam)
    sigma = branch_sign(i)
    qf = _qfunc(g.q)
    x0 = 0.0 if (sigma * lam).real >= 0 else 1.0
    u0 = eval_weighted_series(g, i, 0, x0, lam)
    v0 = lam * (eval_weighted_series(g, i, 1, x0, lam) - sigma * u0)
    c = 2 * sigma * lam

    def rhs(x, z):
        return [z[1], -c * z[1] - qf(x) * z[0]]

    xs = np.asarray(xs, dtype=float)
    order = xs if x0 == 0.0 else xs[::-1]
    sol = _integrate(rhs, x0, 1.0 - x0, [u0, v0], t_eval=order)
    u, v = sol.y[0], sol.y[1]
    if x0 == 1.0:
        u, v = u[::-1], v[::-1]
    return u, v


@dataclass(frozen=True)
class EtaRow:
    lam: complex
    i: int
    nu: int
    max_eta: float
    bound_pred: float


@dataclass
class ValidationReport:
    m: int
    rows: list[EtaRow] = field(default_factory=list)
    # (i, nu, half-plane "+"/"-") -> fitted exponent, None when below noise
    slopes: dict[tuple[int, int, str], float | None] = field(default_factory=dict)
    delta_rows: list[tuple[complex, float]] = field(default_factory=list)

    def to_csv(self, fh=None) -> str:
        buf = fh if fh is not None else io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["re_lambda", "im_lambda", "i", "nu", "max_eta", "bound_pred"])
        for r in self.rows:
            w.writerow([repr(r.lam.real), repr(r.lam.imag), r.i, r.nu, f"{r.max_eta:.17g}", f"{r.bound_pred:.17g}"])
        return "" if fh is not None else buf.getvalue()


def fit_slope(mags: Sequence[float], values: Sequence[float]) -> float:
    if len(mags) < 4:
        raise ValueError("slope fits need at least 4 lambda samples")
    slope, _ = np.polyfit(np.log(np.asarray(mags)), np.log(np.asarray(values)), 1)
    return float(slope)


def _half(lam: complex) -> str:
    return "+" if complex(lam).real > 0 else "-"


def _eta_for(args) -> list[EtaRow]:
    g, lam, xs = args
    rows = []
    for i in (1, 2):
        sigma = branch_sign(i)
        u, v = weighted_branch(g, i, lam, xs)
        for nu in (0, 1):
            series = np.array([eval_weighted_series(g, i, nu, x, lam) for x in xs])
            num = u if nu == 0 else sigma * u + v / lam
            eta = float(np.max(np.abs(num - series)))
            rows.append(EtaRow(lam, i, nu, eta, abs(lam) ** (-g.m - 1)))
    return rows


def remainder_probe(
    p: ProblemSpec, g: GTable | None, lambdas: Iterable[complex], grid: int = 101,
    radius: float | None = None,
) -> ValidationReport:
    """Measure ``max_x |eta_{i,nu}(x, lambda)|`` and fit its decay exponent."""
    g = g or build_g_table(p.q, p.m_cap)
    lambdas = [complex(l) for l in lambdas]
    R = default_radius(g.q) if radius is None else radius
    small = [l for l in lambdas if abs(l) <= R]
    if small:
        raise ValueError(f"|lambda| must exceed R = {R:.4g}; offending samples {small}")
    xs = np.linspace(0.0, 1.0, grid)
    rep = ValidationReport(g.m)
    gf = g.numeric
    for rows in _pmap(_eta_for, [(gf, l, xs) for l in lambdas]):
        rep.rows.extend(rows)
    for i in (1, 2):
        for nu in (0, 1):
            for hp in ("+", "-"):
                sel = [r for r in rep.rows if r.i == i and r.nu == nu and _half(r.lam) == hp]
                if len(sel) < 4:
                    continue
                if max(r.max_eta for r in sel) < NOISE_FLOOR:
                    rep.slopes[(i, nu, hp)] = None
                    continue
                rep.slopes[(i, nu, hp)] = fit_slope([abs(r.lam) for r in sel], [r.max_eta for r in sel])
    return rep


def numeric_Delta(p: ProblemSpec, g: GTable, lam: complex) -> tuple[complex, complex, complex]:
    """Weighted components ``(D_-1, D_0, D_1)`` with ``Delta = D_-1 e^-l + D_0 + D_1 e^l``.

    Each branch is integrated in its stable direction and rescaled so its
    value at ``x = 0`` equals the truncated series there.
    """
    lam = complex(lam)
    bc = p.bc if not p.bc.backend.exact else p.bc.with_backend(_float_backend())
    ends = {}
    for j in (1, 2):
        sigma = branch_sign(j)
        u, v = weighted_branch(g, j, lam, np.array([0.0, 1.0]))
        target = eval_weighted_series(g, j, 0, 0.0, lam)
        scale = target / u[0] if u[0] != 0 else 1.0
        u, v = u * scale, v * scale
        W = sigma * u + v / lam  # y'/(lambda e^{sigma lambda x})
        ends[j] = (u[0], W[0], u[1], W[1])
    U10, V10, U11, V11 = ends[1]
    U20, V20, U21, V21 = ends[2]
    a11, a10, b11, b10, a20, b20 = bc.a11, bc.a10, bc.b11, bc.b10, bc.a20, bc.b20
    dm = a20 * b11 * lam * U20 * V11 - b20 * a11 * lam * V20 * U11 + (a20 * b10 - b20 * a10) * U20 * U11
    dp = b20 * a11 * lam * V10 * U21 - a20 * b11 * lam * U10 * V21 + (a10 * b20 - b10 * a20) * U10 * U21
    dz = a20 * a11 * lam * (U20 * V10 - U10 * V20) + b20 * b11 * lam * (U21 * V11 - U11 * V21)
    return complex(dm), complex(dz), complex(dp)


def _float_backend():
    from .scalars import FloatBackend

    return FloatBackend()


def combine(parts: tuple[complex, complex, complex], lam: complex) -> complex:
    dm, dz, dp = parts
    return dm * cmath.exp(-lam) + dz + dp * cmath.exp(lam)


def determinant_comparison(p: ProblemSpec, g: GTable, lambdas: Iterable[complex]) -> list[tuple[complex, float]]:
    """``|Delta_num - Delta_asym| / |Delta_num|`` for each lambda."""
    bc = p.bc if not p.bc.backend.exact else p.bc.with_backend(_float_backend())
    gf = g.numeric
    dt = delta_table(bc, gf)
    out = []
    for lam in lambdas:
        lam = complex(lam)
        num = combine(numeric_Delta(p, g, lam), lam)
        asym = asymptotic_Delta(dt, lam)
        out.append((lam, abs(num - asym) / abs(num)))
    return out


def standard_Delta(bc: BoundaryData, q: SmoothFunction, lam: complex, rtol: float = RTOL) -> complex:
    """``det[U_i(y_j)]`` for the basis ``y_1(0)=1, y_1'(0)=0, y_2(0)=0, y_2'(0)=1``."""
    qf = _qfunc(q)
    l2 = complex(lam) ** 2

    def rhs(x, z):
        a = l2 - qf(x)
        return [z[1], a * z[0], z[3], a * z[2]]

    sol = _integrate(rhs, 0.0, 1.0, [1, 0, 0, 1], rtol=rtol, atol=ATOL * rtol / RTOL)
    y1, d1, y2, d2 = sol.y[:, -1]
    c = {n: complex(bc.backend.to_complex(getattr(bc, n))) for n in ("a11", "a10", "b11", "b10", "a20", "a21", "b20", "b21")}

    def U1(y0, dy0, y1_, dy1_):
        return c["a11"] * dy0 + c["a10"] * y0 + c["b11"] * dy1_ + c["b10"] * y1_

    def U2(y0, dy0, y1_, dy1_):
        return c["a21"] * dy0 + c["a20"] * y0 + c["b21"] * dy1_ + c["b20"] * y1_

    s1 = (1, 0, y1, d1)
    s2 = (0, 1, y2, d2)
    return U1(*s1) * U2(*s2) - U1(*s2) * U2(*s1)


@dataclass(frozen=True)
class SpectrumWindow:
    re_min: float
    re_max: float
    im_min: float
    im_max: float
    resolution: int = 32
    refine_iters: int = 60

    def __post_init__(self) -> None:
        if self.re_min > self.re_max or self.im_min > self.im_max:
            raise ValueError("window bounds are inverted")
        if self.resolution < 8:
            raise ValueError("resolution must be >= 8")

    @property
    def empty(self) -> bool:
        return self.re_min == self.re_max or self.im_min == self.im_max

    def contains(self, z: complex, pad: float = 1e-9) -> bool:
        return (self.re_min - pad <= z.real <= self.re_max + pad) and (self.im_min - pad <= z.imag <= self.im_max + pad)


@dataclass
class SpectrumResult:
    roots: list[complex]
    failed_seeds: list[complex]
    seeds: int


def _newton(f: Callable[[complex], complex], z: complex, iters: int) -> complex | None:
    for _ in range(iters):
        fz = f(z)
        if fz == 0:
            return z
        h = 1e-6 * (1.0 + abs(z))
        df = (f(z + h) - f(z - h)) / (2 * h)
        if df == 0 or not cmath.isfinite(df):
            return None
        step = fz / df
        z = z - step
        if abs(step) < 1e-13 * (1.0 + abs(z)):
            return z
    return None


GRID_RTOL = 1e-8


def _grid_eval(args):
    bc, q, lam = args
    return standard_Delta(bc, q, lam, rtol=GRID_RTOL)


def find_eigenvalues(p: ProblemSpec, w: SpectrumWindow, detail: bool = False):
    """Zeros of the standard-basis determinant inside ``w``.

    Seeds are the local minima of ``|Delta|`` on a ``resolution^2`` grid;
    each is refined by Newton's method with a central-difference derivative.
    """
    if w.empty:
        res = SpectrumResult([], [], 0)
        return res if detail else res.roots
    # worker processes get float copies: exact scalars do not pickle
    bc = p.bc if not p.bc.backend.exact else p.bc.with_backend(_float_backend())
    q = p.q.to_float() if p.q.backend.exact else p.q
    n = w.resolution
    re = np.linspace(w.re_min, w.re_max, n)
    im = np.linspace(w.im_min, w.im_max, n)
    pts = [complex(a, b) for b in im for a in re]
    vals = np.abs(np.array(_pmap(_grid_eval, [(bc, q, z) for z in pts]))).reshape(n, n)
    seeds = []
    for r in range(n):
        for c in range(n):
            nb = vals[max(r - 1, 0): r + 2, max(c - 1, 0): c + 2]
            if vals[r, c] <= nb.min():
                seeds.append(complex(re[c], im[r]))

    f = lambda z: standard_Delta(bc, q, z)  # noqa: E731
    dx = max((w.re_max - w.re_min), (w.im_max - w.im_min)) / (n - 1)
    roots: list[complex] = []
    failed: list[complex] = []
    for s in seeds:
        z = _newton(f, s, w.refine_iters)
        if z is None:
            failed.append(s)
            continue
        if not w.contains(z, pad=1e-9 + 1e-12 * abs(z)) or abs(z - s) > 4 * dx:
            continue
        if all(abs(z - r) > 1e-8 for r in roots):
            roots.append(complex(z))
    roots.sort(key=lambda z: (round(z.imag, 9), round(z.real, 9)))
    res = SpectrumResult(roots, failed, len(seeds))
    return res if detail else res.roots
