"""Coefficient functions of the large-|lambda| expansion of the fundamental system.

For ``y'' + q y = lambda^2 y`` the two branches ``i = 1, 2`` have

    d^nu y_i / dx^nu = lambda^nu e^{(-1)^i lambda x} [sum_s lambda^-s g_{i,nu}^(s)(x) + eta]

and substituting ``y = e^{sigma lambda x} u`` with ``sigma = (-1)^i`` leaves
``u'' + 2 sigma lambda u' + q u = 0``, i.e. ``2 sigma g_s' = -(g_{s-1}'' + q g_{s-1})``.
Each step fixes ``g_s`` only up to a constant, which is a normalisation of
the branch.  Two choices are provided:

``"anchored"``
    ``g_s(0) = 0`` for ``s >= 1`` (the default).
``"split"``
    ``g_s = -(sigma/2) (g_{s-1}' + int_0^x q g_{s-1})``; the derivative term is
    not re-integrated, so ``g_s(0)`` is generally nonzero.  This is the
    normalisation in which the composition-sum representation of ``g_{10}``
    (``alpha_coefficients`` / ``g10_closed_form``) holds.

``power_pattern_g_table`` reproduces the fixed prefactor pattern
``(-1/2)^{i(nu+1)-1}`` for diagnostics only; it fails the residual check.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import Any, Iterator

from .funspace import SmoothFunction

__all__ = [
    "GTable",
    "QFamily",
    "AlphaTable",
    "ClosedFormReport",
    "build_g_table",
    "power_pattern_g_table",
    "series_residual",
    "q_family",
    "alpha_coefficients",
    "g10_closed_form",
    "compare_closed_form",
    "eval_asymptotic_solution",
    "eval_weighted_series",
]

NORMALIZATIONS = ("anchored", "split", "power-pattern")


def branch_sign(i: int) -> int:
    if i not in (1, 2):
        raise ValueError(f"branch index must be 1 or 2, got {i}")
    return -1 if i == 1 else 1


@dataclass(frozen=True)
class GTable:
    """``g_{i,nu}^(s)`` for ``i in {1,2}``, ``nu in {0,1}``, ``s = 0..m``."""

    m: int
    q: SmoothFunction
    entries: dict[tuple[int, int, int], SmoothFunction]
    normalization: str = "anchored"

    def g(self, i: int, nu: int, s: int) -> SmoothFunction:
        return self.entries[(i, nu, s)]

    __getitem__ = g

    @property
    def backend(self):
        return self.q.backend

    def keys(self) -> Iterator[tuple[int, int, int]]:
        return iter(sorted(self.entries))

    @cached_property
    def numeric(self) -> "GTable":
        """Float copy used for evaluation at arbitrary points."""
        if not self.backend.exact:
            return self
        q = self.q.to_float()
        return GTable(self.m, q, {k: f.to_float(q.backend) for k, f in self.entries.items()}, self.normalization)


def build_g_table(q: SmoothFunction, m: int, normalization: str = "anchored") -> GTable:
    if m < 0:
        raise ValueError("truncation order m must be >= 0")
    if normalization == "power-pattern":
        return power_pattern_g_table(q, m)
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {normalization!r}")
    bk = q.backend
    entries: dict[tuple[int, int, int], SmoothFunction] = {}
    for i in (1, 2):
        sigma = branch_sign(i)
        half = bk.coerce(-sigma) / 2
        g0 = [SmoothFunction.constant(1, bk)]
        for s in range(1, m + 1):
            prev = g0[-1]
            if normalization == "anchored":
                nxt = (prev.derivative(2) + q * prev).antiderivative0() * half
            else:
                nxt = (prev.derivative() + (q * prev).antiderivative0()) * half
            g0.append(nxt)
        for s in range(m + 1):
            entries[(i, 0, s)] = g0[s]
            g1 = g0[s] * sigma
            if s >= 1:
                g1 = g1 + g0[s - 1].derivative()
            entries[(i, 1, s)] = g1
    return GTable(m, q, entries, normalization)


def power_pattern_g_table(q: SmoothFunction, m: int) -> GTable:
    """Recursion with the fixed prefactor pattern ``(-1/2)^{i(nu+1)-1}``, kept for comparison."""
    bk = q.backend
    entries: dict[tuple[int, int, int], SmoothFunction] = {}
    g0: dict[tuple[int, int], SmoothFunction] = {}

    def pref(power: int) -> Any:
        return bk.coerce((-1) ** power) / 2**power

    for i in (1, 2):
        for nu in (0, 1):
            for s in range(m + 1):
                if s == 0:
                    val = SmoothFunction.constant((-1) ** nu, bk)
                elif s == 1:
                    val = q.antiderivative0() * pref(i * (nu + 1) - 1)
                else:
                    val = (q * g0[(i, s - 1)]).antiderivative0() * pref(i * (nu + 1) - 1)
                    for j in range(s - 1):
                        term = (q * g0[(i, j)]).derivative(s - j - 2)
                        val = val + term * pref((i - 1) * (nu + s - j))
                entries[(i, nu, s)] = val
                if nu == 0:
                    g0[(i, s)] = val
    return GTable(m, q, entries, "power-pattern")


def series_residual(table: GTable, i: int) -> dict[int, SmoothFunction]:
    """Coefficients of ``e^{-sigma lambda x} (y'' + q y - lambda^2 y)`` by power of lambda.

    ``y`` is the truncated series of branch ``i`` built from ``g_{i0}``.  The
    expansion uses only the product rule on ``e^{sigma lambda x} u``; nothing
    about the recursion is assumed.
    """
    sigma = branch_sign(i)
    bk = table.backend
    out: dict[int, SmoothFunction] = {}

    def add(power: int, f: SmoothFunction) -> None:
        out[power] = out.get(power, SmoothFunction.zero(bk)) + f

    for s in range(table.m + 1):
        g = table.g(i, 0, s)
        # (e^{sl x} g)'' = e^{sl x} (l^2 g + 2 sigma l g' + g'')
        add(2 - s, g)
        add(1 - s, g.derivative() * (2 * sigma))
        add(-s, g.derivative(2) + table.q * g)
        add(2 - s, -g)
    return dict(sorted(out.items(), reverse=True))


@dataclass(frozen=True)
class QFamily:
    """``q_i(x) = 2^i int_0^x q g_10^(i)`` for ``i = 0..m``."""

    entries: tuple[SmoothFunction, ...]

    def __getitem__(self, i: int) -> SmoothFunction:
        return self.entries[i]

    def __len__(self) -> int:
        return len(self.entries)


def q_family(q: SmoothFunction, g: GTable) -> QFamily:
    return QFamily(tuple((q * g.g(1, 0, i)).antiderivative0() * 2**i for i in range(g.m + 1)))


# -- composition-sum representation of g_10 ---------------------------------
#
# 2^s g_10^(s) = sum_i q_i^(s-1-i) in the split normalisation, and
# q_i' = q * sum_{j<i} q_j^(i-1-j).  Repeatedly applying Leibniz to the
# differentiated q_i factors yields words  q^(k_1) ... q^(k_{nu-1}) q_{i_nu}^(r)
# with weight  sum(k_l + 2) + i_nu + 1 + r = s.  A word is final when r = 0
# (boundary word) or i_nu = 0 (then q_0^(r) = q^(r-1), a pure word).


def _order(s: int, comp: tuple[int, ...]) -> int:
    nu = len(comp)
    return s + 1 - 2 * nu - sum(comp)


@dataclass(frozen=True)
class AlphaTable:
    """Natural-number weights keyed by ``(s, nu, (k_1, ..., k_{nu-1}, i_nu))``."""

    s: int
    up_to_nu: int
    entries: dict[tuple[int, int, tuple[int, ...]], int] = field(default_factory=dict)

    def __getitem__(self, key: tuple[int, int, tuple[int, ...]]) -> int:
        return self.entries[key]

    def get(self, key, default=None):
        return self.entries.get(key, default)

    def derivative_order(self, comp: tuple[int, ...]) -> int:
        """Derivative order ``r`` carried by the trailing ``q_{i_nu}`` factor."""
        return _order(self.s, comp)

    def final_terms(self) -> Iterator[tuple[tuple[int, ...], int]]:
        """Compositions that survive into the representation, with weights."""
        for (_, nu, comp), a in sorted(self.entries.items()):
            r = _order(self.s, comp)
            if r == 0 or comp[-1] == 0:
                yield comp, a


def alpha_coefficients(s: int, up_to_nu: int | None = None) -> AlphaTable:
    s0 = (s + 1) // 2
    if s < 1:
        raise ValueError("s must be >= 1")
    if up_to_nu is None:
        up_to_nu = s0
    if not 1 <= up_to_nu <= s0:
        raise ValueError(f"up_to_nu must lie in 1..{s0} for s = {s}")
    entries: dict[tuple[int, int, tuple[int, ...]], int] = {}
    level = {(i1,): 1 for i1 in range(s)}
    nu = 1
    while True:
        for comp, a in level.items():
            entries[(s, nu, comp)] = a
        if nu == up_to_nu:
            break
        nxt: dict[tuple[int, ...], int] = {}
        for comp, a in level.items():
            i_nu, r = comp[-1], _order(s, comp)
            if i_nu == 0 or r == 0:
                continue
            for k in range(r):
                for j in range(i_nu):
                    key = comp[:-1] + (k, j)
                    nxt[key] = nxt.get(key, 0) + comb(r - 1, k) * a
        if not nxt:
            break
        level = nxt
        nu += 1
    return AlphaTable(s, up_to_nu, entries)


def _word(q: SmoothFunction, qf: QFamily, s: int, comp: tuple[int, ...], dq: dict) -> SmoothFunction:
    def qd(k: int) -> SmoothFunction:
        if k not in dq:
            dq[k] = q.derivative(k)
        return dq[k]

    term = SmoothFunction.constant(1, q.backend)
    for k in comp[:-1]:
        term = term * qd(k)
    r = _order(s, comp)
    if r == 0:
        return term * qf[comp[-1]]
    return term * qd(r - 1)


def g10_closed_form(
    q: SmoothFunction, s: int, alphas: AlphaTable | None = None, qf: QFamily | None = None
) -> SmoothFunction:
    """``g_10^(s)`` assembled from the composition sum.

    Experimental: the sum reproduces ``build_g_table(..., "split")``; for the
    anchored normalisation use :func:`compare_closed_form` to see where the
    two disagree.
    """
    if alphas is None:
        alphas = alpha_coefficients(s)
    if alphas.s != s:
        raise ValueError("alpha table built for a different s")
    if qf is None:
        qf = q_family(q, build_g_table(q, s, "split"))
    if len(qf) < s:
        raise ValueError(f"q family must cover indices 0..{s - 1}")
    acc = SmoothFunction.zero(q.backend)
    dq: dict[int, SmoothFunction] = {}
    for comp, a in alphas.final_terms():
        acc = acc + _word(q, qf, s, comp, dq) * a
    return acc / 2**s


@dataclass(frozen=True)
class ClosedFormReport:
    """Outcome of comparing the composition sum with a recursion table."""

    s: int
    normalization: str
    agrees: bool
    difference: SmoothFunction
    broken_identities: tuple[int, ...]
    differing_terms: tuple[tuple[int, ...], ...]

    def summary(self) -> str:
        if self.agrees:
            return f"s={self.s} ({self.normalization}): composition sum matches recursion"
        labels = ", ".join("alpha^(%d)_{%s}" % (len(c), ",".join(map(str, c))) for c in self.differing_terms)
        parts = []
        if 0 in self.broken_identities:
            parts.append("2^s g_10^(s) = sum_i q_i^(s-1-i) fails")
        rest = [i for i in self.broken_identities if i]
        if rest:
            parts.append(f"q_i' = q*sum_j q_j^(i-1-j) fails for i in {rest}")
        return f"s={self.s} ({self.normalization}): mismatch; {'; '.join(parts)}; affected terms: {labels}"


def compare_closed_form(table: GTable, s: int) -> ClosedFormReport:
    """Check ``g10_closed_form`` against ``table`` and locate any disagreement.

    Every expansion step rests on ``q_i' = q * sum_{j<i} q_j^(i-1-j)`` for
    the ``q_i`` of the table; the report names the indices where that
    identity breaks and the compositions whose expansion passed through them.
    """
    if s > table.m:
        raise ValueError("table does not reach order s")
    q = table.q
    qf = q_family(q, table)
    alphas = alpha_coefficients(s)
    closed = g10_closed_form(q, s, alphas, qf)
    diff = closed - table.g(1, 0, s)

    broken = []
    # level-1 identity: 2^s g_s = sum_i q_i^(s-1-i); index 0 flags it
    lvl1 = SmoothFunction.zero(q.backend)
    for i in range(s):
        lvl1 = lvl1 + qf[i].derivative(s - 1 - i)
    if lvl1 != table.g(1, 0, s) * 2**s:
        broken.append(0)
    for i in range(1, s):
        rhs = SmoothFunction.zero(q.backend)
        for j in range(i):
            rhs = rhs + qf[j].derivative(i - 1 - j)
        if qf[i].derivative() != q * rhs:
            broken.append(i)
    differing = tuple(
        comp
        for (_, _, comp), _a in sorted(alphas.entries.items())
        if (comp[-1] in broken and _order(s, comp) > 0) or (0 in broken and len(comp) == 1)
    )
    agrees = diff.is_zero() if q.backend.exact else diff.sup_norm() <= 1e-9 * (1 + closed.sup_norm())
    return ClosedFormReport(s, table.normalization, agrees, diff, tuple(broken), differing)


# -- evaluation --------------------------------------------------------------


def eval_weighted_series(g: GTable, i: int, nu: int, x: float, lam: complex) -> complex:
    """``sum_s lambda^-s g_{i,nu}^(s)(x)`` (the bracket without prefactors)."""
    g = g.numeric
    acc = 0j
    inv = 1.0 / complex(lam)
    p = 1.0 + 0j
    for s in range(g.m + 1):
        acc += p * g.g(i, nu, s)(x)
        p *= inv
    return acc


def eval_asymptotic_solution(g: GTable, i: int, nu: int, x: float, lam: complex) -> complex:
    """Truncated value of ``d^nu y_i / dx^nu`` at ``x``; remainder dropped."""
    lam = complex(lam)
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    sigma = branch_sign(i)
    return lam**nu * cmath.exp(sigma * lam * float(x)) * eval_weighted_series(g, i, nu, x, lam)
