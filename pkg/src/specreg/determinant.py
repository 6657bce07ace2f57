"""Expansion coefficients of the characteristic determinant.

With the branch expansions plugged into the boundary forms

    U_1(y) = a11 y'(0) + a10 y(0) + b11 y'(1) + b10 y(1)
    U_2(y) = a20 y(0) + b20 y(1)

the determinant splits as ``delta_{-1}(l) e^{-l} + delta_0(l) + delta_1(l) e^{l}``
with ``delta_k(l) = sum_i l^{1-i} delta_k^{(1-i)}``.  ``delta_table`` builds the
constants from endpoint values of a :class:`GTable`; ``delta_closed_forms``
evaluates the low-order closed forms straight from ``q``.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field, fields, replace
from typing import Any

from .asymptotics import GTable
from .funspace import SmoothFunction
from .scalars import RATIONAL, Backend, magnitude

__all__ = [
    "BoundaryData",
    "DeltaTable",
    "ConditionError",
    "delta_table",
    "delta_closed_forms",
    "reduced_delta",
    "collapsed_delta",
    "asymptotic_Delta",
]

COEFF_NAMES = ("a11", "a10", "b11", "b10", "a20", "b20", "a21", "b21")


class ConditionError(ValueError):
    """A precondition on the boundary coefficients does not hold."""


@dataclass(frozen=True)
class BoundaryData:
    """Coefficients of the two boundary forms.

    ``a*`` multiply values at 0, ``b*`` values at 1; the second digit is the
    derivative order.  ``a21``/``b21`` are only nonzero before reduction.
    """

    a11: Any = 0
    a10: Any = 0
    b11: Any = 0
    b10: Any = 0
    a20: Any = 0
    b20: Any = 0
    a21: Any = 0
    b21: Any = 0
    backend: Backend = RATIONAL

    def __post_init__(self) -> None:
        for name in COEFF_NAMES:
            object.__setattr__(self, name, self.backend.coerce(getattr(self, name)))

    def zero(self, v: Any, scale: float = 0.0) -> bool:
        return self.backend.is_zero(v, scale)

    def _mag(self, *vals: Any) -> float:
        return max((magnitude(self.backend, v) for v in vals), default=0.0)

    @property
    def is_reduced(self) -> bool:
        return self.zero(self.a21, self._mag(self.a11, self.b11)) and self.zero(
            self.b21, self._mag(self.a11, self.b11)
        )

    # the two combinations that drive the whole classification
    @property
    def leading_sum(self) -> Any:
        """``a11 b20 + b11 a20``; vanishes for non-regular reduced forms."""
        return self.a11 * self.b20 + self.b11 * self.a20

    @property
    def order_zero_minor(self) -> Any:
        """``a10 b20 - b10 a20``."""
        return self.a10 * self.b20 - self.b10 * self.a20

    @property
    def tail_factor(self) -> Any:
        """``a20 b11``, the common factor of every higher coefficient."""
        return self.a20 * self.b11

    def sum_is_zero(self) -> bool:
        return self.zero(self.leading_sum, self._mag(self.a11 * self.b20, self.b11 * self.a20))

    def minor_is_zero(self) -> bool:
        return self.zero(self.order_zero_minor, self._mag(self.a10 * self.b20, self.b10 * self.a20))

    def tail_conditions(self) -> bool:
        return self.sum_is_zero() and self.minor_is_zero()

    def check_normal_form(self) -> None:
        """Reduced shape with ``|a11|+|b11| > 0`` and ``|a20|+|b20| > 0``."""
        if not self.is_reduced:
            raise ConditionError("boundary data not in reduced form (a21 = b21 = 0 required)")
        if self.zero(self.a11) and self.zero(self.b11):
            raise ConditionError("|a11| + |b11| = 0")
        if self.zero(self.a20) and self.zero(self.b20):
            raise ConditionError("|a20| + |b20| = 0")

    def scaled(self, c1: Any = 1, c2: Any = 1) -> "BoundaryData":
        """Multiply form U_1 by ``c1`` and U_2 by ``c2``."""
        c1, c2 = self.backend.coerce(c1), self.backend.coerce(c2)
        return replace(
            self,
            a11=self.a11 * c1, a10=self.a10 * c1, b11=self.b11 * c1, b10=self.b10 * c1,
            a20=self.a20 * c2, b20=self.b20 * c2, a21=self.a21 * c2, b21=self.b21 * c2,
        )

    def with_backend(self, backend: Backend) -> "BoundaryData":
        return BoundaryData(**{n: getattr(self, n) for n in COEFF_NAMES}, backend=backend)

    def as_dict(self) -> dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "backend"}


@dataclass(frozen=True)
class DeltaTable:
    """``delta_k^{(1-i)}`` for ``k in {-1, 0, 1}``, ``i = 0..m``; keyed by ``(k, i)``."""

    m: int
    entries: dict[tuple[int, int], Any]
    backend: Backend = RATIONAL
    # float backend only: summed magnitudes of the contributing products
    scales: dict[tuple[int, int], float] = field(default_factory=dict)

    def delta(self, k: int, power: int) -> Any:
        """Coefficient of ``lambda^power`` in ``delta_k``."""
        return self.entries[(k, 1 - power)]

    def __getitem__(self, key: tuple[int, int]) -> Any:
        return self.entries[key]

    def series(self, k: int) -> list[Any]:
        return [self.entries[(k, i)] for i in range(self.m + 1)]


def _endpoint_values(g: GTable) -> dict[tuple[int, int, int, int], Any]:
    return {(i, nu, s, x): g.g(i, nu, s)(x) for (i, nu, s) in g.entries for x in (0, 1)}


def delta_table(bc: BoundaryData, g: GTable, m: int | None = None) -> DeltaTable:
    bc.check_normal_form()
    m = g.m if m is None else m
    if m > g.m:
        raise ValueError(f"g table only reaches order {g.m}")
    v = _endpoint_values(g)
    gv = lambda i, nu, s, x: v[(i, nu, s, x)]  # noqa: E731
    a11, a10, b11, b10, a20, b20 = bc.a11, bc.a10, bc.b11, bc.b10, bc.a20, bc.b20
    minor = a20 * b10 - b20 * a10
    zero = bc.backend.zero
    out: dict[tuple[int, int], Any] = {}
    scales: dict[tuple[int, int], float] = {}
    for i in range(m + 1):
        dm = dz = dp = zero
        for j in range(i + 1):
            dm += a20 * b11 * gv(2, 0, j, 0) * gv(1, 1, i - j, 1) - b20 * a11 * gv(2, 1, j, 0) * gv(1, 0, i - j, 1)
            dz += a20 * a11 * (gv(2, 0, j, 0) * gv(1, 1, i - j, 0) - gv(1, 0, j, 0) * gv(2, 1, i - j, 0))
            dz += b20 * b11 * (gv(2, 0, j, 1) * gv(1, 1, i - j, 1) - gv(1, 0, j, 1) * gv(2, 1, i - j, 1))
            dp += b20 * a11 * gv(1, 1, j, 0) * gv(2, 0, i - j, 1) - a20 * b11 * gv(1, 0, j, 0) * gv(2, 1, i - j, 1)
        for j in range(i):
            dm += minor * gv(2, 0, j, 0) * gv(1, 0, i - j - 1, 1)
            dp -= minor * gv(1, 0, j, 0) * gv(2, 0, i - j - 1, 1)
        out[(-1, i)] = dm
        out[(0, i)] = dz
        out[(1, i)] = dp
        if not bc.backend.exact:
            for k in (-1, 0, 1):
                scales[(k, i)] = _term_scale(bc, v, k, i)
    return DeltaTable(m, out, bc.backend, scales)


def _term_scale(bc: BoundaryData, v: dict, k: int, i: int) -> float:
    """Sum of |products| entering ``delta_k^{(1-i)}``; the float zero test is relative to it."""
    mag = abs
    c = max(mag(bc.a11), mag(bc.b11), mag(bc.a10), mag(bc.b10)) * max(mag(bc.a20), mag(bc.b20))
    tot = 0.0
    for j in range(i + 1):
        for a in (0, 1):
            for b in (0, 1):
                for x in (0, 1):
                    for y in (0, 1):
                        tot += mag(v[(1, a, j, x)]) * mag(v[(2, b, i - j, y)])
    return c * tot


def _require_tail(bc: BoundaryData) -> None:
    if not bc.tail_conditions():
        which = "a20 b11 + b20 a11 = 0" if not bc.sum_is_zero() else "a10 b20 - b10 a20 = 0"
        raise ConditionError(f"tail condition fails: {which} does not hold")
    if bc.zero(bc.tail_factor):
        raise ConditionError("a20 b11 = 0: the problem degenerates to a Cauchy problem")


def delta_closed_forms(
    bc: BoundaryData, q: SmoothFunction, normalization: str = "anchored", strict: bool = True
) -> dict[int, Any]:
    """Closed forms keyed by the power of lambda: 1, 0, and (when the leading sum and minor vanish) -1, -2, -3.

    The powers 1 and 0 always apply.  The lower three need ``a20 b11 != 0``
    and a vanishing leading sum and minor; with ``strict=False`` they are omitted
    instead of raising.  The ``-3`` entry depends on the branch
    normalisation through its last term.
    """
    out: dict[int, Any] = {}
    intq = q.antiderivative0()(1)
    out[1] = -(bc.tail_factor + bc.b20 * bc.a11)
    out[0] = -(bc.tail_factor + bc.b20 * bc.a11) * intq / 2 - bc.order_zero_minor
    try:
        _require_tail(bc)
    except ConditionError:
        if strict:
            raise
        return out
    c = bc.tail_factor
    q0, q1 = q(0), q(1)
    dq, d2q = q.derivative(), q.derivative(2)
    jump = q1 - q0
    out[-1] = c * jump / 2
    out[-2] = c * ((dq(1) + dq(0)) + jump * intq) / 4
    # int_0^1 q g_10^(1) with g_10^(1) = (1/2) int_0^x q
    int_qg1 = (q * q.antiderivative0()).antiderivative0()(1) / 2
    if normalization == "split":
        last = 2 * (q1 * q1 - q0 * q0)
    elif normalization == "anchored":
        last = 2 * q1 * jump
    else:
        raise ValueError(f"no closed form for normalization {normalization!r}")
    out[-3] = c * ((d2q(1) - d2q(0)) + (dq(1) + dq(0)) * intq + 2 * jump * int_qg1 + last) / 8
    return out


def reduced_delta(bc: BoundaryData, g: GTable, i: int) -> Any:
    """``delta_{-1}^{(1-i)}`` from the simplified sum valid when the leading sum and minor vanish."""
    if i < 2:
        raise ValueError("the reduced form applies for i >= 2")
    if i > g.m:
        raise ValueError(f"g table only reaches order {g.m}")
    bc.check_normal_form()
    _require_tail(bc)
    acc = bc.backend.zero
    for j in range(i + 1):
        term = g.g(1, 0, j)(0) * g.g(1, 1, i - j)(1) - g.g(1, 1, j)(0) * g.g(1, 0, i - j)(1)
        acc += term if j % 2 == 0 else -term
    return bc.tail_factor * acc


def collapsed_delta(bc: BoundaryData, q: SmoothFunction, i: int) -> Any:
    """``2^{1-i} a20 b11 [q^(i-2)(1) + (-1)^{i+1} q^(i-2)(0)]``.

    Equals ``delta_{-1}^{(1-i)}`` when the leading sum and minor vanish and the endpoint symmetry
    ``q^(k)(0) = (-1)^k q^(k)(1)`` holds for ``k <= i-3``.
    """
    if i < 2:
        raise ValueError("i must be >= 2")
    d = q.derivative(i - 2)
    sign = 1 if (i + 1) % 2 == 0 else -1
    return bc.tail_factor * (d(1) + sign * d(0)) / 2 ** (i - 1)


def asymptotic_Delta(dt: DeltaTable, lam: complex, weighted: bool = False):
    """Truncated ``Delta(lambda)``; remainder terms are dropped.

    With ``weighted=True`` the triple ``(delta_{-1}, delta_0, delta_1)`` at
    ``lambda`` is returned instead of the exponential combination.
    """
    lam = complex(lam)
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    parts = []
    for k in (-1, 0, 1):
        acc = 0j
        for i in range(dt.m + 1):
            acc += lam ** (1 - i) * dt.backend.to_complex(dt.entries[(k, i)])
        parts.append(acc)
    if weighted:
        return tuple(parts)
    return parts[0] * cmath.exp(-lam) + parts[1] + parts[2] * cmath.exp(lam)
