"""Exact algebra of smooth functions on [0, 1].

A :class:`SmoothFunction` is a finite sum ``sum_k P_k(x) exp(2*pi*i*k*x)``
with polynomial amplitudes ``P_k``.  Plain polynomials are the ``k = 0``
slice; trigonometric polynomials enter through ``cos``/``sin`` amplitudes and
are stored in exponential form.  The class is closed under differentiation,
the primitive vanishing at 0, and products, which is exactly what the
asymptotic recursions need.

Nonzero harmonics carry factors of ``pi`` and are therefore only allowed on
the float backend.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .scalars import RATIONAL, Backend

__all__ = [
    "SmoothFunction",
    "RepresentationError",
    "DomainError",
    "MAX_DEGREE",
    "derivative",
    "antiderivative0",
    "product",
    "evaluate",
]

#: Largest polynomial degree (and harmonic index) a function may carry.
MAX_DEGREE = 512


class RepresentationError(ValueError):
    """The requested function leaves the supported representation."""


class DomainError(ValueError):
    """Evaluation outside [0, 1]."""


def _trim(backend: Backend, coeffs: Sequence[Any]) -> tuple:
    c = list(coeffs)
    while c and backend.exact and not c[-1]:
        c.pop()
    while c and not backend.exact and c[-1] == 0:
        c.pop()
    return tuple(c)


def _padd(a: tuple, b: tuple) -> list:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for j, v in enumerate(b):
        out[j] = out[j] + v
    return out


def _pmul(a: tuple, b: tuple, zero: Any) -> list:
    if not a or not b:
        return []
    out = [zero] * (len(a) + len(b) - 1)
    for i, u in enumerate(a):
        if not u:
            continue
        for j, v in enumerate(b):
            out[i + j] = out[i + j] + u * v
    return out


def _pderiv(a: tuple) -> list:
    return [a[j] * j for j in range(1, len(a))]


def _phorner(a: tuple, x: Any, zero: Any) -> Any:
    acc = zero
    for c in reversed(a):
        acc = acc * x + c
    return acc


@dataclass(frozen=True, eq=False)
class SmoothFunction:
    """Immutable quasi-polynomial ``sum_k P_k(x) e^{2 pi i k x}``.

    ``terms`` maps harmonic index ``k`` to the ascending monomial
    coefficients of ``P_k``.  Construct through the classmethods rather than
    directly.
    """

    terms: Mapping[int, tuple]
    backend: Backend = field(default=RATIONAL)

    def __post_init__(self) -> None:
        clean = {}
        for k, coeffs in self.terms.items():
            c = _trim(self.backend, [self.backend.coerce(v) for v in coeffs])
            if not c:
                continue
            if k != 0 and self.backend.exact:
                raise RepresentationError(
                    "trigonometric terms need the float backend (pi is irrational)"
                )
            if len(c) - 1 > MAX_DEGREE or abs(k) > MAX_DEGREE:
                raise RepresentationError(
                    f"degree {len(c) - 1} / harmonic {k} exceeds cap {MAX_DEGREE}"
                )
            clean[int(k)] = c
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    # construction -------------------------------------------------------

    @classmethod
    def poly(cls, coeffs: Iterable[Any], backend: Backend = RATIONAL) -> "SmoothFunction":
        return cls({0: tuple(coeffs)}, backend)

    @classmethod
    def constant(cls, c: Any, backend: Backend = RATIONAL) -> "SmoothFunction":
        return cls({0: (c,)}, backend)

    @classmethod
    def zero(cls, backend: Backend = RATIONAL) -> "SmoothFunction":
        return cls({}, backend)

    @classmethod
    def identity(cls, backend: Backend = RATIONAL) -> "SmoothFunction":
        return cls({0: (0, 1)}, backend)

    @classmethod
    def trig(
        cls,
        const: Any = 0,
        cos: Iterable[tuple[int, Any]] = (),
        sin: Iterable[tuple[int, Any]] = (),
        backend: Backend | None = None,
    ) -> "SmoothFunction":
        """``const + sum a_k cos(2 pi k x) + sum b_k sin(2 pi k x)``."""
        from .scalars import FloatBackend

        backend = backend or FloatBackend()
        acc: dict[int, Any] = {0: backend.coerce(const)}
        for k, a in cos:
            a = backend.coerce(a)
            if k == 0:
                acc[0] = acc[0] + a
                continue
            acc[k] = acc.get(k, 0) + a / 2
            acc[-k] = acc.get(-k, 0) + a / 2
        for k, b in sin:
            b = backend.coerce(b)
            if k == 0:
                continue
            # sin t = (e^{it} - e^{-it}) / 2i
            acc[k] = acc.get(k, 0) + b / 2j
            acc[-k] = acc.get(-k, 0) - b / 2j
        return cls({k: (v,) for k, v in acc.items()}, backend)

    # inspection ----------------------------------------------------------

    @property
    def kind(self) -> str:
        return "poly" if set(self.terms) <= {0} else "trig"

    @property
    def coeffs(self) -> tuple:
        """Monomial coefficients of the harmonic-free part."""
        return self.terms.get(0, ())

    @property
    def degree(self) -> int:
        return max((len(c) - 1 for c in self.terms.values()), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SmoothFunction):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(tuple((k, c) for k, c in self.terms.items()))

    def __repr__(self) -> str:
        if self.kind == "poly":
            return f"SmoothFunction.poly({list(self.coeffs)!r})"
        return f"SmoothFunction({self.terms!r})"

    # arithmetic ----------------------------------------------------------

    def _lift(self, other: Any) -> "SmoothFunction":
        if isinstance(other, SmoothFunction):
            if other.backend.exact != self.backend.exact:
                raise RepresentationError("cannot mix rational and float functions")
            return other
        return SmoothFunction.constant(other, self.backend)

    def __add__(self, other: Any) -> "SmoothFunction":
        other = self._lift(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = tuple(_padd(out.get(k, ()), c))
        return SmoothFunction(out, self.backend)

    __radd__ = __add__

    def __neg__(self) -> "SmoothFunction":
        return SmoothFunction({k: tuple(-v for v in c) for k, c in self.terms.items()}, self.backend)

    def __sub__(self, other: Any) -> "SmoothFunction":
        return self + (-self._lift(other))

    def __rsub__(self, other: Any) -> "SmoothFunction":
        return self._lift(other) - self

    def scale(self, c: Any) -> "SmoothFunction":
        c = self.backend.coerce(c)
        return SmoothFunction({k: tuple(v * c for v in p) for k, p in self.terms.items()}, self.backend)

    def __mul__(self, other: Any) -> "SmoothFunction":
        if not isinstance(other, SmoothFunction):
            return self.scale(other)
        other = self._lift(other)
        zero = self.backend.zero
        out: dict[int, list] = {}
        for k1, p1 in self.terms.items():
            for k2, p2 in other.terms.items():
                prod = _pmul(p1, p2, zero)
                out[k1 + k2] = _padd(tuple(out.get(k1 + k2, ())), tuple(prod))
        return SmoothFunction({k: tuple(v) for k, v in out.items()}, self.backend)

    __rmul__ = __mul__

    def __truediv__(self, c: Any) -> "SmoothFunction":
        c = self.backend.coerce(c)
        return SmoothFunction({k: tuple(v / c for v in p) for k, p in self.terms.items()}, self.backend)

    # calculus ------------------------------------------------------------

    def derivative(self, n: int = 1) -> "SmoothFunction":
        f = self
        for _ in range(n):
            out = {}
            for k, p in f.terms.items():
                dp = _pderiv(p)
                if k != 0:
                    w = 2j * math.pi * k
                    dp = _padd(tuple(dp), tuple(v * w for v in p))
                out[k] = tuple(dp)
            f = SmoothFunction(out, f.backend)
        return f

    def antiderivative0(self) -> "SmoothFunction":
        """The primitive ``F`` with ``F(0) = 0``."""
        zero = self.backend.zero
        out: dict[int, list] = {}
        for k, p in self.terms.items():
            if k == 0:
                prim = [zero] + [v / (j + 1) for j, v in enumerate(p)]
            else:
                # A' + iwA = P  =>  A = sum_j (-1)^j P^(j) / (iw)^(j+1)
                iw = 2j * math.pi * k
                prim = []
                deriv = list(p)
                sign, den = 1.0, iw
                while deriv:
                    prim = _padd(tuple(prim), tuple(sign * v / den for v in deriv))
                    deriv = _pderiv(tuple(deriv))
                    sign, den = -sign, den * iw
            out[k] = prim
        f = SmoothFunction({k: tuple(v) for k, v in out.items()}, self.backend)
        at0 = f(0)
        if self.backend.exact and not at0 or (not self.backend.exact and at0 == 0):
            return f
        return f - at0

    # evaluation ----------------------------------------------------------

    def __call__(self, x: Any) -> Any:
        if self.backend.exact:
            x = self.backend.coerce(x)
            xr = self.backend.to_complex(x)
            if xr.imag != 0 or not 0 <= xr.real <= 1:
                raise DomainError(f"x = {x} lies outside [0, 1]")
            return _phorner(self.terms.get(0, ()), x, self.backend.zero)
        xf = float(x.real) if isinstance(x, complex) else float(x)
        if not 0.0 <= xf <= 1.0:
            raise DomainError(f"x = {x} lies outside [0, 1]")
        acc = 0j
        for k, p in self.terms.items():
            val = _phorner(p, xf, 0j)
            if k != 0 and xf not in (0.0, 1.0):
                val *= cmath.exp(2j * math.pi * k * xf)
            acc += val
        return acc

    def eval_array(self, xs: np.ndarray) -> np.ndarray:
        """Vectorised complex evaluation (float arithmetic on any backend)."""
        xs = np.asarray(xs, dtype=float)
        if xs.size and (xs.min() < 0.0 or xs.max() > 1.0):
            raise DomainError("grid leaves [0, 1]")
        out = np.zeros(xs.shape, dtype=complex)
        for k, p in self.terms.items():
            c = np.array([self.backend.to_complex(v) for v in p], dtype=complex)
            val = np.polyval(c[::-1], xs)
            if k != 0:
                val = val * np.exp(2j * np.pi * k * xs)
            out += val
        return out

    def to_float(self, backend: Backend | None = None) -> "SmoothFunction":
        from .scalars import FloatBackend

        backend = backend or FloatBackend()
        return SmoothFunction(
            {k: tuple(self.backend.to_complex(v) for v in p) for k, p in self.terms.items()},
            backend,
        )

    def sup_norm(self, samples: int = 257) -> float:
        return float(np.max(np.abs(self.eval_array(np.linspace(0.0, 1.0, samples)))))


def derivative(f: SmoothFunction, n: int = 1) -> SmoothFunction:
    return f.derivative(n)


def antiderivative0(f: SmoothFunction) -> SmoothFunction:
    return f.antiderivative0()


def product(f: SmoothFunction, g: SmoothFunction) -> SmoothFunction:
    return f * g


def evaluate(f: SmoothFunction, x: Any) -> Any:
    return f(x)
