"""Scalar backends: exact Gaussian rationals and complex doubles.

Every coefficient in the package lives in one of two fields.  The rational
backend uses sympy's ``QQ_I`` elements so identity checks are exact; the
float backend uses Python ``complex`` and decides zero-ness against a
relative tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral, Rational
from typing import Any

from sympy.polys.domains import QQ_I

__all__ = [
    "Backend",
    "RationalBackend",
    "FloatBackend",
    "RATIONAL",
    "get_backend",
    "format_rational",
    "magnitude",
]


def _to_fraction(v: Any) -> Fraction:
    if isinstance(v, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(v, (Integral, Rational)):
        return Fraction(int(v.numerator), int(v.denominator))
    if isinstance(v, str):
        return Fraction(v.strip())
    if isinstance(v, float):
        if not v.is_integer():
            raise ValueError(
                f"float {v!r} is not accepted by the rational backend; pass a 'p/q' string"
            )
        return Fraction(int(v))
    # gmpy2.mpq and friends expose numerator/denominator
    if hasattr(v, "numerator") and hasattr(v, "denominator"):
        return Fraction(int(v.numerator), int(v.denominator))
    raise TypeError(f"cannot interpret {v!r} as a rational number")


def format_rational(v: Any) -> str:
    """Canonical text form ``"p/q"`` (or ``"p"`` for integers)."""
    return str(_to_fraction(v))


class Backend:
    """Arithmetic contract shared by both scalar fields."""

    name: str = "abstract"
    exact: bool = False

    def coerce(self, v: Any) -> Any:
        raise NotImplementedError

    def is_zero(self, v: Any, scale: float = 0.0) -> bool:
        raise NotImplementedError

    def to_complex(self, v: Any) -> complex:
        raise NotImplementedError

    @property
    def zero(self) -> Any:
        return self.coerce(0)

    @property
    def one(self) -> Any:
        return self.coerce(1)


@dataclass(frozen=True)
class RationalBackend(Backend):
    name: str = "rational"
    exact: bool = True

    def coerce(self, v: Any) -> Any:
        if isinstance(v, type(QQ_I.zero)):
            return v
        if isinstance(v, complex):
            return QQ_I(_to_fraction(v.real), _to_fraction(v.imag))
        if isinstance(v, (tuple, list)):
            if len(v) != 2:
                raise ValueError(f"complex scalar must be a [re, im] pair, got {v!r}")
            return QQ_I(_to_fraction(v[0]), _to_fraction(v[1]))
        return QQ_I(_to_fraction(v), 0)

    def is_zero(self, v: Any, scale: float = 0.0) -> bool:
        return not v

    def to_complex(self, v: Any) -> complex:
        return complex(float(v.x), float(v.y))

    def parts(self, v: Any) -> tuple[Fraction, Fraction]:
        return _to_fraction(v.x), _to_fraction(v.y)


@dataclass(frozen=True)
class FloatBackend(Backend):
    """Complex doubles; ``is_zero`` is relative to the supplied magnitude."""

    tolerance: float = 1e-10
    name: str = "float"
    exact: bool = False

    def __post_init__(self) -> None:
        if not self.tolerance > 0:
            raise ValueError("float backend tolerance must be positive")

    def coerce(self, v: Any) -> complex:
        if isinstance(v, (tuple, list)):
            if len(v) != 2:
                raise ValueError(f"complex scalar must be a [re, im] pair, got {v!r}")
            return complex(float(_maybe_fraction(v[0])), float(_maybe_fraction(v[1])))
        if isinstance(v, type(QQ_I.zero)):
            return complex(float(v.x), float(v.y))
        if isinstance(v, str):
            return complex(float(Fraction(v)))
        return complex(v)

    def is_zero(self, v: Any, scale: float = 0.0) -> bool:
        return abs(v) <= self.tolerance * (1.0 + scale)

    def to_complex(self, v: Any) -> complex:
        return complex(v)


def _maybe_fraction(v: Any) -> Any:
    return Fraction(v) if isinstance(v, str) else v


RATIONAL = RationalBackend()


def get_backend(name: str, tolerance: float = 1e-10) -> Backend:
    if name == "rational":
        return RATIONAL
    if name == "float":
        return FloatBackend(tolerance)
    raise ValueError(f"unknown backend {name!r} (expected 'rational' or 'float')")


def magnitude(backend: Backend, v: Any) -> float:
    z = backend.to_complex(v)
    return math.hypot(z.real, z.imag)
