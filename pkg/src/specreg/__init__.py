"""Asymptotic expansions and regularity classification for ``y'' + q y = lambda^2 y``."""
from .asymptotics import GTable, build_g_table, compare_closed_form, g10_closed_form, alpha_coefficients
from .classifier import (
    DegenerateProblemError,
    DiscrepancyError,
    ProblemSpec,
    RegularityVerdict,
    classify_by_delta,
    classify_by_theorem,
    cross_validate,
)
from .determinant import BoundaryData, DeltaTable, delta_closed_forms, delta_table
from .funspace import SmoothFunction
from .scalars import RATIONAL, FloatBackend, RationalBackend, get_backend

__all__ = [
    "GTable",
    "build_g_table",
    "compare_closed_form",
    "g10_closed_form",
    "alpha_coefficients",
    "DegenerateProblemError",
    "DiscrepancyError",
    "ProblemSpec",
    "RegularityVerdict",
    "classify_by_delta",
    "classify_by_theorem",
    "cross_validate",
    "BoundaryData",
    "DeltaTable",
    "delta_closed_forms",
    "delta_table",
    "SmoothFunction",
    "RATIONAL",
    "FloatBackend",
    "RationalBackend",
    "get_backend",
]
