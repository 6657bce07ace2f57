"""Regularity class of ``y'' + q y = lambda^2 y`` with two-point boundary forms.

Two routes reach the verdict:

* the endpoint criterion on ``q``: in the non-regular reduced case of order
  at least two, the order is ``k + 2`` where ``k`` is the first index with
  ``q^(k)(0) != (-1)^k q^(k)(1)``;
* the determinant route: the order is the index ``i`` of the first
  nonvanishing ``delta_{-1}^{(1-i)}``.

``cross_validate`` runs both and insists they agree.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any

from .asymptotics import build_g_table
from .determinant import BoundaryData, ConditionError, delta_table
from .funspace import SmoothFunction
from .scalars import Backend, get_backend, magnitude

__all__ = [
    "ProblemSpec",
    "Evidence",
    "RegularityVerdict",
    "Precheck",
    "DegenerateProblemError",
    "DiscrepancyError",
    "birkhoff_precheck",
    "classify_by_theorem",
    "classify_by_delta",
    "cross_validate",
]

BIRKHOFF = "BirkhoffRegular"
ALMOST = "AlmostRegular"
NOT_NORMAL = "NotNormal"
UNDETERMINED = "UndeterminedBeyondCap"

# Reading of the order convention, attached to every delta-route verdict.
CHAIN_NOTE = (
    "order m <=> delta_{-1}^{(1)} = ... = delta_{-1}^{(2-m)} = 0 and delta_{-1}^{(1-m)} != 0; "
    "endpoint criterion: symmetry holds for k <= m-3 and fails at k = m-2"
)


class DegenerateProblemError(ValueError):
    """Boundary forms that do not define a two-point problem (rank < 2 or no derivative in either form)."""


class DiscrepancyError(RuntimeError):
    """The two classification routes disagree."""


@dataclass(frozen=True)
class ProblemSpec:
    bc: BoundaryData
    q: SmoothFunction
    m_cap: int = 10
    tolerance: float = 1e-10
    backend: str = "rational"

    def __post_init__(self) -> None:
        if self.m_cap < 0:
            raise ValueError("m_cap must be >= 0")
        if self.backend == "float" and not self.tolerance > 0:
            raise ValueError("tolerance must be positive for the float backend")

    @property
    def scalar_backend(self) -> Backend:
        return get_backend(self.backend, self.tolerance)

    def coerced(self) -> "ProblemSpec":
        """Copy whose boundary data and ``q`` live on the declared backend."""
        bk = self.scalar_backend
        bc = self.bc if self.bc.backend == bk else self.bc.with_backend(bk)
        q = self.q
        if q.backend.exact != bk.exact or (not bk.exact and q.backend != bk):
            q = q.to_float(bk) if not bk.exact else SmoothFunction(q.terms, bk)
        return replace(self, bc=bc, q=q)

    def with_backend(self, backend: str) -> "ProblemSpec":
        return replace(self, backend=backend).coerced()


@dataclass(frozen=True)
class Evidence:
    label: str
    value: Any
    satisfied: bool


@dataclass
class RegularityVerdict:
    cls: str
    order: int | None = None
    route: str = "theorem"
    evidence: list[Evidence] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def key(self) -> tuple[str, int | None]:
        return self.cls, self.order

    def __str__(self) -> str:
        if self.cls == ALMOST:
            return f"{ALMOST}({self.order})"
        return self.cls


@dataclass(frozen=True)
class Precheck:
    kind: str  # "regular" | "reduced" | "degenerate"
    bc: BoundaryData | None
    reason: str


def _rank2(bc: BoundaryData) -> bool:
    rows = [(bc.a10, bc.a11, bc.b10, bc.b11), (bc.a20, bc.a21, bc.b20, bc.b21)]
    for j in range(4):
        for k in range(j + 1, 4):
            minor = rows[0][j] * rows[1][k] - rows[0][k] * rows[1][j]
            scale = max(magnitude(bc.backend, rows[0][j] * rows[1][k]), magnitude(bc.backend, rows[0][k] * rows[1][j]))
            if not bc.zero(minor, scale):
                return True
    return False


def birkhoff_precheck(bc: BoundaryData) -> Precheck:
    """Sort general two-form data into regular / reduced non-regular / degenerate."""
    if not _rank2(bc):
        return Precheck("degenerate", None, "boundary coefficient matrix has rank < 2")
    cross = bc.a11 * bc.b21 - bc.b11 * bc.a21
    if not bc.zero(cross, max(magnitude(bc.backend, bc.a11 * bc.b21), magnitude(bc.backend, bc.b11 * bc.a21))):
        return Precheck("regular", None, "a11 b21 - b11 a21 != 0")

    red = bc
    if not bc.is_reduced:
        if bc.zero(bc.a11) and bc.zero(bc.b11):
            # only U_2 carries derivatives: swap the forms
            red = BoundaryData(
                a11=bc.a21, a10=bc.a20, b11=bc.b21, b10=bc.b20,
                a20=bc.a10, b20=bc.b10, backend=bc.backend,
            )
        else:
            c = bc.a21 / bc.a11 if not bc.zero(bc.a11) else bc.b21 / bc.b11
            red = BoundaryData(
                a11=bc.a11, a10=bc.a10, b11=bc.b11, b10=bc.b10,
                a20=bc.a20 - c * bc.a10, b20=bc.b20 - c * bc.b10, backend=bc.backend,
            )
    if not red.sum_is_zero():
        return Precheck("regular", red, "a11 b20 + b11 a20 != 0")
    if red.zero(red.a11) and red.zero(red.b11):
        if not red.minor_is_zero():
            return Precheck("regular", None, "a11 = b11 = 0 and a10 b20 - b10 a20 != 0")
        return Precheck("degenerate", None, "|a11| + |b11| = 0")
    if red.zero(red.a20) and red.zero(red.b20):
        return Precheck("degenerate", None, "|a20| + |b20| = 0")
    return Precheck("reduced", red, "a11 b20 + b11 a20 = 0 (non-regular reduced form)")


def _start(p: ProblemSpec, route: str) -> tuple[ProblemSpec, Precheck, RegularityVerdict | None]:
    p = p.coerced()
    pc = birkhoff_precheck(p.bc)
    if pc.kind == "degenerate":
        raise DegenerateProblemError(pc.reason)
    if pc.kind == "regular" and pc.bc is None:
        v = RegularityVerdict(BIRKHOFF, 0, route, [Evidence(pc.reason, None, True)])
        return p, pc, v
    return p, pc, None


def _symmetry_checks(q: SmoothFunction, upto: int):
    """Yield ``(k, lhs, rhs, holds)`` for ``q^(k)(0) = (-1)^k q^(k)(1)``."""
    bk = q.backend
    d = q
    for k in range(upto + 1):
        lhs, rhs = d(0), d(1) * (-1) ** k
        diff = lhs - rhs
        holds = bk.is_zero(diff, max(magnitude(bk, lhs), magnitude(bk, rhs)))
        yield k, lhs, rhs, holds
        d = d.derivative()


def classify_by_theorem(p: ProblemSpec) -> RegularityVerdict:
    p, pc, early = _start(p, "theorem")
    if early is not None:
        return early
    bc = pc.bc
    ev = [Evidence("a11 b20 + b11 a20 = 0", bc.leading_sum, bc.sum_is_zero())]
    if not bc.sum_is_zero():
        return RegularityVerdict(BIRKHOFF, 0, "theorem", ev)
    ev.append(Evidence("a10 b20 - b10 a20 = 0", bc.order_zero_minor, bc.minor_is_zero()))
    if not bc.minor_is_zero():
        if p.m_cap < 1:
            return RegularityVerdict(UNDETERMINED, None, "theorem", ev, ["checked through order 0"])
        return RegularityVerdict(ALMOST, 1, "theorem", ev)
    nz = not bc.zero(bc.tail_factor)
    ev.append(Evidence("a20 b11 != 0", bc.tail_factor, nz))
    if not nz:
        return RegularityVerdict(NOT_NORMAL, None, "theorem", ev)
    for k, lhs, rhs, holds in _symmetry_checks(p.q, p.m_cap - 2):
        ev.append(Evidence(f"q^({k})(0) = (-1)^{k} q^({k})(1)", (lhs, rhs), holds))
        if not holds:
            return RegularityVerdict(ALMOST, k + 2, "theorem", ev, [CHAIN_NOTE])
    return RegularityVerdict(UNDETERMINED, None, "theorem", ev, [CHAIN_NOTE, f"checked through order {p.m_cap}"])


def classify_by_delta(p: ProblemSpec) -> RegularityVerdict:
    p, pc, early = _start(p, "delta")
    if early is not None:
        return early
    bc = pc.bc
    ev: list[Evidence] = []
    if bc.tail_conditions() and bc.zero(bc.tail_factor):
        ev.append(Evidence("sum = minor = 0 with a20 b11 = 0", bc.tail_factor, False))
        return RegularityVerdict(NOT_NORMAL, None, "delta", ev)
    try:
        g = build_g_table(p.q, p.m_cap)
        dt = delta_table(bc, g)
    except ConditionError as exc:  # pragma: no cover - precheck guards this
        raise DegenerateProblemError(str(exc)) from exc
    for i in range(p.m_cap + 1):
        val = dt[(-1, i)]
        zero = bc.backend.is_zero(val, dt.scales.get((-1, i), 0.0))
        ev.append(Evidence(f"delta_(-1)^({1 - i}) = 0", val, zero))
        if not zero:
            if i == 0:
                return RegularityVerdict(BIRKHOFF, 0, "delta", ev)
            return RegularityVerdict(ALMOST, i, "delta", ev, [CHAIN_NOTE])
    return RegularityVerdict(UNDETERMINED, None, "delta", ev, [CHAIN_NOTE, f"checked through order {p.m_cap}"])


def cross_validate(p: ProblemSpec) -> RegularityVerdict:
    a = classify_by_theorem(p)
    b = classify_by_delta(p)
    if a.key() != b.key():
        raise DiscrepancyError(_first_divergence(a, b))
    notes = list(dict.fromkeys(a.notes + b.notes))
    return RegularityVerdict(a.cls, a.order, "both-agree", a.evidence + b.evidence, notes)


def _first_divergence(a: RegularityVerdict, b: RegularityVerdict) -> str:
    delta_nonzero = [e.label for e in b.evidence if e.label.startswith("delta") and not e.satisfied]
    failed = [e.label for e in a.evidence if not e.satisfied]
    return (
        f"theorem route says {a}, delta route says {b}; "
        f"first failing theorem condition: {failed[:1] or 'none'}; "
        f"first nonzero delta: {delta_nonzero[:1] or 'none'}"
    )
