"""JSON problem files and canonical report serialization.

Complex scalars are ``[re, im]`` pairs.  Exact values are written as
``"p/q"`` strings, floats as JSON numbers.  All documents are dumped with
sorted keys so identical content gives identical bytes.
"""
from __future__ import annotations

import json
from typing import Any

from .asymptotics import GTable
from .classifier import Evidence, ProblemSpec, RegularityVerdict
from .determinant import COEFF_NAMES, BoundaryData, DeltaTable
from .funspace import SmoothFunction
from .scalars import Backend, format_rational, get_backend

__all__ = [
    "ProblemFileError",
    "canonical_dumps",
    "parse_problem",
    "load_problem",
    "problem_to_json",
    "encode_scalar",
    "decode_scalar",
    "encode_function",
    "decode_function",
    "verdict_to_json",
    "expansion_to_json",
    "expansion_from_json",
]


class ProblemFileError(ValueError):
    """Malformed or inconsistent problem description."""


def canonical_dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def encode_scalar(backend: Backend, v: Any) -> list:
    if backend.exact:
        re, im = backend.parts(v)
        return [format_rational(re), format_rational(im)]
    z = complex(v)
    return [z.real + 0.0, z.imag + 0.0]


def decode_scalar(backend: Backend, raw: Any) -> Any:
    try:
        if isinstance(raw, list):
            if len(raw) != 2:
                raise ProblemFileError(f"complex value must be [re, im], got {raw!r}")
            return backend.coerce((raw[0], raw[1]))
        return backend.coerce(raw)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, ProblemFileError):
            raise
        raise ProblemFileError(f"bad scalar {raw!r} for the {backend.name} backend: {exc}") from exc


def encode_function(f: SmoothFunction) -> dict:
    bk = f.backend
    if f.kind == "poly":
        return {"kind": "poly", "coeffs": [encode_scalar(bk, c) for c in f.coeffs]}
    return {
        "kind": "exp",
        "terms": {str(k): [encode_scalar(bk, c) for c in p] for k, p in f.terms.items()},
    }


def decode_function(backend: Backend, raw: dict) -> SmoothFunction:
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ProblemFileError("q must be an object with a 'kind' field")
    kind = raw["kind"]
    try:
        if kind == "poly":
            return SmoothFunction.poly([decode_scalar(backend, c) for c in raw.get("coeffs", [])], backend)
        if kind == "trig":
            if backend.exact:
                raise ProblemFileError("trigonometric q requires the float backend")
            cos = [(int(k), decode_scalar(backend, [re, im])) for k, re, im in raw.get("cos", [])]
            sin = [(int(k), decode_scalar(backend, [re, im])) for k, re, im in raw.get("sin", [])]
            return SmoothFunction.trig(decode_scalar(backend, raw.get("const", 0)), cos, sin, backend)
        if kind == "exp":
            return SmoothFunction(
                {int(k): tuple(decode_scalar(backend, c) for c in p) for k, p in raw["terms"].items()},
                backend,
            )
    except ProblemFileError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ProblemFileError(f"bad q description: {exc}") from exc
    raise ProblemFileError(f"unknown q kind {kind!r} (expected 'poly' or 'trig')")


def parse_problem(doc: Any, backend_override: str | None = None) -> ProblemSpec:
    if not isinstance(doc, dict):
        raise ProblemFileError("problem file must hold a JSON object")
    for key in ("boundary", "q"):
        if key not in doc:
            raise ProblemFileError(f"missing required field {key!r}")
    backend_name = backend_override or doc.get("backend", "rational")
    tol = doc.get("tolerance", 1e-10)
    try:
        bk = get_backend(backend_name, float(tol))
    except (TypeError, ValueError) as exc:
        raise ProblemFileError(str(exc)) from exc
    bnd = doc["boundary"]
    if not isinstance(bnd, dict):
        raise ProblemFileError("'boundary' must be an object")
    unknown = set(bnd) - set(COEFF_NAMES)
    if unknown:
        raise ProblemFileError(f"unknown boundary coefficients {sorted(unknown)}")
    bc = BoundaryData(**{k: decode_scalar(bk, v) for k, v in bnd.items()}, backend=bk)
    q = decode_function(bk, doc["q"])
    cap = doc.get("order_cap", 10)
    if not isinstance(cap, int) or cap < 0:
        raise ProblemFileError("order_cap must be a non-negative integer")
    return ProblemSpec(bc, q, cap, float(tol), backend_name)


def load_problem(path: str, backend_override: str | None = None) -> ProblemSpec:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_problem(doc, backend_override)


def problem_to_json(p: ProblemSpec) -> dict:
    bk = p.bc.backend
    return {
        "backend": p.backend,
        "boundary": {n: encode_scalar(bk, getattr(p.bc, n)) for n in COEFF_NAMES},
        "order_cap": p.m_cap,
        "q": encode_function(p.q),
        "tolerance": p.tolerance,
    }


def _encode_value(bk: Backend, v: Any) -> Any:
    if v is None or isinstance(v, (bool, int, float, str)):
        return v
    if isinstance(v, tuple):
        return [_encode_value(bk, x) for x in v]
    return encode_scalar(bk, v)


def verdict_to_json(v: RegularityVerdict, backend: Backend, evidence: bool = False) -> dict:
    doc: dict[str, Any] = {"class": v.cls, "order": v.order, "route": v.route}
    if v.notes:
        doc["notes"] = list(v.notes)
    if evidence:
        doc["evidence"] = [
            {"label": e.label, "value": _encode_value(backend, e.value), "satisfied": e.satisfied}
            for e in v.evidence
        ]
    return doc


def expansion_to_json(g: GTable, dt: DeltaTable | None, order: int | None = None) -> dict:
    m = g.m if order is None else order
    gdoc = {
        f"g_{i}{nu}^({s})": encode_function(g.g(i, nu, s))
        for (i, nu, s) in g.keys()
        if s <= m
    }
    doc: dict[str, Any] = {
        "backend": g.backend.name,
        "normalization": g.normalization,
        "order": m,
        "q": encode_function(g.q),
        "g": gdoc,
    }
    if dt is not None:
        doc["delta"] = {
            str(k): [encode_scalar(dt.backend, dt[(k, i)]) for i in range(min(m, dt.m) + 1)]
            for k in (-1, 0, 1)
        }
    return doc


def expansion_from_json(doc: dict) -> tuple[GTable, DeltaTable | None]:
    bk = get_backend(doc["backend"])
    q = decode_function(bk, doc["q"])
    entries = {}
    for key, raw in doc["g"].items():
        # g_{i}{nu}^({s})
        i, nu = int(key[2]), int(key[3])
        s = int(key[key.index("(") + 1: key.index(")")])
        entries[(i, nu, s)] = decode_function(bk, raw)
    g = GTable(doc["order"], q, entries, doc["normalization"])
    dt = None
    if "delta" in doc:
        d = {(int(k), i): decode_scalar(bk, v) for k, vals in doc["delta"].items() for i, v in enumerate(vals)}
        dt = DeltaTable(doc["order"], d, bk)
    return g, dt


def evidence_from_json(raw: list[dict]) -> list[Evidence]:
    return [Evidence(e["label"], e["value"], e["satisfied"]) for e in raw]
