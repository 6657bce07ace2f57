"""``specreg`` command-line front end.

Exit status: 0 when a result was produced, 2 for degenerate or invalid input
(including usage errors), 1 for internal or solver failures.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .asymptotics import NORMALIZATIONS, build_g_table
from .classifier import (
    DegenerateProblemError,
    DiscrepancyError,
    birkhoff_precheck,
    classify_by_delta,
    classify_by_theorem,
    cross_validate,
)
from .determinant import ConditionError, delta_table
from .funspace import DomainError, RepresentationError
from .numerics import (
    IntegrationError,
    SpectrumWindow,
    default_radius,
    determinant_comparison,
    find_eigenvalues,
    remainder_probe,
)
from .serialize import (
    ProblemFileError,
    canonical_dumps,
    expansion_to_json,
    load_problem,
    verdict_to_json,
)

EXIT_OK, EXIT_INTERNAL, EXIT_INVALID = 0, 1, 2


class UsageError(ValueError):
    pass


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_classify(args: argparse.Namespace) -> int:
    p = load_problem(args.input, args.backend)
    if args.order_cap is not None:
        p = replace(p, m_cap=args.order_cap)
    route = {"theorem": classify_by_theorem, "delta": classify_by_delta, "both": cross_validate}[args.route]
    v = route(p)
    _emit(canonical_dumps(verdict_to_json(v, p.scalar_backend, evidence=args.evidence)), args.output)
    return EXIT_OK


def cmd_expand(args: argparse.Namespace) -> int:
    p = load_problem(args.input, args.backend).coerced()
    order = p.m_cap if args.order is None else args.order
    if order < 0 or order > p.m_cap:
        raise UsageError(f"--order must lie in 0..{p.m_cap} (the file's order_cap)")
    g = build_g_table(p.q, order, args.normalization)
    pc = birkhoff_precheck(p.bc)
    if pc.kind == "degenerate":
        raise DegenerateProblemError(pc.reason)
    dt = None
    if pc.bc is not None:
        dt = delta_table(pc.bc, g)
    _emit(canonical_dumps(expansion_to_json(g, dt)), args.output)
    return EXIT_OK


def _lambda_samples(lo: float, hi: float, n: int) -> list[complex]:
    mags = np.geomspace(lo, hi, n)
    return [complex(s * m) for s in (1.0, -1.0) for m in mags]


def cmd_validate(args: argparse.Namespace) -> int:
    if args.points < 4:
        raise UsageError("--points must be at least 4 for a slope fit")
    if not 0 < args.lambda_min < args.lambda_max:
        raise UsageError("need 0 < --lambda-min < --lambda-max")
    p = load_problem(args.input, "float")
    g = build_g_table(p.q, args.order)
    R = default_radius(p.q) if args.radius is None else args.radius
    if args.lambda_min <= R:
        raise UsageError(f"--lambda-min must exceed R = {R:.6g}")
    lams = _lambda_samples(args.lambda_min, args.lambda_max, args.points)
    rep = remainder_probe(p, g, lams, grid=args.grid, radius=R)

    out = sys.stdout if args.output else sys.stderr
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            rep.to_csv(fh)
    else:
        sys.stdout.write(rep.to_csv())
    print(f"remainder exponents (m = {args.order}, expected {-(args.order + 1)}):", file=out)
    for (i, nu, hp), slope in sorted(rep.slopes.items()):
        shown = "below solver noise" if slope is None else f"{slope:+.3f}"
        print(f"  i={i} nu={nu} Re(lambda){'>' if hp == '+' else '<'}0: {shown}", file=out)

    pc = birkhoff_precheck(p.bc)
    if pc.bc is not None and pc.bc.is_reduced:
        try:
            errs = determinant_comparison(replace(p, bc=pc.bc), g, lams)
        except ConditionError:
            errs = []
        for lam, err in errs:
            print(f"  determinant rel. error at lambda={lam.real:+.6g}: {err:.3e}", file=out)
    return EXIT_OK


def _parse_range(text: str) -> tuple[float, float]:
    try:
        a, b = text.split("..")
        return float(a), float(b)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a..b, got {text!r}") from exc


def cmd_spectrum(args: argparse.Namespace) -> int:
    p = load_problem(args.input, "float")
    (r0, r1), (i0, i1) = args.re, args.im
    try:
        w = SpectrumWindow(r0, r1, i0, i1, resolution=args.grid)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    res = find_eigenvalues(p, w, detail=True)
    if res.seeds and not res.roots and len(res.failed_seeds) == res.seeds:
        print(f"Newton failed to converge from all {res.seeds} seeds", file=sys.stderr)
        return EXIT_INTERNAL
    if res.failed_seeds:
        print(f"{len(res.failed_seeds)} of {res.seeds} seeds did not converge", file=sys.stderr)
    _emit(canonical_dumps([[z.real, z.imag] for z in res.roots]), args.output)
    return EXIT_OK


def _random_problem(rng: random.Random, kind: str, order: int) -> dict:
    def frac(lo: int = -5, hi: int = 5, nonzero: bool = False) -> str:
        while True:
            v = Fraction(rng.randint(lo, hi), rng.randint(1, 4))
            if v or not nonzero:
                return str(v)

    q = [[frac(), "0"] for _ in range(rng.randint(1, 5))]
    if kind == "regular":
        names = ("a11", "a10", "b11", "b10", "a20", "b20")
        bnd = {n: [frac(), "0"] for n in names}
        bnd["a11"] = [frac(nonzero=True), "0"]
        bnd["b20"] = [frac(nonzero=True), "0"]
    else:
        # leading sum and minor vanish: a20 = a c, b20 = -b c, a10 = a c d, b10 = -b c d
        a, b, c, d = (Fraction(frac(nonzero=True)) for _ in range(4))
        bnd = {
            "a11": [str(a), "0"], "b11": [str(b), "0"],
            "a20": [str(a * c), "0"], "b20": [str(-b * c), "0"],
            "a10": [str(a * c * d), "0"], "b10": [str(-b * c * d), "0"],
        }
    return {
        "backend": "rational",
        "boundary": bnd,
        "order_cap": order,
        "q": {"coeffs": q, "kind": "poly"},
        "tolerance": 1e-10,
    }


def cmd_gen(args: argparse.Namespace) -> int:
    doc = _random_problem(random.Random(args.seed), args.kind, args.order_cap)
    _emit(canonical_dumps(doc), args.output)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors share the invalid-input code
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="specreg", description="Regularity classification and asymptotics for y'' + q y = lambda^2 y.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, backend: bool = True):
        sp.add_argument("input", help="problem description (JSON)")
        sp.add_argument("-o", "--output", help="output path (default: stdout)")
        if backend:
            sp.add_argument("--backend", choices=("rational", "float"), help="override the file's backend")

    c = sub.add_parser("classify", help="decide the regularity class")
    common(c)
    c.add_argument("--route", choices=("theorem", "delta", "both"), default="both")
    c.add_argument("--evidence", action="store_true", help="include per-condition records")
    c.add_argument("--order-cap", type=int, help="override the file's order_cap")
    c.set_defaults(func=cmd_classify)

    e = sub.add_parser("expand", help="dump g coefficients and the delta table")
    common(e)
    e.add_argument("--order", type=int, help="expansion order s (default: order_cap)")
    e.add_argument("--normalization", choices=NORMALIZATIONS, default="anchored")
    e.set_defaults(func=cmd_expand)

    v = sub.add_parser("validate", help="measure remainder decay numerically")
    common(v, backend=False)
    v.add_argument("--lambda-min", type=float, default=20.0)
    v.add_argument("--lambda-max", type=float, default=160.0)
    v.add_argument("--points", type=int, default=4)
    v.add_argument("--order", type=int, default=1, help="truncation order m")
    v.add_argument("--grid", type=int, default=101, help="x samples for the sup norm")
    v.add_argument("--radius", type=float, help="override the large-lambda threshold R")
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("spectrum", help="eigenvalues lambda inside a window")
    common(s, backend=False)
    s.add_argument("--re", type=_parse_range, required=True, metavar="A..B")
    s.add_argument("--im", type=_parse_range, required=True, metavar="C..D")
    s.add_argument("--grid", type=int, default=32)
    s.set_defaults(func=cmd_spectrum)

    gsub = sub.add_parser("gen", help="write a random rational test problem")
    gsub.add_argument("--seed", type=int, required=True)
    gsub.add_argument("--kind", choices=("regular", "tail"), default="tail",
                      help="'tail' makes the leading sum and minor vanish")
    gsub.add_argument("--order-cap", type=int, default=8)
    gsub.add_argument("-o", "--output")
    gsub.set_defaults(func=cmd_gen)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"specreg {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ProblemFileError, DegenerateProblemError, ConditionError, DomainError, RepresentationError) as exc:
        print(f"specreg {args.command}: invalid problem: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"specreg {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (DiscrepancyError, IntegrationError) as exc:
        print(f"specreg {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        print(f"specreg {args.command}: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
