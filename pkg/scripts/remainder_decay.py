"""Fit the decay exponent of the expansion remainder for several truncation orders.

    python3 scripts/remainder_decay.py --orders 0 1 2 3 --lambdas 20 40 80 160
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field

from specreg import BoundaryData, ProblemSpec, SmoothFunction, build_g_table
from specreg.numerics import default_radius, remainder_probe


@dataclass
class DecayConfig:
    coeffs: list[float] = field(default_factory=lambda: [0.0, 1.0, -1.0])
    orders: list[int] = field(default_factory=lambda: [0, 1, 2, 3])
    lambdas: list[float] = field(default_factory=lambda: [20.0, 40.0, 80.0, 160.0])
    grid: int = 101


def run(cfg: DecayConfig) -> dict[int, dict]:
    q = SmoothFunction.poly([str(c) for c in cfg.coeffs])
    p = ProblemSpec(BoundaryData(a11=1, a10=2, b20=1), q)
    lams = [s * l for s in (1, -1) for l in cfg.lambdas]
    print(f"R = {default_radius(q):.3g}")
    out = {}
    for m in cfg.orders:
        rep = remainder_probe(p, build_g_table(q, m), lams, grid=cfg.grid)
        out[m] = rep.slopes
        shown = "  ".join(
            f"({i},{nu},{hp}) {'noise' if s is None else f'{s:+.2f}'}" for (i, nu, hp), s in sorted(rep.slopes.items())
        )
        print(f"m={m}  expected {-(m + 1):+d}  {shown}")
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--coeffs", type=float, nargs="+", help="ascending coefficients of q")
    ap.add_argument("--orders", type=int, nargs="+")
    ap.add_argument("--lambdas", type=float, nargs="+")
    ap.add_argument("--grid", type=int)
    args = ap.parse_args()
    cfg = DecayConfig(**{k: v for k, v in vars(args).items() if v is not None})
    run(cfg)


if __name__ == "__main__":
    main()
