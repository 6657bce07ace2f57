"""Eigenvalues of y'' + q y = lambda^2 y, y(0) = y(1) = 0, compared with i k pi.

    python3 scripts/spectrum_demo.py --coeffs 0 1 -1 --im-max 20
"""
from __future__ import annotations

import argparse
import math
from dataclasses import dataclass, field

from specreg import BoundaryData, ProblemSpec, SmoothFunction
from specreg.numerics import SpectrumWindow, find_eigenvalues


@dataclass
class SpectrumConfig:
    coeffs: list[float] = field(default_factory=lambda: [0.0, 1.0, -1.0])
    im_max: float = 20.0
    resolution: int = 48


def run(cfg: SpectrumConfig) -> list[complex]:
    q = SmoothFunction.poly([str(c) for c in cfg.coeffs])
    p = ProblemSpec(BoundaryData(a10=1, b20=1), q)
    roots = find_eigenvalues(p, SpectrumWindow(-1.0, 1.0, 0.5, cfg.im_max, resolution=cfg.resolution))
    print(f"{'k':>3} {'lambda':>28} {'|lambda - i k pi|':>18} {'k * gap':>10}")
    for k, z in enumerate(roots, start=1):
        gap = abs(z - 1j * k * math.pi)
        print(f"{k:>3} {z.real:+.3e}{z.imag:+.12f}j {gap:18.3e} {k * gap:10.4f}")
    return roots


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--coeffs", type=float, nargs="+")
    ap.add_argument("--im-max", type=float)
    ap.add_argument("--resolution", type=int)
    args = ap.parse_args()
    run(SpectrumConfig(**{k: v for k, v in vars(args).items() if v is not None}))


if __name__ == "__main__":
    main()
