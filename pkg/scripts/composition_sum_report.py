"""Compare the composition-sum formula for g_10 with the recursion tables.

With the split normalization the two coincide; with the anchored one the
report lists which q_i identities break and which composition terms they feed.

    python3 scripts/composition_sum_report.py --coeffs 1 2 -1 --max-s 5
"""
from __future__ import annotations

import argparse
from fractions import Fraction

from specreg import SmoothFunction, build_g_table, compare_closed_form


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--coeffs", nargs="+", default=["1", "2", "-1"], help="ascending coefficients of q (p/q allowed)")
    ap.add_argument("--max-s", type=int, default=5)
    args = ap.parse_args()
    q = SmoothFunction.poly([Fraction(c) for c in args.coeffs])
    for norm in ("split", "anchored"):
        g = build_g_table(q, args.max_s, norm)
        for s in range(1, args.max_s + 1):
            print(compare_closed_form(g, s).summary())


if __name__ == "__main__":
    main()
