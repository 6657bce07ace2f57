"""Classify every problem file in a directory by both routes and print a table.

    python3 scripts/classify_examples.py problems/
"""
from __future__ import annotations

import argparse
from pathlib import Path

from specreg.classifier import DegenerateProblemError, classify_by_delta, classify_by_theorem
from specreg.serialize import load_problem


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("directory", type=Path, nargs="?", default=Path(__file__).resolve().parent.parent / "problems")
    args = ap.parse_args()
    print(f"{'file':32} {'endpoint route':26} {'delta route':26}")
    for path in sorted(args.directory.glob("*.json")):
        p = load_problem(str(path))
        try:
            a, b = classify_by_theorem(p), classify_by_delta(p)
        except DegenerateProblemError as exc:
            print(f"{path.name:32} degenerate: {exc}")
            continue
        flag = "" if a.key() == b.key() else "  <-- disagreement"
        print(f"{path.name:32} {str(a):26} {str(b):26}{flag}")


if __name__ == "__main__":
    main()
