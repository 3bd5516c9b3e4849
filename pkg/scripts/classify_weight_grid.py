#!/usr/bin/env python3
"""Finiteness verdicts of the Muckenhoupt estimator over a power-weight grid.

Prints a table of (exponent a, integrability exponent p) cells; the verdict
should flip along a = n (p - 1).  Cells within the margin of the boundary
are marked '~' and not judged.

Usage:
    python scripts/classify_weight_grid.py [--margin 0.2]
"""

from __future__ import annotations

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from rieszkit import PowerWeight, dyadic_ball_family, estimate_Ap_constant  # noqa: E402

EXPONENTS = (-0.8, -1.0 / 3.0, 0.0, 0.25, 0.5, 0.9)
PS = (1.25, 1.5, 2.0, 3.0)


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--margin", type=float, default=0.2)
    args = ap.parse_args()

    family = dyadic_ball_family([[0.0], [0.5], [-0.5], [1.0], [-1.0], [2.0], [-2.0]])
    header = "a \\ p " + "".join(f"{p:>9.2f}" for p in PS)
    print(header)
    mismatches = 0
    for a in EXPONENTS:
        row = [f"{a:6.2f}"]
        for p in PS:
            predicted = -1.0 < a < (p - 1.0)
            boundary = (abs(a - (p - 1.0)) < args.margin - 1e-9
                        or abs(a + 1.0) < args.margin - 1e-9)
            verdict = estimate_Ap_constant(PowerWeight(a), p, family).verdict
            mark = "fin" if verdict == "finite" else "div"
            if boundary:
                mark += "~"
            elif (verdict == "finite") != predicted:
                mark += "!"
                mismatches += 1
            row.append(f"{mark:>9}")
        print("".join(row))
    print(f"{mismatches} non-boundary mismatches against the a < n(p-1) rule")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
