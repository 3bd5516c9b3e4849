#!/usr/bin/env python3
"""Generate a small gallery of atoms and print their validation margins.

Usage:
    python scripts/atom_gallery.py [--count 12] [--seed 7] [--manifest PATH]
"""

from __future__ import annotations

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

import numpy as np  # noqa: E402

from rieszkit import (AtomParams, AtomSampler, PowerWeight,  # noqa: E402
                      sample_atom_campaign, validate_atom, write_atom_manifest)


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=12)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--manifest", default=None)
    args = ap.parse_args()

    params = AtomParams(1.0, 2.0, 0, PowerWeight(0.5), 1)
    sampler = AtomSampler((np.array([0.0]), np.array([1.0])), (0.5, 1.0, 2.0))
    atoms = sample_atom_campaign(params, sampler, args.count, args.seed)
    ok = 0
    for i, atom in enumerate(atoms):
        rep = validate_atom(atom)
        ok += rep.passed
        worst_moment = max(rep.moment_margins.values(), default=0.0)
        print(f"atom {i:3d}  center={atom.ball.center[0]:6.2f} r={atom.ball.radius:5.2f}  "
              f"size margin {rep.size_margin:+.2e}  worst moment {worst_moment:.2e}  "
              f"{'ok' if rep.passed else 'FAIL'}")
    print(f"{ok}/{len(atoms)} atoms valid")
    if args.manifest:
        write_atom_manifest(atoms, args.manifest)
        print(f"wrote {args.manifest}")
    return 0 if ok == len(atoms) else 1


if __name__ == "__main__":
    sys.exit(main())
