#!/usr/bin/env python3
"""Obstruction diagnostics over a sweep of bath-temperature ratios.

For each alpha2 in the sweep, runs the full transport pipeline on the
bundled double-well chain and records the driven multi-index, the
transport exponent, and the verdict.  alpha2 = 1 exercises the
equal-temperature degeneration where no obstruction arises.

Usage:
    python scripts/run_obstruction_sweep.py --alpha2 1 3/2 2 3 --out results/obstruction_sweep.json
"""

from __future__ import annotations

import argparse
import json
import os
from fractions import Fraction

from susyfact.cli import canonical_json
from susyfact.models import default_chain_config
from susyfact.obstruction import invariant_subspace_check, run_obstruction


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha2", nargs="+", default=["1", "3/2", "2", "3"],
                    help="bath temperature ratios to sweep (rationals)")
    ap.add_argument("--out", default="results/obstruction_sweep.json")
    args = ap.parse_args()

    rows = []
    for a2 in args.alpha2:
        cfg = default_chain_config(alpha2=Fraction(a2))
        rep = run_obstruction(cfg)
        row = {"alpha2": str(Fraction(a2)), **rep.to_json_dict()}
        if cfg.alpha1 != cfg.alpha2:
            row["invariant_subspace"] = invariant_subspace_check(cfg)
        rows.append(row)
        exp = rep.exponent
        print(f"alpha2 = {a2:>4}: verdict {rep.verdict:<22} "
              f"alpha0 {rep.alpha0} exponent {exp.real:+.4f}{exp.imag:+.4f}i")

    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    with open(args.out, "w") as f:
        f.write(canonical_json({"sweep": rows}) + "\n")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
