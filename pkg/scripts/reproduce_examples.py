#!/usr/bin/env python3
"""Recompute every bundled example table and print the comparison.

Writes one JSON report per example into --outdir (default: ./out).
"""

import argparse
import json
from pathlib import Path

from hillgreen.cli import _run_example


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", type=Path, default=Path("out"))
    ap.add_argument("--n-scan", type=int, default=2000)
    ap.add_argument("--match-tol", type=float, default=2e-3)
    args = ap.parse_args()

    args.outdir.mkdir(parents=True, exist_ok=True)
    overall = True
    for which in (1, 2, 3, 4):
        rep = _run_example(which, args.n_scan, 1e-10, args.match_tol)
        out = args.outdir / f"example{which}.json"
        out.write_text(json.dumps(rep, indent=2) + "\n")
        status = "ok" if rep["pass"] else "FAIL"
        worst = max(c["error"] for c in rep["checks"])
        print(f"example {which}: {status}  checks={len(rep['checks'])} "
              f"worst error={worst:.2e}  -> {out}")
        overall &= rep["pass"]
    return 0 if overall else 1


if __name__ == "__main__":
    raise SystemExit(main())
