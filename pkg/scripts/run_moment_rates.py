#!/usr/bin/env python3
"""Sweep the Gegenbauer moment integrals and compare against their decay
laws and limiting constants, for a grid of (q, d) pairs.

Writes one CSV with the scaled integrals and fitted log-log slopes.
"""
import argparse
import csv
import math
import sys

from eigensphere.moments import moment_result, scaling_law
from eigensphere.stats import rate_fit


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ell", default="64,128,256,512", help="comma-separated degrees")
    ap.add_argument("--pairs", default="3:2,5:2,3:3,4:3,2:2,2:3,4:2", help="q:d pairs")
    ap.add_argument("--out", default="moment_rates.csv")
    args = ap.parse_args()

    ells = [int(tok) for tok in args.ell.split(",")]
    pairs = [tuple(int(v) for v in tok.split(":")) for tok in args.pairs.split(",")]

    rows = []
    for q, d in pairs:
        law = scaling_law(q, d)
        results = [moment_result(ell, q, d) for ell in ells]
        fit = rate_fit([(r.ell, r.integral) for r in results])
        for r in results:
            rows.append(
                [q, d, r.ell, r.integral, r.scaled, r.target, r.rel_err,
                 fit["slope"], float(law.exponent), law.log_power]
            )
        print(
            f"(q={q}, d={d}): slope {fit['slope']:+.4f} vs {float(law.exponent):+.0f}"
            + (" (log factor)" if law.log_power else "")
            + (f", scaled -> {results[-1].scaled:.6g} vs {r.target:.6g}" if math.isfinite(r.target) else "")
        )

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["q", "d", "ell", "integral", "scaled", "target", "rel_err",
                    "fitted_slope", "law_exponent", "law_log_power"])
        w.writerows(rows)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
