#!/usr/bin/env python3
"""Admissibility scan over (p, beta) on the punctured unit disk.

Estimates the complement (co)dimensions numerically from sample point
sets (the puncture and the outer circle), predicts admissibility per
(p, beta) cell from those estimates, runs refinement studies for the
numeric labels, and reports any flagged disagreements.
"""

import argparse

from hardylab.builders import (
    annulus_set,
    neighborhood_grid,
    punctured_disk,
    singleton,
    union_set,
)
from hardylab.dimension import codimension_estimates, hausdorff_codim_estimate
from hardylab.hardy import admissibility_scan, hardy_problem
from hardylab.report import ReportBundle


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--threads", type=int, default=4)
    ap.add_argument("--levels", type=int, nargs="+", default=[5, 6, 7],
                    help="grid spacings 2^-level for the refinement ladders")
    ap.add_argument("--out", default="out/scan_punctured_disk", help="output directory")
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    args = ap.parse_args()

    thin = singleton((0.0, 0.0), resolution=1e-12)
    thick = annulus_set(1.0, 1.25, spacing=2.0 ** -7)
    full = union_set([thin, thick])
    grid = neighborhood_grid(full, spacing=2.0 ** -7, pad=0.25)
    probes = [0.02, 0.04, 0.08]
    lo_thin, hi_thin = codimension_estimates(
        thin, grid, [(0.0, 0.0)], [0.3], probes, scale_ratio_min=3.0
    )
    lo_thick, hi_thick = codimension_estimates(
        thick, grid, [(1.0, 0.0)], [0.3], probes, scale_ratio_min=3.0
    )
    chd = hausdorff_codim_estimate(
        thin, (0.0, 0.0), 0.3, [3e-4, 1e-3, 3e-3, 1e-2], 0.1, 3.0
    )
    estimates = {
        "codim_lower": min(lo_thin.value, lo_thick.value),
        "codim_upper": max(hi_thin.value, hi_thick.value),
        "codim_lower_local": lo_thin.value,
        "thin_codim_lower": lo_thin.value,
        "thick_codim_upper": hi_thick.value,
        "codim_hausdorff": chd,
    }
    print("estimates:", {k: round(v, 4) for k, v in estimates.items()})

    scan = admissibility_scan(
        make_problem=lambda p, beta, h: hardy_problem(
            punctured_disk(spacing=h, radius=1.0), p, beta
        ),
        estimates=estimates,
        p_values=[1.2, 1.4, 1.6, 1.8, 2.0],
        beta_values=[-0.2, 0.0, 0.2, 0.4, 0.6],
        margin=0.25,
        h_values=[2.0 ** -l for l in args.levels],
        tol=1e-6,
        max_iter=300,
        threads=args.threads,
    )

    bundle = ReportBundle()
    bundle.add_table(
        "scan",
        ("p", "beta", "predicted", "numeric", "slope", "flagged"),
        [
            (e.p, e.beta, e.predicted, e.numeric,
             "" if e.slope is None else e.slope, e.flagged)
            for e in scan.entries
        ],
    )
    bundle.add_table(
        "estimates",
        ("quantity", "value"),
        sorted(estimates.items()),
    )
    bundle.add_summary(flag_count=len(scan.flagged_entries), **estimates)
    bundle.add_table(
        "flags",
        ("quantity", "value"),
        [("flag_count", len(scan.flagged_entries))],
    )
    written = bundle.write(args.out, fmt=args.format)
    for e in scan.entries:
        print(
            f"p={e.p:.1f} beta={e.beta:+.1f} predicted={e.predicted:<13s} "
            f"numeric={e.numeric:<13s} flag={e.flagged}"
        )
    print("flagged disagreements:", len(scan.flagged_entries))
    for path in written:
        print("wrote", path)


if __name__ == "__main__":
    main()
