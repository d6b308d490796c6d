#!/usr/bin/env python3
"""Dimension estimates for the middle-thirds set.

Computes covering-exponent bounds, codimension estimates, and the
singular-integral critical exponent for a middle-thirds prefractal, and
writes the per-scale tables plus a summary to an output directory.
"""

import argparse
import math

from hardylab.builders import cantor_set, neighborhood_grid
from hardylab.dimension import (
    aikawa_critical_exponent,
    assouad_lower,
    assouad_upper,
    codimension_estimates,
    covering_counts,
)
from hardylab.report import ReportBundle


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=int, default=8, help="prefractal iteration depth")
    ap.add_argument("--out", default="out/cantor_dimensions", help="output directory")
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    args = ap.parse_args()

    E = cantor_set(args.depth)
    samples = covering_counts(
        E,
        [(0.0,)],
        [3.0 ** -a for a in (0, 1, 2)],
        [0.9 * 3.0 ** -k for k in range(2, args.depth)],
    )
    up = assouad_upper(samples)
    lo = assouad_lower(samples)

    grid = neighborhood_grid(E, spacing=3.0 ** -(args.depth + 1), pad=0.5)
    clo, chi = codimension_estimates(
        E, grid, [(0.0,)], [1.0 / 3.0], [0.45 * 3.0 ** -k for k in range(2, args.depth - 1)]
    )
    aik = aikawa_critical_exponent(E, grid, 0.05, 1.0, [(0.0,)], [1.0 / 3.0, 1.0])

    bundle = ReportBundle()
    bundle.add_table(
        "covering_counts",
        ("outer_radius", "inner_radius", "count"),
        [(s.outer_radius, s.inner_radius, s.count) for s in samples],
    )
    bundle.add_table(
        "aikawa_profile",
        ("exponent", "statistic"),
        list(aik.profile),
    )
    bundle.add_summary(
        assouad_upper=up.value,
        assouad_lower=lo.value,
        codim_lower=clo.value,
        codim_upper=chi.value,
        aikawa_exponent=aik.value,
        similarity_exponent=math.log(2.0) / math.log(3.0),
    )
    bundle.add_table(
        "estimates",
        ("quantity", "value"),
        [
            ("assouad_upper", up.value),
            ("assouad_lower", lo.value),
            ("codim_lower", clo.value),
            ("codim_upper", chi.value),
            ("aikawa_exponent", aik.value),
            ("similarity_exponent", math.log(2.0) / math.log(3.0)),
        ],
    )
    written = bundle.write(args.out, fmt=args.format)
    print(f"depth {args.depth}: upper={up.value:.4f} lower={lo.value:.4f} "
          f"codim=[{clo.value:.4f}, {chi.value:.4f}] aikawa={aik.value:.4f}")
    for path in written:
        print("wrote", path)


if __name__ == "__main__":
    main()
