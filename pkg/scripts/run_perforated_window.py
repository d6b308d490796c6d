#!/usr/bin/env python3
"""Refinement study on the plane window minus a chain of shrinking balls.

The removed balls B((2^-j, 0), 2^(-2j)) accumulate at a removed origin.
For an exponent p strictly between 1 and 2 the minimized quotient
stabilizes under grid refinement (holds-evidence); at p = 2 the shell
witness family certifies decay (fails-evidence).  Writes the refinement
ladders, the witness table, and the classifications.
"""

import argparse
import math

from hardylab.builders import perforated_disk
from hardylab.hardy import hardy_problem, refinement_study, witness_quotient
from hardylab.report import ReportBundle


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--j-max", type=int, default=4, help="deepest removed ball")
    ap.add_argument("--levels", type=int, nargs="+", default=[6, 7, 8],
                    help="grid spacings 2^-level for the refinement ladder")
    ap.add_argument("--out", default="out/perforated_window", help="output directory")
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    args = ap.parse_args()

    hs = [2.0 ** -l for l in args.levels]
    builder = lambda p: (lambda h: hardy_problem(
        perforated_disk(spacing=h, radius=2.0, j_min=1, j_max=args.j_max), p, 0.0))

    study_15 = refinement_study(builder(1.5), hs, tol=1e-6, max_iter=2000)

    prob2 = hardy_problem(
        perforated_disk(spacing=min(hs), radius=2.0, j_min=1, j_max=args.j_max), 2.0, 0.0
    )
    witness_rows = []
    quotients = []
    # the shell ramp needs half a cell of width: 2^-(j+1) >= h/2
    j_top = min(8, max(args.levels))
    for j in range(4, j_top + 1):
        q = witness_quotient(prob2, "shell", j=j)
        quotients.append(q)
        witness_rows.append((j, q, 3.0 / (j * math.log(2.0))))
    certified = all(q <= b for _, q, b in witness_rows) and all(
        b < a for a, b in zip(quotients, quotients[1:])
    )
    study_2 = refinement_study(builder(2.0), hs, tol=1e-6, max_iter=2000,
                               witness_decay=certified)

    bundle = ReportBundle()
    for label, study in (("p1.5", study_15), ("p2.0", study_2)):
        bundle.add_table(
            f"refinement_{label}",
            ("spacing", "lambda"),
            list(zip(study.h_values, study.lambdas)),
        )
    bundle.add_table("shell_witnesses", ("j", "quotient", "bound"), witness_rows)
    bundle.add_summary(
        classification_p15=study_15.classification,
        classification_p2=study_2.classification,
        slope_p15=study_15.slope,
        slope_p2=study_2.slope,
        witness_decay_certified=certified,
    )
    bundle.add_table(
        "slopes",
        ("p", "slope"),
        [(1.5, study_15.slope), (2.0, study_2.slope)],
    )
    written = bundle.write(args.out, fmt=args.format)
    print(f"p=1.5: {study_15.classification} (slope {study_15.slope:.3f}, "
          f"lambdas {[f'{x:.5f}' for x in study_15.lambdas]})")
    print(f"p=2.0: {study_2.classification} (slope {study_2.slope:.3f}, "
          f"witnesses certified decay: {certified})")
    for j, q, b in witness_rows:
        print(f"  shell j={j}: quotient {q:.5f}  bound {b:.5f}")
    for path in written:
        print("wrote", path)


if __name__ == "__main__":
    main()
