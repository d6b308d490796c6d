"""Command line front end.

Two subcommands:

- ``hardylab fixtures`` lists the named point-set and grid builders.
- ``hardylab run --config cfg.json --out DIR`` executes one experiment
  described by a JSON configuration and writes a deterministic report
  bundle (CSV tables plus summary.json) into DIR.

The configuration's ``command`` key selects the experiment:

- ``dim``: scale-window covering estimates of a point set;
- ``aikawa``: critical singular-integral exponent of a point set;
- ``frostman``: packing-tree measure construction and growth check;
- ``hardy``: quotient minimization (single grid, radial ladder, or a
  refinement study over several spacings);
- ``scan``: (p, beta) admissibility map against theory predictions.

Exit codes: 0 success, 1 configuration error, 2 internal error.
"""
from __future__ import annotations

import argparse
import json
import sys
import traceback

import numpy as np

from . import builders
from .dimension import (
    aikawa_critical_exponent,
    assouad_lower,
    assouad_upper,
    codimension_estimates,
    covering_counts,
    minkowski_estimates,
)
from .errors import ConfigError, HardylabError
from .frostman import build_packing_tree, distribute_measure, growth_check, tree_to_json
from .hardy import (
    admissibility_scan,
    hardy_problem,
    minimize_quotient,
    radial_problem,
    refinement_study,
)
from .report import ReportBundle


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"configuration is missing the {key!r} key")
    return cfg[key]


def _build_set(cfg: dict):
    spec = dict(_require(cfg, "set"))
    name = spec.pop("name", None)
    if name is None:
        raise ConfigError("point-set spec needs a 'name'")
    return builders.build_set(name, **spec)


def _build_grid(spec: dict, E=None):
    spec = dict(spec)
    name = spec.pop("name", None)
    if name is None:
        raise ConfigError("grid spec needs a 'name'")
    if name == "neighborhood":
        if E is None:
            raise ConfigError("the neighborhood grid needs a point set in the config")
        return builders.neighborhood_grid(E, **spec)
    return builders.build_grid(name, **spec)


# ---------------------------------------------------------------------------
# experiment handlers


def _run_dim(cfg: dict, bundle: ReportBundle) -> None:
    E = _build_set(cfg)
    windows = _require(cfg, "windows")
    ratio_min = float(cfg.get("scale_ratio_min", 8.0))
    samples = covering_counts(
        E,
        _require(windows, "centers"),
        _require(windows, "outer_radii"),
        _require(windows, "inner_radii"),
        scale_ratio_min=ratio_min,
    )
    upper = assouad_upper(samples, ratio_min)
    lower = assouad_lower(samples, ratio_min)
    bundle.add_table(
        "covering_samples",
        ("center", "outer_radius", "inner_radius", "count", "slope"),
        [
            (";".join("%.12g" % c for c in s.center), s.outer_radius, s.inner_radius, s.count, s.slope)
            for s in samples
        ],
    )
    bundle.add_summary(assouad_upper=upper.value, assouad_lower=lower.value)
    if "minkowski_radii" in cfg:
        mk_lo, mk_hi = minkowski_estimates(E, cfg["minkowski_radii"], ratio_min)
        bundle.add_table(
            "minkowski_samples",
            ("inner_radius", "count"),
            [(s.inner_radius, s.count) for s in mk_lo.samples],
        )
        bundle.add_summary(minkowski_lower=mk_lo.value, minkowski_upper=mk_hi.value)


def _run_aikawa(cfg: dict, bundle: ReportBundle) -> None:
    E = _build_set(cfg)
    grid = _build_grid(_require(cfg, "grid"), E=E)
    est = aikawa_critical_exponent(
        E,
        grid,
        q_lo=float(_require(cfg, "q_lo")),
        q_hi=float(_require(cfg, "q_hi")),
        centers=_require(cfg, "centers"),
        radii=_require(cfg, "radii"),
        boundedness_threshold=cfg.get("boundedness_threshold"),
        tol=float(cfg.get("tol", 1e-3)),
    )
    bundle.add_table("aikawa_profile", ("q", "statistic"), list(est.profile))
    bundle.add_table("aikawa_result", ("critical_exponent",), [(est.value,)])
    bundle.add_summary(aikawa_exponent=est.value)


def _run_frostman(cfg: dict, bundle: ReportBundle, out_dir: str | None) -> None:
    E = _build_set(cfg)
    tree = build_packing_tree(
        E,
        center=_require(cfg, "center"),
        radius=float(_require(cfg, "radius")),
        delta=float(_require(cfg, "delta")),
        depth=int(_require(cfg, "depth")),
        window_factor=float(cfg.get("window_factor", 0.5)),
    )
    measure = distribute_measure(tree)
    q = float(_require(cfg, "q"))
    check = growth_check(tree, measure, q)
    bundle.add_table(
        "growth_table",
        ("radius", "max_constant"),
        [(r, c) for r, c in check.table],
    )
    bundle.add_summary(
        q=q,
        growth_constant=check.max_constant,
        leaves=len(tree.leaf_indices),
        depth=tree.depth,
    )
    if out_dir is not None:
        import os

        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "tree.json"), "w") as fh:
            fh.write(tree_to_json(tree, measure))


def _run_hardy(cfg: dict, bundle: ReportBundle) -> None:
    p = float(_require(cfg, "p"))
    beta = float(_require(cfg, "beta"))
    if "radial" in cfg:
        rcfg = dict(cfg["radial"])
        problem = radial_problem(
            ambient_dim=int(_require(rcfg, "ambient_dim")),
            p=p,
            beta=beta,
            t_min=float(rcfg.get("t_min", 1e-20)),
            t_max=float(rcfg.get("t_max", 1.0)),
            num_nodes=int(rcfg.get("num_nodes", 4096)),
            spacing=rcfg.get("spacing", "log"),
        )
        res = minimize_quotient(problem, tol=float(cfg.get("tol", 1e-8)))
        bundle.add_table("trace", ("iteration", "quotient"), list(enumerate(res.trace)))
        bundle.add_summary(
            lam=res.lam, hardy_constant=res.hardy_constant, converged=res.converged
        )
        return
    grid_spec = dict(_require(cfg, "grid"))
    if "h_values" in cfg:
        hs = [float(h) for h in cfg["h_values"]]

        def builder(h):
            spec = dict(grid_spec)
            spec["spacing"] = h
            return hardy_problem(_build_grid(spec), p, beta)

        study = refinement_study(
            builder, hs, tol=float(cfg.get("tol", 1e-6)), max_iter=int(cfg.get("max_iter", 2000))
        )
        bundle.add_table(
            "refinement",
            ("spacing", "lam"),
            list(zip(study.h_values, study.lambdas)),
        )
        bundle.add_summary(
            slope=study.slope,
            classification=study.classification,
            lam_finest=study.lambdas[-1],
        )
        return
    problem = hardy_problem(_build_grid(grid_spec), p, beta)
    res = minimize_quotient(problem, tol=float(cfg.get("tol", 1e-8)))
    bundle.add_table("trace", ("iteration", "quotient"), list(enumerate(res.trace)))
    bundle.add_summary(lam=res.lam, hardy_constant=res.hardy_constant, converged=res.converged)


def _run_scan(cfg: dict, bundle: ReportBundle, threads: int) -> None:
    grid_spec = dict(_require(cfg, "grid"))
    p_values = [float(v) for v in _require(cfg, "p_values")]
    beta_values = [float(v) for v in _require(cfg, "beta_values")]
    h_values = [float(v) for v in _require(cfg, "h_values")]
    margin = float(cfg.get("margin", 0.25))
    estimates = dict(_require(cfg, "estimates"))

    def make_problem(p, beta, h):
        spec = dict(grid_spec)
        spec["spacing"] = h
        return hardy_problem(_build_grid(spec), p, beta)

    amap = admissibility_scan(
        make_problem,
        estimates,
        p_values,
        beta_values,
        margin=margin,
        h_values=h_values,
        tol=float(cfg.get("tol", 1e-6)),
        max_iter=int(cfg.get("max_iter", 2000)),
        threads=threads,
    )
    bundle.add_table(
        "scan",
        ("p", "beta", "predicted", "numeric", "slope", "flagged"),
        [
            (e.p, e.beta, e.predicted, e.numeric, "" if e.slope is None else e.slope, e.flagged)
            for e in amap.entries
        ],
    )
    bundle.add_summary(
        flagged=len(amap.flagged_entries),
        cells=len(amap.entries),
        margin=margin,
    )


# ---------------------------------------------------------------------------
# entry point


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hardylab",
        description="Numerical laboratory for dimension estimates and weighted Hardy quotients.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("fixtures", help="list named point-set and grid fixtures")
    run = sub.add_parser("run", help="execute one experiment from a JSON configuration")
    run.add_argument("--config", required=True, help="path to the JSON configuration")
    run.add_argument("--out", required=True, help="output directory for the report bundle")
    run.add_argument("--threads", type=int, default=1, help="worker threads for scans")
    run.add_argument("--format", choices=("csv", "json"), default="csv", help="table format")
    args = parser.parse_args(argv)

    try:
        if args.subcommand == "fixtures":
            json.dump(builders.list_fixtures(), sys.stdout, indent=2, sort_keys=True)
            sys.stdout.write("\n")
            return 0
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read configuration: {exc}") from exc
        command = _require(cfg, "command")
        bundle = ReportBundle()
        if command == "dim":
            _run_dim(cfg, bundle)
        elif command == "aikawa":
            _run_aikawa(cfg, bundle)
        elif command == "frostman":
            _run_frostman(cfg, bundle, args.out)
        elif command == "hardy":
            _run_hardy(cfg, bundle)
        elif command == "scan":
            _run_scan(cfg, bundle, args.threads)
        else:
            raise ConfigError(f"unknown command {command!r}")
        written = bundle.write(args.out, fmt=args.format)
        for path in written:
            print(path)
        return 0
    except (ConfigError, HardylabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
