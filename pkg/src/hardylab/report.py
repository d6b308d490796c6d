"""Deterministic result bundles: CSV tables, a JSON summary, optional plots.

Every run of the command line produces a directory with one or more CSV
tables plus ``summary.json``.  Floats are formatted with ``%.12g`` so
repeated runs of the same configuration are byte-identical.  A
traceability check verifies that every numeric headline in the summary
also appears verbatim in some table cell, so summaries can always be
audited against the raw tables.
"""
from __future__ import annotations

import json
import numbers
import os
from dataclasses import dataclass, field


def format_value(value) -> str:
    """Canonical text form: %.12g for reals, repr-free for the rest."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, numbers.Real):
        return "%.12g" % float(value)
    return str(value)


@dataclass
class Table:
    name: str
    header: tuple[str, ...]
    rows: list[tuple]

    def formatted_rows(self) -> list[list[str]]:
        out = []
        for row in self.rows:
            if len(row) != len(self.header):
                raise ValueError(f"row width mismatch in table {self.name!r}")
            out.append([format_value(v) for v in row])
        return out

    def to_csv(self) -> str:
        lines = [",".join(self.header)]
        for row in self.formatted_rows():
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"


@dataclass
class ReportBundle:
    """Collects tables and summary metrics, then writes them to a directory."""

    tables: list[Table] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def add_table(self, name: str, header, rows) -> Table:
        if any(t.name == name for t in self.tables):
            raise ValueError(f"duplicate table name {name!r}")
        table = Table(name=name, header=tuple(header), rows=[tuple(r) for r in rows])
        self.tables.append(table)
        return table

    def add_summary(self, **metrics) -> None:
        self.summary.update(metrics)

    def check_traceability(self) -> list[str]:
        """Summary metrics (floats) missing from every table cell."""
        cells = set()
        for table in self.tables:
            for row in table.formatted_rows():
                cells.update(row)
        missing = []
        for key, value in self.summary.items():
            if isinstance(value, bool) or not isinstance(value, numbers.Real):
                continue
            if format_value(value) not in cells:
                missing.append(key)
        return sorted(missing)

    def write(self, out_dir: str, fmt: str = "csv") -> list[str]:
        os.makedirs(out_dir, exist_ok=True)
        written = []
        for table in self.tables:
            if fmt == "csv":
                path = os.path.join(out_dir, table.name + ".csv")
                with open(path, "w") as fh:
                    fh.write(table.to_csv())
            elif fmt == "json":
                path = os.path.join(out_dir, table.name + ".json")
                payload = [dict(zip(table.header, row)) for row in table.formatted_rows()]
                with open(path, "w") as fh:
                    json.dump(payload, fh, indent=2, sort_keys=True)
                    fh.write("\n")
            else:
                raise ValueError(f"unknown output format {fmt!r}")
            written.append(path)
        summary = dict(self.summary)
        summary["_untraceable_metrics"] = self.check_traceability()
        path = os.path.join(out_dir, "summary.json")
        with open(path, "w") as fh:
            json.dump(
                {k: (format_value(v) if isinstance(v, float) else v) for k, v in summary.items()},
                fh,
                indent=2,
                sort_keys=True,
            )
            fh.write("\n")
        written.append(path)
        return written


def plot_curve(path: str, xs, ys, xlabel: str, ylabel: str, logx: bool = False, logy: bool = False):
    """Write a single-curve SVG; matplotlib is imported lazily."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(xs, ys, marker="o")
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
