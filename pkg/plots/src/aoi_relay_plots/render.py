"""Render sweep CSVs into the standard figure set.

Strictly a projection of CSV columns: analytic values become lines, simulated
values become markers with 95% CI bars, nothing is recomputed.  Output is
deterministic for a given CSV (fixed style, no timestamps, stripped metadata).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

FIGURE_IDS = (
    "delay_chain",
    "aoi_chain",
    "rho_star",
    "delay_split",
    "aoi_split",
    "aoi_multiground",
)

_REQUIRED = {
    "delay_chain": ["scenario", "K", "rho", "delay_analytic", "delay_sim", "delay_sim_ci95"],
    "aoi_chain": ["scenario", "K", "rho", "aoi_analytic", "aoi_sim_mixture", "aoi_sim_mixture_ci95"],
    "rho_star": ["scenario", "K", "rho"],
    "delay_split": ["scenario", "p", "rho", "delay_analytic", "delay_sim", "delay_sim_ci95"],
    "aoi_split": ["scenario", "p", "rho", "aoi_analytic", "aoi_sim_mixture", "aoi_sim_mixture_ci95"],
    "aoi_multiground": ["scenario", "K", "rho", "aoi_sim_system", "aoi_sim_system_ci95"],
}

_STYLE = {
    "figure.figsize": (7.0, 5.0),
    "figure.dpi": 110,
    "savefig.dpi": 150,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.6,
}


class SchemaError(Exception):
    """The CSV does not carry what the requested figure needs."""


@dataclass(frozen=True)
class FigureJob:
    figure_id: str
    csv_path: str
    out_path: str

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise SchemaError(
                f"unknown figure id {self.figure_id!r}; known: {', '.join(FIGURE_IDS)}"
            )


def _load_rows(job: FigureJob) -> list[dict]:
    with open(job.csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [col for col in _REQUIRED[job.figure_id] if col not in header]
        if missing:
            raise SchemaError(
                f"{job.csv_path}: missing column(s) {', '.join(missing)} "
                f"required by figure {job.figure_id!r}"
            )
        return list(reader)


def _num(row: dict, col: str) -> Optional[float]:
    raw = row.get(col, "")
    return float(raw) if raw not in ("", None) else None


def _series(rows, group_col, x_col, y_col):
    """{group value: (xs, ys)} over rows where y is present, x-sorted."""
    out: dict = {}
    for row in rows:
        y = _num(row, y_col)
        if y is None:
            continue
        out.setdefault(row[group_col], []).append((_num(row, x_col), y))
    return {
        key: tuple(zip(*sorted(points)))
        for key, points in out.items()
    }


def _series_with_ci(rows, group_col, x_col, y_col, ci_col):
    out: dict = {}
    for row in rows:
        y = _num(row, y_col)
        if y is None:
            continue
        ci = _num(row, ci_col) or 0.0
        out.setdefault(row[group_col], []).append((_num(row, x_col), y, ci))
    return {
        key: tuple(zip(*sorted(points)))
        for key, points in out.items()
    }


def _group_label(col: str, value: str) -> str:
    return f"{col}={value}"


def _lines_and_markers(ax, rows, group_col, y_analytic, y_sim, ci_col, y_label):
    drew = False
    analytic = _series(rows, group_col, "rho", y_analytic)
    for key in sorted(analytic, key=float):
        xs, ys = analytic[key]
        ax.plot(xs, ys, label=_group_label(group_col, key))
        drew = True
    simulated = _series_with_ci(rows, group_col, "rho", y_sim, ci_col)
    for key in sorted(simulated, key=float):
        xs, ys, cis = simulated[key]
        label = None if key in analytic else _group_label(group_col, key) + " (sim)"
        ax.errorbar(xs, ys, yerr=cis, fmt="o", markersize=4, capsize=3, label=label)
        drew = True
    if not drew:
        raise SchemaError(f"no plottable rows (empty {y_analytic} and {y_sim} columns)")
    ax.set_xlabel("utilization rho")
    ax.set_ylabel(y_label)
    ax.legend()


def _filter(rows, scenario: str) -> list[dict]:
    kept = [row for row in rows if row.get("scenario") == scenario]
    if not kept:
        raise SchemaError(f"no rows with scenario={scenario!r}")
    return kept


def _draw(job: FigureJob, rows: list[dict], ax) -> None:
    fid = job.figure_id
    if fid == "delay_chain":
        _lines_and_markers(ax, _filter(rows, "chain"), "K",
                           "delay_analytic", "delay_sim", "delay_sim_ci95",
                           "network delay [1/mu]")
        ax.set_title("Network delay vs utilization (single-source chain)")
    elif fid == "aoi_chain":
        _lines_and_markers(ax, _filter(rows, "chain"), "K",
                           "aoi_analytic", "aoi_sim_mixture", "aoi_sim_mixture_ci95",
                           "average AoI [1/mu]")
        ax.set_title("Average AoI vs utilization (single-source chain)")
    elif fid == "rho_star":
        points = [(_num(r, "K"), _num(r, "rho")) for r in _filter(rows, "chain")
                  if _num(r, "rho") is not None]
        if not points:
            raise SchemaError("no rows with a rho value for rho_star")
        xs, ys = zip(*sorted(points))
        ax.plot(xs, ys, marker="o")
        ax.set_xlabel("number of nodes K")
        ax.set_ylabel("age-minimizing utilization rho*")
        ax.set_title("Age-minimizing utilization vs chain length")
    elif fid == "delay_split":
        _lines_and_markers(ax, _filter(rows, "split"), "p",
                           "delay_analytic", "delay_sim", "delay_sim_ci95",
                           "network delay [1/mu]")
        ax.set_title("Network delay vs utilization (two-node split traffic)")
    elif fid == "aoi_split":
        _lines_and_markers(ax, _filter(rows, "split"), "p",
                           "aoi_analytic", "aoi_sim_mixture", "aoi_sim_mixture_ci95",
                           "average AoI [1/mu]")
        ax.set_title("Average AoI vs utilization (two-node split traffic)")
    elif fid == "aoi_multiground":
        kept = _filter(rows, "multi-ground")
        series = _series_with_ci(kept, "K", "rho", "aoi_sim_system", "aoi_sim_system_ci95")
        if not series:
            raise SchemaError("no rows with aoi_sim_system values")
        for key in sorted(series, key=float):
            xs, ys, cis = series[key]
            ax.errorbar(xs, ys, yerr=cis, fmt="o-", markersize=4, capsize=3,
                        label=_group_label("K", key))
        ax.set_xlabel("utilization rho")
        ax.set_ylabel("average AoI [1/mu]")
        ax.set_title("Simulated AoI vs utilization (ground traffic at every node)")
        ax.legend()


def render(job: FigureJob) -> str:
    """Render one figure job; returns the output path."""
    rows = _load_rows(job)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        try:
            _draw(job, rows, ax)
            metadata = {"Software": None} if job.out_path.endswith(".png") else None
            fig.savefig(job.out_path, metadata=metadata)
        finally:
            plt.close(fig)
    return job.out_path
