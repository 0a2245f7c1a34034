"""Study reports: deterministic JSON, CSV tables, text tables, and figures.

A report is self-describing: its ``config`` block is the exact resolved
study configuration, so feeding that block back into the harness
reproduces the report byte for byte. Writers never embed timestamps.
"""

from __future__ import annotations

import csv
import json
import platform
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass
class StudyReport:
    study: str
    config: dict
    provenance: dict
    summary: dict
    tables: dict[str, dict]  # name -> {"columns": [...], "rows": [[...], ...]}


def make_provenance() -> dict:
    from . import __version__

    return {
        "package": f"hetforest {__version__}",
        "python": platform.python_version(),
        "numpy": np.__version__,
    }


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def report_to_json(report: StudyReport) -> str:
    payload = {
        "study": report.study,
        "config": _plain(report.config),
        "provenance": _plain(report.provenance),
        "summary": _plain(report.summary),
        "tables": _plain(report.tables),
    }
    return json.dumps(payload, indent=2) + "\n"


def report_from_json(text: str) -> StudyReport:
    obj = json.loads(text)
    return StudyReport(obj["study"], obj["config"], obj["provenance"],
                       obj["summary"], obj["tables"])


def format_table(name: str, table: dict, max_rows: int | None = 40) -> str:
    """Aligned plain-text rendering of one table."""
    columns = [str(c) for c in table["columns"]]
    rows = table["rows"]
    shown = rows if max_rows is None or len(rows) <= max_rows else rows[:max_rows]
    cells = [[_format_cell(v) for v in row] for row in shown]
    widths = [len(c) for c in columns]
    for row in cells:
        for j, cell in enumerate(row):
            widths[j] = max(widths[j], len(cell))
    lines = [name, "  ".join(c.ljust(w) for c, w in zip(columns, widths)),
             "  ".join("-" * w for w in widths)]
    for row in cells:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    if len(shown) < len(rows):
        lines.append(f"... ({len(rows) - len(shown)} more rows)")
    return "\n".join(lines)


def _format_cell(v) -> str:
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def write_report(report: StudyReport, out_dir, plots: bool = True) -> list[Path]:
    """Write report.json, one CSV per table, and the study's figures."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    path = out / "report.json"
    path.write_text(report_to_json(report), encoding="utf-8")
    written.append(path)
    for name, table in report.tables.items():
        path = out / f"{name}.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(table["columns"])
            for row in table["rows"]:
                writer.writerow([_csv_cell(v) for v in row])
        written.append(path)
    if plots:
        written.extend(render_figures(report, out))
    return written


def _csv_cell(v):
    if isinstance(v, float):
        return repr(v)
    return v


def render_figures(report: StudyReport, out_dir) -> list[Path]:
    """Render the study's figures as PNG files next to the tables."""
    from matplotlib.figure import Figure

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    renderer = _FIGURES.get(report.study)
    if renderer is None:
        return []
    return renderer(report, out, Figure)


def _methods_of(report):
    return list(report.config["methods"])


def _fig_bias(report, out, Figure):
    table = report.tables["tree_feature_depths"]
    names = table["columns"][3:]
    methods = _methods_of(report)
    rows = table["rows"]
    fig = Figure(figsize=(4 * len(methods), 3.6))
    axes = fig.subplots(1, len(methods), sharey=True)
    if len(methods) == 1:
        axes = [axes]
    for ax, method in zip(axes, methods):
        per_feature = [[row[3 + j] for row in rows if row[0] == method]
                       for j in range(len(names))]
        ax.boxplot(per_feature, tick_labels=names)
        ax.set_title(method)
        ax.set_xlabel("feature")
    axes[0].set_ylabel("earliest split depth")
    fig.suptitle("Feature depth by method")
    fig.tight_layout()
    path = out / "feature_depths.png"
    fig.savefig(path, dpi=120)
    return [path]


def _fig_diversity(report, out, Figure):
    table = report.tables["dissimilarity"]
    methods = _methods_of(report)
    fig = Figure(figsize=(6.4, 4.0))
    ax = fig.subplots()
    for method in methods:
        reps = [row[1] for row in table["rows"] if row[0] == method]
        values = [row[2] for row in table["rows"] if row[0] == method]
        ax.plot(reps, values, marker="o", markersize=3, label=method)
    ax.set_xlabel("repetition")
    ax.set_ylabel("mean pairwise dissimilarity")
    ax.set_title("Ensemble dissimilarity by method")
    ax.legend()
    fig.tight_layout()
    path = out / "dissimilarity.png"
    fig.savefig(path, dpi=120)
    return [path]


def _fig_noise(report, out, Figure):
    table = report.tables["accuracy"]
    ratios = sorted({row[0] for row in table["rows"]})
    fig = Figure(figsize=(10, 4.0))
    axes = fig.subplots(1, 2, sharey=True)
    for ax, col, label in ((axes[0], 6, "hrf - bagging"), (axes[1], 7, "hrf - rf")):
        groups = [[row[col] for row in table["rows"] if row[0] == r] for r in ratios]
        ax.boxplot(groups, tick_labels=[f"{r:g}" for r in ratios])
        ax.axhline(0.0, color="gray", linewidth=0.8)
        ax.set_title(label)
        ax.set_xlabel("noise feature ratio")
    axes[0].set_ylabel("accuracy difference")
    fig.suptitle("Accuracy differences vs noise share")
    fig.tight_layout()
    path = out / "noise_accuracy.png"
    fig.savefig(path, dpi=120)
    return [path]


def _fig_compare(report, out, Figure):
    table = report.tables["accuracy"]
    methods = _methods_of(report)
    fig = Figure(figsize=(6.4, 4.0))
    ax = fig.subplots()
    data = [[row[1 + j] for row in table["rows"]] for j in range(len(methods))]
    ax.boxplot(data, tick_labels=methods)
    ax.set_ylabel("test accuracy")
    ax.set_title("Accuracy over repeated splits")
    fig.tight_layout()
    path = out / "compare_accuracy.png"
    fig.savefig(path, dpi=120)
    return [path]


def _fig_noise_profile(report, out, Figure):
    table = report.tables["feature_importance"]
    names = [row[0] for row in table["rows"]]
    values = [row[1] for row in table["rows"]]
    fig = Figure(figsize=(max(6.4, 0.3 * len(names)), 4.0))
    ax = fig.subplots()
    ax.bar(range(len(names)), values)
    ax.axhline(report.summary["threshold"], color="red", linewidth=0.8,
               label="noise threshold (1/p)")
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=90, fontsize=7)
    ax.set_ylabel("normalized importance")
    ax.set_title("Single-tree feature importance")
    ax.legend()
    fig.tight_layout()
    path = out / "feature_importance.png"
    fig.savefig(path, dpi=120)
    return [path]


_FIGURES = {
    "bias": _fig_bias,
    "diversity": _fig_diversity,
    "noise": _fig_noise,
    "compare": _fig_compare,
    "noise_profile": _fig_noise_profile,
}
