"""Figures for evaluation reports."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}

LABEL_COLORS = {"IS": "#c0392b", "IE": "#2471a3", "O": "#7f8c8d", "macro": "#222222"}


def new(nrows: int = 1, ncols: int = 1, width: float = 6.0, height: float = 2.6):
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(nrows, ncols, figsize=(width, height), squeeze=False)
    return fig, axes


def save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context(STYLE):
        # no Software entry, so reruns write identical bytes
        fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def _value(v):
    return float("nan") if v is None else v


def plot_windowed(reports: Mapping[str, Mapping], labels: Sequence[str] = ("IS", "IE"), path=None):
    """P_w and R_w against the window size, one panel per label and metric."""
    fig, axes = new(2, len(labels), width=3.0 * len(labels), height=4.4)
    for col, lab in enumerate(labels):
        for row, metric in enumerate(("precision", "recall")):
            ax = axes[row][col]
            for name, rep in reports.items():
                ws = sorted(rep["windowed"], key=lambda k: int(k.split("=")[1]))
                xs = [int(k.split("=")[1]) for k in ws]
                ys = [_value(rep["windowed"][k].get(lab, {}).get(metric)) for k in ws]
                ax.plot(xs, ys, marker="o", ms=3, lw=1, label=name)
            ax.set_xlabel("window w (posts)")
            ax.set_ylabel(("$P_w$" if metric == "precision" else "$R_w$") + f" ({lab})")
            ax.set_ylim(0, 1.02)
            ax.set_xticks(xs)
    axes[0][0].legend(frameon=False)
    fig.tight_layout()
    return save(fig, path) if path else fig


def plot_coverage(reports: Mapping[str, Mapping], labels: Sequence[str] = ("IS", "IE", "O"), path=None):
    """Grouped bars of C_p and C_r per label and model."""
    fig, axes = new(1, 2, width=6.5, height=2.6)
    names = list(reports)
    width = 0.8 / max(len(names), 1)
    for ax, metric in zip(axes[0], ("C_p", "C_r")):
        for k, name in enumerate(names):
            xs = [i + k * width for i in range(len(labels))]
            ys = [_value(reports[name]["coverage"].get(lab, {}).get(metric)) for lab in labels]
            ax.bar(xs, ys, width=width, label=name)
        ax.set_xticks([i + 0.4 - width / 2 for i in range(len(labels))])
        ax.set_xticklabels(labels)
        ax.set_ylabel(f"${metric[0]}_{metric[2]}$")
        ax.set_ylim(0, 1)
    axes[0][0].legend(frameon=False)
    fig.tight_layout()
    return save(fig, path) if path else fig


def plot_recall_by_length(reports: Mapping[str, Mapping], path=None):
    """Escalation recall per gold-region length bucket."""
    fig, axes = new(1, 1, width=4.0, height=2.6)
    ax = axes[0][0]
    for name, rep in reports.items():
        table = rep.get("recall_by_region_length") or {}
        if not table:
            continue
        ax.plot(list(table), [v["recall"] for v in table.values()], marker="o", ms=3, lw=1, label=name)
    ax.set_xlabel("escalation length (posts)")
    ax.set_ylabel("recall (IE)")
    ax.set_ylim(0, 1.02)
    if len(reports) > 1:
        ax.legend(frameon=False)
    fig.tight_layout()
    return save(fig, path) if path else fig


def render_figures(reports: Mapping[str, Mapping], out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    return [
        plot_windowed(reports, path=out_dir / "windowed.png"),
        plot_coverage(reports, path=out_dir / "coverage.png"),
        plot_recall_by_length(reports, path=out_dir / "recall_by_length.png"),
    ]
