"""Figures written next to the CSV/JSON outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def growth_plot(reports: list, path) -> Path:
    """Fact and entity counts per increment, one line per pipeline."""
    by_pipe: dict = {}
    for r in sorted(reports, key=lambda r: (r.pipeline, r.increment)):
        by_pipe.setdefault(r.pipeline, []).append(r)
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for name, rs in sorted(by_pipe.items()):
        inc = [r.increment for r in rs]
        axes[0].plot(inc, [r.statistics.factCount for r in rs], marker="o", label=name)
        axes[1].plot(inc, [r.statistics.entityCount for r in rs], marker="o", label=name)
    for ax, title in zip(axes, ("facts", "entities")):
        ax.set_xlabel("increment")
        ax.set_ylabel(title)
        ax.grid(alpha=0.3)
    axes[0].legend(fontsize="small")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path


def ranking_plot(table: dict, path) -> Path:
    """Grouped bars: total per pipeline under each weighting scheme."""
    rows = table["rows"]
    schemes = list(table["schemes"])
    fig, ax = plt.subplots(figsize=(max(6, 1.2 * len(rows)), 4))
    width = 0.8 / max(len(schemes), 1)
    for k, name in enumerate(schemes):
        xs = [i + k * width for i in range(len(rows))]
        ax.bar(xs, [r["totals"][name] for r in rows], width, label=name)
    ax.set_xticks([i + width * (len(schemes) - 1) / 2 for i in range(len(rows))])
    ax.set_xticklabels([r["pipeline"] for r in rows], rotation=30, ha="right")
    ax.set_ylim(0, 1)
    ax.set_ylabel("total score")
    ax.legend(fontsize="small")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path
