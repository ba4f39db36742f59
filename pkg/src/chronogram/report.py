"""Summary figures rendered from the per-window statistics.

Matplotlib is imported lazily and driven through the Agg canvas directly, so
importing this module is cheap and no GUI backend is ever touched.
"""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

from .export import WindowStats


def render_figures(rows: Sequence[WindowStats], out_dir: Path) -> list[Path]:
    """Write PNG charts of corpus size and layout quality per window."""
    from matplotlib.backends.backend_agg import FigureCanvasAgg
    from matplotlib.figure import Figure

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    labels = [r.window for r in rows]
    ticks = list(range(len(rows)))
    written: list[Path] = []

    fig = Figure(figsize=(8, 4), dpi=100)
    FigureCanvasAgg(fig)
    ax = fig.add_subplot(1, 1, 1)
    ax.bar(ticks, [r.documents for r in rows], color="#4c72b0", label="documents")
    ax.plot(ticks, [r.edges for r in rows], color="#dd8452", marker="o",
            label="edges")
    ax.set_xticks(ticks)
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("count")
    ax.set_title("documents and network edges per window")
    ax.legend()
    fig.tight_layout()
    path = out_dir / "summary.png"
    fig.savefig(path)
    written.append(path)

    fig = Figure(figsize=(8, 4), dpi=100)
    FigureCanvasAgg(fig)
    ax = fig.add_subplot(1, 1, 1)
    ax.plot(ticks, [r.final_stress for r in rows], color="#55a868", marker="o",
            label="final stress")
    ax.set_ylabel("final stress")
    twin = ax.twinx()
    twin.plot(ticks, [r.mean_cosine for r in rows], color="#c44e52", marker="s",
              linestyle="--", label="mean cosine")
    twin.set_ylabel("mean cosine")
    ax.set_xticks(ticks)
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_title("layout stress and edge similarity per window")
    handles, names = ax.get_legend_handles_labels()
    h2, n2 = twin.get_legend_handles_labels()
    ax.legend(handles + h2, names + n2, loc="upper left")
    fig.tight_layout()
    path = out_dir / "stress.png"
    fig.savefig(path)
    written.append(path)
    return written
