"""Report figures.

Renders a sorting report to PNG files next to the delimited output:
a bar chart of category sizes and a timeline of report entries. The
matplotlib import is deferred so simply importing the package stays
cheap, and the Agg backend keeps rendering headless.
"""

from __future__ import annotations

import os

from ..errors import IoError
from ..surveillance import SortingReport, SurveillanceReport
from .reports import _as_sorting


def render_figures(
    report: SurveillanceReport | SortingReport, out_dir: str
) -> list[str]:
    """Write report figures into ``out_dir``; returns the paths written."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    sorting = _as_sorting(report)
    base = sorting.report
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create figure directory {out_dir}: {exc}") from None
    written: list[str] = []

    if sorting.categories:
        labels = ["{" + "+".join(sorted(c.key)) + "}" for c in sorting.categories]
        sizes = [len(c.members) for c in sorting.categories]
        fig, ax = plt.subplots(figsize=(max(4, 1.2 * len(labels)), 3.5))
        ax.bar(range(len(labels)), sizes, color="#4878a8")
        ax.set_xticks(range(len(labels)))
        ax.set_xticklabels(labels, rotation=20, ha="right", fontsize=8)
        ax.set_ylabel("members")
        ax.set_title("category sizes")
        ax.yaxis.get_major_locator().set_params(integer=True)
        fig.tight_layout()
        path = os.path.join(out_dir, "categories.png")
        fig.savefig(path, dpi=110)
        plt.close(fig)
        written.append(path)

    identifiers = sorted({e.identifier for e in base.entries})
    fig, ax = plt.subplots(figsize=(6, max(2.5, 0.5 * len(identifiers) + 1.5)))
    if identifiers:
        index = {ident: i for i, ident in enumerate(identifiers)}
        xs = [e.t for e in base.entries]
        ys = [index[e.identifier] for e in base.entries]
        filled = ["#a84848" if e.provisional else "#4878a8" for e in base.entries]
        ax.scatter(xs, ys, c=filled, zorder=3)
        ax.set_yticks(range(len(identifiers)))
        ax.set_yticklabels(identifiers, fontsize=8)
        ax.set_xlim(left=0, right=max(base.meta.stream_end, 1))
    else:
        ax.set_yticks([])
        ax.text(0.5, 0.5, "no entries", ha="center", va="center", transform=ax.transAxes)
    ax.set_xlabel("t (ms)")
    ax.set_title("entries over the stream")
    fig.tight_layout()
    path = os.path.join(out_dir, "entries.png")
    fig.savefig(path, dpi=110)
    plt.close(fig)
    written.append(path)
    return written
