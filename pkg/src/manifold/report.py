"""Timeline figures for composed variants.

Renders one PNG per variant: a horizontal bar per scheduled section and
a marker per atomic event, so the shape of a variant can be inspected
at a glance alongside the text scores.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .events import iter_atomics


def render_timeline_png(result, config, path: str) -> None:
    """Draw section bars and event onsets for one variant."""
    fig, ax = plt.subplots(figsize=(10, 4))
    rows = {a.section_id: i for i, a in enumerate(result.assignments)}
    for a in result.assignments:
        y = rows[a.section_id]
        ax.barh(y, a.duration, left=a.start, height=0.6, alpha=0.4)
        ax.text(a.start, y + 0.35, a.section_id, fontsize=8)
    for section in result.piece.root.children:
        y = rows.get(section.name)
        if y is None:
            continue
        for e in iter_atomics(section):
            ax.plot(e.start, y, marker="|", color="black", markersize=10)
    for t in config.grid.marks:
        ax.axvline(t, color="grey", linewidth=0.5, linestyle=":")
    ax.set_xlabel("time (s)")
    ax.set_yticks(list(rows.values()))
    ax.set_yticklabels(list(rows.keys()))
    ax.set_xlim(0.0, config.end)
    ax.set_title(f"{config.name} variant {result.index} (seed {result.seed})")
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata={"Software": ""})
    plt.close(fig)
