"""Render a recorded SES search trace as a standalone SVG figure.

The picture is the Myers edit graph: before indices across, after indices
down.  The d=0 snake is drawn once (gid "initial-snake"); every later
difference round becomes one artist group (gid "frontier-round-N") showing,
per diagonal, the step taken and the furthest-reaching snake.  Output is
deterministic: fixed hash salt, no embedded timestamps.
"""
from __future__ import annotations

import io
from pathlib import Path

import matplotlib as mpl
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure
from matplotlib.ticker import MaxNLocator

from .myers import SesTrace

_RC = {
    "svg.hashsalt": "semascope-trace",
    "svg.fonttype": "none",
    "font.family": "sans-serif",
}


def render_trace_svg(trace: SesTrace, path: str | Path | None = None) -> str:
    """Build the SVG document; optionally also write it to path."""
    n = max(trace.before_length, 1)
    m = max(trace.after_length, 1)
    with mpl.rc_context(_RC):
        fig = Figure(figsize=(6.4, 6.4), dpi=100)
        FigureCanvasSVG(fig)
        ax = fig.add_subplot()
        ax.set_xlim(-0.5, n + 0.5)
        ax.set_ylim(m + 0.5, -0.5)  # after index grows downward
        ax.set_xlabel("before index")
        ax.set_ylabel("after index")
        ax.xaxis.set_major_locator(MaxNLocator(integer=True, nbins=12))
        ax.yaxis.set_major_locator(MaxNLocator(integer=True, nbins=12))
        ax.grid(True, linewidth=0.4, color="0.85")
        ax.set_axisbelow(True)
        ax.patch.set_gid("edit-grid")

        rounds = trace.rounds
        total = max(len(rounds) - 1, 1)
        cmap = mpl.colormaps["viridis"]
        for tr in rounds:
            xs: list[float | None] = []
            ys: list[float | None] = []
            for k, x_start, x_end in tr.entries:
                xs.extend((x_start, x_end, None))
                ys.extend((x_start - k, x_end - k, None))
            if tr.d == 0:
                gid, color = "initial-snake", "0.35"
            else:
                gid, color = f"frontier-round-{tr.d}", cmap(tr.d / total)
            line, = ax.plot(xs, ys, marker="o", markersize=3, linewidth=1.4, color=color)
            line.set_gid(gid)
        d_value = rounds[-1].d if rounds else 0
        title = (
            f"shortest edit search: n={trace.before_length}, "
            f"m={trace.after_length}, D={d_value}"
        )
        if trace.truncated:
            title += " (trace truncated)"
        ax.set_title(title)
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
    document = buf.getvalue()
    if path is not None:
        Path(path).write_text(document, encoding="utf-8")
    return document
