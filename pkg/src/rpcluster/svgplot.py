"""Static SVG cluster plots: one polyline per curve, one color per cluster.

Hand-rolled rather than delegated to a plotting library so the output
bytes are a pure function of the inputs.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .dataset import FunctionalDataset, Partition

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
)

_WIDTH, _HEIGHT, _MARGIN = 800.0, 480.0, 40.0


def _segments(t: np.ndarray, gap_factor: float = 2.5):
    """Split index ranges where the time step jumps past the typical spacing."""
    dt = np.diff(t)
    if dt.size == 0:
        return [(0, t.size)]
    cut = gap_factor * np.median(dt)
    breaks = np.flatnonzero(dt > cut) + 1
    edges = [0, *breaks.tolist(), t.size]
    return list(zip(edges[:-1], edges[1:]))


def render_svg(dataset: FunctionalDataset, partition: Partition) -> str:
    """SVG document with curves stroked by their assigned cluster."""
    ymin = min(c.values.min() for c in dataset.curves)
    ymax = max(c.values.max() for c in dataset.curves)
    if ymax <= ymin:
        ymax = ymin + 1.0
    inner_w = _WIDTH - 2 * _MARGIN
    inner_h = _HEIGHT - 2 * _MARGIN

    def sx(t):
        return _MARGIN + inner_w * t

    def sy(v):
        return _HEIGHT - _MARGIN - inner_h * (v - ymin) / (ymax - ymin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH:.0f}" '
        f'height="{_HEIGHT:.0f}" viewBox="0 0 {_WIDTH:.0f} {_HEIGHT:.0f}">',
        f'<rect width="{_WIDTH:.0f}" height="{_HEIGHT:.0f}" fill="white"/>',
    ]
    for curve, label in zip(dataset.curves, partition.labels):
        color = PALETTE[(int(label) - 1) % len(PALETTE)]
        t = curve.grid.points
        v = curve.values
        for a, b in _segments(t):
            if b - a < 2:
                continue
            pts = " ".join(f"{sx(ti):.2f},{sy(vi):.2f}" for ti, vi in zip(t[a:b], v[a:b]))
            parts.append(
                f'<polyline points="{pts}" fill="none" stroke="{color}" '
                'stroke-width="1" stroke-opacity="0.7"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(path, dataset: FunctionalDataset, partition: Partition) -> None:
    Path(path).write_text(render_svg(dataset, partition))
