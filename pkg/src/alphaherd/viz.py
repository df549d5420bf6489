"""Deterministic SVG scatter plots of a selection over 2-D data."""

from __future__ import annotations

from typing import Iterable, Optional
from xml.sax.saxutils import escape

import numpy as np

from .errors import ValidationError
from .kernel import Dataset

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)
UNSELECTED_FILL = "#b0b0b0"
SELECTED_FILL = "#000000"
MARGIN = 0.05


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def render_svg(
    dataset: Dataset,
    selected: Iterable[int],
    width: int = 600,
    height: int = 600,
    title: Optional[str] = None,
) -> str:
    """Render every point once; selected ones larger with the ``sel`` class.

    Without labels unselected points are gray and selected ones black. With
    labels every point is filled by class colour and selected points get a
    black outline.
    """
    if dataset.d != 2:
        raise ValidationError("viz requires 2-D data")
    if width < 1 or height < 1:
        raise ValidationError("width and height must be positive")
    chosen = set(int(i) for i in selected)
    if not chosen:
        raise ValidationError("selection is empty")
    if min(chosen) < 0 or max(chosen) >= dataset.n:
        raise ValidationError("selection index out of range")

    x = dataset.features
    lo = x.min(axis=0)
    span = x.max(axis=0) - lo
    span = np.where(span > 0, span, 1.0)
    lo = lo - MARGIN * span
    span = span * (1 + 2 * MARGIN)
    px = (x[:, 0] - lo[0]) / span[0] * width
    py = height - (x[:, 1] - lo[1]) / span[1] * height

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        "<style>.pt{stroke:none}.sel{stroke:#000000;stroke-width:1.5}</style>",
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    if title:
        lines.append(f'<title>{escape(title)}</title>')
    labels = dataset.labels
    order = [i for i in range(dataset.n) if i not in chosen] + sorted(chosen)
    for i in order:
        is_sel = i in chosen
        if labels is not None:
            fill = PALETTE[int(labels[i]) % len(PALETTE)]
        else:
            fill = SELECTED_FILL if is_sel else UNSELECTED_FILL
        cls, r = ("sel", 4.5) if is_sel else ("pt", 2.0)
        lines.append(
            f'<circle class="{cls}" cx="{_fmt(px[i])}" cy="{_fmt(py[i])}" r="{r}" fill="{fill}"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
