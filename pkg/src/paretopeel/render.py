"""Plain SVG output for peelings and grid fields."""
from __future__ import annotations

import numpy as np

from .peel import HULL, PeelResult
from .reference import GridField

FACET_COLOR = "#1f5fbf"
ROUND_COLOR = "#c8201e"
SIZE = 480
PAD = 16


def _frame(bounds):
    x0, x1, y0, y1 = bounds
    span = max(x1 - x0, y1 - y0) or 1.0
    s = (SIZE - 2 * PAD) / span

    def tr(p):
        p = np.atleast_2d(p)
        return np.column_stack([PAD + (p[:, 0] - x0) * s, SIZE - PAD - (p[:, 1] - y0) * s])

    return tr


def _path(pts, closed: bool) -> str:
    cmd = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
    return f"M {cmd}{' Z' if closed else ''}"


def render_svg(pr: PeelResult, A, every: int = 1) -> str:
    """Draw every ``every``-th layer: an outline through its points plus point markers.

    Markers are blue when a facet cone removed the point and red when the
    round (convex-hull) test did.
    """
    if every < 1:
        raise ValueError("every must be >= 1")
    A = np.asarray(A, dtype=float)
    lo, hi = A.min(axis=0), A.max(axis=0)
    tr = _frame((lo[0], hi[0], lo[1], hi[1]))
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
           f'viewBox="0 0 {SIZE} {SIZE}">',
           f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>']
    for k in range(0, pr.layers, every):
        idx = np.flatnonzero(pr.layer == k)
        pts = A[idx]
        c = pts.mean(axis=0)
        order = np.argsort(np.arctan2(pts[:, 1] - c[1], pts[:, 0] - c[0]))
        scr = tr(pts[order])
        out.append(f'<g class="layer" data-layer="{k}">')
        if len(pts) > 1:
            out.append(f'<path d="{_path(scr, len(pts) > 2)}" fill="none" stroke="#888" '
                       f'stroke-width="0.6"/>')
        for i, (x, y) in zip(idx[order], scr):
            color = ROUND_COLOR if pr.reason[i] == HULL else FACET_COLOR
            out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="1.6" fill="{color}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out)


def render_field_svg(g: GridField, levels=None) -> str:
    """Contour plot of a grid field at the given levels (ten even levels by default)."""
    vals = g.values
    if levels is None:
        levels = np.linspace(vals.min(), vals.max(), 12)[1:-1]
    tr = _frame(g.bounds)
    x0, x1, y0, y1 = g.bounds
    corners = tr(np.array([[x0, y1], [x1, y0]]))
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
           f'viewBox="0 0 {SIZE} {SIZE}">',
           f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>',
           f'<rect x="{corners[0, 0]:.2f}" y="{corners[0, 1]:.2f}" '
           f'width="{corners[1, 0] - corners[0, 0]:.2f}" height="{corners[1, 1] - corners[0, 1]:.2f}" '
           f'fill="none" stroke="black" stroke-width="0.8"/>']
    for t in levels:
        out.append(f'<g class="level" data-level="{float(t):.6g}">')
        for line in g.contours(float(t)):
            out.append(f'<path d="{_path(tr(line), False)}" fill="none" stroke="{FACET_COLOR}" '
                       f'stroke-width="0.8"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out)
