"""Deterministic SVG rendering of approximation polylines."""

from __future__ import annotations

from .model import ApproxCurve

PALETTE = (
    "#1f6fb2", "#c84b3c", "#3c9d59", "#8856b0",
    "#c08a27", "#3aa6a6", "#b05380", "#6b7d3a", "#555555",
)


def _fmt(x: float) -> str:
    return f"{x:.9f}"


def render_svg(
    curve: ApproxCurve,
    *,
    n_maps: int = 0,
    color_copies: bool = False,
    junction_markers: bool = False,
    size: int = 800,
    stroke_width: float = 0.0,
) -> str:
    """SVG document for a planar polyline; byte-identical across runs.

    The viewBox is the curve bounding box padded by 5 percent.  With
    color_copies the N generation-1 copy segments render as separate path
    elements in a fixed palette; junction_markers adds circles at the
    generation-1 vertices.  Both options need n_maps.
    """
    poly = curve.polyline
    if poly.shape[1] != 2:
        raise ValueError("SVG rendering is planar only")
    lo = poly.min(axis=0)
    hi = poly.max(axis=0)
    span = hi - lo
    pad = 0.05 * max(float(span[0]), float(span[1]), 1e-9)
    x0, y0 = float(lo[0]) - pad, float(lo[1]) - pad
    w, h = float(span[0]) + 2 * pad, float(span[1]) + 2 * pad
    sw = stroke_width if stroke_width > 0 else w / 1000.0

    def path_d(pts) -> str:
        head = f"M {_fmt(pts[0][0])} {_fmt(-pts[0][1])}"
        rest = " ".join(f"L {_fmt(p[0])} {_fmt(-p[1])}" for p in pts[1:])
        return head + " " + rest

    # y axis flipped so the curve displays with the usual orientation
    view = f"{_fmt(x0)} {_fmt(-(y0 + h))} {_fmt(w)} {_fmt(h)}"
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
        f'height="{size}" viewBox="{view}">',
    ]
    if color_copies and n_maps >= 2 and curve.generation >= 1:
        seg = (len(poly) - 1) // n_maps
        for i in range(n_maps):
            pts = poly[i * seg : (i + 1) * seg + 1]
            color = PALETTE[i % len(PALETTE)]
            lines.append(
                f'<path d="{path_d(pts)}" fill="none" stroke="{color}" '
                f'stroke-width="{_fmt(sw)}"/>'
            )
    else:
        lines.append(
            f'<path d="{path_d(poly)}" fill="none" stroke="#1f6fb2" '
            f'stroke-width="{_fmt(sw)}"/>'
        )
    if junction_markers and n_maps >= 2 and curve.generation >= 1:
        seg = (len(poly) - 1) // n_maps
        for i in range(n_maps + 1):
            p = poly[min(i * seg, len(poly) - 1)]
            lines.append(
                f'<circle cx="{_fmt(p[0])}" cy="{_fmt(-p[1])}" r="{_fmt(2 * sw)}" '
                f'fill="#222222"/>'
            )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
