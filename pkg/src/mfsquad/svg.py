"""Deterministic SVG rendering of meshes, with optional tube and track overlays."""
from __future__ import annotations

import numpy as np

from .geom import Arc, Polygon, arc_sample

ARC_SAMPLES = 64
STYLE = (".P{stroke:#000;stroke-width:2}"
         ".inner{stroke:#1f77b4}"
         ".chord{stroke:#2ca02c}"
         ".trap{stroke:#d62728}"
         ".tube{stroke:#999;stroke-dasharray:4 3}"
         ".greater-arc{stroke:#9467bd;stroke-width:1.5}"
         ".track{stroke:#ff7f0e}")
EDGE_CLASS = {"boundary_P": "P", "inner_P'": "inner", "chord": "chord", "trapezoid": "trap"}


def _f(v: float) -> str:
    s = format(float(v), ".9g")
    return "0" if s == "-0" else s


def _pts(arr) -> str:
    return " ".join(f"{_f(x)},{_f(-y)}" for x, y in arr)


def _pieces_polyline(pieces, k: int = ARC_SAMPLES) -> np.ndarray:
    out = []
    for p in pieces:
        if isinstance(p, Arc):
            out.extend(tuple(q) for q in (arc_sample(p, k)[:-1] if p.sweep > 0 else [p.start]))
        else:
            out.append(tuple(p.a))
    return np.array(out)


def overlays(polygon: Polygon, tube: bool, track: bool) -> list[tuple[str, np.ndarray, bool]]:
    """Overlay polylines in original units as ``(class, points, closed)``."""
    from .tube import build_track, build_tube, normalize

    Q, scale = normalize(polygon.ccw())
    t = build_tube(Q)
    out = []
    if tube:
        out.append(("tube", t.P1.polyline(ARC_SAMPLES) * scale, True))
        out.append(("tube", t.P2.polyline(ARC_SAMPLES) * scale, True))
        for b in t.bends:
            g = b.greater_arc
            out.append(("greater-arc", np.array([tuple(q) for q in arc_sample(g, ARC_SAMPLES)]) * scale, False))
    if track:
        out.append(("track", _pieces_polyline(build_track(t).pieces) * scale, True))
    return out


def render_svg(drawing, polygon: Polygon | None = None, show_tube: bool = False,
               show_track: bool = False) -> str:
    """SVG text for ``drawing``; y is flipped so the picture reads in math orientation."""
    pts = drawing.points
    extra = overlays(polygon, show_tube, show_track) if (show_tube or show_track) and polygon is not None else []
    allp = np.concatenate([pts] + [e[1] for e in extra]) if extra else pts
    lo = allp.min(axis=0)
    hi = allp.max(axis=0)
    span = hi - lo
    m = 0.05 * max(span.max(), 1e-12)
    x0, y0 = lo[0] - m, -(hi[1] + m)
    w, h = span[0] + 2 * m, span[1] + 2 * m
    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_f(x0)} {_f(y0)} {_f(w)} {_f(h)}">',
             f"<style>*{{fill:none;vector-effect:non-scaling-stroke;stroke-width:1}}{STYLE}</style>"]
    order = ["trapezoid", "inner_P'", "chord", "boundary_P"]
    edges = drawing.edges
    roles = drawing.edge_roles
    for role in order:
        cls = EDGE_CLASS[role]
        for (a, b), r in zip(edges.tolist(), roles):
            if r != role:
                continue
            (ax, ay), (bx, by) = pts[a], pts[b]
            lines.append(f'<line class="{cls}" x1="{_f(ax)}" y1="{_f(-ay)}" x2="{_f(bx)}" y2="{_f(-by)}"/>')
    for cls, arr, closed in extra:
        tag = "polygon" if closed else "polyline"
        lines.append(f'<{tag} class="{cls}" points="{_pts(arr)}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
