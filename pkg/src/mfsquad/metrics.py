"""Minimum feature size, diameter, spread, degradation and related audits."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import NoNonIncidentPair
from .geom import Polygon, seg_dist
from .pslg import Drawing, bounded_faces

# above this many vertex/edge pairs the R-tree path is used by default
BRUTE_FORCE_PAIRS = 4_000_000


def _as_drawing(g) -> Drawing:
    return Drawing.from_polygon(g) if isinstance(g, Polygon) else g


@dataclass(frozen=True)
class MetricsReport:
    mfs: float
    witness: tuple[int, int]  # (vertex index, edge index)
    diameter: float
    spread: float
    degradation_vs: float | None = None

    def as_dict(self) -> dict:
        return {"mfs": self.mfs, "witness": list(self.witness), "diameter": self.diameter,
                "spread": self.spread, "degradation_vs": self.degradation_vs}


def _pair_distances(pts, edges, vidx, eidx):
    p = pts[vidx]
    a = pts[edges[eidx, 0]]
    b = pts[edges[eidx, 1]]
    return seg_dist(p[..., 0], p[..., 1], a[..., 0], a[..., 1], b[..., 0], b[..., 1])


def mfs_brute_force(d: Drawing) -> tuple[float, tuple[int, int]]:
    """Exact minimum over every (vertex, non-incident edge) pair.

    Ties go to the lowest vertex index, then the lowest edge index.
    """
    pts, edges = d.points, d.edges
    nv, ne = len(pts), len(edges)
    best = math.inf
    witness = None
    chunk = max(1, 2_000_000 // max(ne, 1))
    eid = np.arange(ne)
    for s in range(0, nv, chunk):
        v = np.arange(s, min(nv, s + chunk))
        dist = _pair_distances(pts, edges, v[:, None], eid[None, :])
        incident = (edges[None, :, 0] == v[:, None]) | (edges[None, :, 1] == v[:, None])
        dist[incident] = np.inf
        k = int(np.argmin(dist))
        val = float(dist.flat[k])
        if val < best:
            best = val
            witness = (int(v[k // ne]), int(k % ne))
    if witness is None or not math.isfinite(best):
        raise NoNonIncidentPair("drawing has no vertex/non-incident edge pair")
    return best, witness


def _upper_bound(d: Drawing, samples: int = 64) -> float:
    pts, edges = d.points, d.edges
    v = np.unique(np.linspace(0, len(pts) - 1, min(samples, len(pts))).astype(np.int64))
    dist = _pair_distances(pts, edges, v[:, None], np.arange(len(edges))[None, :])
    dist[(edges[None, :, 0] == v[:, None]) | (edges[None, :, 1] == v[:, None])] = np.inf
    return float(dist.min())


def mfs_fast(d: Drawing) -> tuple[float, tuple[int, int]]:
    """Same result as :func:`mfs_brute_force`, pruned with an R-tree.

    An upper bound ``U`` is taken from a sample of vertices; only pairs the
    tree reports within ``U`` are evaluated, with the brute-force distance
    formula and tie-break.
    """
    import shapely

    pts, edges = d.points, d.edges
    if len(pts) < 3 or len(edges) == 0:
        return mfs_brute_force(d)
    ub = _upper_bound(d)
    if not math.isfinite(ub):
        return mfs_brute_force(d)
    reach = ub * (1 + 1e-9) + 1e-300
    tree = shapely.STRtree(shapely.linestrings(pts[edges]))
    vi, ei = tree.query(shapely.points(pts), predicate="dwithin", distance=reach)
    keep = (edges[ei, 0] != vi) & (edges[ei, 1] != vi)
    vi, ei = vi[keep], ei[keep]
    dist = _pair_distances(pts, edges, vi, ei)
    order = np.lexsort((ei, vi, dist))
    k = order[0]
    return float(dist[k]), (int(vi[k]), int(ei[k]))


def min_feature_size(g, method: str = "auto") -> tuple[float, tuple[int, int]]:
    """Minimum distance between a vertex and a non-incident edge, with witness."""
    d = _as_drawing(g)
    if d.n_vertices < 3:
        raise NoNonIncidentPair("need at least 3 vertices")
    if method == "brute" or (method == "auto" and d.n_vertices * d.n_edges <= BRUTE_FORCE_PAIRS):
        return mfs_brute_force(d)
    return mfs_fast(d)


def diameter(g) -> float:
    """Largest vertex-to-vertex distance (attained at vertices for straight edges)."""
    d = _as_drawing(g)
    pts = np.unique(d.points, axis=0)
    if len(pts) < 2:
        raise ValueError("diameter needs at least 2 distinct vertices")
    if len(pts) > 2000:
        from scipy.spatial import ConvexHull

        hull = pts[ConvexHull(pts).vertices]
        if len(hull) > 2000:
            return _calipers(hull)
        pts = hull
    best = 0.0
    for s in range(0, len(pts), 512):
        blk = pts[s:s + 512]
        dd = np.hypot(blk[:, None, 0] - pts[None, :, 0], blk[:, None, 1] - pts[None, :, 1])
        best = max(best, float(dd.max()))
    return best


def _calipers(h: np.ndarray) -> float:
    """Diameter of a convex polygon given CCW, via antipodal pairs."""
    m = len(h)
    h = h.tolist()

    def area2(i, j, k):
        return abs((h[j][0] - h[i][0]) * (h[k][1] - h[i][1]) - (h[j][1] - h[i][1]) * (h[k][0] - h[i][0]))

    best = 0.0
    j = 1
    for i in range(m):
        i2 = (i + 1) % m
        while area2(i, i2, (j + 1) % m) > area2(i, i2, j):
            j = (j + 1) % m
        for a in (i, i2):
            for b in (j, (j + 1) % m):
                best = max(best, math.hypot(h[a][0] - h[b][0], h[a][1] - h[b][1]))
    return best


def spread(g) -> float:
    """Diameter over minimum feature size (always >= 1)."""
    d = _as_drawing(g)
    return diameter(d) / min_feature_size(d)[0]


def degradation(original, refined) -> float:
    return min_feature_size(original)[0] / min_feature_size(refined)[0]


def measure(g, reference=None) -> MetricsReport:
    d = _as_drawing(g)
    mfs, witness = min_feature_size(d)
    diam = diameter(d)
    deg = min_feature_size(reference)[0] / mfs if reference is not None else None
    return MetricsReport(mfs, witness, diam, diam / mfs, deg)


@dataclass(frozen=True)
class AngleViolation:
    vertex: int
    edges: tuple[int, int]
    angle: float
    value: float  # angle * min(|ab|, |ac|)


def audit_angle_bound(g, mfs: float | None = None, eps: float | None = None) -> list[AngleViolation]:
    """Flag incident edge pairs with ``angle * min(|ab|, |ac|) < mfs``.

    For any drawing the product is at least the minimum feature size, so a
    non-empty result points at a geometry or measurement bug. ``mfs`` may be
    overridden to audit against a claimed value.
    """
    d = _as_drawing(g)
    if mfs is None:
        mfs = min_feature_size(d)[0]
    if eps is None:
        eps = d.tol.eps_abs
    pts, edges = d.points, d.edges
    out = []
    for v in range(d.n_vertices):
        inc = d.adjacency(v)
        if len(inc) < 2:
            continue
        other = [int(edges[e, 1] if edges[e, 0] == v else edges[e, 0]) for e in inc]
        vec = pts[other] - pts[v]
        lens = np.hypot(vec[:, 0], vec[:, 1])
        ang = np.arctan2(vec[:, 1], vec[:, 0])
        for i in range(len(inc)):
            for j in range(i + 1, len(inc)):
                a = abs(ang[i] - ang[j]) % (2 * math.pi)
                a = min(a, 2 * math.pi - a)
                val = a * min(lens[i], lens[j])
                if val < mfs - eps:
                    out.append(AngleViolation(v, (inc[i], inc[j]), float(a), float(val)))
    return out


def classify_faces(g) -> Counter:
    """Histogram of corner counts over bounded faces."""
    d = _as_drawing(g)
    return Counter(f.corner_count for f in bounded_faces(d))
