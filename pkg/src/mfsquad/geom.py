"""Numeric primitives: points, segments, arcs, predicates and distances.

Everything here works in double precision with explicit tolerances. The
pipeline normalizes inputs to unit minimum feature size, so the clearances
that matter are all far above rounding noise.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import NotSimple

CCW = 1
CW = -1


@dataclass(frozen=True)
class Tolerance:
    eps_abs: float = 1e-9
    eps_rel: float = 1e-12

    def __post_init__(self):
        if self.eps_abs < 0 or self.eps_rel < 0:
            raise ValueError("tolerances must be non-negative")
        if self.eps_abs <= np.finfo(float).eps:
            raise ValueError("eps_abs must exceed machine epsilon")

    @classmethod
    def from_env(cls) -> "Tolerance":
        raw = os.environ.get("MFSQUAD_EPS")
        return cls(eps_abs=float(raw)) if raw else cls()


DEFAULT_TOL = Tolerance.from_env()


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y

    def __getitem__(self, i):
        return (self.x, self.y)[i]

    def __len__(self):
        return 2

    def __sub__(self, other):
        return Point(self.x - other.x, self.y - other.y)

    def __add__(self, other):
        return Point(self.x + other.x, self.y + other.y)

    def __mul__(self, s):
        return Point(self.x * s, self.y * s)

    __rmul__ = __mul__

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def dist(self, other) -> float:
        return math.hypot(self.x - other[0], self.y - other[1])


def as_point(p) -> Point:
    return p if isinstance(p, Point) else Point(float(p[0]), float(p[1]))


@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point

    def __post_init__(self):
        object.__setattr__(self, "a", as_point(self.a))
        object.__setattr__(self, "b", as_point(self.b))
        if self.a == self.b:
            raise ValueError("zero-length segment")

    @property
    def length(self) -> float:
        return self.a.dist(self.b)

    def reversed(self) -> "Segment":
        return Segment(self.b, self.a)


@dataclass(frozen=True)
class Arc:
    """Circular arc from ``start_angle`` to ``end_angle`` turning in ``orientation``.

    The swept angle is ``(end_angle - start_angle) * orientation`` and must be
    non-negative. A zero sweep is a legal degenerate arc (a straight polygon
    vertex produces one).
    """

    center: Point
    radius: float
    start_angle: float
    end_angle: float
    orientation: int = CCW

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not self.radius > 0:
            raise ValueError("arc radius must be positive")
        if self.orientation not in (CCW, CW):
            raise ValueError("orientation must be CCW (+1) or CW (-1)")
        if self.sweep < -1e-12:
            raise ValueError("arc end angle lies behind its start")

    @property
    def sweep(self) -> float:
        return (self.end_angle - self.start_angle) * self.orientation

    @property
    def length(self) -> float:
        return self.radius * max(self.sweep, 0.0)

    def point_at(self, angle: float) -> Point:
        return Point(self.center.x + self.radius * math.cos(angle),
                     self.center.y + self.radius * math.sin(angle))

    @property
    def start(self) -> Point:
        return self.point_at(self.start_angle)

    @property
    def end(self) -> Point:
        return self.point_at(self.end_angle)

    def at_length(self, s: float) -> Point:
        """Point at arclength ``s`` from the start."""
        return self.point_at(self.start_angle + self.orientation * s / self.radius)

    def contains_angle(self, angle: float, slack: float = 0.0) -> bool:
        rel = ((angle - self.start_angle) * self.orientation) % (2 * math.pi)
        return rel <= self.sweep + slack or rel >= 2 * math.pi - slack

    def concentric(self, radius: float) -> "Arc":
        return Arc(self.center, radius, self.start_angle, self.end_angle, self.orientation)


def orient(a, b, c, tol: Tolerance = DEFAULT_TOL, scale: float | None = None) -> int:
    """Sign of the turn a -> b -> c: +1 left (CCW), -1 right, 0 collinear.

    Collinearity uses ``|cross| <= eps_abs * scale**2`` where ``scale`` defaults
    to the largest coordinate magnitude among the three points.
    """
    ax, ay = a
    bx, by = b
    cx, cy = c
    cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    if scale is None:
        scale = max(abs(ax), abs(ay), abs(bx), abs(by), abs(cx), abs(cy))
    if abs(cross) <= tol.eps_abs * scale * scale:
        return 0
    return 1 if cross > 0 else -1


def dist_point_segment(p, s) -> float:
    """Euclidean distance from ``p`` to the closed segment ``s``."""
    a, b = (s.a, s.b) if isinstance(s, Segment) else s
    ax, ay = float(a[0]), float(a[1])
    dx, dy = float(b[0]) - ax, float(b[1]) - ay
    wx, wy = float(p[0]) - ax, float(p[1]) - ay
    ll = dx * dx + dy * dy
    t = 0.0 if ll == 0 else min(1.0, max(0.0, (wx * dx + wy * dy) / ll))
    return math.hypot(wx - t * dx, wy - t * dy)


def seg_dist(px, py, ax, ay, bx, by):
    """Vectorised point-to-closed-segment distance (numpy broadcasting)."""
    dx = bx - ax
    dy = by - ay
    wx = px - ax
    wy = py - ay
    ll = dx * dx + dy * dy
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.clip((wx * dx + wy * dy) / ll, 0.0, 1.0)
    t = np.where(ll > 0, t, 0.0)
    return np.hypot(wx - t * dx, wy - t * dy)


def dist_point_arc(p, arc: Arc) -> float:
    px, py = p
    rx, ry = px - arc.center.x, py - arc.center.y
    rho = math.hypot(rx, ry)
    if rho > 0 and arc.contains_angle(math.atan2(ry, rx)):
        return abs(rho - arc.radius)
    return min(as_point(p).dist(arc.start), as_point(p).dist(arc.end))


@dataclass(frozen=True)
class Intersection:
    kind: str  # "none" | "point" | "overlap"
    point: Point | None = None
    touching: bool = False

    def __bool__(self):
        return self.kind != "none"


_NONE = Intersection("none")


def segment_intersection(s1: Segment, s2: Segment, tol: Tolerance = DEFAULT_TOL) -> Intersection:
    """Classify how two closed segments meet.

    ``touching`` is set when the contact point is an endpoint of either
    segment (including a shared endpoint) rather than a proper crossing.
    """
    p, q, r, s = s1.a, s1.b, s2.a, s2.b
    scale = max(abs(v) for pt in (p, q, r, s) for v in pt)
    o1 = orient(p, q, r, tol, scale)
    o2 = orient(p, q, s, tol, scale)
    o3 = orient(r, s, p, tol, scale)
    o4 = orient(r, s, q, tol, scale)

    if o1 == o2 == o3 == o4 == 0:
        # collinear: project on the dominant axis of s1
        ax = 0 if abs(q.x - p.x) >= abs(q.y - p.y) else 1
        lo1, hi1 = sorted((p[ax], q[ax]))
        lo2, hi2 = sorted((r[ax], s[ax]))
        lo, hi = max(lo1, lo2), min(hi1, hi2)
        slack = tol.eps_abs * max(scale, 1.0)
        if hi < lo - slack:
            return _NONE
        if hi - lo <= slack:
            for cand in (p, q):
                if cand in (r, s) or abs(cand[ax] - lo) <= slack:
                    return Intersection("point", cand, True)
        return Intersection("overlap")

    if o1 * o2 <= 0 and o3 * o4 <= 0:
        touching = 0 in (o1, o2, o3, o4)
        if o1 == 0:
            return Intersection("point", r, True)
        if o2 == 0:
            return Intersection("point", s, True)
        if o3 == 0:
            return Intersection("point", p, True)
        if o4 == 0:
            return Intersection("point", q, True)
        d1 = q - p
        d2 = s - r
        den = d1.x * d2.y - d1.y * d2.x
        t = ((r.x - p.x) * d2.y - (r.y - p.y) * d2.x) / den
        return Intersection("point", Point(p.x + t * d1.x, p.y + t * d1.y), touching)
    return _NONE


def arc_sample(arc: Arc, k: int) -> list[Point]:
    """``k + 1`` points at equal angular steps from the arc start to its end."""
    if k < 1:
        raise ValueError("k must be >= 1")
    step = (arc.end_angle - arc.start_angle) / k
    return [arc.point_at(arc.start_angle + i * step) for i in range(k + 1)]


def segment_crossings(coords: np.ndarray, edges: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> list[tuple[int, int]]:
    """Edge pairs ``(i, j)``, ``i < j``, whose closed segments meet illegally.

    Legal contact is only a shared endpoint between non-overlapping edges.
    Candidate pairs come from an R-tree; shared-endpoint pairs are tested for
    collinear overlap directly.
    """
    import shapely

    coords = np.asarray(coords, dtype=float)
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if len(edges) < 2:
        return []
    lines = shapely.linestrings(coords[edges])
    tree = shapely.STRtree(lines)
    left, right = tree.query(lines, predicate="intersects")
    keep = left < right
    left, right = left[keep], right[keep]
    ea, eb = edges[left], edges[right]
    shared = (ea[:, :1] == eb).any(axis=1) | (ea[:, 1:] == eb).any(axis=1)
    out = [(int(i), int(j)) for i, j in zip(left[~shared], right[~shared])]
    for i, j in zip(left[shared], right[shared]):
        a0, a1 = edges[i]
        b0, b1 = edges[j]
        if {a0, a1} == {b0, b1}:
            out.append((int(i), int(j)))
            continue
        s = a0 if a0 in (b0, b1) else a1
        u = a1 if s == a0 else a0
        w = b1 if s == b0 else b0
        S, U, W = coords[s], coords[u], coords[w]
        ux, uy = U - S
        wx, wy = W - S
        cross = ux * wy - uy * wx
        if abs(cross) <= tol.eps_abs * math.hypot(ux, uy) * math.hypot(wx, wy) and ux * wx + uy * wy > 0:
            out.append((int(i), int(j)))
    out.sort()
    return out


class Polygon:
    """A closed chain of vertices stored as an ``(n, 2)`` float array."""

    def __init__(self, vertices: Iterable[Sequence[float]] | np.ndarray):
        pts = np.array([tuple(v) for v in vertices] if not isinstance(vertices, np.ndarray) else vertices,
                       dtype=float).reshape(-1, 2)
        if len(pts) < 3:
            raise ValueError("a polygon needs at least 3 vertices")
        if not np.isfinite(pts).all():
            raise ValueError("non-finite polygon coordinate")
        pts.setflags(write=False)
        self.pts = pts

    def __len__(self):
        return len(self.pts)

    def __iter__(self):
        return (Point(float(x), float(y)) for x, y in self.pts)

    def __getitem__(self, i) -> Point:
        x, y = self.pts[i % len(self.pts)]
        return Point(float(x), float(y))

    def __eq__(self, other):
        return isinstance(other, Polygon) and np.array_equal(self.pts, other.pts)

    def __repr__(self):
        return f"Polygon(n={len(self)})"

    @property
    def n(self) -> int:
        return len(self.pts)

    def edge_array(self) -> np.ndarray:
        i = np.arange(self.n)
        return np.stack([i, (i + 1) % self.n], axis=1)

    def segments(self) -> list[Segment]:
        return [Segment(self[i], self[i + 1]) for i in range(self.n)]

    def signed_area(self) -> float:
        x, y = self.pts[:, 0], self.pts[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))

    def area(self) -> float:
        return abs(self.signed_area())

    def is_ccw(self) -> bool:
        return self.signed_area() > 0

    def reversed(self) -> "Polygon":
        return Polygon(self.pts[::-1].copy())

    def ccw(self) -> "Polygon":
        return self if self.is_ccw() else self.reversed()

    def scaled(self, s: float) -> "Polygon":
        return Polygon(self.pts * s)

    def crossing_pairs(self, tol: Tolerance = DEFAULT_TOL) -> list[tuple[int, int]]:
        return segment_crossings(self.pts, self.edge_array(), tol)

    def is_simple(self) -> bool:
        return not self.crossing_pairs() and len(np.unique(self.pts, axis=0)) == self.n

    def require_simple(self):
        if len(np.unique(self.pts, axis=0)) != self.n:
            raise NotSimple("polygon has repeated vertices")
        pairs = self.crossing_pairs()
        if pairs:
            i, j = pairs[0]
            raise NotSimple(f"polygon edges {i} and {j} intersect", pair=(i, j))

    def contains(self, p) -> bool:
        """Even-odd point-in-polygon test (boundary points are unspecified)."""
        x, y = p
        xs, ys = self.pts[:, 0], self.pts[:, 1]
        xn, yn = np.roll(xs, -1), np.roll(ys, -1)
        cond = (ys > y) != (yn > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = xs + (y - ys) * (xn - xs) / (yn - ys)
        return bool(np.count_nonzero(cond & (x < xint)) % 2)

    def boundary_distance(self, pts) -> np.ndarray:
        """Distance from each point in ``pts`` to the polygon boundary."""
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        a = self.pts
        b = np.roll(self.pts, -1, axis=0)
        out = np.empty(len(pts))
        chunk = max(1, 2_000_000 // self.n)
        for s in range(0, len(pts), chunk):
            p = pts[s:s + chunk]
            d = seg_dist(p[:, 0:1], p[:, 1:2], a[:, 0], a[:, 1], b[:, 0], b[:, 1])
            out[s:s + chunk] = d.min(axis=1)
        return out

    def interior_angles(self) -> np.ndarray:
        """Interior angle at each vertex, assuming CCW orientation."""
        prev = np.roll(self.pts, 1, axis=0) - self.pts
        nxt = np.roll(self.pts, -1, axis=0) - self.pts
        a_out = np.arctan2(nxt[:, 1], nxt[:, 0])
        a_in = np.arctan2(prev[:, 1], prev[:, 0])
        return (a_in - a_out) % (2 * math.pi)
