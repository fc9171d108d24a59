"""Normalization, inward/outward offset loops, the tube, its bends and track.

All constructions assume the polygon has been normalized to unit minimum
feature size and is counter-clockwise. Offsets are assembled analytically
per edge and per vertex (miter corners, circular arcs at reflex vertices);
below half the feature size no topological events can occur, so no
straight-skeleton machinery is needed.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import DegeneratePolygon, OffsetCollapse, OffsetTooLarge
from .geom import CCW, CW, DEFAULT_TOL, Arc, Point, Polygon, Segment, dist_point_arc, dist_point_segment
from .metrics import diameter, min_feature_size


@dataclass(frozen=True)
class PipelineConstants:
    t_inner: Fraction = Fraction(2, 5)
    t_back: Fraction = Fraction(1, 5)
    track_gap: Fraction = Fraction(1, 40)
    circle_diam: Fraction = Fraction(1, 20)
    grid_step: Fraction = Fraction(1, 40)
    spacing_min: Fraction = Fraction(1, 20)
    spacing_max: Fraction = Fraction(3, 20)

    def as_dict(self) -> dict:
        return {k: str(v) for k, v in self.__dict__.items()}


CONSTANTS = PipelineConstants()

Piece = Union[Segment, Arc]


def piece_start(p: Piece) -> Point:
    return p.a if isinstance(p, Segment) else p.start


def piece_end(p: Piece) -> Point:
    return p.b if isinstance(p, Segment) else p.end


def piece_length(p: Piece) -> float:
    return p.length


def piece_at(p: Piece, s: float) -> Point:
    if isinstance(p, Arc):
        return p.at_length(s)
    L = p.length
    u = 0.0 if L == 0 else s / L
    return Point(p.a.x + u * (p.b.x - p.a.x), p.a.y + u * (p.b.y - p.a.y))


def piece_distance(p: Piece, q) -> float:
    return dist_point_arc(q, p) if isinstance(p, Arc) else dist_point_segment(q, p)


@dataclass
class OffsetLoop:
    """Closed curve of segments and arcs in CCW order."""

    pieces: list
    offset_distance: float
    source: Polygon
    vertex_piece: list = field(default_factory=list)  # per source vertex: arc piece index or None
    corners: list = field(default_factory=list)  # per source vertex: miter corner or None

    def sample(self, per_piece: int = 8) -> np.ndarray:
        out = []
        for p in self.pieces:
            L = p.length
            for k in range(per_piece):
                out.append(tuple(piece_at(p, L * k / per_piece)))
        return np.array(out)

    def sample_uniform(self, count: int) -> np.ndarray:
        """``count`` points at equal arclength steps along the loop."""
        lengths = np.array([p.length for p in self.pieces])
        cum = np.concatenate([[0.0], np.cumsum(lengths)])
        total = cum[-1]
        out = []
        for k in range(count):
            s = total * k / count
            i = min(int(np.searchsorted(cum, s, side="right")) - 1, len(self.pieces) - 1)
            out.append(tuple(piece_at(self.pieces[i], s - cum[i])))
        return np.array(out)

    def distance(self, q) -> float:
        return min(piece_distance(p, q) for p in self.pieces)

    def polyline(self, arc_samples: int = 16) -> np.ndarray:
        out = []
        for p in self.pieces:
            if isinstance(p, Arc):
                if p.sweep <= 0:
                    out.append(tuple(p.start))
                    continue
                step = (p.end_angle - p.start_angle) / arc_samples
                out.extend(tuple(p.point_at(p.start_angle + k * step)) for k in range(arc_samples))
            else:
                out.append(tuple(p.a))
        return np.array(out)

    @property
    def n_arcs(self) -> int:
        return sum(1 for p in self.pieces if isinstance(p, Arc) and p.sweep > 0)

    def is_closed(self, eps: float = 1e-9) -> bool:
        m = len(self.pieces)
        return all(piece_end(self.pieces[k]).dist(piece_start(self.pieces[(k + 1) % m])) <= eps
                   for k in range(m))

    def is_simple(self) -> bool:
        from shapely import LinearRing

        line = self.polyline()
        keep = np.ones(len(line), dtype=bool)
        keep[1:] = np.hypot(*(np.diff(line, axis=0).T)) > 1e-12
        return LinearRing(line[keep]).is_simple


def normalize(P: Polygon, tol=DEFAULT_TOL) -> tuple[Polygon, float]:
    """Scale ``P`` to unit minimum feature size; returns the polygon and the scale."""
    m, _ = min_feature_size(P)
    if m <= tol.eps_abs * diameter(P):
        raise DegeneratePolygon(f"minimum feature size {m:g} is degenerate")
    return Polygon(P.pts / m), m


def _frames(P: Polygon):
    pts = P.pts
    d = np.roll(pts, -1, axis=0) - pts
    d /= np.hypot(d[:, 0], d[:, 1])[:, None]
    normal = np.stack([-d[:, 1], d[:, 0]], axis=1)  # inward for CCW
    d_prev = np.roll(d, 1, axis=0)
    cross = d_prev[:, 0] * d[:, 1] - d_prev[:, 1] * d[:, 0]
    dot = (d_prev * d).sum(axis=1)
    turn = np.arctan2(cross, dot)  # >0 convex, <0 reflex
    return d, normal, turn


def inward_offset(P: Polygon, t: float) -> OffsetLoop:
    """Level set at distance ``t`` inside a CCW polygon of unit feature size.

    Edges move inward by ``t``; convex (and straight) vertices become miter
    corners, reflex vertices become CW arcs of radius ``t`` about the vertex.
    """
    if not 0 < t < 0.5:
        raise OffsetTooLarge(f"offset {t} outside (0, 1/2)")
    n = P.n
    pts = P.pts
    d, nrm, turn = _frames(P)
    corners: list = [None] * n
    for i in range(n):
        if turn[i] >= 0:
            a, b = nrm[i - 1], nrm[i]
            c = pts[i] + t * (a + b) / (1.0 + float(a @ b))
            corners[i] = Point(*c)

    pieces: list = []
    vertex_piece: list = [None] * n
    for i in range(n):
        if corners[i] is None:
            start = math.atan2(nrm[i - 1][1], nrm[i - 1][0])
            vertex_piece[i] = len(pieces)
            pieces.append(Arc(Point(*pts[i]), t, start, start + turn[i], CW))
        j = (i + 1) % n
        s = corners[i] if corners[i] is not None else Point(*(pts[i] + t * nrm[i]))
        e = corners[j] if corners[j] is not None else Point(*(pts[j] + t * nrm[i]))
        along = (e.x - s.x) * d[i][0] + (e.y - s.y) * d[i][1]
        if along <= 1e-12:
            raise OffsetCollapse(f"offset edge {i} vanishes at t={t}", edge=i)
        pieces.append(Segment(s, e))
    return OffsetLoop(pieces, t, P, vertex_piece, corners)


def outward_offset(L: OffsetLoop, t: float) -> OffsetLoop:
    """Push a CCW loop outward by ``t``.

    Segments translate along their right normal; CCW arcs grow by ``t`` and
    CW arcs shrink by ``t`` about the same center; each miter corner of the
    source loop becomes a CCW arc of radius ``t`` centered on the corner.
    """
    n = L.source.n
    pieces: list = []
    vertex_piece: list = [None] * n
    k = 0
    # source pieces are grouped per vertex: [optional arc], segment
    for i in range(n):
        p = L.pieces[k]
        seg_k = k
        if isinstance(p, Arc):
            r = p.radius + t if p.orientation == CCW else p.radius - t
            if r <= 0:
                raise OffsetCollapse(f"arc at vertex {i} shrinks to nothing", vertex=i)
            vertex_piece[i] = len(pieces)
            pieces.append(p.concentric(r))
            seg_k = k + 1
        else:
            c = L.corners[i]
            prev_seg = L.pieces[k - 1]
            a0 = _right_normal_angle(prev_seg)
            a1 = _right_normal_angle(L.pieces[k])
            sweep = (a1 - a0 + math.pi) % (2 * math.pi) - math.pi
            if sweep < -1e-9:
                raise OffsetCollapse(f"concave miter at vertex {i}", vertex=i)
            vertex_piece[i] = len(pieces)
            pieces.append(Arc(c, t, a0, a0 + max(sweep, 0.0), CCW))
        seg = L.pieces[seg_k]
        a = _right_normal_angle(seg)
        off = Point(t * math.cos(a), t * math.sin(a))
        pieces.append(Segment(seg.a + off, seg.b + off))
        k = seg_k + 1
    return OffsetLoop(pieces, -t, L.source, vertex_piece, [None] * n)


def _right_normal_angle(seg: Segment) -> float:
    return math.atan2(-(seg.b.x - seg.a.x), seg.b.y - seg.a.y)


@dataclass(frozen=True)
class Bend:
    vertex_index: int
    greater_arc: Arc
    minor_arc: Union[Arc, Point]
    doors: tuple
    convexity: str  # "convex" | "reflex"

    @property
    def center(self) -> Point:
        return self.greater_arc.center

    @property
    def radii(self) -> tuple[float, float]:
        rmin = 0.0 if isinstance(self.minor_arc, Point) else self.minor_arc.radius
        return rmin, self.greater_arc.radius

    def distance_to_region(self, q, cap: float = math.inf) -> float:
        """Distance from ``q`` to the closed bend region (0 inside).

        When the distance certainly exceeds ``cap`` a cheaper lower bound,
        still above ``cap``, may be returned instead.
        """
        c = self.center
        rx, ry = q[0] - c.x, q[1] - c.y
        rho = math.hypot(rx, ry)
        rmin, rmax = self.radii
        if rho - rmax > cap:
            return rho - rmax
        g = self.greater_arc
        if rho == 0:
            return rmin
        if g.contains_angle(math.atan2(ry, rx)):
            return max(rmin - rho, rho - rmax, 0.0)
        return min(dist_point_segment(q, (door.a, door.b)) for door in self.doors)


@dataclass
class Tube:
    polygon: Polygon  # normalized, CCW
    P1: OffsetLoop
    P2: OffsetLoop
    bends: list


def build_tube(P: Polygon, constants: PipelineConstants = CONSTANTS) -> Tube:
    """P2 = inward offset at 2/5, P1 = P2 pushed back out by 1/5, one bend per vertex."""
    t_in = float(constants.t_inner)
    t_back = float(constants.t_back)
    P2 = inward_offset(P, t_in)
    P1 = outward_offset(P2, t_back)
    bends = []
    for i in range(P.n):
        outer = P1.pieces[P1.vertex_piece[i]]
        if P2.vertex_piece[i] is None:
            c = P2.corners[i]
            doors = (Segment(c, outer.start), Segment(c, outer.end))
            bends.append(Bend(i, outer, c, doors, "convex"))
        else:
            greater = P2.pieces[P2.vertex_piece[i]]
            doors = (Segment(outer.start, greater.start), Segment(outer.end, greater.end))
            bends.append(Bend(i, greater, outer, doors, "reflex"))
    return Tube(P, P1, P2, bends)


@dataclass
class Track:
    """Closed track: per bend an arc, then a straight piece to the next bend."""

    pieces: list
    membership: list  # bend index per piece, None for connecting segments
    cumulative: list = field(default_factory=list)

    def __post_init__(self):
        acc = [0.0]
        for p in self.pieces:
            acc.append(acc[-1] + p.length)
        self.cumulative = acc

    @property
    def length(self) -> float:
        return self.cumulative[-1]

    def point_at(self, s: float) -> Point:
        s = s % self.length
        k = min(bisect.bisect_right(self.cumulative, s) - 1, len(self.pieces) - 1)
        return piece_at(self.pieces[k], s - self.cumulative[k])

    def bend_arc(self, i: int) -> Arc:
        return self.pieces[2 * i]

    def bend_start(self, i: int) -> float:
        return self.cumulative[2 * i]


def build_track(tube: Tube, constants: PipelineConstants = CONSTANTS) -> Track:
    gap = float(constants.track_gap)
    arcs = [b.greater_arc.concentric(b.greater_arc.radius - gap) for b in tube.bends]
    n = len(arcs)
    pieces, membership = [], []
    d, _, _ = _frames(tube.polygon)
    for i in range(n):
        pieces.append(arcs[i])
        membership.append(i)
        a, b = arcs[i].end, arcs[(i + 1) % n].start
        if (b.x - a.x) * d[i][0] + (b.y - a.y) * d[i][1] <= 0:
            raise OffsetCollapse(f"track stretch along edge {i} runs backwards", stage="track", edge=i)
        pieces.append(Segment(a, b))
        membership.append(None)
    return Track(pieces, membership)
