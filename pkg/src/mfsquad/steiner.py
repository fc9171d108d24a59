"""Circle slots on the track, lattice snapping, and the inner polygon P'."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import GridPointOutsideCircle, SelfIntersectingInner
from .geom import Point, Polygon, segment_crossings
from .tube import CONSTANTS, PipelineConstants, Track


@dataclass(frozen=True)
class CircleSlot:
    center: Point
    radius: float
    bend: int | None
    position: float  # arclength along the track
    anchor: bool = False


@dataclass
class InnerPolygon:
    """Steiner polygon through one lattice point per kept circle.

    ``lattice`` holds integer coordinates in units of the grid step, so
    predicates on P' vertices are exact.
    """

    lattice: np.ndarray  # (m, 2) int64
    bend: np.ndarray  # (m,) source bend per vertex
    slots: list
    denom: int = 40

    @property
    def points(self) -> np.ndarray:
        return self.lattice / self.denom

    def __len__(self):
        return len(self.lattice)

    def polygon(self) -> Polygon:
        return Polygon(self.points)

    @classmethod
    def from_lattice(cls, lattice, bend=None, denom: int = 40) -> "InnerPolygon":
        lat = np.asarray(lattice, dtype=np.int64).reshape(-1, 2)
        b = np.full(len(lat), -1) if bend is None else np.asarray(bend)
        return cls(lat, b, [], denom)


def place_circles(track: Track, bends, constants: PipelineConstants = CONSTANTS) -> list[CircleSlot]:
    """Slots of diameter 1/20 along the track, kept only near bends.

    One anchor sits at the arclength midpoint of every bend's track arc.
    Between consecutive anchors slots are spread evenly with a boundary gap in
    [1/20, 3/20). A non-anchor slot survives only if its circle meets the
    region of one of the two bends it lies between.
    """
    r = float(constants.circle_diam) / 2
    pitch = float(constants.circle_diam + constants.spacing_min)
    n = len(bends)
    total = track.length
    anchors = [track.bend_start(i) + track.bend_arc(i).length / 2 for i in range(n)]
    slots: list[CircleSlot] = []
    for i in range(n):
        j = (i + 1) % n
        s0 = anchors[i]
        slots.append(CircleSlot(track.point_at(s0), r, i, s0, True))
        stretch = (anchors[j] - s0) % total if n > 1 else total
        m = max(1, math.floor(stretch / pitch + 1e-9))
        for k in range(1, m):
            s = s0 + k * stretch / m
            c = track.point_at(s)
            di = bends[i].distance_to_region(c, cap=r)
            dj = bends[j].distance_to_region(c, cap=r)
            if min(di, dj) > r + 1e-12:
                continue
            slots.append(CircleSlot(c, r, i if di <= dj else j, s % total))
    return slots


def nearest_lattice(x: float, y: float, denom: int = 40) -> tuple[int, int]:
    """Nearest lattice point to ``(x, y)``; ties go to the lowest x, then y."""
    fx, fy = x * denom, y * denom
    best = None
    for i in (math.floor(fx), math.floor(fx) + 1):
        for j in (math.floor(fy), math.floor(fy) + 1):
            key = ((i - fx) ** 2 + (j - fy) ** 2, i, j)
            if best is None or key < best:
                best = key
    return best[1], best[2]


def snap_to_grid(slots, constants: PipelineConstants = CONSTANTS) -> InnerPolygon:
    step = constants.grid_step
    if step.numerator != 1:
        raise ValueError("grid step must be 1/q")
    denom = step.denominator
    lat = np.empty((len(slots), 2), dtype=np.int64)
    for k, s in enumerate(slots):
        i, j = nearest_lattice(s.center.x, s.center.y, denom)
        if math.hypot(i / denom - s.center.x, j / denom - s.center.y) > s.radius + 1e-12:
            raise GridPointOutsideCircle(f"no lattice point inside slot {k}", slot=k)
        lat[k] = (i, j)
    inner = InnerPolygon(lat, np.array([s.bend for s in slots]), list(slots), denom)
    check_inner_simple(inner)
    return inner


def check_inner_simple(inner: InnerPolygon):
    m = len(inner)
    if len(np.unique(inner.lattice, axis=0)) != m:
        raise SelfIntersectingInner("two slots snapped to the same lattice point")
    i = np.arange(m)
    pairs = segment_crossings(inner.points, np.stack([i, (i + 1) % m], axis=1))
    if pairs:
        raise SelfIntersectingInner(f"inner polygon edges {pairs[0]} intersect", pair=pairs[0])


@dataclass(frozen=True)
class SeparationReport:
    min_boundary_distance: float  # P' vertices to the boundary of P
    min_pairwise: float  # between any two Steiner vertices
    min_cross_bend: float  # between Steiner vertices of different bends

    def ok(self, eps: float = 1e-9) -> bool:
        return self.min_boundary_distance >= 0.2 - eps and self.min_pairwise >= 1 / 40 - 1e-12


def separation_certificate(P: Polygon, inner: InnerPolygon) -> SeparationReport:
    pts = inner.points
    bd = float(P.boundary_distance(pts).min())
    tree = cKDTree(pts)
    dd, _ = tree.query(pts, k=2)
    pairwise = float(dd[:, 1].min())
    cross = math.inf
    for a, b in tree.query_pairs(1.0, output_type="ndarray"):
        if inner.bend[a] != inner.bend[b]:
            cross = min(cross, float(np.hypot(*(pts[a] - pts[b]))))
    return SeparationReport(bd, pairwise, cross)
