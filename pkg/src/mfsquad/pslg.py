"""Planar straight-line drawings: construction, face extraction, validation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial import cKDTree

from .errors import CrossingEdges, DisconnectedDrawing, DuplicateVertex
from .geom import DEFAULT_TOL, Polygon, Tolerance, orient, segment_crossings

VERTEX_ROLES = ("original", "steiner_inner", "steiner_trap")
EDGE_ROLES = ("boundary_P", "inner_P'", "chord", "trapezoid")


@dataclass(frozen=True)
class Face:
    boundary: tuple[int, ...]  # directed half-edge ids, 2*e or 2*e+1
    vertices: tuple[int, ...]
    corner_count: int
    is_outer: bool
    area: float  # signed; positive for bounded faces


@dataclass
class ValidationReport:
    crossings: list[tuple[int, int]] = field(default_factory=list)
    duplicate_vertices: list[tuple[int, int]] = field(default_factory=list)
    dangling_edges: list[int] = field(default_factory=list)
    euler_mismatch: tuple[int, int] | None = None  # (V - E + F, expected)

    @property
    def ok(self) -> bool:
        return not (self.crossings or self.duplicate_vertices or self.dangling_edges
                    or self.euler_mismatch)

    def __bool__(self):
        # truthy when there are findings
        return not self.ok

    def summary(self) -> str:
        if self.ok:
            return "ok"
        parts = []
        if self.crossings:
            parts.append(f"{len(self.crossings)} crossing pair(s), first {self.crossings[0]}")
        if self.duplicate_vertices:
            parts.append(f"{len(self.duplicate_vertices)} duplicate vertex pair(s)")
        if self.dangling_edges:
            parts.append(f"{len(self.dangling_edges)} dangling edge(s)")
        if self.euler_mismatch:
            parts.append("Euler characteristic %d != %d" % self.euler_mismatch)
        return "; ".join(parts)


class Drawing:
    """Vertices, undirected edges and role tags of a planar straight-line drawing.

    Half-edge ``2*e`` runs ``edges[e][0] -> edges[e][1]``; ``2*e + 1`` is its twin.
    """

    def __init__(self, points, edges, vertex_roles=None, edge_roles=None, tol: Tolerance = DEFAULT_TOL):
        self.points = np.asarray(points, dtype=float).reshape(-1, 2)
        self.edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        nv = len(self.points)
        self.vertex_roles = list(vertex_roles) if vertex_roles is not None else ["original"] * nv
        self.edge_roles = list(edge_roles) if edge_roles is not None else ["boundary_P"] * len(self.edges)
        self.tol = tol
        self.points.setflags(write=False)
        self.edges.setflags(write=False)

    @classmethod
    def from_polygon(cls, poly: Polygon) -> "Drawing":
        return cls(poly.pts, poly.edge_array())

    def __repr__(self):
        return f"Drawing(V={self.n_vertices}, E={self.n_edges})"

    @property
    def n_vertices(self) -> int:
        return len(self.points)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def scaled(self, s: float) -> "Drawing":
        return Drawing(self.points * s, self.edges, self.vertex_roles, self.edge_roles, self.tol)

    def degree(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n_vertices)

    @cached_property
    def _rotation(self):
        """Outgoing half-edges per vertex sorted CCW by angle (CSR layout)."""
        e = self.edges
        origin = np.concatenate([e[:, 0], e[:, 1]])
        dest = np.concatenate([e[:, 1], e[:, 0]])
        he = np.concatenate([2 * np.arange(len(e)), 2 * np.arange(len(e)) + 1])
        d = self.points[dest] - self.points[origin]
        ang = np.arctan2(d[:, 1], d[:, 0])
        order = np.lexsort((ang, origin))
        he_sorted = he[order]
        starts = np.searchsorted(origin[order], np.arange(self.n_vertices + 1))
        pos = np.empty(len(he), dtype=np.int64)
        pos[he_sorted] = np.arange(len(he))
        return he_sorted, starts, pos

    def adjacency(self, v: int) -> list[int]:
        """Edge indices incident to ``v`` in CCW angular order."""
        he_sorted, starts, _ = self._rotation
        return [int(h) // 2 for h in he_sorted[starts[v]:starts[v + 1]]]

    def head(self, h: int) -> int:
        e = self.edges[h >> 1]
        return int(e[1] if h % 2 == 0 else e[0])

    def tail(self, h: int) -> int:
        e = self.edges[h >> 1]
        return int(e[0] if h % 2 == 0 else e[1])

    @cached_property
    def faces(self) -> list[Face]:
        return extract_faces(self)


def build_drawing(points, edges, vertex_roles=None, edge_roles=None, validate: bool = True,
                  tol: Tolerance = DEFAULT_TOL) -> Drawing:
    """Build a drawing, merging duplicate edges.

    With ``validate`` set, raises :class:`DuplicateVertex` for coincident input
    points and :class:`CrossingEdges` for the first illegal edge pair.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    seen: dict[tuple[int, int], int] = {}
    kept, roles = [], []
    for k, (i, j) in enumerate(edges):
        i, j = int(i), int(j)
        if not (0 <= i < len(pts) and 0 <= j < len(pts)):
            raise IndexError(f"edge {k} references a missing vertex")
        if i == j:
            raise ValueError(f"edge {k} is a loop at vertex {i}")
        key = (min(i, j), max(i, j))
        if key in seen:
            continue
        seen[key] = len(kept)
        kept.append((i, j))
        roles.append(edge_roles[k] if edge_roles is not None else "boundary_P")
    d = Drawing(pts, kept, vertex_roles, roles, tol)
    if validate:
        dups = duplicate_vertices(d)
        if dups:
            raise DuplicateVertex(f"vertices {dups[0][0]} and {dups[0][1]} coincide")
        crossings = segment_crossings(d.points, d.edges, tol)
        if crossings:
            i, j = crossings[0]
            raise CrossingEdges(f"edges {i} {tuple(d.edges[i])} and {j} {tuple(d.edges[j])} cross",
                                pair=(i, j))
    return d


def duplicate_vertices(d: Drawing) -> list[tuple[int, int]]:
    if d.n_vertices < 2:
        return []
    pairs = cKDTree(d.points).query_pairs(d.tol.eps_abs, output_type="ndarray")
    return sorted((int(a), int(b)) for a, b in pairs)


def _components(d: Drawing) -> int:
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    used = np.unique(d.edges.ravel())
    if len(used) == 0:
        return 0
    m = coo_matrix((np.ones(len(d.edges)), (d.edges[:, 0], d.edges[:, 1])),
                   shape=(d.n_vertices, d.n_vertices))
    _, labels = connected_components(m, directed=False)
    return len(np.unique(labels[used]))


def extract_faces(d: Drawing, strict: bool = False) -> list[Face]:
    """Trace every face by walking half-edges with the face on the left.

    Each connected component contributes one outer face (negative signed
    area). With ``strict`` set a disconnected drawing raises
    :class:`DisconnectedDrawing`; otherwise faces of every component are
    returned.
    """
    if strict and _components(d) > 1:
        raise DisconnectedDrawing("drawing has more than one connected component")
    he_sorted, starts, pos = d._rotation
    nh = 2 * d.n_edges
    e = d.edges
    heads = np.where(np.arange(nh) % 2 == 0, e[np.arange(nh) >> 1, 1], e[np.arange(nh) >> 1, 0])
    # next(h): at head v, the outgoing edge just clockwise of twin(h)
    twin = np.arange(nh) ^ 1
    p = pos[twin]
    v = heads
    deg = starts[v + 1] - starts[v]
    nxt = he_sorted[starts[v] + (p - starts[v] - 1) % deg]

    pts = d.points
    visited = np.zeros(nh, dtype=bool)
    faces: list[Face] = []
    heads_l = heads.tolist()
    nxt_l = nxt.tolist()
    for h0 in range(nh):
        if visited[h0]:
            continue
        cycle = []
        h = h0
        while not visited[h]:
            visited[h] = True
            cycle.append(h)
            h = nxt_l[h]
        verts = [heads_l[x ^ 1] for x in cycle]  # tails
        faces.append(_make_face(cycle, verts, pts, d.tol))
    return faces


def _make_face(cycle, verts, pts, tol) -> Face:
    P = pts[verts]
    x, y = P[:, 0], P[:, 1]
    area = 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))
    corners = 0
    m = len(verts)
    for k in range(m):
        a, b, c = P[k - 1], P[k], P[(k + 1) % m]
        u, w = a - b, c - b
        scale = max(math.hypot(*u), math.hypot(*w))
        # a boundary vertex is a corner unless the walk continues straight through it
        if orient(a, b, c, tol, scale) == 0 and float(np.dot(u, w)) < 0:
            continue
        corners += 1
    return Face(tuple(cycle), tuple(int(v) for v in verts), corners, area <= 0, area)


def bounded_faces(d: Drawing) -> list[Face]:
    return [f for f in d.faces if not f.is_outer]


def validate(d: Drawing) -> ValidationReport:
    """Structural findings for ``d``; an empty report means it is sound."""
    rep = ValidationReport()
    rep.crossings = segment_crossings(d.points, d.edges, d.tol)
    rep.duplicate_vertices = duplicate_vertices(d)
    deg = d.degree()
    rep.dangling_edges = [k for k, (i, j) in enumerate(d.edges) if deg[i] == 1 or deg[j] == 1]
    if not rep.crossings and d.n_edges:
        comps = _components(d)
        used = int(np.count_nonzero(deg))
        chi = used - d.n_edges + len(d.faces)
        # every component is traced with its own outer face
        if chi != 2 * comps:
            rep.euler_mismatch = (chi, 2 * comps)
    return rep
