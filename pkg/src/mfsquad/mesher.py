"""Zone chords, horizontal trapezoidation of P', and the end-to-end pipeline."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ChordCrossing, InternalError, MfsquadError
from .geom import DEFAULT_TOL, Point, Polygon, Segment, orient
from .pslg import Drawing, Face, validate
from .steiner import InnerPolygon, place_circles, snap_to_grid
from .tube import CONSTANTS, PipelineConstants, build_track, build_tube, normalize

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Chord:
    apex: int  # vertex of P
    steiner: int  # vertex of P'
    segment: Segment


def bend_chords(P: Polygon, inner: InnerPolygon) -> list[Chord]:
    """One chord from each polygon vertex to every Steiner vertex of its bend."""
    pts = inner.points
    out = []
    for j, b in enumerate(inner.bend):
        b = int(b)
        out.append(Chord(b, j, Segment(P[b], Point(*pts[j]))))
    missing = set(range(P.n)) - {c.apex for c in out}
    if missing:
        raise InternalError(f"bends without Steiner vertices: {sorted(missing)[:5]}", stage="chords")
    return out


@dataclass(frozen=True)
class TrapEdge:
    """Horizontal edge from a P' vertex to the first boundary contact.

    Endpoint references are ``("v", i)`` for a P' vertex or ``("t", k)`` for
    the k-th new vertex on the boundary of P'.
    """

    y: float
    left: Point
    right: Point
    source: int
    left_ref: tuple
    right_ref: tuple


@dataclass
class Trapezoidation:
    edges: list  # TrapEdge
    new_points: np.ndarray  # (k, 2) coordinates of vertices added on P'
    new_edge: np.ndarray  # (k,) P' edge index hosting each new vertex
    new_row: np.ndarray  # (k,) lattice row of each new vertex


def _ray_enters(ax, ay, bx, by, dx) -> bool:
    """Whether direction (dx, 0) points strictly into the interior wedge.

    ``a`` is the outgoing edge vector and ``b`` the reversed incoming edge
    vector at a vertex of a CCW polygon; the interior is swept CCW from a to b.
    """
    c_ab = ax * by - ay * bx
    if c_ab > 0:
        return -ay * dx > 0 and dx * by > 0
    if c_ab < 0:
        return not (-by * dx >= 0 and dx * ay >= 0)
    if ax * bx + ay * by < 0:
        return -ay * dx > 0
    return False


def trapezoidate(inner: InnerPolygon) -> Trapezoidation:
    """Shoot horizontal rays left and right from every P' vertex.

    Each ray that starts into the interior stops at the first boundary
    contact: a P' vertex on the same row, or a point on an edge, which becomes
    a new vertex. Rays running along a horizontal boundary edge do not enter
    the interior and are suppressed. Works on exact lattice coordinates.
    """
    lat = inner.lattice
    m = len(lat)
    denom = inner.denom
    I = lat[:, 0]
    J = lat[:, 1]
    a = np.arange(m)
    b = (a + 1) % m
    rows = np.unique(J)
    lo = np.minimum(J[a], J[b])
    hi = np.maximum(J[a], J[b])
    s = np.searchsorted(rows, lo, "left")
    cnt = np.searchsorted(rows, hi, "right") - s
    eid = np.repeat(a, cnt)
    offs = np.arange(int(cnt.sum())) - np.repeat(np.cumsum(cnt) - cnt, cnt)
    row = rows[s[eid] + offs]
    ia, ib, ja, jb = I[eid], I[b[eid]], J[eid], J[b[eid]]
    with np.errstate(divide="ignore", invalid="ignore"):
        x = ia + (row - ja) * (ib - ia) / (jb - ja)
    x = np.where(row == ja, ia, np.where(row == jb, ib, x)).astype(float)
    vid = np.where(row == ja, eid, np.where(row == jb, b[eid], -1))
    order = np.lexsort((x, row))
    row, x, vid, eid = row[order], x[order], vid[order], eid[order]
    row_start = np.searchsorted(row, rows, "left")
    row_end = np.searchsorted(row, rows, "right")
    row_pos = {int(r): k for k, r in enumerate(rows)}

    new_index: dict = {}
    new_pts, new_edge, new_row = [], [], []
    edges: list[TrapEdge] = []
    seen_vv = set()
    Il, Jl = I.tolist(), J.tolist()
    for v in range(m):
        p, q = (v - 1) % m, (v + 1) % m
        ax, ay = Il[q] - Il[v], Jl[q] - Jl[v]
        bx, by = Il[p] - Il[v], Jl[p] - Jl[v]
        rk = row_pos[Jl[v]]
        r0, r1 = row_start[rk], row_end[rk]
        xs = x[r0:r1]
        for dx in (1, -1):
            if not _ray_enters(ax, ay, bx, by, dx):
                continue
            if dx > 0:
                k = int(np.searchsorted(xs, Il[v], "right"))
                if k >= len(xs):
                    raise InternalError(f"rightward ray from P' vertex {v} escapes", stage="trapezoidate")
                hit_x = xs[k]
                cand = range(k, len(xs))
            else:
                k = int(np.searchsorted(xs, Il[v], "left")) - 1
                if k < 0:
                    raise InternalError(f"leftward ray from P' vertex {v} escapes", stage="trapezoidate")
                hit_x = xs[k]
                cand = range(k, -1, -1)
            hit_v, hit_e = -1, -1
            for c in cand:
                if xs[c] != hit_x:
                    break
                if vid[r0 + c] >= 0:
                    hit_v = int(vid[r0 + c])
                    break
                hit_e = int(eid[r0 + c])
            y = Jl[v] / denom
            if hit_v >= 0:
                key = (min(v, hit_v), max(v, hit_v))
                if key in seen_vv:
                    continue
                seen_vv.add(key)
                ref = ("v", hit_v)
                hit_pt = Point(Il[hit_v] / denom, y)
            else:
                nk = (hit_e, Jl[v])
                if nk not in new_index:
                    new_index[nk] = len(new_pts)
                    new_pts.append((hit_x / denom, y))
                    new_edge.append(hit_e)
                    new_row.append(Jl[v])
                ref = ("t", new_index[nk])
                hit_pt = Point(hit_x / denom, y)
            src = Point(Il[v] / denom, y)
            if dx > 0:
                edges.append(TrapEdge(y, src, hit_pt, v, ("v", v), ref))
            else:
                edges.append(TrapEdge(y, hit_pt, src, v, ref, ("v", v)))
    return Trapezoidation(edges, np.array(new_pts, dtype=float).reshape(-1, 2),
                          np.array(new_edge, dtype=np.int64), np.array(new_row, dtype=np.int64))


@dataclass
class Mesh:
    drawing: Drawing  # original units
    normalized: Drawing  # unit feature size units
    polygon: Polygon  # input, CCW, original units
    scale: float
    zone_faces: list
    trap_faces: list
    constants: PipelineConstants = CONSTANTS
    inner: InnerPolygon | None = None
    tube: object = None
    track: object = None
    slots: list = field(default_factory=list)
    chords: list = field(default_factory=list)
    trapezoidation: Trapezoidation | None = None

    @property
    def n(self) -> int:
        return self.polygon.n

    @property
    def stats(self) -> dict:
        roles = self.drawing.vertex_roles
        inner = roles.count("steiner_inner")
        trap = roles.count("steiner_trap")
        return {"n": self.n, "steiner_inner": inner, "steiner_trap": trap,
                "steiner_total": inner + trap, "vertices": self.drawing.n_vertices,
                "edges": self.drawing.n_edges, "faces": len(self.zone_faces) + len(self.trap_faces)}

    @property
    def steiner_count(self) -> int:
        return self.stats["steiner_total"]

    @property
    def provenance(self) -> dict:
        return {"constants": self.constants.as_dict(), "scale": self.scale}

    def bounded_faces(self) -> list[Face]:
        return self.zone_faces + self.trap_faces


def _corner_count(P: Polygon) -> int:
    n = P.n
    return sum(1 for i in range(n) if orient(P[i - 1], P[i], P[i + 1], DEFAULT_TOL,
                                             max(P[i - 1].dist(P[i]), P[i + 1].dist(P[i]))) != 0)


def quadrangulate(P: Polygon, constants: PipelineConstants = CONSTANTS, check: bool = True) -> Mesh:
    """Non-proper quadrangulation of a simple polygon with constant degradation.

    normalize -> tube -> track -> circles -> snap -> chords -> trapezoidate ->
    assemble -> validate -> rescale. Every bounded face of the result has at
    most four corners; collinear subdivision vertices are not corners.
    """
    if P.n < 3:
        raise ValueError("polygon needs at least 3 vertices")
    P.require_simple()
    P = P.ccw()
    Q, scale = normalize(P)

    if _corner_count(Q) <= 3:
        # a triangle is its own decomposition; its inradius is below 2/5
        d = Drawing.from_polygon(Q)
        faces = [f for f in d.faces if not f.is_outer]
        return Mesh(d.scaled(scale), d, P, scale, faces, [], constants)

    try:
        tube = build_tube(Q, constants)
        track = build_track(tube, constants)
        slots = place_circles(track, tube.bends, constants)
        inner = snap_to_grid(slots, constants)
        chords = bend_chords(Q, inner)
        trap = trapezoidate(inner)
    except MfsquadError:
        raise
    except Exception as exc:  # pragma: no cover - surfaced with stage context
        raise InternalError(f"unexpected failure: {exc!r}", stage="construct") from exc

    d = _assemble(Q, inner, chords, trap)
    if check:
        rep = validate(d)
        if not rep.ok:
            chordy = [p for p in rep.crossings if "chord" in (d.edge_roles[p[0]], d.edge_roles[p[1]])]
            if chordy:
                raise ChordCrossing(f"chord crossing between edges {chordy[0]}", pair=chordy[0])
            raise InternalError(f"assembled drawing invalid: {rep.summary()}", stage="assemble")
    bounded = [f for f in d.faces if not f.is_outer]
    n = Q.n
    zone = [f for f in bounded if min(f.vertices) < n]
    tfaces = [f for f in bounded if min(f.vertices) >= n]
    log.debug("quadrangulate: n=%d steiner=%d faces=%d", n, d.n_vertices - n, len(bounded))
    return Mesh(d.scaled(scale), d, P, scale, zone, tfaces, constants, inner, tube, track, slots,
                chords, trap)


def _assemble(Q: Polygon, inner: InnerPolygon, chords, trap: Trapezoidation) -> Drawing:
    n, m, k = Q.n, len(inner), len(trap.new_points)
    pts = np.concatenate([Q.pts, inner.points, trap.new_points])
    vroles = ["original"] * n + ["steiner_inner"] * m + ["steiner_trap"] * k
    edges, eroles = [], []
    for i in range(n):
        edges.append((i, (i + 1) % n))
        eroles.append("boundary_P")

    lat = inner.lattice
    splits: dict[int, list] = {}
    for t, (e, r) in enumerate(zip(trap.new_edge.tolist(), trap.new_row.tolist())):
        splits.setdefault(e, []).append((r, t))
    for e in range(m):
        a, b = e, (e + 1) % m
        chain = [n + a]
        if e in splits:
            up = lat[b, 1] > lat[a, 1]
            for _, t in sorted(splits[e], reverse=not up):
                chain.append(n + m + t)
        chain.append(n + b)
        for u, v in zip(chain, chain[1:]):
            edges.append((u, v))
            eroles.append("inner_P'")

    for c in chords:
        edges.append((c.apex, n + c.steiner))
        eroles.append("chord")

    def vid(ref):
        return n + ref[1] if ref[0] == "v" else n + m + ref[1]

    for te in trap.edges:
        edges.append((vid(te.left_ref), vid(te.right_ref)))
        eroles.append("trapezoid")
    return Drawing(pts, edges, vroles, eroles)
