from collections import Counter

import numpy as np
import pytest

from conftest import L_SHAPE, SQUARE, regular_pts
from mfsquad.errors import NotSimple
from mfsquad.geom import Polygon
from mfsquad.lab import gen_comb, gen_random_simple
from mfsquad.mesher import _assemble, bend_chords, quadrangulate, trapezoidate
from mfsquad.metrics import audit_angle_bound, classify_faces, min_feature_size
from mfsquad.pslg import Drawing, bounded_faces, validate
from mfsquad.steiner import InnerPolygon


def manual_mesh(lattice, bend):
    Q = Polygon(SQUARE)
    inner = InnerPolygon.from_lattice(lattice, bend)
    d = _assemble(Q, inner, bend_chords(Q, inner), trapezoidate(inner))
    assert validate(d).ok
    faces = bounded_faces(d)
    zone = [f for f in faces if min(f.vertices) < 4]
    trap = [f for f in faces if min(f.vertices) >= 4]
    return d, zone, trap


def test_square_one_steiner_per_bend():
    d, zone, trap = manual_mesh([[8, 8], [32, 8], [32, 32], [8, 32]], [0, 1, 2, 3])
    assert d.edge_roles.count("chord") == 4
    assert sorted(f.corner_count for f in zone) == [4, 4, 4, 4]
    # axis-aligned rectangle: every ray runs along the boundary
    assert d.edge_roles.count("trapezoid") == 0 and len(trap) == 1


def test_square_three_steiner_per_bend():
    lat = [[8, 12], [8, 8], [12, 8], [28, 8], [32, 8], [32, 12],
           [32, 28], [32, 32], [28, 32], [12, 32], [8, 32], [8, 28]]
    d, zone, trap = manual_mesh(lat, [b for b in range(4) for _ in range(3)])
    assert d.edge_roles.count("chord") == 12
    assert Counter(f.corner_count for f in zone) == {3: 8, 4: 4}
    assert all(f.corner_count in (3, 4) for f in trap)


def test_trapezoidate_rectangle():
    t = trapezoidate(InnerPolygon.from_lattice([[0, 0], [10, 0], [10, 4], [0, 4]]))
    assert t.edges == [] and len(t.new_points) == 0


def test_trapezoidate_convex_distinct_rows():
    inner = InnerPolygon.from_lattice([[0, 0], [6, 1], [9, 5], [4, 9], [-2, 6], [-3, 2]])
    t = trapezoidate(inner)
    assert len(t.edges) <= len(inner)
    for e in t.edges:
        assert e.left.y == e.right.y == e.y and e.left.x < e.right.x
        assert inner.polygon().contains(((e.left.x + e.right.x) / 2, e.y))


def test_trapezoidate_nonconvex_faces():
    # a U shape: the notch forces rays to stop on the far arm
    lat = [[0, 0], [9, 0], [9, 9], [6, 9], [6, 3], [3, 4], [3, 9], [0, 9]]
    inner = InnerPolygon.from_lattice(lat)
    t = trapezoidate(inner)
    assert len(t.new_points) <= 2 * len(inner)
    m = len(lat)
    pts = np.concatenate([inner.points, t.new_points])
    edges = []
    splits = {}
    for k, (e, r) in enumerate(zip(t.new_edge.tolist(), t.new_row.tolist())):
        splits.setdefault(e, []).append((r, k))
    for e in range(m):
        a, b = e, (e + 1) % m
        chain = [a] + [m + k for _, k in sorted(splits.get(e, []), reverse=lat[b][1] < lat[a][1])] + [b]
        edges += list(zip(chain, chain[1:]))
    ref = lambda r: r[1] if r[0] == "v" else m + r[1]
    edges += [(ref(e.left_ref), ref(e.right_ref)) for e in t.edges]
    d = Drawing(pts, edges)
    assert validate(d).ok
    faces = bounded_faces(d)
    assert all(f.corner_count in (3, 4) for f in faces)
    assert all(f.area > 0 for f in faces)
    assert sum(f.area for f in faces) == pytest.approx(inner.polygon().area(), rel=1e-12)


def check_mesh(P, mesh):
    d = mesh.drawing
    assert validate(d).ok
    faces = bounded_faces(d)
    assert set(f.corner_count for f in faces) <= {3, 4}
    assert sum(f.area for f in faces) == pytest.approx(P.area(), rel=1e-6)
    assert min_feature_size(d)[0] <= min_feature_size(P)[0] * (1 + 1e-12)
    assert audit_angle_bound(d) == []
    assert np.allclose(d.points[:P.n], P.ccw().pts, rtol=1e-12, atol=1e-12 * np.abs(P.pts).max())


def test_quadrangulate_square_regression():
    P = Polygon(SQUARE)
    mesh = quadrangulate(P)
    check_mesh(P, mesh)
    deg = min_feature_size(P)[0] / min_feature_size(mesh.drawing)[0]
    assert deg == pytest.approx(20.0, rel=1e-9)
    assert mesh.stats["steiner_inner"] == 12


def test_quadrangulate_triangle_is_itself():
    P = Polygon([(0, 0), (3, 0), (1, 2)])
    mesh = quadrangulate(P)
    assert mesh.steiner_count == 0 and classify_faces(mesh.drawing) == {3: 1}


def test_quadrangulate_cw_and_scaled_input():
    P = Polygon(np.array(L_SHAPE)[::-1] * 13.0)
    mesh = quadrangulate(P)
    check_mesh(P, mesh)
    assert mesh.scale == pytest.approx(13.0)


def test_quadrangulate_rejects_bowtie():
    with pytest.raises(NotSimple):
        quadrangulate(Polygon([(0, 0), (1, 1), (1, 0), (0, 1)]))


def test_comb_8_2():
    P = gen_comb(8, 2)
    check_mesh(P, quadrangulate(P))


def test_octagon():
    P = Polygon(regular_pts(8))
    mesh = quadrangulate(P)
    check_mesh(P, mesh)
    assert mesh.stats["steiner_inner"] == len(mesh.inner)


def test_face_between_consecutive_bends():
    P = Polygon(regular_pts(10))
    mesh = quadrangulate(P)
    n = P.n
    for i in range(n):
        j = (i + 1) % n
        faces = [f for f in mesh.zone_faces if i in f.vertices and j in f.vertices]
        assert len(faces) == 1 and faces[0].corner_count == 4
        steiner = [v - n for v in faces[0].vertices if v >= n]
        assert sorted(mesh.inner.bend[steiner].tolist()) == sorted([i, j])


@pytest.mark.parametrize("n,seed", [(8, s) for s in range(5)] + [(24, s) for s in range(5)])
def test_random_polygons(n, seed):
    P = gen_random_simple(n, seed)
    check_mesh(P, quadrangulate(P))


def test_trap_vertices_on_lattice_rows():
    mesh = quadrangulate(gen_random_simple(16, 11))
    norm = mesh.normalized
    ys = np.array([p[1] for p, r in zip(norm.points, norm.vertex_roles) if r == "steiner_trap"])
    assert len(ys) > 0
    assert np.abs(ys * 40 - np.round(ys * 40)).max() <= 1e-9


def test_deterministic():
    P = gen_random_simple(16, 5)
    a, b = quadrangulate(P).drawing, quadrangulate(P).drawing
    assert np.array_equal(a.points, b.points) and np.array_equal(a.edges, b.edges)
