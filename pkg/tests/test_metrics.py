import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial import Delaunay

from conftest import SQUARE, regular_pts
from mfsquad.errors import NoNonIncidentPair
from mfsquad.geom import Polygon
from mfsquad.lab import gen_comb
from mfsquad.metrics import (audit_angle_bound, classify_faces, degradation, diameter, measure,
                             mfs_brute_force, mfs_fast, min_feature_size, spread)
from mfsquad.pslg import Drawing


def oracle_mfs(pts, edges):
    """Plain double loop over vertex / non-incident closed segment pairs."""
    best = math.inf
    for v, p in enumerate(pts):
        for i, j in edges:
            if v in (i, j):
                continue
            (ax, ay), (bx, by) = pts[i], pts[j]
            dx, dy = bx - ax, by - ay
            t = max(0.0, min(1.0, ((p[0] - ax) * dx + (p[1] - ay) * dy) / (dx * dx + dy * dy)))
            best = min(best, math.hypot(p[0] - ax - t * dx, p[1] - ay - t * dy))
    return best


def ring(n):
    return [(k, (k + 1) % n) for k in range(n)]


def test_unit_square():
    assert min_feature_size(Polygon(SQUARE))[0] == 1.0
    assert diameter(Polygon(SQUARE)) == pytest.approx(math.sqrt(2), abs=1e-15)
    assert spread(Polygon(SQUARE)) == pytest.approx(math.sqrt(2), abs=1e-15)


@pytest.mark.parametrize("n", range(6, 66, 2))
def test_regular_mfs_is_unit_side(n):
    pts = regular_pts(n)
    m, (v, e) = min_feature_size(Polygon(pts))
    assert m == pytest.approx(1.0, abs=1e-9)
    assert m == pytest.approx(oracle_mfs(pts.tolist(), ring(n)), abs=1e-12)


def test_octagon_diameter_and_spread():
    P = Polygon(regular_pts(8))
    assert diameter(P) == pytest.approx(1 / math.sin(math.pi / 8), rel=1e-12)
    assert spread(P) == pytest.approx(1 / math.sin(math.pi / 8), rel=1e-9)


def test_comb_diameter():
    assert diameter(gen_comb(4, 3)) == pytest.approx(math.hypot(39, 6), rel=1e-15)


def test_comb_mfs_matches_oracle():
    # the notch tip (w, k) against the slanted edge (k, k)-(w, 0) sets the value
    for n, k in [(1, 1), (4, 3), (8, 2), (16, 4)]:
        P = gen_comb(n, k)
        w = k + n * k * k
        closed = k * (w - k) / math.hypot(w - k, k)
        assert min_feature_size(P)[0] == pytest.approx(oracle_mfs(P.pts.tolist(), ring(P.n)), abs=1e-12)
        assert min_feature_size(P)[0] == pytest.approx(closed, rel=1e-12)


def test_witness_realizes_value():
    P = Polygon(regular_pts(10))
    m, (v, e) = min_feature_size(P)
    a, b = P.edge_array()[e]
    assert v not in (a, b)
    assert oracle_mfs([P.pts[v], P.pts[a], P.pts[b]], [(1, 2)]) == pytest.approx(m, abs=1e-15)


def test_tie_break_lowest_vertex_then_edge():
    # square: every vertex is at distance 1 from two non-incident edges
    assert min_feature_size(Polygon(SQUARE), "brute") == (1.0, (0, 1))
    assert min_feature_size(Polygon(SQUARE), "fast") == (1.0, (0, 1))


def test_too_few_vertices():
    with pytest.raises(NoNonIncidentPair):
        min_feature_size(Drawing(np.array([(0, 0), (1, 0)], float), [(0, 1)]))


def test_degradation_identity_and_refinement():
    P = Polygon(SQUARE)
    assert degradation(P, P) == 1.0
    d = Drawing(P.pts, ring(4) + [(0, 2)])
    assert degradation(P, d) == pytest.approx(math.sqrt(2), rel=1e-12)
    rep = measure(d, reference=P)
    assert rep.degradation_vs * rep.mfs == pytest.approx(min_feature_size(P)[0], rel=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-3, 1e3), st.integers(6, 20).map(lambda n: 2 * (n // 2)))
def test_scaling_invariance(s, n):
    P = Polygon(regular_pts(n) + [0.3, -1.7])
    Q = P.scaled(s)
    assert min_feature_size(Q)[0] == pytest.approx(s * min_feature_size(P)[0], rel=1e-12)
    assert diameter(Q) == pytest.approx(s * diameter(P), rel=1e-12)
    assert spread(Q) == pytest.approx(spread(P), rel=1e-12)


def test_spread_at_least_one():
    for n in (6, 12, 40):
        assert spread(Polygon(regular_pts(n))) >= 1


def test_audit_square_empty():
    assert audit_angle_bound(Polygon(SQUARE)) == []


def test_audit_flags_thin_angle():
    a = 0.01
    d = Drawing(np.array([(0, 0), (1, 0), (math.cos(a), math.sin(a))]), [(0, 1), (0, 2)])
    v = audit_angle_bound(d, mfs=1.0)
    assert len(v) == 1 and v[0].vertex == 0 and v[0].angle == pytest.approx(a)


def test_classify_square_with_diagonal():
    d = Drawing(np.array(SQUARE, float), ring(4) + [(0, 2)])
    assert classify_faces(d) == {3: 2}


def random_drawing(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(4, 60))
    if seed % 3 == 0:
        # lattice points make distance ties common
        pts = np.unique(rng.integers(0, 8, (m, 2)), axis=0).astype(float)
    else:
        pts = rng.uniform(-5, 5, (m, 2))
    if len(pts) < 4:
        pts = np.array([(0, 0), (1, 0), (1, 1), (0, 1)], float)
    try:
        tri = Delaunay(pts)
    except Exception:
        return Drawing(pts[:4] if len(pts) >= 4 else pts, ring(min(4, len(pts))))
    edges = set()
    for s in tri.simplices:
        for a, b in ((s[0], s[1]), (s[1], s[2]), (s[2], s[0])):
            edges.add((min(a, b), max(a, b)))
    edges = sorted(edges)
    keep = rng.random(len(edges)) < 0.7
    chosen = [e for e, k in zip(edges, keep) if k] or edges
    return Drawing(pts, chosen)


@pytest.mark.parametrize("seed", range(100))
def test_fast_matches_brute_force(seed):
    d = random_drawing(seed)
    assert mfs_fast(d) == mfs_brute_force(d)


@pytest.mark.parametrize("seed", range(0, 100, 10))
def test_brute_force_matches_oracle(seed):
    d = random_drawing(seed)
    assert mfs_brute_force(d)[0] == pytest.approx(oracle_mfs(d.points.tolist(), d.edges.tolist()), abs=1e-12)
