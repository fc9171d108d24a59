import csv
import io
import math

import numpy as np
import pytest

from conftest import SQUARE, regular_pts
from mfsquad.errors import OddN, TooLarge
from mfsquad.geom import Polygon
from mfsquad.lab import (CSV_HEADER, ClassicTriangulation, FamilySpec, best_classic_triangulation,
                         degradation_table, ear_clip, enumerate_triangulations, gen_comb,
                         gen_random_simple, gen_regular_ngon, rows_to_csv)
from mfsquad.geom import seg_dist
from mfsquad.metrics import diameter, min_feature_size
from mfsquad.pslg import validate


def catalan(k):
    return math.comb(2 * k, k) // (k + 1)


def test_regular_generator():
    P = gen_regular_ngon(8)
    assert P.n == 8 and P.is_ccw()
    assert np.allclose(P.pts, regular_pts(8), atol=1e-15)
    assert P.pts[0, 1] == 0 and P.pts[0, 0] > 0
    for n in (4, 7):
        with pytest.raises(OddN):
            gen_regular_ngon(n)


def test_comb_generator_coordinates():
    P = gen_comb(4, 3)
    pts = {tuple(p) for p in P.pts.tolist()}
    assert {(0, 0), (0, 6), (39, 6), (39, 3), (3, 3), (39, 0)} <= pts
    assert {(3, 6), (6, 6), (9, 6), (12, 6)} <= pts
    assert P.n == 10 and P.is_ccw() and P.is_simple()
    assert gen_comb(1, 1).n == 7


def test_random_generator():
    a = gen_random_simple(16, 1)
    b = gen_random_simple(16, 1)
    assert np.array_equal(a.pts, b.pts)
    assert not np.array_equal(a.pts, gen_random_simple(16, 2).pts)


@pytest.mark.parametrize("seed", range(100))
def test_random_generator_floor(seed):
    P = gen_random_simple(32, seed)
    assert P.is_simple() and P.is_ccw()
    assert validate(ClassicTriangulation(P, []).drawing()).ok
    assert min_feature_size(P)[0] >= 0.01 * diameter(P)


def test_ear_clip_examples():
    t = ear_clip(Polygon(SQUARE))
    assert len(t.diagonals) == 1 and len(t.triangles) == 2
    H = gen_regular_ngon(6)
    t = ear_clip(H)
    assert len(t.diagonals) == 3 and len(t.triangles) == 4
    assert min_feature_size(H)[0] / min_feature_size(t.drawing())[0] == pytest.approx(2.0, rel=1e-12)
    C = gen_comb(2, 1)
    t = ear_clip(C)
    assert len(t.triangles) == C.n - 2
    assert validate(t.drawing()).ok


def test_best_classic_square():
    t, best = best_classic_triangulation(Polygon(SQUARE))
    assert best == pytest.approx(math.sqrt(2) / 2, abs=1e-15)
    assert len(t.diagonals) == 1


def test_best_classic_too_large():
    with pytest.raises(TooLarge):
        best_classic_triangulation(gen_regular_ngon(26))


def test_best_classic_12gon():
    t, best = best_classic_triangulation(gen_regular_ngon(12))
    assert best <= math.sin(math.pi / 12) + 1e-12
    assert 1 / best >= 3.8637


def clearance(P, d):
    i, j = d
    others = [v for v in range(P.n) if v not in d]
    a, b = P.pts[i], P.pts[j]
    return float(seg_dist(P.pts[others, 0], P.pts[others, 1], a[0], a[1], b[0], b[1]).min())


@pytest.mark.parametrize("n", [5, 6, 7, 8])
def test_dp_equals_exhaustive_regular(n):
    P = Polygon(regular_pts(n))
    all_t = enumerate_triangulations(P)
    assert len(all_t) == catalan(n - 2)
    # the oracle scores each triangulation with the brute-force metric on its drawing
    best_enum = max(min_feature_size(ClassicTriangulation(P, d).drawing(), "brute")[0] for d in all_t)
    t, best = best_classic_triangulation(P)
    assert abs(best - best_enum) <= 1e-12
    assert min_feature_size(t.drawing(), "brute")[0] == pytest.approx(best, abs=1e-12)


@pytest.mark.parametrize("seed", range(6))
def test_dp_equals_exhaustive_nonconvex(seed):
    P = gen_random_simple(8, seed)
    all_t = enumerate_triangulations(P)
    assert all_t
    for d in all_t:
        assert len(d) == P.n - 3
        assert validate(ClassicTriangulation(P, d).drawing()).ok
    best_enum = max(min_feature_size(ClassicTriangulation(P, d).drawing(), "brute")[0] for d in all_t)
    assert abs(best_classic_triangulation(P)[1] - best_enum) <= 1e-12


@pytest.mark.parametrize("seed", range(100))
def test_clearance_decomposition(seed):
    n = 6 + seed % 7
    P = gen_random_simple(n, 1000 + seed)
    t = ear_clip(P)
    direct = min_feature_size(t.drawing(), "brute")[0]
    decomposed = min([min_feature_size(P)[0]] + [clearance(P, d) for d in t.diagonals])
    assert direct == pytest.approx(decomposed, abs=1e-12)
    assert best_classic_triangulation(P)[1] >= direct - 1e-12


@pytest.mark.parametrize("n", range(6, 26, 2))
def test_regular_ear_ceiling(n):
    _, best = best_classic_triangulation(gen_regular_ngon(n))
    assert best <= math.sin(math.pi / n) + 1e-9


def test_degradation_table_rows_and_csv():
    specs = [FamilySpec.regular(8), FamilySpec.comb(1, 1), FamilySpec.random(8, 2), FamilySpec.regular(5)]
    rows = degradation_table(specs)
    assert len(rows) == 12
    keys = [(r["family"], r["n"], str(r["k"]), r["method"]) for r in rows]
    assert keys == sorted(keys)
    bad = [r for r in rows if r["n"] == 5]
    assert all(r["error"].startswith("OddN") for r in bad)
    good = [r for r in rows if r["n"] != 5]
    assert all(r["error"] == "" and r["degradation"] >= 1 - 1e-9 for r in good)
    text = rows_to_csv(rows)
    parsed = list(csv.reader(io.StringIO(text)))
    assert parsed[0] == CSV_HEADER and len(parsed) == 13
    assert rows_to_csv(degradation_table(specs, ["ear_clip"])).count("\n") == 5


def test_table_best_classic_lower_bound():
    rows = degradation_table([FamilySpec.regular(n) for n in range(8, 26, 2)], ["best_classic"])
    for r in rows:
        assert r["degradation"] >= r["n"] / math.pi
