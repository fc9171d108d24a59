"""Polygon families, classic triangulation baselines and degradation tables."""
from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import GenerationBudgetExceeded, MfsquadError, OddN, TooLarge
from .geom import Polygon, seg_dist, segment_crossings
from .metrics import diameter, min_feature_size
from .pslg import Drawing


def gen_regular_ngon(n: int, side: float = 1.0) -> Polygon:
    """Regular n-gon with the given side, centered at the origin, vertex 0 on +x."""
    if n < 6 or n % 2:
        raise OddN(f"regular family needs even n >= 6, got {n}")
    R = side / (2 * math.sin(math.pi / n))
    k = np.arange(n)
    return Polygon(np.stack([R * np.cos(2 * np.pi * k / n), R * np.sin(2 * np.pi * k / n)], axis=1))


def gen_comb(n: int, k: int) -> Polygon:
    """The P(n, k) family: a 2k-tall strip with a long sliver notch and n top vertices.

    Shape vertices (0,0), (0,2k), (k+nk^2, 2k), (k+nk^2, k), (k, k),
    (k+nk^2, 0); the extra vertices sit k apart on the top edge starting from
    the top-left corner. Returned counter-clockwise.
    """
    if n < 1 or k < 1:
        raise ValueError("comb needs n, k >= 1")
    w = k + n * k * k
    top = [(float(k * i), float(2 * k)) for i in range(n, 0, -1)]
    pts = [(0.0, 0.0), (float(w), 0.0), (float(k), float(k)), (float(w), float(k)), (float(w), float(2 * k))]
    pts += top + [(0.0, float(2 * k))]
    return Polygon(pts)


def _two_opt(pts: np.ndarray) -> np.ndarray:
    """Uncross a closed tour by reversing the chain between crossing edges."""
    n = len(pts)
    order = np.arange(n)
    idx = np.arange(n)
    edges = np.stack([idx, (idx + 1) % n], axis=1)
    for _ in range(10 * n * n):
        pairs = segment_crossings(pts[order], edges)
        if not pairs:
            return pts[order]
        a, b = pairs[0]
        order[a + 1:b + 1] = order[a + 1:b + 1][::-1].copy()
    raise GenerationBudgetExceeded("2-opt did not converge")


def gen_random_simple(n: int, seed: int, floor: float = 0.01, budget: int = 1000) -> Polygon:
    """Deterministic random simple polygon with ``mfs / diameter >= floor``.

    Uniform points in the unit square are ordered by angle about their
    centroid, then uncrossed with 2-opt; attempts are re-rolled until the
    feature-size floor holds.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    for attempt in range(budget):
        rng = np.random.default_rng([seed, n, attempt])
        p = rng.uniform(0.0, 1.0, (n, 2))
        c = p.mean(axis=0)
        p = p[np.argsort(np.arctan2(p[:, 1] - c[1], p[:, 0] - c[0]))]
        try:
            P = Polygon(_two_opt(p)).ccw()
        except GenerationBudgetExceeded:
            continue
        if not P.is_simple():
            continue
        if min_feature_size(P)[0] >= floor * diameter(P):
            return P
    raise GenerationBudgetExceeded(f"no polygon met floor {floor} in {budget} attempts")


@dataclass(frozen=True)
class FamilySpec:
    kind: str  # "regular" | "comb" | "random"
    n: int
    k: int | None = None
    seed: int | None = None
    floor: float = 0.01

    @classmethod
    def regular(cls, n):
        return cls("regular", n)

    @classmethod
    def comb(cls, n, k):
        return cls("comb", n, k=k)

    @classmethod
    def random(cls, n, seed, floor=0.01):
        return cls("random", n, seed=seed, floor=floor)

    def build(self) -> Polygon:
        if self.kind == "regular":
            return gen_regular_ngon(self.n)
        if self.kind == "comb":
            return gen_comb(self.n, self.k)
        if self.kind == "random":
            return gen_random_simple(self.n, self.seed, self.floor)
        raise ValueError(f"unknown family {self.kind!r}")

    @property
    def label(self) -> str:
        return self.kind if self.kind != "random" else f"random:s{self.seed}"


@dataclass
class ClassicTriangulation:
    polygon: Polygon
    diagonals: list  # (i, j) vertex index pairs
    triangles: list = field(default_factory=list)

    def drawing(self) -> Drawing:
        edges = [tuple(e) for e in self.polygon.edge_array()] + list(self.diagonals)
        roles = ["boundary_P"] * self.polygon.n + ["chord"] * len(self.diagonals)
        return Drawing(self.polygon.pts, edges, edge_roles=roles)


def _in_triangle(p, a, b, c) -> bool:
    def cr(o, u, v):
        return (u[0] - o[0]) * (v[1] - o[1]) - (u[1] - o[1]) * (v[0] - o[0])
    return cr(a, b, p) >= 0 and cr(b, c, p) >= 0 and cr(c, a, p) >= 0


def ear_clip(P: Polygon) -> ClassicTriangulation:
    """Ear clipping that always removes the lowest-index ear."""
    P = P.ccw()
    pts = P.pts
    live = list(range(P.n))
    diagonals, triangles = [], []
    while len(live) > 3:
        m = len(live)
        for t in range(m):
            a, b, c = live[t - 1], live[t], live[(t + 1) % m]
            A, B, C = pts[a], pts[b], pts[c]
            if (B[0] - A[0]) * (C[1] - A[1]) - (B[1] - A[1]) * (C[0] - A[0]) <= 0:
                continue
            if any(_in_triangle(pts[v], A, B, C) for v in live if v not in (a, b, c)):
                continue
            diagonals.append((min(a, c), max(a, c)))
            triangles.append((a, b, c))
            live.pop(t)
            break
        else:
            raise MfsquadError("no ear found; polygon is not simple")
    triangles.append(tuple(live))
    return ClassicTriangulation(P, diagonals, triangles)


def _diagonal_table(P: Polygon):
    """Visibility and clearance for every vertex pair of a CCW polygon."""
    n = P.n
    pts = P.pts
    edges = P.edge_array()
    valid = np.zeros((n, n), dtype=bool)
    clear = np.full((n, n), np.inf)
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            a, b = pts[i], pts[j]
            others = [v for v in range(n) if v not in (i, j)]
            dv = seg_dist(pts[others, 0], pts[others, 1], a[0], a[1], b[0], b[1])
            if dv.min() <= 0:
                continue
            seg = np.array([a, b])
            coords = np.concatenate([pts, seg])
            test = np.concatenate([edges, [[n, n + 1]]])
            hits = [p for p in segment_crossings(coords, test) if len(test) - 1 in p]
            # touching at i or j is fine; the diagonal endpoints are separate copies
            bad = [p for p in hits if not set(test[min(p)]) & {i, j}]
            if bad:
                continue
            if not P.contains((a + b) / 2):
                continue
            valid[i, j] = valid[j, i] = True
            clear[i, j] = clear[j, i] = float(dv.min())
    return valid, clear


def best_classic_triangulation(P: Polygon) -> tuple[ClassicTriangulation, float]:
    """Classic triangulation maximizing minimum feature size (bottleneck DP).

    With no new vertices, mfs(T) = min(mfs(P), min clearance of its
    diagonals), where a diagonal's clearance is its distance to the nearest
    vertex that is not one of its endpoints.
    """
    n = P.n
    if n > 24:
        raise TooLarge(f"n={n} exceeds the DP limit of 24")
    P = P.ccw()
    valid, clear = _diagonal_table(P)

    def ok(i, j):
        return j == i + 1 or (i == 0 and j == n - 1) or valid[i, j]

    f = np.full((n, n), -np.inf)
    arg = np.full((n, n), -1, dtype=np.int64)
    for i in range(n - 1):
        f[i, i + 1] = np.inf
    for span in range(2, n):
        for i in range(0, n - span):
            j = i + span
            if not ok(i, j):
                continue
            for k in range(i + 1, j):
                if not (ok(i, k) and ok(k, j)):
                    continue
                v = min(f[i, k], f[k, j], clear[i, k] if k > i + 1 else np.inf,
                        clear[k, j] if j > k + 1 else np.inf)
                if v > f[i, j]:
                    f[i, j] = v
                    arg[i, j] = k
    if arg[0, n - 1] < 0:
        raise MfsquadError("polygon admits no triangulation (not simple?)")
    diagonals, triangles = [], []
    stack = [(0, n - 1)]
    while stack:
        i, j = stack.pop()
        if j - i < 2:
            continue
        k = int(arg[i, j])
        triangles.append((i, k, j))
        for a, b in ((i, k), (k, j)):
            if b - a >= 2:
                diagonals.append((a, b))
                stack.append((a, b))
    best = min(min_feature_size(P)[0], float(f[0, n - 1]))
    return ClassicTriangulation(P, sorted(diagonals), triangles), best


def enumerate_triangulations(P: Polygon) -> list[list[tuple[int, int]]]:
    """Every classic triangulation, as sorted diagonal lists (exponential)."""
    P = P.ccw()
    n = P.n
    valid, _ = _diagonal_table(P)

    def ok(i, j):
        return j == i + 1 or (i == 0 and j == n - 1) or valid[i, j]

    @lru_cache(maxsize=None)
    def sub(i, j):
        if j - i < 2:
            return [()]
        out = []
        for k in range(i + 1, j):
            if not (ok(i, k) and ok(k, j)):
                continue
            here = tuple(d for d in ((i, k), (k, j)) if d[1] - d[0] >= 2)
            for left in sub(i, k):
                for right in sub(k, j):
                    out.append(here + left + right)
        return out

    return [sorted(t) for t in sub(0, n - 1)]


CSV_HEADER = ["family", "n", "k", "method", "mfs_in", "mfs_out", "degradation",
              "steiner_count", "wall_time", "error"]
METHODS = ("ear_clip", "best_classic", "pipeline")


def _run_row(spec: FamilySpec, method: str) -> dict:
    row = {"family": spec.label, "n": spec.n, "k": spec.k if spec.k is not None else "",
           "method": method, "mfs_in": "", "mfs_out": "", "degradation": "",
           "steiner_count": "", "wall_time": "", "error": ""}
    t0 = time.perf_counter()
    try:
        P = spec.build()
        mfs_in = min_feature_size(P)[0]
        if method == "ear_clip":
            out, steiner = min_feature_size(ear_clip(P).drawing())[0], 0
        elif method == "best_classic":
            out, steiner = best_classic_triangulation(P)[1], 0
        elif method == "pipeline":
            from .mesher import quadrangulate

            mesh = quadrangulate(P)
            out, steiner = min_feature_size(mesh.drawing)[0], mesh.steiner_count
        else:
            raise ValueError(f"unknown method {method!r}")
        row.update(mfs_in=mfs_in, mfs_out=out, degradation=mfs_in / out, steiner_count=steiner)
    except Exception as exc:  # recorded per row
        row["error"] = f"{type(exc).__name__}: {exc}"
    row["wall_time"] = time.perf_counter() - t0
    return row


def degradation_table(specs, methods=METHODS) -> list[dict]:
    """One row per (instance, method), sorted by family, n, k, method."""
    rows = [_run_row(s, m) for s in specs for m in methods]
    rows.sort(key=lambda r: (r["family"], r["n"], str(r["k"]), r["method"]))
    return rows


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([_fmt(r[h]) for h in CSV_HEADER])
    return buf.getvalue()
