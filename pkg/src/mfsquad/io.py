"""JSON polygon and mesh files (format version 1)."""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidInput, MfsquadError
from .geom import DEFAULT_TOL, Polygon, orient
from .pslg import Drawing

log = logging.getLogger(__name__)

FORMAT_VERSION = "1"


class FormatError(MfsquadError):
    """The file could not be parsed as the expected format."""


@dataclass
class PolygonFile:
    polygon: Polygon
    name: str | None = None
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {"format_version": FORMAT_VERSION, "vertices": self.polygon.pts.tolist()}
        if self.name is not None:
            out["name"] = self.name
        return out


def load_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise FormatError(f"{path}: top level must be an object")
    if str(data.get("format_version")) != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported format_version {data.get('format_version')!r}")
    return data


def _dump(data: dict) -> str:
    """JSON with one list element per line.

    Floats use Python's repr, the shortest text that round-trips exactly.
    """
    parts = []
    for key, val in data.items():
        k = json.dumps(key)
        if isinstance(val, list) and val:
            rows = ",\n  ".join(json.dumps(x, allow_nan=False) for x in val)
            parts.append(f" {k}: [\n  {rows}\n ]")
        else:
            parts.append(f" {k}: {json.dumps(val, allow_nan=False, sort_keys=True)}")
    return "{\n" + ",\n".join(parts) + "\n}\n"


def polygon_from_dict(data: dict, source: str = "<dict>") -> PolygonFile:
    """Validate and normalize polygon data; CW input is reversed with a warning."""
    verts = data.get("vertices")
    if not isinstance(verts, list) or not all(
            isinstance(v, (list, tuple)) and len(v) == 2
            and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in v) for v in verts):
        raise FormatError(f"{source}: 'vertices' must be a list of [x, y] number pairs")
    if len(verts) < 3:
        raise InvalidInput(f"{source}: need at least 3 vertices, got {len(verts)}")
    pts = np.asarray(verts, dtype=float)
    if not np.isfinite(pts).all():
        raise InvalidInput(f"{source}: non-finite coordinate")
    n = len(pts)
    for i in range(n):
        a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
        if np.array_equal(a, b):
            raise InvalidInput(f"{source}: vertices {(i - 1) % n} and {i} coincide")
        u, w = a - b, c - b
        scale = max(np.hypot(*u), np.hypot(*w))
        # straight pass-through vertices are fine; a collinear fold-back is not
        if orient(a, b, c, DEFAULT_TOL, scale) == 0 and float(u @ w) > 0:
            raise InvalidInput(f"{source}: vertices {(i - 1) % n}, {i}, {(i + 1) % n} are collinear "
                               "and fold back on each other")
    P = Polygon(pts)
    P.require_simple()
    warnings = []
    if not P.is_ccw():
        msg = f"{source}: clockwise input reversed to counter-clockwise"
        log.warning(msg)
        warnings.append(msg)
        P = P.reversed()
    name = data.get("name")
    return PolygonFile(P, None if name is None else str(name), warnings)


def read_polygon(path) -> PolygonFile:
    return polygon_from_dict(load_json(path), str(path))


def polygon_json(P: Polygon, name: str | None = None) -> str:
    return _dump(PolygonFile(P, name).to_dict())


def write_polygon(path, P: Polygon, name: str | None = None) -> None:
    Path(path).write_text(polygon_json(P, name), encoding="utf-8")


# ---- meshes -------------------------------------------------------------

def mesh_metrics(polygon: Polygon, drawing: Drawing) -> dict:
    from .metrics import diameter, min_feature_size

    mfs_in = min_feature_size(polygon)[0]
    mfs_out = min_feature_size(drawing)[0]
    steiner = sum(1 for r in drawing.vertex_roles if r != "original")
    return {"mfs_in": mfs_in, "mfs_out": mfs_out, "degradation": mfs_in / mfs_out,
            "diameter": diameter(drawing), "steiner_count": steiner}


def mesh_to_dict(mesh) -> dict:
    from . import __version__

    d = mesh.drawing
    faces = [[list(map(int, f.vertices)), int(f.corner_count)] for f in mesh.bounded_faces()]
    prov = {"constants": mesh.constants.as_dict(), "scale": mesh.scale,
            "tool_version": __version__}
    return {
        "format_version": FORMAT_VERSION,
        "vertices": [[float(x), float(y), r] for (x, y), r in zip(d.points.tolist(), d.vertex_roles)],
        "edges": [[int(a), int(b), r] for (a, b), r in zip(d.edges.tolist(), d.edge_roles)],
        "faces": faces,
        "metrics": mesh_metrics(mesh.polygon, d),
        "provenance": prov,
    }


def mesh_json(mesh) -> str:
    return _dump(mesh_to_dict(mesh))


def write_mesh(path, mesh) -> None:
    Path(path).write_text(mesh_json(mesh), encoding="utf-8")


@dataclass
class MeshFile:
    drawing: Drawing
    polygon: Polygon  # the "original" vertices in order
    faces: list
    metrics: dict
    provenance: dict

    def recompute_metrics(self) -> dict:
        return mesh_metrics(self.polygon, self.drawing)

    def metrics_mismatch(self, tol: float = 1e-9) -> dict:
        """Stored metrics that differ from recomputed ones by more than ``tol`` (relative)."""
        fresh = self.recompute_metrics()
        bad = {}
        for k, v in fresh.items():
            s = self.metrics.get(k)
            if s is None or not math.isclose(float(s), float(v), rel_tol=tol, abs_tol=tol):
                bad[k] = (s, v)
        return bad


def mesh_from_dict(data: dict, source: str = "<dict>") -> MeshFile:
    try:
        verts = data["vertices"]
        edges = data["edges"]
        pts = np.array([[v[0], v[1]] for v in verts], dtype=float).reshape(-1, 2)
        vroles = [str(v[2]) for v in verts]
        e = np.array([[x[0], x[1]] for x in edges], dtype=np.int64).reshape(-1, 2)
        eroles = [str(x[2]) for x in edges]
        faces = [(list(map(int, f[0])), int(f[1])) for f in data.get("faces", [])]
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise FormatError(f"{source}: malformed mesh: {exc}") from exc
    if len(e) and (e.min() < 0 or e.max() >= len(pts)):
        raise FormatError(f"{source}: edge index out of range")
    orig = [i for i, r in enumerate(vroles) if r == "original"]
    if len(orig) < 3:
        raise FormatError(f"{source}: mesh has fewer than 3 original vertices")
    return MeshFile(Drawing(pts, e, vroles, eroles), Polygon(pts[orig]), faces,
                    dict(data.get("metrics", {})), dict(data.get("provenance", {})))


def read_mesh(path) -> MeshFile:
    return mesh_from_dict(load_json(path), str(path))
