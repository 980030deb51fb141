"""Triangle meshes: validation, inward orientation and file loading."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

DEGENERATE_AREA = 1e-12  # mm^2


class MeshError(ValueError):
    pass


def triangle_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    v0, v1, v2 = (vertices[triangles[:, i]] for i in range(3))
    return 0.5 * np.linalg.norm(np.cross(v1 - v0, v2 - v0), axis=1)


@dataclass(frozen=True)
class TriangleMesh:
    """Indexed triangle surface in millimetres.

    Triangles are stored with a winding whose right-hand normal points into
    the solid, so ``face_normals`` are inward. Build instances through
    :func:`TriangleMesh.from_arrays`, which enforces that.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    vertex_normals: np.ndarray
    dropped_triangles: int = 0
    _face_normals: np.ndarray = field(repr=False, default=None)
    _areas: np.ndarray = field(repr=False, default=None)

    @classmethod
    def from_arrays(cls, vertices, triangles, vertex_normals=None) -> "TriangleMesh":
        vertices = np.ascontiguousarray(vertices, dtype=np.float64)
        triangles = np.ascontiguousarray(triangles, dtype=np.int64)
        if vertices.ndim != 2 or vertices.shape[1] != 3:
            raise MeshError(f"vertices must be (N, 3), got {vertices.shape}")
        if triangles.ndim != 2 or triangles.shape[1] != 3:
            raise MeshError(f"triangles must be (M, 3), got {triangles.shape}")
        if len(vertices) == 0 or len(triangles) == 0:
            raise MeshError("empty mesh")
        if not np.all(np.isfinite(vertices)):
            raise MeshError("non-finite vertex coordinates")
        if triangles.min() < 0 or triangles.max() >= len(vertices):
            raise MeshError("triangle index out of range")

        areas = triangle_areas(vertices, triangles)
        keep = areas > DEGENERATE_AREA
        dropped = int(np.count_nonzero(~keep))
        triangles, areas = triangles[keep], areas[keep]
        if len(triangles) == 0:
            raise MeshError("mesh has no non-degenerate triangles")

        triangles = _orient_inward(vertices, triangles)
        v0, v1, v2 = (vertices[triangles[:, i]] for i in range(3))
        cross = np.cross(v1 - v0, v2 - v0)
        face_normals = cross / np.linalg.norm(cross, axis=1, keepdims=True)

        # area-weighted face averaging; cross already carries 2*area
        averaged = np.zeros_like(vertices)
        for i in range(3):
            np.add.at(averaged, triangles[:, i], cross)
        if vertex_normals is None:
            vertex_normals = _normalize_rows(averaged)
        else:
            vertex_normals = _normalize_rows(np.asarray(vertex_normals, dtype=np.float64))
            used = np.linalg.norm(averaged, axis=1) > 0
            agreement = np.einsum("ij,ij->i", vertex_normals[used], averaged[used]).sum()
            if agreement < 0:
                vertex_normals = -vertex_normals

        mesh = cls(vertices, triangles, vertex_normals, dropped, face_normals, areas)
        for arr in (mesh.vertices, mesh.triangles, mesh.vertex_normals, face_normals, areas):
            arr.flags.writeable = False
        return mesh

    @property
    def face_normals(self) -> np.ndarray:
        return self._face_normals

    @property
    def areas(self) -> np.ndarray:
        return self._areas

    @property
    def area(self) -> float:
        return float(self._areas.sum())

    @property
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def __len__(self) -> int:
        return len(self.triangles)

    def transformed(self, rotation: np.ndarray, translation=(0.0, 0.0, 0.0)) -> "TriangleMesh":
        """Rigidly move the mesh; winding and normals move with it."""
        rotation = np.asarray(rotation, dtype=np.float64)
        vertices = self.vertices @ rotation.T + np.asarray(translation, dtype=np.float64)
        return TriangleMesh.from_arrays(vertices, self.triangles, self.vertex_normals @ rotation.T)

    @staticmethod
    def merge(meshes) -> "TriangleMesh":
        vertices, triangles, offset = [], [], 0
        for m in meshes:
            vertices.append(m.vertices)
            triangles.append(m.triangles + offset)
            offset += len(m.vertices)
        return TriangleMesh.from_arrays(np.vstack(vertices), np.vstack(triangles))


def _normalize_rows(a: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(a, axis=1, keepdims=True)
    out = np.zeros_like(a)
    np.divide(a, norms, out=out, where=norms > 0)
    return out


def _orient_inward(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Flip winding per connected component so face normals point inward.

    The sign of each component's signed volume (taken about the component
    centroid) votes for its winding: positive means the winding is outward.
    """
    n = len(vertices)
    rows = np.concatenate([triangles[:, 0], triangles[:, 1]])
    cols = np.concatenate([triangles[:, 1], triangles[:, 2]])
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    face_label = labels[triangles[:, 0]]

    out = triangles.copy()
    for label in np.unique(face_label):
        faces = triangles[face_label == label]
        centre = vertices[np.unique(faces)].mean(axis=0)
        v0, v1, v2 = (vertices[faces[:, i]] - centre for i in range(3))
        volume = np.einsum("ij,ij->i", v0, np.cross(v1, v2)).sum() / 6.0
        if volume > 0:
            sel = face_label == label
            out[sel] = out[sel][:, [0, 2, 1]]
    return out


def load_mesh(path, format: str | None = None) -> TriangleMesh:
    """Load an OBJ or PLY (ASCII or binary) triangle mesh, units mm."""
    path = Path(path)
    if not path.exists():
        raise MeshError(f"no such file: {path}")
    fmt = (format or path.suffix.lstrip(".")).lower()
    if fmt == "obj":
        vertices, faces, normals = _read_obj(path)
    elif fmt == "ply":
        vertices, faces, normals = _read_ply(path)
    else:
        raise MeshError(f"unsupported mesh format {fmt!r}")
    return TriangleMesh.from_arrays(vertices, faces, normals)


def _triangulate(polygons) -> np.ndarray:
    tris = []
    for poly in polygons:
        if len(poly) < 3:
            raise MeshError(f"face with {len(poly)} vertices")
        for i in range(1, len(poly) - 1):
            tris.append((poly[0], poly[i], poly[i + 1]))
    return np.asarray(tris, dtype=np.int64).reshape(-1, 3)


def _read_obj(path: Path):
    vertices, polygons = [], []
    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            try:
                if parts[0] == "v":
                    vertices.append([float(x) for x in parts[1:4]])
                elif parts[0] == "f":
                    poly = []
                    for token in parts[1:]:
                        idx = int(token.split("/")[0])
                        # OBJ is 1-based; negative indices count back from the end
                        poly.append(idx - 1 if idx > 0 else len(vertices) + idx)
                    polygons.append(poly)
            except (ValueError, IndexError) as exc:
                raise MeshError(f"{path}:{lineno}: cannot parse {line.strip()!r}") from exc
    if not vertices or not polygons:
        raise MeshError(f"{path}: empty mesh")
    return np.asarray(vertices, dtype=np.float64), _triangulate(polygons), None


def _read_ply(path: Path):
    from plyfile import PlyData

    try:
        ply = PlyData.read(str(path))
        vertex = ply["vertex"]
        face = ply["face"]
    except Exception as exc:  # plyfile raises a mix of exception types
        raise MeshError(f"{path}: cannot parse PLY ({exc})") from exc
    vertices = np.column_stack([vertex[a] for a in ("x", "y", "z")]).astype(np.float64)
    names = vertex.data.dtype.names
    normals = None
    if all(a in names for a in ("nx", "ny", "nz")):
        normals = np.column_stack([vertex[a] for a in ("nx", "ny", "nz")]).astype(np.float64)
    key = "vertex_indices" if "vertex_indices" in face.data.dtype.names else "vertex_index"
    faces = _triangulate([list(f) for f in face[key]])
    if len(vertices) == 0 or len(faces) == 0:
        raise MeshError(f"{path}: empty mesh")
    return vertices, faces, normals


def save_obj(mesh: TriangleMesh, path) -> None:
    with open(path, "w") as fh:
        for v in mesh.vertices:
            fh.write("v {!r} {!r} {!r}\n".format(*map(float, v)))
        for t in mesh.triangles + 1:
            fh.write(f"f {t[0]} {t[1]} {t[2]}\n")
