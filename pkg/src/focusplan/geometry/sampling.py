"""Area-uniform Monte-Carlo sampling of a triangle mesh."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from focusplan.geometry.mesh import TriangleMesh


@dataclass(frozen=True)
class SurfaceSample:
    position: np.ndarray
    normal: np.ndarray
    weight: float
    source_triangle: int


@dataclass(frozen=True)
class SampleSet:
    """Struct-of-arrays point set; indexing yields :class:`SurfaceSample`."""

    positions: np.ndarray  # (P, 3) mm
    normals: np.ndarray  # (P, 3) unit, inward
    weights: np.ndarray  # (P,) mm^2
    source_triangles: np.ndarray  # (P,)
    seed: int | None = None

    def __len__(self) -> int:
        return len(self.positions)

    def __getitem__(self, i: int) -> SurfaceSample:
        return SurfaceSample(self.positions[i], self.normals[i], float(self.weights[i]),
                             int(self.source_triangles[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    def subset(self, index) -> "SampleSet":
        return SampleSet(self.positions[index], self.normals[index], self.weights[index],
                         self.source_triangles[index], self.seed)

    def transformed(self, rotation: np.ndarray, translation=(0.0, 0.0, 0.0)) -> "SampleSet":
        rotation = np.asarray(rotation, dtype=np.float64)
        return SampleSet(self.positions @ rotation.T + np.asarray(translation, dtype=np.float64),
                         self.normals @ rotation.T, self.weights, self.source_triangles, self.seed)

    @classmethod
    def from_arrays(cls, positions, normals, weights=None) -> "SampleSet":
        positions = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
        normals = np.asarray(normals, dtype=np.float64).reshape(-1, 3)
        normals = normals / np.linalg.norm(normals, axis=1, keepdims=True)
        if weights is None:
            weights = np.ones(len(positions))
        weights = np.broadcast_to(np.asarray(weights, dtype=np.float64), (len(positions),)).copy()
        return cls(positions, normals, weights, np.full(len(positions), -1, dtype=np.int64))


def sample_surface(mesh: TriangleMesh, count: int, seed: int) -> SampleSet:
    """Draw ``count`` points uniformly by area.

    A triangle is picked from the area-weighted discrete distribution, then
    a point uniformly inside it (square-root barycentric warp). Each sample
    carries weight ``mesh.area / count`` and its triangle's inward normal.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    areas = mesh.areas
    cdf = np.cumsum(areas)
    cdf /= cdf[-1]
    tri = np.searchsorted(cdf, rng.random(count), side="right")
    tri = np.minimum(tri, len(areas) - 1)

    r1 = np.sqrt(rng.random(count))
    r2 = rng.random(count)
    corners = mesh.vertices[mesh.triangles[tri]]  # (count, 3, 3)
    positions = ((1.0 - r1)[:, None] * corners[:, 0]
                 + (r1 * (1.0 - r2))[:, None] * corners[:, 1]
                 + (r1 * r2)[:, None] * corners[:, 2])
    normals = np.array(mesh.face_normals[tri])
    weights = np.full(count, mesh.area / count)
    return SampleSet(positions, normals, weights, tri.astype(np.int64), seed)
