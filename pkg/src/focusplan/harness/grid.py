"""Cylindrical camera networks around a mesh."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from focusplan.geometry.mesh import TriangleMesh
from focusplan.optics import CameraIntrinsics, CameraView

AUTO_MARGIN = 0.05  # AUTO extent: bounding-box height grown by 5%, centred


@dataclass(frozen=True)
class GridSpec:
    a: int = 24  # angular samples
    z: int = 7  # vertical samples
    r: float = 750.0  # mm
    extent: tuple[float, float] | None = None  # None: AUTO

    def __post_init__(self):
        if self.a < 1 or self.z < 1:
            raise ValueError("grid needs a >= 1 and z >= 1")
        if not self.r > 0:
            raise ValueError("grid radius must be positive")
        if self.extent is not None:
            lo, hi = self.extent
            if hi < lo:
                raise ValueError("vertical extent must be increasing")
            object.__setattr__(self, "extent", (float(lo), float(hi)))

    @property
    def n_cameras(self) -> int:
        return self.a * self.z


@dataclass(frozen=True)
class CameraGrid:
    cameras: list[CameraView]
    edges: list[tuple[int, int]]
    spec: GridSpec
    axis: tuple[float, float]  # (x, y) of the vertical axis
    extent: tuple[float, float]
    heights: np.ndarray = field(repr=False)

    def index(self, i_angle: int, i_height: int) -> int:
        return i_height * self.spec.a + i_angle

    @property
    def vertical_spacing(self) -> float:
        return float(np.diff(self.heights).mean()) if self.spec.z > 1 else 0.0

    @property
    def angular_spacing(self) -> float:
        """Arc length between angular neighbours at the camera radius."""
        return 2 * math.pi * self.spec.r / self.spec.a

    @property
    def aspect_ratio(self) -> float:
        return self.vertical_spacing / self.angular_spacing


def grid_edges(a: int, z: int) -> list[tuple[int, int]]:
    """Angular neighbours wrap around; vertical neighbours do not."""
    edges = set()
    for j in range(z):
        for i in range(a):
            u, v = j * a + i, j * a + (i + 1) % a
            if u != v:
                edges.add((min(u, v), max(u, v)))
            if j + 1 < z:
                edges.add((u, u + a))
    return sorted(edges)


def auto_extent(mesh: TriangleMesh) -> tuple[float, float]:
    lo, hi = mesh.bounds
    pad = 0.5 * AUTO_MARGIN * (hi[2] - lo[2])
    return float(lo[2] - pad), float(hi[2] + pad)


def generate_cylindrical_grid(spec: GridSpec, mesh: TriangleMesh,
                              intrinsics: CameraIntrinsics = CameraIntrinsics()) -> CameraGrid:
    """``a * z`` cameras on a vertical cylinder around the mesh bounding box.

    Camera ``j * a + i`` sits at angle ``2 pi i / a`` and height row ``j``,
    looks horizontally at the axis, with world +z as up.
    """
    lo, hi = mesh.bounds
    if np.any(hi - lo <= 0):
        raise ValueError("degenerate mesh bounding box")
    cx, cy = 0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])
    z0, z1 = spec.extent if spec.extent is not None else auto_extent(mesh)
    heights = np.array([0.5 * (z0 + z1)]) if spec.z == 1 else np.linspace(z0, z1, spec.z)
    up = np.array([0.0, 0.0, 1.0])
    cameras = []
    for j, h in enumerate(heights):
        for i in range(spec.a):
            theta = 2 * math.pi * i / spec.a
            radial = np.array([math.cos(theta), math.sin(theta), 0.0])
            pos = np.array([cx, cy, h]) + spec.r * radial
            cameras.append(CameraView(pos, -radial, up, intrinsics, id=j * spec.a + i))
    return CameraGrid(cameras, grid_edges(spec.a, spec.z), spec, (float(cx), float(cy)),
                      (float(z0), float(z1)), heights)
