"""Synthetic meshes and the scene bundle the solvers consume."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from focusplan.assignment import CostCache, build_cost_cache
from focusplan.geometry import (SampleSet, TriangleMesh, VisibilityTable, build_bvh, build_visibility,
                                sample_surface)
from focusplan.optics import CameraIntrinsics, CameraView, CostParams


def revolve(profile, segments: int = 64, center=(0.0, 0.0, 0.0)) -> TriangleMesh:
    """Surface of revolution about +z from a (radius, height) profile.

    Profile points with zero radius become poles.
    """
    center = np.asarray(center, dtype=np.float64)
    theta = 2 * math.pi * np.arange(segments) / segments
    ring_dirs = np.column_stack([np.cos(theta), np.sin(theta), np.zeros(segments)])
    vertices, rings = [], []
    for rho, z in profile:
        start = sum(len(v) for v in vertices)
        if rho == 0:
            vertices.append(np.array([[0.0, 0.0, z]]) + center)
            rings.append(np.array([start]))
        else:
            vertices.append(rho * ring_dirs + np.array([0.0, 0.0, z]) + center)
            rings.append(start + np.arange(segments))
    faces = []
    nxt = np.roll(np.arange(segments), -1)
    for a, b in zip(rings[:-1], rings[1:]):
        if len(a) == 1 and len(b) == 1:
            continue
        if len(a) == 1:
            faces.append(np.column_stack([np.full(segments, a[0]), b[nxt], b]))
        elif len(b) == 1:
            faces.append(np.column_stack([a, a[nxt], np.full(segments, b[0])]))
        else:
            faces.append(np.column_stack([a, a[nxt], b[nxt]]))
            faces.append(np.column_stack([a, b[nxt], b]))
    return TriangleMesh.from_arrays(np.vstack(vertices), np.vstack(faces))


def capsule(radius: float, height: float, center=(0.0, 0.0, 0.0), segments: int = 64,
            cap_rings: int = 16, body_rings: int = 48) -> TriangleMesh:
    """Vertical capsule of total ``height``; ``center`` is its bottom pole."""
    shaft = height - 2 * radius
    if shaft < 0:
        raise ValueError("capsule height must be at least its diameter")
    profile = []
    for phi in np.linspace(-math.pi / 2, 0, cap_rings + 1):
        profile.append((radius * math.cos(phi), radius + radius * math.sin(phi)))
    for z in np.linspace(radius, radius + shaft, body_rings + 1)[1:-1]:
        profile.append((radius, z))
    for phi in np.linspace(0, math.pi / 2, cap_rings + 1):
        profile.append((radius * math.cos(phi), radius + shaft + radius * math.sin(phi)))
    profile[0] = (0.0, 0.0)
    profile[-1] = (0.0, height)
    return revolve(profile, segments, center)


def capsule_area(radius: float, height: float) -> float:
    return 2 * math.pi * radius * (height - 2 * radius) + 4 * math.pi * radius ** 2


def sphere(radius: float, center=(0.0, 0.0, 0.0), segments: int = 48, rings: int = 24) -> TriangleMesh:
    profile = [(radius * math.cos(phi), radius * math.sin(phi))
               for phi in np.linspace(-math.pi / 2, math.pi / 2, rings + 1)]
    profile[0], profile[-1] = (0.0, -radius), (0.0, radius)
    return revolve(profile, segments, center)


def cylinder(radius: float, height: float, center=(0.0, 0.0, 0.0), segments: int = 64,
             rings: int = 16) -> TriangleMesh:
    """Closed cylinder standing on ``center``."""
    profile = [(0.0, 0.0)] + [(radius, z) for z in np.linspace(0, height, rings + 1)] + [(0.0, height)]
    return revolve(profile, segments, center)


def box(lo, hi) -> TriangleMesh:
    lo, hi = np.asarray(lo, dtype=np.float64), np.asarray(hi, dtype=np.float64)
    corners = np.array([[x, y, z] for z in (lo[2], hi[2]) for y in (lo[1], hi[1]) for x in (lo[0], hi[0])])
    quads = [(0, 2, 3, 1), (4, 5, 7, 6), (0, 1, 5, 4), (2, 6, 7, 3), (0, 4, 6, 2), (1, 3, 7, 5)]
    faces = [(q[0], q[1], q[2]) for q in quads] + [(q[0], q[2], q[3]) for q in quads]
    return TriangleMesh.from_arrays(corners, faces)


def unit_cube(scale: float = 1.0) -> TriangleMesh:
    return box((0, 0, 0), (scale, scale, scale))


def capsule_body(segments: int = 48) -> TriangleMesh:
    """Human-sized figure of capsules: legs, torso, arms and a head.

    Limbs sit beside the torso so side views see large depth variation.
    """
    parts = [
        capsule(70, 900, (-90, 0, 0), segments),
        capsule(70, 900, (90, 0, 0), segments),
        capsule(140, 680, (0, 0, 780), segments),
        capsule(40, 680, (-200, 0, 790), segments),
        capsule(40, 680, (200, 0, 790), segments),
        sphere(95, (0, 0, 1560), segments, segments // 2),
    ]
    return TriangleMesh.merge(parts)


def two_plane_scene(intrinsics: CameraIntrinsics = CameraIntrinsics(), n_cameras: int = 2,
                    near_depth: float = 600.0, far_depth: float = 1600.0):
    """Two walls at different depths in front of one or two cameras.

    The near wall is larger, so a camera refocused on its own samples keeps
    choosing it; the walls are offset vertically so neither hides the other.
    Cameras sit at x = -20 and x = +20 looking along +y.
    """
    thickness = 2.0
    near = box((-60, near_depth, -100), (60, near_depth + thickness, 0))
    far = box((-60, far_depth, 60), (60, far_depth + thickness, 120))
    mesh = TriangleMesh.merge([near, far])
    xs = [0.0] if n_cameras == 1 else [-20.0, 20.0]
    cameras = [CameraView((x, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0), intrinsics, id=i)
               for i, x in enumerate(xs)]
    edges = [] if n_cameras == 1 else [(0, 1)]
    return mesh, cameras, edges


@dataclass
class Scene:
    mesh: TriangleMesh | None
    samples: SampleSet
    cameras: list[CameraView]
    visibility: VisibilityTable
    cache: CostCache
    edges: list[tuple[int, int]]
    params: CostParams

    @classmethod
    def build(cls, mesh: TriangleMesh, cameras, edges, n_samples: int, seed: int,
              params: CostParams = CostParams(), bvh=None) -> "Scene":
        samples = sample_surface(mesh, n_samples, seed)
        return cls.from_samples(mesh, samples, cameras, edges, params, bvh=bvh)

    @classmethod
    def from_samples(cls, mesh, samples: SampleSet, cameras, edges, params: CostParams = CostParams(),
                     bvh=None) -> "Scene":
        cameras = list(cameras)
        if bvh is None:
            bvh = build_bvh(mesh.vertices, mesh.triangles)
        vis = build_visibility(mesh, samples, cameras, bvh=bvh)
        return cls(mesh, samples, cameras, vis, build_cost_cache(samples, cameras, vis, params),
                   list(edges), params)


def random_scene(seed: int, n_samples: int = 256, a: int = 6, z: int = 2):
    """Small randomised scene: a few spheres and capsules inside a camera ring."""
    from focusplan.harness.grid import GridSpec, generate_cylindrical_grid

    rng = np.random.default_rng(seed)
    parts = []
    for _ in range(int(rng.integers(2, 5))):
        x, y = rng.uniform(-180, 180, size=2)
        if rng.random() < 0.5:
            parts.append(sphere(float(rng.uniform(40, 120)), (x, y, float(rng.uniform(0, 300))), 24, 12))
        else:
            r = float(rng.uniform(30, 90))
            parts.append(capsule(r, float(rng.uniform(2 * r + 50, 500)), (x, y, 0.0), 24, 6, 6))
    mesh = TriangleMesh.merge(parts)
    spec = GridSpec(a=a, z=z, r=float(rng.uniform(550, 800)))
    grid = generate_cylindrical_grid(spec, mesh)
    return Scene.build(mesh, grid.cameras, grid.edges, n_samples, seed)
