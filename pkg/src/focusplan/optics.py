"""Camera model, thin-lens depth of field and the pointwise imaging cost.

Distances are millimetres throughout. A camera looks along ``direction``;
the depth of a point is its coordinate along that axis (not its range).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Canon APS-C body: 22.3 mm sensor across 6960 px -> 3.2 um pitch.
DEFAULT_PIXEL_PITCH_MM = 0.0032


class InvalidFocusDistance(ValueError):
    pass


@dataclass(frozen=True)
class CameraIntrinsics:
    focal_length: float = 50.0  # F, mm
    hyperfocal: float = 10_000.0  # H, mm
    width: int = 4640  # px, portrait 2:3 (W/H)
    height: int = 6960
    fx: float = 50.0 / DEFAULT_PIXEL_PITCH_MM  # px
    fy: float = 50.0 / DEFAULT_PIXEL_PITCH_MM
    cx: float | None = None  # principal point, defaults to image centre
    cy: float | None = None

    def __post_init__(self):
        if not self.focal_length > 0:
            raise ValueError("focal length must be positive")
        if not self.hyperfocal > self.focal_length:
            raise ValueError("hyperfocal distance must exceed the focal length")
        if self.width <= 0 or self.height <= 0 or self.fx <= 0 or self.fy <= 0:
            raise ValueError("image bounds and pixel focal lengths must be positive")
        if self.cx is None:
            object.__setattr__(self, "cx", self.width / 2.0)
        if self.cy is None:
            object.__setattr__(self, "cy", self.height / 2.0)

    @property
    def aspect(self) -> float:
        return self.width / self.height

    @classmethod
    def from_dict(cls, d: dict) -> "CameraIntrinsics":
        return cls(**d)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("focal_length", "hyperfocal", "width", "height", "fx", "fy", "cx", "cy")}


@dataclass(frozen=True)
class CameraView:
    position: np.ndarray
    direction: np.ndarray
    up: np.ndarray
    intrinsics: CameraIntrinsics = field(default_factory=CameraIntrinsics)
    id: int = 0

    def __post_init__(self):
        for name in ("position", "direction", "up"):
            arr = np.asarray(getattr(self, name), dtype=np.float64).reshape(3)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if abs(np.linalg.norm(self.direction) - 1) > 1e-9 or abs(np.linalg.norm(self.up) - 1) > 1e-9:
            raise ValueError("camera direction and up must be unit vectors")
        if abs(np.dot(self.direction, self.up)) > 1e-9:
            raise ValueError("camera up must be orthogonal to the viewing direction")

    @property
    def right(self) -> np.ndarray:
        return np.cross(self.direction, self.up)

    def depth(self, points) -> np.ndarray:
        return (np.asarray(points, dtype=np.float64) - self.position) @ self.direction

    def project(self, points) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Pinhole projection to pixel coordinates; returns (u, v, depth)."""
        rel = np.asarray(points, dtype=np.float64) - self.position
        z = rel @ self.direction
        with np.errstate(divide="ignore", invalid="ignore"):
            u = self.intrinsics.cx + self.intrinsics.fx * (rel @ self.right) / z
            v = self.intrinsics.cy - self.intrinsics.fy * (rel @ self.up) / z
        return u, v, z

    def in_image(self, points) -> np.ndarray:
        """Closed image-bounds test; points behind the camera are outside."""
        u, v, z = self.project(points)
        intr = self.intrinsics
        return (z > 0) & (u >= 0) & (u <= intr.width) & (v >= 0) & (v <= intr.height)

    def axis_deviation(self, points) -> np.ndarray:
        """Distance of each point from the optical axis (world units)."""
        rel = np.asarray(points, dtype=np.float64) - self.position
        z = rel @ self.direction
        return np.linalg.norm(rel - z[..., None] * self.direction, axis=-1)

    def to_dict(self) -> dict:
        return {"id": self.id, "position": self.position.tolist(), "direction": self.direction.tolist(),
                "up": self.up.tolist(), "intrinsics": self.intrinsics.to_dict()}


@dataclass(frozen=True)
class CostParams:
    w1: float = 1.0 / 3.0  # projected area
    w2: float = 1.0 / 3.0  # optical-axis deviation
    w3: float = 1.0 / 3.0  # out of depth of field
    eps1: float = 1e-6  # applied to depth^2 in mm^2
    eps2: float = 750.0  # mm

    def __post_init__(self):
        if min(self.w1, self.w2, self.w3) < 0:
            raise ValueError("cost weights must be non-negative")
        if not (self.eps1 > 0 and self.eps2 > 0):
            raise ValueError("cost thresholds must be positive")

    def scaled(self, factor: float) -> "CostParams":
        return CostParams(self.w1 * factor, self.w2 * factor, self.w3 * factor, self.eps1, self.eps2)

    def without_focus_term(self) -> "CostParams":
        return CostParams(self.w1, self.w2, 0.0, self.eps1, self.eps2)


@dataclass(frozen=True)
class DofLimits:
    near: float
    far: float | None  # None: unbounded

    @property
    def unbounded(self) -> bool:
        return self.far is None

    def contains(self, depth: float) -> bool:
        return self.near <= depth and (self.far is None or depth <= self.far)


@dataclass(frozen=True)
class FocusInterval:
    """Closed range of focus distances keeping a given depth in focus."""

    lo: float
    hi: float | None  # None: unbounded above

    @property
    def unbounded(self) -> bool:
        return self.hi is None

    def contains(self, s: float) -> bool:
        return self.lo <= s and (self.hi is None or s <= self.hi)


def dof_limits(s: float, intr: CameraIntrinsics) -> DofLimits:
    H, F = intr.hyperfocal, intr.focal_length
    if not s > F:
        raise InvalidFocusDistance(f"focus distance {s} must exceed the focal length {F}")
    near = H * s / (H + s - F)
    denom = H - s + F
    return DofLimits(near, H * s / denom if denom > 0 else None)


def focus_interval_for_depth(d: float, intr: CameraIntrinsics) -> FocusInterval:
    """Focus distances s with near(s) <= d <= far(s)."""
    if not d > 0:
        raise ValueError("depth must be positive")
    H, F = intr.hyperfocal, intr.focal_length
    lo = d * (H + F) / (H + d)
    if d >= H:
        return FocusInterval(lo, None)
    return FocusInterval(lo, d * (H - F) / (H - d))


def focus_interval_arrays(depth: np.ndarray, focal_length, hyperfocal) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`focus_interval_for_depth`; unbounded ends are ``inf``.

    ``inf`` only ever enters comparisons, never midpoint arithmetic.
    """
    d = np.asarray(depth, dtype=np.float64)
    H, F = np.asarray(hyperfocal, dtype=np.float64), np.asarray(focal_length, dtype=np.float64)
    lo = d * (H + F) / (H + d)
    with np.errstate(divide="ignore", invalid="ignore"):
        hi = np.where(d < H, d * (H - F) / (H - d), np.inf)
    return lo, hi


def in_frustum(point, camera: CameraView, s: float) -> bool:
    """Membership in the view frustum clipped at the depth-of-field limits."""
    point = np.asarray(point, dtype=np.float64)
    if not bool(camera.in_image(point[None])[0]):
        return False
    return dof_limits(s, camera.intrinsics).contains(float(camera.depth(point)))


def static_cost(depth, incidence, deviation, params: CostParams):
    """The focus-independent part of the pointwise cost (first two terms)."""
    area_term = np.minimum(params.eps1 * np.square(depth) / incidence, 1.0)
    deviation_term = np.minimum(deviation / params.eps2, 1.0)
    return params.w1 * area_term + params.w2 * deviation_term


def pointwise_cost(sample, camera: CameraView, s: float, params: CostParams, visible: bool) -> float:
    if not visible:
        return 1.0
    incidence = float(np.dot(camera.direction, sample.normal))
    if incidence <= 0:
        raise ValueError("back-facing sample flagged visible; visibility must exclude it")
    depth = float(camera.depth(sample.position))
    deviation = float(camera.axis_deviation(sample.position))
    cost = float(static_cost(depth, incidence, deviation, params))
    if not in_frustum(sample.position, camera, s):
        cost += params.w3
    return cost


def clamp_focus(s: float, intr: CameraIntrinsics) -> float:
    """Smallest representable focus distance strictly above F if ``s`` is not."""
    F = intr.focal_length
    return s if s > F else math.nextafter(F, math.inf)
