"""Cost bookkeeping: the per-(camera, sample) cache, plans and total cost.

Only the out-of-focus term of the pointwise cost depends on the focus
distance, and for a visible sample it reduces to interval membership: the
sample is in focus for camera ``c`` iff ``lo[c, p] <= s <= hi[c, p]``. The
cache stores the two static terms plus those intervals, so every optimizer
works from the same numbers.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from focusplan.geometry.sampling import SampleSet
from focusplan.geometry.visibility import VisibilityTable
from focusplan.optics import CostParams, focus_interval_arrays

UNASSIGNED = -1


@dataclass(frozen=True)
class CostCache:
    visible: np.ndarray  # (C, P) bool
    static: np.ndarray  # (C, P) static terms where visible, 1.0 elsewhere
    depth: np.ndarray  # (C, P) mm along the optical axis
    lo: np.ndarray  # (C, P) focus interval, nan where not visible
    hi: np.ndarray  # (C, P) inf when unbounded above
    focal_length: np.ndarray  # (C,)
    hyperfocal: np.ndarray  # (C,)
    weights: np.ndarray  # (P,) mm^2
    params: CostParams
    _terms: tuple = field(default=None, repr=False)  # (area, deviation) unweighted

    @property
    def n_cameras(self) -> int:
        return self.visible.shape[0]

    @property
    def n_samples(self) -> int:
        return self.visible.shape[1]

    @property
    def w3(self) -> float:
        return self.params.w3

    def in_focus(self, c: int, s: float, idx=slice(None)) -> np.ndarray:
        """Visible and inside the depth of field of camera ``c`` at focus ``s``."""
        with np.errstate(invalid="ignore"):
            return self.visible[c, idx] & (self.lo[c, idx] <= s) & (s <= self.hi[c, idx])

    def camera_costs(self, c: int, s: float, idx=slice(None)) -> np.ndarray:
        cost = self.static[c, idx] + self.w3 * ~self.in_focus(c, s, idx)
        return np.where(self.visible[c, idx], cost, 1.0)

    def cost_matrix(self, focus: np.ndarray) -> np.ndarray:
        """(C, P) pointwise costs; rows of unset cameras are all 1."""
        focus = np.asarray(focus, dtype=np.float64)
        s = focus[:, None]
        with np.errstate(invalid="ignore"):
            inside = (self.lo <= s) & (s <= self.hi)
        cost = self.static + self.w3 * ~inside
        usable = self.visible & ~np.isnan(s)
        return np.where(usable, cost, 1.0)

    def with_params(self, params: CostParams) -> "CostCache":
        """Re-weight the static terms without recomputing geometry."""
        if params.eps1 != self.params.eps1 or params.eps2 != self.params.eps2:
            raise ValueError("thresholds changed; rebuild the cache from geometry")
        area, dev = self._terms
        static = np.where(self.visible, params.w1 * area + params.w2 * dev, 1.0)
        return CostCache(self.visible, static, self.depth, self.lo, self.hi, self.focal_length,
                         self.hyperfocal, self.weights, params, _terms=self._terms)


def build_cost_cache(samples: SampleSet, cameras, visibility: VisibilityTable,
                     params: CostParams) -> CostCache:
    cameras = list(cameras)
    visible = np.array(visibility.matrix, dtype=bool)
    C, P = len(cameras), len(samples)
    if visible.shape != (C, P):
        raise ValueError(f"visibility shape {visible.shape} does not match ({C}, {P})")
    depth = np.empty((C, P))
    area = np.zeros((C, P))
    dev = np.zeros((C, P))
    for c, cam in enumerate(cameras):
        depth[c] = cam.depth(samples.positions)
        incidence = samples.normals @ cam.direction
        vis = visible[c]
        if np.any(incidence[vis] <= 0):
            raise ValueError(f"camera {c}: back-facing samples flagged visible")
        area[c, vis] = np.minimum(params.eps1 * depth[c, vis] ** 2 / incidence[vis], 1.0)
        dev[c, vis] = np.minimum(cam.axis_deviation(samples.positions[vis]) / params.eps2, 1.0)
    static = np.where(visible, params.w1 * area + params.w2 * dev, 1.0)
    F = np.array([cam.intrinsics.focal_length for cam in cameras], dtype=np.float64)
    H = np.array([cam.intrinsics.hyperfocal for cam in cameras], dtype=np.float64)
    lo = np.full((C, P), np.nan)
    hi = np.full((C, P), np.nan)
    for c in range(C):
        vis = visible[c]
        lo[c, vis], hi[c, vis] = focus_interval_arrays(depth[c, vis], F[c], H[c])
    for arr in (visible, static, depth, lo, hi, F, H):
        arr.flags.writeable = False
    weights = np.array(samples.weights)
    weights.flags.writeable = False
    return CostCache(visible, static, depth, lo, hi, F, H, weights, params, _terms=(area, dev))


def cache_from_terms(visible, depth, area_term, deviation_term, params: CostParams,
                     focal_length=50.0, hyperfocal=10_000.0, weights=None) -> CostCache:
    """Build a cache directly from per-(camera, sample) terms (tests, studies)."""
    visible = np.asarray(visible, dtype=bool)
    C, P = visible.shape
    depth = np.asarray(depth, dtype=np.float64)
    area = np.where(visible, np.asarray(area_term, dtype=np.float64), 0.0)
    dev = np.where(visible, np.asarray(deviation_term, dtype=np.float64), 0.0)
    F = np.broadcast_to(np.asarray(focal_length, dtype=np.float64), (C,)).copy()
    H = np.broadcast_to(np.asarray(hyperfocal, dtype=np.float64), (C,)).copy()
    lo = np.full((C, P), np.nan)
    hi = np.full((C, P), np.nan)
    for c in range(C):
        lo[c, visible[c]], hi[c, visible[c]] = focus_interval_arrays(depth[c, visible[c]], F[c], H[c])
    static = np.where(visible, params.w1 * area + params.w2 * dev, 1.0)
    weights = np.ones(P) if weights is None else np.asarray(weights, dtype=np.float64)
    return CostCache(visible, static, depth, lo, hi, F, H, weights, params, _terms=(area, dev))


@dataclass
class FocusPlan:
    """Per-camera focus distances (nan = unset) and per-sample camera."""

    focus: np.ndarray
    assignment: np.ndarray

    def copy(self) -> "FocusPlan":
        return FocusPlan(self.focus.copy(), self.assignment.copy())

    @property
    def is_set(self) -> np.ndarray:
        return ~np.isnan(self.focus)

    def validate(self, cache: CostCache) -> None:
        if len(self.focus) != cache.n_cameras or len(self.assignment) != cache.n_samples:
            raise ValueError("plan does not match the scene dimensions")
        a = self.assignment
        if np.any((a < UNASSIGNED) | (a >= cache.n_cameras)):
            raise ValueError("plan references an unknown camera id")
        assigned = a != UNASSIGNED
        if not np.all(cache.visible[a[assigned], np.flatnonzero(assigned)]):
            raise ValueError("sample assigned to a camera that cannot see it")
        if np.any(self.focus[self.is_set] <= cache.focal_length[self.is_set]):
            raise ValueError("focus distance must exceed the focal length")


@dataclass(frozen=True)
class CostReport:
    total: float
    mean: float
    per_camera: np.ndarray
    unassigned: float
    in_focus_area: float  # mm^2
    n_samples: int
    n_cameras: int

    def to_dict(self) -> dict:
        return {"total": self.total, "mean": self.mean, "unassigned_cost": self.unassigned,
                "in_focus_area_mm2": self.in_focus_area, "n_samples": self.n_samples,
                "n_cameras": self.n_cameras, "per_camera": self.per_camera.tolist()}


def sample_costs(plan: FocusPlan, cache: CostCache) -> np.ndarray:
    """Cost of each sample under its assigned camera (1 when unassigned)."""
    a = plan.assignment
    if np.any((a < UNASSIGNED) | (a >= cache.n_cameras)):
        raise ValueError("plan references an unknown camera id")
    costs = np.ones(cache.n_samples)
    idx = np.flatnonzero(a != UNASSIGNED)
    cams = a[idx]
    s = plan.focus[cams]
    if np.any(np.isnan(s)):
        raise ValueError("sample assigned to a camera without a focus distance")
    with np.errstate(invalid="ignore"):
        inside = (cache.lo[cams, idx] <= s) & (s <= cache.hi[cams, idx])
    vis = cache.visible[cams, idx]
    costs[idx] = np.where(vis, cache.static[cams, idx] + cache.w3 * ~inside, 1.0)
    return costs


def in_focus_mask(plan: FocusPlan, cache: CostCache) -> np.ndarray:
    a = plan.assignment
    idx = np.flatnonzero(a != UNASSIGNED)
    cams = a[idx]
    s = plan.focus[cams]
    mask = np.zeros(cache.n_samples, dtype=bool)
    with np.errstate(invalid="ignore"):
        mask[idx] = cache.visible[cams, idx] & (cache.lo[cams, idx] <= s) & (s <= cache.hi[cams, idx])
    return mask


def total_cost(plan: FocusPlan, cache: CostCache) -> CostReport:
    costs = sample_costs(plan, cache)
    a = plan.assignment
    assigned = a != UNASSIGNED
    per_camera = np.bincount(a[assigned], weights=costs[assigned], minlength=cache.n_cameras)
    total = float(np.sum(costs))
    area = float(np.sum(cache.weights[in_focus_mask(plan, cache)]))
    return CostReport(total, total / cache.n_samples, per_camera, float(np.sum(costs[~assigned])),
                      area, cache.n_samples, cache.n_cameras)


def assign_step(focus: np.ndarray, cache: CostCache) -> np.ndarray:
    """Greedy argmin assignment; ties go to the lowest camera id.

    Cameras that cannot see a sample, or have no focus distance, never win
    it; a sample no usable camera sees is UNASSIGNED.
    """
    cost = cache.cost_matrix(focus)
    usable = cache.visible & ~np.isnan(np.asarray(focus, dtype=np.float64))[:, None]
    cost = np.where(usable, cost, np.inf)
    best = np.argmin(cost, axis=0)
    best[~usable.any(axis=0)] = UNASSIGNED
    return best.astype(np.int64)


def lower_bound(cache: CostCache) -> float:
    """Total cost if every sample were in focus (focus term dropped)."""
    return float(np.sum(np.min(cache.static, axis=0)))

