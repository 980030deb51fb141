"""Single-view focus heuristics: closest, average and mid-range depth."""
from __future__ import annotations

import math

import numpy as np

from focusplan.assignment import CostCache
from focusplan.solver.common import InitPolicy


def _clamp(s: float, F: float) -> float:
    return s if s > F else math.nextafter(F, math.inf)


def baseline_closest(cache: CostCache, camera: int) -> float | None:
    depths = cache.depth[camera, cache.visible[camera]]
    if len(depths) == 0:
        return None
    return _clamp(float(depths.min()), float(cache.focal_length[camera]))


def baseline_avg(cache: CostCache, camera: int) -> float | None:
    depths = cache.depth[camera, cache.visible[camera]]
    if len(depths) == 0:
        return None
    return _clamp(float(np.mean(depths)), float(cache.focal_length[camera]))


def baseline_midrange(cache: CostCache, camera: int) -> float | None:
    depths = cache.depth[camera, cache.visible[camera]]
    if len(depths) == 0:
        return None
    return _clamp(0.5 * float(depths.min() + depths.max()), float(cache.focal_length[camera]))


_POLICIES = {
    InitPolicy.CLOSEST: baseline_closest,
    InitPolicy.AVG: baseline_avg,
    InitPolicy.MIDRANGE: baseline_midrange,
}


def baseline_focus(cache: CostCache, policy) -> np.ndarray:
    """Focus for every camera by ``policy``; nan for cameras that see nothing."""
    fn = _POLICIES[InitPolicy(policy)]
    focus = np.full(cache.n_cameras, np.nan)
    for c in range(cache.n_cameras):
        s = fn(cache, c)
        if s is not None:
            focus[c] = s
    return focus
