"""Breakpoint partitions of the focus axis and the exact single-view optimum.

For one camera, each visible sample is in focus on a closed interval of
focus distances. The union of interval endpoints above F splits (F, inf)
into open cells; the in-focus count is constant on each cell. Cell ``j``
spans ``(b[j-1], b[j])`` with ``b[-1] = F`` and ``b[B] = inf``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BreakpointPartition:
    camera: int
    focal_length: float
    hyperfocal: float
    breakpoints: np.ndarray  # strictly increasing, all > focal_length
    counts: np.ndarray  # (len(breakpoints) + 1,) in-focus count per cell

    @property
    def n_cells(self) -> int:
        return len(self.breakpoints) + 1

    def cell_bounds(self, j: int) -> tuple[float, float | None]:
        b = self.breakpoints
        lower = self.focal_length if j == 0 else float(b[j - 1])
        upper = float(b[j]) if j < len(b) else None
        return lower, upper

    def midpoint(self, j: int) -> float:
        return cell_midpoint(self.breakpoints, j, self.focal_length, self.hyperfocal)

    def midpoints(self) -> np.ndarray:
        return cell_midpoints(self.breakpoints, self.focal_length, self.hyperfocal)

    def locate(self, s: float) -> int | None:
        """Cell containing ``s``; None when ``s`` sits on a breakpoint or <= F."""
        if not s > self.focal_length:
            return None
        j = int(np.searchsorted(self.breakpoints, s, side="left"))
        if j < len(self.breakpoints) and self.breakpoints[j] == s:
            return None
        return j

    def best_cell(self) -> int:
        """Maximal-count cell; ties go to the smallest lower endpoint."""
        return int(np.argmax(self.counts))


def cell_midpoint(breakpoints: np.ndarray, j: int, F: float, H: float) -> float:
    """Representative focus distance of cell ``j``.

    Bounded cells use their midpoint. The unbounded last cell uses twice its
    lower end, capped at H + F while that stays inside the cell.
    """
    B = len(breakpoints)
    lower = F if j == 0 else float(breakpoints[j - 1])
    if j < B:
        return 0.5 * (lower + float(breakpoints[j]))
    cap = H + F
    return min(2.0 * lower, cap) if lower < cap else 2.0 * lower


def cell_midpoints(breakpoints: np.ndarray, F: float, H: float) -> np.ndarray:
    B = len(breakpoints)
    lowers = np.concatenate([[F], breakpoints])
    mids = np.empty(B + 1)
    mids[:B] = 0.5 * (lowers[:B] + breakpoints)
    mids[B] = cell_midpoint(breakpoints, B, F, H)
    return mids


def make_breakpoints(lo: np.ndarray, hi: np.ndarray, F: float) -> np.ndarray:
    ends = np.concatenate([lo, hi])
    ends = ends[np.isfinite(ends) & (ends > F)]
    return np.unique(ends)


def cell_spans(breakpoints: np.ndarray, lo: np.ndarray, hi: np.ndarray, F: float):
    """First and last cell index each interval covers (empty when last < first)."""
    B = len(breakpoints)
    first = np.where(lo <= F, 0, np.searchsorted(breakpoints, lo, side="left") + 1)
    last = np.where(np.isinf(hi), B, np.searchsorted(breakpoints, hi, side="right") - 1)
    return first.astype(np.int64), last.astype(np.int64)


def sweep_counts(n_cells: int, first: np.ndarray, last: np.ndarray) -> np.ndarray:
    """+1/-1 sweep: number of intervals covering each cell."""
    ok = first <= last
    diff = (np.bincount(first[ok], minlength=n_cells + 1)
            - np.bincount(last[ok] + 1, minlength=n_cells + 1))
    return np.cumsum(diff[:n_cells])


def build_partition(lo, hi, focal_length: float, hyperfocal: float, camera: int = -1) -> BreakpointPartition:
    """Partition from the focus intervals of the samples one camera sees."""
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    b = make_breakpoints(lo, hi, focal_length)
    first, last = cell_spans(b, lo, hi, focal_length)
    counts = sweep_counts(len(b) + 1, first, last)
    for arr in (b, counts):
        arr.flags.writeable = False
    return BreakpointPartition(camera, float(focal_length), float(hyperfocal), b, counts)


def camera_partition(cache, camera: int, idx) -> BreakpointPartition:
    """Partition for ``camera`` over the samples in ``idx`` it can see."""
    idx = np.asarray(idx)
    idx = idx[cache.visible[camera, idx]]
    return build_partition(cache.lo[camera, idx], cache.hi[camera, idx],
                           cache.focal_length[camera], cache.hyperfocal[camera], camera)


def optimal_focus_single(lo, hi, focal_length: float, hyperfocal: float) -> tuple[float | None, int]:
    """Focus distance maximising the in-focus count, and that count.

    Returns ``(None, 0)`` for an empty sample set.
    """
    if len(lo) == 0:
        return None, 0
    part = build_partition(lo, hi, focal_length, hyperfocal)
    j = part.best_cell()
    return part.midpoint(j), int(part.counts[j])
