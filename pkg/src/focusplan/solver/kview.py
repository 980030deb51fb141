"""Joint refocusing and re-assignment over small camera tuples.

For a tuple of cameras and the samples currently assigned to any of them,
the tuple cost is piecewise constant over the Cartesian product of the
cameras' breakpoint partitions. Every product cell is scored; the best
cell's midpoints become the new focus distances and the samples are
re-assigned among the tuple.

Scoring is O(n^2) for pairs: rows enumerate the cells of the
second-to-last camera (outer cameras, for k = 3, are looped over), and the
last camera's cells are swept with a difference array, so a row costs
O(n + cells) instead of O(n * cells).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from focusplan.assignment import CostCache, FocusPlan, assign_step
from focusplan.solver.common import SolverConfig, Trace, converged
from focusplan.solver.em import initial_plan, refocus_camera
from focusplan.solver.partition import cell_midpoints, cell_spans, make_breakpoints
from focusplan.solver.schedule import CameraTuple, independent_tuple_schedule

COMMIT_TOL = 1e-9  # minimum tuple-cost decrease worth committing
_CHUNK_ELEMENTS = 1 << 21


@dataclass(frozen=True)
class StepResult:
    cameras: tuple[int, ...]
    n_samples: int
    cost_before: float
    cost_after: float
    committed: bool

    @property
    def decrease(self) -> float:
        return self.cost_before - self.cost_after


class _CameraCells:
    """One tuple camera's partition over the working samples."""

    def __init__(self, cache: CostCache, camera: int, work: np.ndarray):
        self.camera = camera
        vis = cache.visible[camera, work]
        self.visible = vis
        lo, hi = cache.lo[camera, work], cache.hi[camera, work]
        F, H = float(cache.focal_length[camera]), float(cache.hyperfocal[camera])
        self.breakpoints = make_breakpoints(lo[vis], hi[vis], F)
        self.mids = cell_midpoints(self.breakpoints, F, H)
        self.n_cells = len(self.mids)
        first, last = cell_spans(self.breakpoints, np.where(vis, lo, np.inf), np.where(vis, hi, -np.inf), F)
        # invisible samples never cover a cell
        first[~vis], last[~vis] = 1, 0
        self.first, self.last = first, last
        static = cache.static[camera, work]
        self.cost_in = np.where(vis, static, 1.0)
        self.cost_out = np.where(vis, static + cache.w3, 1.0)

    def rows(self, cells: np.ndarray) -> np.ndarray:
        """(len(cells), n) costs with the focus in each of ``cells``."""
        j = cells[:, None]
        inside = (self.first <= j) & (j <= self.last)
        return np.where(inside, self.cost_in, self.cost_out)


def _sweep_last(prefix: np.ndarray, last: _CameraCells) -> np.ndarray:
    """Tuple cost for every (row of ``prefix``, cell of ``last``).

    ``prefix`` holds, per row, the best cost each sample can get from the
    other cameras. Moving the last camera's focus across a breakpoint only
    toggles samples whose interval starts or ends there.
    """
    rows, n = prefix.shape
    J = last.n_cells
    with_in = np.minimum(prefix, last.cost_in)
    with_out = np.minimum(prefix, last.cost_out)
    base = with_out.sum(axis=1)
    delta = with_in - with_out
    ok = np.flatnonzero(last.first <= last.last)
    if len(ok) == 0:
        return np.repeat(base[:, None], J, axis=1)
    offsets = (np.arange(rows) * (J + 1))[:, None]
    idx = np.concatenate([(offsets + last.first[ok]).ravel(), (offsets + last.last[ok] + 1).ravel()])
    w = np.concatenate([delta[:, ok].ravel(), -delta[:, ok].ravel()])
    diff = np.bincount(idx, weights=w, minlength=rows * (J + 1)).reshape(rows, J + 1)
    return base[:, None] + np.cumsum(diff[:, :J], axis=1)


def _search(cells: list[_CameraCells], incumbent: float, prune: bool):
    """Best product cell as (cost, per-camera cell indices)."""
    n = len(cells[0].first)
    outer, mid, last = cells[:-2], cells[-2], cells[-1]
    best_cost, best_cells = np.inf, None
    chunk = max(1, _CHUNK_ELEMENTS // max(n, last.n_cells, 1))
    mid_cells = np.arange(mid.n_cells)
    for combo in itertools.product(*(range(c.n_cells) for c in outer)):
        floor = np.full(n, np.inf)
        for cam, j in zip(outer, combo):
            floor = np.minimum(floor, cam.rows(np.array([j]))[0])
        for start in range(0, mid.n_cells, chunk):
            rows_idx = mid_cells[start:start + chunk]
            prefix = np.minimum(floor, mid.rows(rows_idx))
            if prune:
                # optimistic bound: every sample the last camera sees is in focus
                bound = np.minimum(prefix, last.cost_in).sum(axis=1)
                keep = bound <= min(best_cost, incumbent) + COMMIT_TOL
                if not keep.any():
                    continue
                rows_idx, prefix = rows_idx[keep], prefix[keep]
            costs = _sweep_last(prefix, last)
            r, j = np.unravel_index(int(np.argmin(costs)), costs.shape)
            if costs[r, j] < best_cost:
                best_cost = float(costs[r, j])
                best_cells = (*combo, int(rows_idx[r]), int(j))
    return best_cost, best_cells


def _tuple_costs(cache: CostCache, cams, focus, work) -> np.ndarray:
    """(k, n) pointwise costs, inf where a camera cannot take the sample."""
    out = np.empty((len(cams), len(work)))
    for i, c in enumerate(cams):
        out[i] = np.where(cache.visible[c, work], cache.camera_costs(c, focus[i], work), np.inf)
    return out


def _current_cost(plan: FocusPlan, cache: CostCache, work: np.ndarray) -> float:
    cams = plan.assignment[work]
    s = plan.focus[cams]
    with np.errstate(invalid="ignore"):
        inside = (cache.lo[cams, work] <= s) & (s <= cache.hi[cams, work])
    cost = np.where(cache.visible[cams, work], cache.static[cams, work] + cache.w3 * ~inside, 1.0)
    return float(np.sum(cost))


def kview_step(plan: FocusPlan, cameras, cache: CostCache, prune: bool = True) -> StepResult:
    """Jointly optimise the tuple ``cameras`` in place on ``plan``.

    Works on the samples currently assigned to the tuple. The best product
    cell is committed only if it lowers their cost by more than COMMIT_TOL;
    cameras left without samples keep their previous focus.
    """
    ids = tuple(sorted(int(c) for c in (cameras.ids if isinstance(cameras, CameraTuple) else cameras)))
    work = np.flatnonzero(np.isin(plan.assignment, ids))
    if len(work) == 0:
        return StepResult(ids, 0, 0.0, 0.0, False)
    # cameras that see none of the working samples cannot change anything
    active = tuple(c for c in ids if cache.visible[c, work].any())
    before = _current_cost(plan, cache, work)
    if len(active) == 1:
        changed = refocus_camera(plan, cache, active[0], work)
        after = _current_cost(plan, cache, work)
        return StepResult(ids, len(work), before, after, changed)

    cells = [_CameraCells(cache, c, work) for c in active]
    _, best = _search(cells, before, prune)
    if best is None:
        return StepResult(ids, len(work), before, before, False)
    candidate = np.array([cell.mids[j] for cell, j in zip(cells, best)])
    costs = _tuple_costs(cache, active, candidate, work)
    winner = np.argmin(costs, axis=0)
    sample_cost = np.take_along_axis(costs, winner[None], axis=0)[0]
    after = float(np.sum(np.where(np.isinf(sample_cost), 1.0, sample_cost)))
    if not after < before - COMMIT_TOL:
        return StepResult(ids, len(work), before, before, False)
    reachable = np.isfinite(sample_cost)
    new_assignment = plan.assignment[work].copy()
    new_assignment[reachable] = np.asarray(active)[winner[reachable]]
    plan.assignment[work] = new_assignment
    for i, c in enumerate(active):
        if np.any(new_assignment == c):
            plan.focus[c] = candidate[i]
    return StepResult(ids, len(work), before, after, True)


def kview_optimize(cache: CostCache, edges, config: SolverConfig = SolverConfig(),
                   initial: FocusPlan | None = None) -> tuple[FocusPlan, Trace]:
    """Sweep tuple batches, then re-assign globally, until converged.

    With ``k = 1`` this is exactly the EM alternation.
    """
    plan = initial_plan(cache, config.init) if initial is None else initial.copy()
    batches = independent_tuple_schedule(cache.n_cameras, edges, config.k, config.ring)
    trace = Trace()
    previous = trace.record(0, "init", plan, cache)
    for it in range(1, config.max_iters + 1):
        for batch in batches:
            for tup in batch:
                kview_step(plan, tup, cache, prune=config.prune)
            if config.reassign == "batch":
                plan.assignment = assign_step(plan.focus, cache)
        trace.record(it, "minimize", plan, cache)
        plan.assignment = assign_step(plan.focus, cache)
        current = trace.record(it, "assign", plan, cache)
        if converged(previous, current, config.tol):
            break
        previous = current
    return plan, trace


__all__ = ["kview_step", "kview_optimize", "StepResult", "COMMIT_TOL"]
