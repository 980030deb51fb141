"""Alternating assignment / per-camera refocusing."""
from __future__ import annotations

import numpy as np

from focusplan.assignment import CostCache, FocusPlan, assign_step
from focusplan.solver.common import SolverConfig, Trace, converged, plan_from_focus
from focusplan.solver.partition import optimal_focus_single


def refocus_camera(plan: FocusPlan, cache: CostCache, camera: int, idx: np.ndarray) -> bool:
    """Set ``camera`` to the exact optimum over its samples ``idx``.

    The current focus is kept only when it strictly beats every open cell,
    which can happen when it sits exactly on a breakpoint. Returns whether
    the focus changed.
    """
    if len(idx) == 0:
        return False
    s, count = optimal_focus_single(cache.lo[camera, idx], cache.hi[camera, idx],
                                    cache.focal_length[camera], cache.hyperfocal[camera])
    current = plan.focus[camera]
    if not np.isnan(current):
        if np.count_nonzero(cache.in_focus(camera, current, idx)) > count:
            return False
    changed = s != current
    plan.focus[camera] = s
    return changed


def groups_by_camera(assignment: np.ndarray, n_cameras: int) -> list[np.ndarray]:
    order = np.argsort(assignment, kind="stable")
    a = assignment[order]
    bounds = np.searchsorted(a, np.arange(n_cameras + 1), side="left")
    return [order[bounds[c]:bounds[c + 1]] for c in range(n_cameras)]


def minimize_step(plan: FocusPlan, cache: CostCache) -> None:
    """Refocus every camera on its assigned samples (assignment fixed)."""
    groups = groups_by_camera(plan.assignment, cache.n_cameras)
    for c in range(cache.n_cameras):
        refocus_camera(plan, cache, c, groups[c])


def initial_plan(cache: CostCache, init) -> FocusPlan:
    from focusplan.solver.baselines import baseline_focus

    return plan_from_focus(baseline_focus(cache, init), cache)


def em_optimize(cache: CostCache, config: SolverConfig = SolverConfig(),
                initial: FocusPlan | np.ndarray | None = None) -> tuple[FocusPlan, Trace]:
    """EM from ``initial`` (a plan, a focus vector, or the config's init policy)."""
    if initial is None:
        plan = initial_plan(cache, config.init)
    elif isinstance(initial, FocusPlan):
        plan = initial.copy()
    else:
        plan = plan_from_focus(initial, cache)
    trace = Trace()
    previous = trace.record(0, "init", plan, cache)
    for it in range(1, config.max_iters + 1):
        minimize_step(plan, cache)
        trace.record(it, "minimize", plan, cache)
        plan.assignment = assign_step(plan.focus, cache)
        current = trace.record(it, "assign", plan, cache)
        if converged(previous, current, config.tol):
            break
        previous = current
    return plan, trace


__all__ = ["em_optimize", "minimize_step", "refocus_camera", "groups_by_camera", "initial_plan"]
