import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from focusplan.assignment import FocusPlan, assign_step, cache_from_terms, total_cost
from focusplan.harness.grid import grid_edges
from focusplan.harness.scenes import Scene, random_scene, two_plane_scene
from focusplan.optics import CostParams, focus_interval_arrays
from focusplan.solver import (CameraTuple, InitPolicy, SolverConfig, baseline_avg, baseline_closest,
                              build_partition, em_optimize, independent_tuple_schedule, kview_optimize,
                              kview_step, measure_overlap, optimal_focus_single)
from focusplan.solver.kview import COMMIT_TOL

from oracles import F, H, dense_counts, dense_pair_sweep, exact_best_count, near_far


def intervals(depths):
    return focus_interval_arrays(np.asarray(depths, float), F, H)


# partition ---------------------------------------------------------------

def test_single_sample_partition():
    p = build_partition(*intervals([750.0]), F, H)
    assert p.n_cells == 3
    assert list(p.counts) == [0, 1, 0]
    assert p.breakpoints[0] == pytest.approx(701.16, abs=0.01)
    assert p.breakpoints[1] == pytest.approx(806.76, abs=0.01)
    s, count = optimal_focus_single(*intervals([750.0]), F, H)
    assert count == 1 and s == pytest.approx(753.96, abs=0.01)


def test_disjoint_and_coincident():
    s, count = optimal_focus_single(*intervals([600.0, 3000.0]), F, H)
    assert count == 1
    s, count = optimal_focus_single(*intervals([900.0] * 7), F, H)
    assert count == 7
    near, far = near_far(s)
    assert near <= 900.0 <= far


def test_empty_sample_set():
    assert optimal_focus_single(np.array([]), np.array([]), F, H) == (None, 0)


def test_tie_break_smallest_lower_endpoint():
    s, count = optimal_focus_single(*intervals([600.0, 3000.0]), F, H)
    lo, hi = intervals([600.0])
    assert lo[0] < s < hi[0]


def test_unbounded_cell_midpoint():
    p = build_partition(*intervals([20_000.0]), F, H)
    assert p.counts[-1] == 1 and p.cell_bounds(p.n_cells - 1)[1] is None
    mid = p.midpoint(p.n_cells - 1)
    lower = p.cell_bounds(p.n_cells - 1)[0]
    assert mid > lower


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 80))
def test_cells_piecewise_constant(seed, n):
    rng = np.random.default_rng(seed)
    depths = rng.uniform(300, 12_000, n)
    p = build_partition(*intervals(depths), F, H)
    assert np.all(np.diff(p.breakpoints) > 0)
    for j in range(p.n_cells):
        lo, hi = p.cell_bounds(j)
        hi = 3 * lo if hi is None else hi
        probes = lo + (hi - lo) * np.array([0.25, 0.5, 0.75])
        assert np.all(dense_counts(depths, probes) == p.counts[j])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 120))
def test_single_view_matches_exact_oracle(seed, n):
    depths = np.random.default_rng(seed).uniform(500, 2000, n)
    s, count = optimal_focus_single(*intervals(depths), F, H)
    assert count == exact_best_count(depths)
    assert dense_counts(depths, [s])[0] == count


# baselines ---------------------------------------------------------------

def _cache_for_depths(depths):
    d = np.asarray(depths, float)[None]
    return cache_from_terms(np.ones_like(d, bool), d, np.zeros_like(d), np.zeros_like(d), CostParams())


@pytest.mark.parametrize("depths, closest, avg", [
    ([700, 750, 900], 700, 783.3333333333334), ([750], 750, 750), ([800, 800, 800], 800, 800),
    ([700, 800], 700, 750), ([600, 700, 800, 900], 600, 750)])
def test_baselines(depths, closest, avg):
    cache = _cache_for_depths(depths)
    assert baseline_closest(cache, 0) == pytest.approx(closest)
    assert baseline_avg(cache, 0) == pytest.approx(avg)


def test_baseline_blind_camera_unset():
    vis = np.array([[False, False]])
    cache = cache_from_terms(vis, np.full((1, 2), 800.0), np.zeros((1, 2)), np.zeros((1, 2)), CostParams())
    assert baseline_closest(cache, 0) is None


def test_baseline_clamped_above_focal_length():
    cache = _cache_for_depths([30.0])
    assert baseline_closest(cache, 0) > F


# EM ----------------------------------------------------------------------

def test_em_one_camera_one_sample():
    cache = _cache_for_depths([750.0])
    plan, trace = em_optimize(cache, SolverConfig(init=InitPolicy.CLOSEST), initial=np.array([3000.0]))
    assert plan.focus[0] == pytest.approx(753.96, abs=0.01)
    assert total_cost(plan, cache).total == pytest.approx(0.0)
    assert trace[1].iteration == 1


@pytest.fixture(scope="module")
def one_camera_walls():
    mesh, cams, edges = two_plane_scene(n_cameras=1)
    return Scene.build(mesh, cams, edges, 512, 0)


def test_em_one_camera_picks_larger_wall(one_camera_walls):
    scene = one_camera_walls
    vis = scene.cache.visible[0]
    y = scene.samples.positions[:, 1]
    n_near = np.count_nonzero(vis & (y < 1000))
    n_far = np.count_nonzero(vis & (y > 1000))
    assert n_near > n_far > 0
    plan, _ = em_optimize(scene.cache)
    near, far = near_far(plan.focus[0])
    assert near <= 600.0 and far < 1600.0  # cannot cover both walls, keeps the near one


@pytest.mark.parametrize("init", list(InitPolicy))
def test_em_trace_monotone(init):
    scene = random_scene(3)
    _, trace = em_optimize(scene.cache, SolverConfig(init=init))
    assert trace.is_monotone(rtol=0.0)
    assert [r.phase for r in trace[:3]] == ["init", "minimize", "assign"]


def test_em_cameras_without_samples_keep_focus():
    vis = np.array([[True, True], [True, True]])
    cache = cache_from_terms(vis, np.full((2, 2), 800.0), np.zeros((2, 2)), np.zeros((2, 2)), CostParams())
    plan, _ = em_optimize(cache, initial=np.array([800.0, 4321.0]))
    assert plan.focus[1] == 4321.0 and np.all(plan.assignment == 0)


# schedule ----------------------------------------------------------------

def _check_schedule(n, edges, batches):
    seen = [t.ids for b in batches for t in b]
    assert sorted(seen) == sorted(tuple(sorted(e)) for e in edges)
    for b in batches:
        ids = [c for t in b for c in t.ids]
        assert len(ids) == len(set(ids))


def test_schedule_small_wrapped_grid():
    edges = grid_edges(2, 2)
    batches = independent_tuple_schedule(4, edges, 2)
    _check_schedule(4, edges, batches)


def test_schedule_default_grid():
    edges = grid_edges(24, 7)
    assert len(edges) == 7 * 24 + 6 * 24 == 312
    _check_schedule(168, edges, independent_tuple_schedule(168, edges, 2))


def test_schedule_triples_and_singles():
    edges = grid_edges(6, 2)
    batches = independent_tuple_schedule(12, edges, 3)
    for b in batches:
        ids = [c for t in b for c in t.ids]
        assert len(ids) == len(set(ids))
        assert all(len(t.ids) == 3 for t in b)
    assert [len(b) for b in independent_tuple_schedule(12, edges, 1)] == [12]
    with pytest.raises(ValueError):
        independent_tuple_schedule(12, edges, 4)


def test_ring_two_adds_pairs():
    edges = grid_edges(8, 3)
    one = {t.ids for b in independent_tuple_schedule(24, edges, 2, ring=1) for t in b}
    two = {t.ids for b in independent_tuple_schedule(24, edges, 2, ring=2) for t in b}
    assert one < two and (0, 2) in two


def test_overlap_examples():
    m = np.zeros((3, 30), bool)
    m[0, :20] = True
    m[1, 10:30] = True
    assert measure_overlap((0, 1), m) == pytest.approx(1 / 3)
    assert measure_overlap((0, 0 + 2), m) == 0.0
    assert measure_overlap((0, 0), np.vstack([m[0], m[0]])) == 1.0
    with pytest.raises(ValueError):
        CameraTuple((1, 1))


# k-view ------------------------------------------------------------------

def test_kview_separable_equals_single_view():
    depth = np.array([[700.0, 3000.0], [3000.0, 1200.0]])
    vis = np.array([[True, False], [False, True]])
    cache = cache_from_terms(vis, depth, np.zeros((2, 2)), np.zeros((2, 2)), CostParams())
    plan = FocusPlan(np.array([5000.0, 5000.0]), np.array([0, 1]))
    kview_step(plan, (0, 1), cache)
    for c, d in ((0, 700.0), (1, 1200.0)):
        s, _ = optimal_focus_single(*intervals([d]), F, H)
        assert plan.focus[c] == pytest.approx(s)


def _pair_instance(seed, n=40):
    rng = np.random.default_rng(seed)
    vis = rng.random((2, n)) < 0.75
    depth = rng.uniform(500, 2500, (2, n))
    cache = cache_from_terms(vis, depth, rng.random((2, n)), rng.random((2, n)), CostParams())
    focus = rng.uniform(500, 2500, 2)
    plan = FocusPlan(focus, assign_step(focus, cache))
    return cache, plan


@pytest.mark.parametrize("seed", range(12))
def test_kview_step_matches_dense_pair_sweep(seed):
    cache, plan = _pair_instance(seed)
    work = np.flatnonzero(plan.assignment >= 0)
    before = total_cost(plan, cache).total
    best, _ = dense_pair_sweep(cache, (0, 1), work)
    step = kview_step(plan, (0, 1), cache)
    after = total_cost(plan, cache).total
    unassigned = before - step.cost_before
    assert after <= before
    if step.committed:
        assert step.cost_after == pytest.approx(best, abs=1e-9)
        assert after == pytest.approx(best + unassigned, abs=1e-9)
    else:
        assert step.cost_before <= best + COMMIT_TOL + 1e-9


@pytest.mark.parametrize("seed", range(6))
def test_pruning_is_exact(seed):
    cache, plan = _pair_instance(seed, n=60)
    a, b = plan.copy(), plan.copy()
    ra, rb = kview_step(a, (0, 1), cache, prune=True), kview_step(b, (0, 1), cache, prune=False)
    assert ra == rb
    assert np.array_equal(a.focus, b.focus) and np.array_equal(a.assignment, b.assignment)


def test_kview_empty_working_set_is_noop():
    cache, plan = _pair_instance(0)
    plan.assignment[:] = 0
    res = kview_step(plan, (1,), cache)
    assert not res.committed and res.n_samples == 0


@pytest.mark.parametrize("seed", range(5))
def test_kview_at_least_as_good_as_em(seed):
    scene = random_scene(seed)
    em, _ = em_optimize(scene.cache)
    kv, trace = kview_optimize(scene.cache, scene.edges, initial=em)
    assert total_cost(kv, scene.cache).total <= total_cost(em, scene.cache).total
    assert trace.is_monotone(rtol=0.0)


def test_kview_triples_monotone():
    scene = random_scene(4, n_samples=160)
    em, _ = em_optimize(scene.cache)
    kv, trace = kview_optimize(scene.cache, scene.edges, SolverConfig(k=3), initial=em)
    assert trace.is_monotone(rtol=0.0)
    assert total_cost(kv, scene.cache).total <= total_cost(em, scene.cache).total


def test_solver_deterministic():
    a = random_scene(9)
    b = random_scene(9)
    pa, _ = kview_optimize(a.cache, a.edges)
    pb, _ = kview_optimize(b.cache, b.edges)
    assert np.array_equal(pa.focus, pb.focus, equal_nan=True)
    assert np.array_equal(pa.assignment, pb.assignment)


def test_batch_reassign_toggle_monotone():
    scene = random_scene(2)
    _, trace = kview_optimize(scene.cache, scene.edges, SolverConfig(reassign="batch"))
    assert trace.is_monotone(rtol=0.0)


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(k=0)
    with pytest.raises(ValueError):
        SolverConfig(tol=0.0)
    assert SolverConfig(init="closest").init is InitPolicy.CLOSEST
