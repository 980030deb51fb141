"""Experiment drivers for the five run modes."""
from __future__ import annotations

import time
import traceback
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from focusplan.assignment import FocusPlan, CostReport, lower_bound, sample_costs, total_cost
from focusplan.geometry import build_bvh, load_mesh
from focusplan.harness import export
from focusplan.harness.config import BUILTIN_PREFIX, ExperimentConfig
from focusplan.harness.grid import GridSpec, generate_cylindrical_grid
from focusplan.harness.scenes import Scene, capsule_body, cylinder, sphere, two_plane_scene
from focusplan.solver import (SolverConfig, Trace, em_optimize, kview_optimize, kview_step,
                              measure_overlap, plan_from_focus)
from focusplan.solver.baselines import baseline_focus
from focusplan.solver.schedule import candidate_tuples

REFERENCE_SAMPLES = 1024  # sampling-density totals are rescaled to this many samples
FAILURE_MARKER = "FAILED"


@dataclass
class MethodResult:
    method: str
    plan: FocusPlan
    report: CostReport
    trace: Trace
    wall_ms: float

    @property
    def iterations(self) -> int:
        return max(row.iteration for row in self.trace)


@dataclass
class SceneSource:
    """A mesh plus, for fixed-rig builtins, its own cameras."""
    label: str
    mesh: object
    cameras: list | None = None
    edges: list | None = None
    bvh: object = None

    def __post_init__(self):
        if self.bvh is None:
            self.bvh = build_bvh(self.mesh.vertices, self.mesh.triangles)

    def rig(self, spec: GridSpec, intrinsics):
        if self.cameras is not None:
            return self.cameras, self.edges
        grid = generate_cylindrical_grid(spec, self.mesh, intrinsics)
        return grid.cameras, grid.edges

    def scene(self, cfg: ExperimentConfig, n_samples: int, seed: int, spec: GridSpec | None = None):
        cameras, edges = self.rig(spec or cfg.grid, cfg.intrinsics)
        return Scene.build(self.mesh, cameras, edges, n_samples, seed, cfg.cost, bvh=self.bvh)


def load_source(ref: str, cfg: ExperimentConfig) -> SceneSource:
    if ref.startswith(BUILTIN_PREFIX):
        name = ref[len(BUILTIN_PREFIX):]
        if name == "two_plane":
            mesh, cameras, edges = two_plane_scene(cfg.intrinsics)
            return SceneSource(name, mesh, cameras, edges)
        mesh = {"capsule_body": capsule_body, "sphere": lambda: sphere(300.0, (0, 0, 300.0)),
                "cylinder": lambda: cylinder(250.0, 1200.0)}[name]()
        return SceneSource(name, mesh)
    path = cfg.resolve(ref)
    return SceneSource(path.stem, load_mesh(path))


def run_method(method: str, scene: Scene, solver: SolverConfig, em_plan: FocusPlan | None = None) -> MethodResult:
    """One method on one scene. ``kview`` starts from ``em_plan`` (EM is run if absent)."""
    cache = scene.cache
    t0 = time.perf_counter()
    if method in ("closest", "avg"):
        plan = plan_from_focus(baseline_focus(cache, method), cache)
        trace = Trace()
        trace.record(0, "init", plan, cache)
    elif method == "em":
        plan, trace = em_optimize(cache, solver)
    elif method == "kview":
        if em_plan is None:
            em_plan, _ = em_optimize(cache, solver)
        plan, trace = kview_optimize(cache, scene.edges, solver, initial=em_plan)
    else:
        raise ValueError(f"unknown method {method!r}")
    wall = 1e3 * (time.perf_counter() - t0)
    return MethodResult(method, plan, total_cost(plan, cache), trace, wall)


def run_methods(scene: Scene, solver: SolverConfig, methods) -> dict[str, MethodResult]:
    out: dict[str, MethodResult] = {}
    order = sorted(methods, key=["closest", "avg", "em", "kview"].index)
    for m in order:
        em_plan = out["em"].plan if "em" in out else None
        out[m] = run_method(m, scene, solver, em_plan)
    return out


class _Outputs:
    """Collects CSV rows so partial results can be flushed on failure."""

    def __init__(self, root: Path):
        self.root = root
        self.rows: dict[str, list[dict]] = {}
        root.mkdir(parents=True, exist_ok=True)
        (root / FAILURE_MARKER).unlink(missing_ok=True)

    def add(self, name: str, row: dict) -> None:
        export.validate_row(name, row)
        self.rows.setdefault(name, []).append(row)

    def flush(self) -> None:
        for name, rows in self.rows.items():
            export.write_csv(self.root / name, rows)


def run_experiment(cfg: ExperimentConfig) -> Path:
    """Run ``cfg.mode`` and write its artifacts under ``cfg.output_path``."""
    out = _Outputs(cfg.output_path)
    summary = {"config": cfg.to_dict(), "mode": cfg.mode, "status": "ok"}
    try:
        _MODES[cfg.mode](cfg, out, summary)
    except BaseException as exc:
        summary["status"] = "failed"
        summary["error"] = f"{type(exc).__name__}: {exc}"
        out.flush()
        (out.root / FAILURE_MARKER).write_text(traceback.format_exc())
        export.write_json(out.root / "report.json", summary)
        raise
    out.flush()
    export.write_json(out.root / "report.json", summary)
    return out.root


def _single(cfg: ExperimentConfig, out: _Outputs, summary: dict) -> None:
    summary["meshes"] = {}
    many = len(cfg.meshes) > 1
    for ref in cfg.meshes:
        t0 = time.perf_counter()
        src = load_source(ref, cfg)
        scene = src.scene(cfg, cfg.n_samples, cfg.seed)
        out.add("timing.csv", {"mesh": src.label, "method": "", "stage": "scene",
                               "wall_ms": 1e3 * (time.perf_counter() - t0)})
        target = out.root / src.label if many else out.root
        target.mkdir(exist_ok=True)
        scene.visibility.save(target / "visibility", seed=cfg.seed)
        bound = lower_bound(scene.cache)
        results = run_methods(scene, cfg.solver, cfg.methods)
        per_mesh = {"lower_bound": bound, "visibility_sha256": scene.visibility.checksum(),
                    "dropped_triangles": src.mesh.dropped_triangles,
                    "blind_cameras": scene.visibility.blind_cameras().tolist(),
                    "never_visible": int(np.count_nonzero(~scene.cache.visible.any(axis=0))),
                    "methods": {}}
        for m, res in results.items():
            r = res.report
            out.add("report.csv", {"mesh": src.label, "method": m, "n_samples": r.n_samples,
                                   "n_cameras": r.n_cameras, "total": r.total, "mean": r.mean,
                                   "in_focus_area_mm2": r.in_focus_area, "unassigned_cost": r.unassigned,
                                   "lower_bound": bound, "iterations": res.iterations})
            for row in res.trace:
                out.add("trace.csv", {"mesh": src.label, "method": m, "iteration": row.iteration,
                                      "phase": row.phase, "total": row.total})
            for c, s in enumerate(res.plan.focus):
                out.add("focus.csv", {"mesh": src.label, "method": m, "camera": c,
                                      "focus_mm": "" if np.isnan(s) else float(s)})
            out.add("timing.csv", {"mesh": src.label, "method": m, "stage": "solve", "wall_ms": res.wall_ms})
            export.export_cost_pointcloud(scene.samples.positions, sample_costs(res.plan, scene.cache),
                                          target / f"cost_{m}.ply")
            export.export_focus_spheres(scene.cameras, res.plan.focus, target / f"cameras_{m}.ply")
            per_mesh["methods"][m] = {**r.to_dict(), "iterations": res.iterations}
        summary["meshes"][src.label] = per_mesh


def reseed(seed: int, n_samples: int, replicate: int) -> int:
    return int(np.random.SeedSequence([seed, n_samples, replicate]).generate_state(1)[0])


def _sampling_density(cfg: ExperimentConfig, out: _Outputs, summary: dict) -> None:
    src = load_source(cfg.meshes[0], cfg)
    summary["sigma"] = {}
    for n in cfg.sample_sizes:
        normalised, ms = [], []
        for r in range(cfg.reseeds):
            seed = reseed(cfg.seed, n, r)
            scene = src.scene(cfg, n, seed)
            em = run_method("em", scene, cfg.solver)
            kv = run_method("kview", scene, cfg.solver, em.plan)
            norm = kv.report.total * REFERENCE_SAMPLES / n
            per_iter = kv.wall_ms / max(kv.iterations, 1)
            normalised.append(norm)
            ms.append(per_iter)
            out.add("sampling_density.csv", {"n_samples": n, "reseed": r, "seed": seed,
                                             "em_total": em.report.total, "kview_total": kv.report.total,
                                             "kview_normalised": norm, "kview_ms_per_iter": per_iter})
        sigma = float(np.std(normalised, ddof=1))
        out.add("sampling_summary.csv", {"n_samples": n, "mean_normalised": float(np.mean(normalised)),
                                         "sigma": sigma, "mean_ms_per_iter": float(np.mean(ms))})
        summary["sigma"][str(n)] = sigma


def grid_shapes(budget: int, min_angular: int, min_vertical: int) -> list[tuple[int, int]]:
    return [(a, budget // a) for a in range(min_angular, budget + 1)
            if budget % a == 0 and budget // a >= min_vertical]


def _grid_sweep(cfg: ExperimentConfig, out: _Outputs, summary: dict) -> None:
    src = load_source(cfg.meshes[0], cfg)
    for budget in cfg.camera_budgets:
        for a, z in grid_shapes(budget, cfg.min_angular, cfg.min_vertical):
            spec = GridSpec(a=a, z=z, r=cfg.grid.r, extent=cfg.grid.extent)
            grid = generate_cylindrical_grid(spec, src.mesh, cfg.intrinsics)
            scene = Scene.build(src.mesh, grid.cameras, grid.edges, cfg.n_samples, cfg.seed, cfg.cost,
                                bvh=src.bvh)
            em = run_method("em", scene, cfg.solver)
            kv = run_method("kview", scene, cfg.solver, em.plan)
            out.add("grid_sweep.csv", {"n_cameras": budget, "a": a, "z": z, "aspect_ratio": grid.aspect_ratio,
                                       "em_total": em.report.total, "kview_total": kv.report.total})


def _overlap_study(cfg: ExperimentConfig, out: _Outputs, summary: dict) -> None:
    src = load_source(cfg.meshes[0], cfg)
    scene = src.scene(cfg, cfg.n_samples, cfg.seed)
    em = run_method("em", scene, cfg.solver)
    base = em.report.total
    pairs = candidate_tuples(len(scene.cameras), scene.edges, 2, cfg.solver.ring)
    if cfg.max_pairs is not None:
        pairs = pairs[:cfg.max_pairs]
    for ids in pairs:
        plan = em.plan.copy()
        step = kview_step(plan, ids, scene.cache, prune=cfg.solver.prune)
        out.add("overlap.csv", {"cam_a": ids[0], "cam_b": ids[1],
                                "overlap": measure_overlap(ids, scene.visibility),
                                "n_samples": step.n_samples,
                                "decrease": base - total_cost(plan, scene.cache).total})


def _tuple_size(cfg: ExperimentConfig, out: _Outputs, summary: dict) -> None:
    src = load_source(cfg.meshes[0], cfg)
    scene = src.scene(cfg, cfg.n_samples, cfg.seed)
    em = run_method("em", scene, cfg.solver)
    results = {}
    for k in cfg.tuple_sizes:
        results[k] = run_method("kview", scene, replace(cfg.solver, k=k), em.plan)
    ref = results[2].report.total if 2 in results else None
    for k, res in results.items():
        rel = (res.report.total - ref) / ref if ref else float("nan")
        out.add("tuple_size.csv", {"k": k, "total": res.report.total, "relative_to_k2": rel,
                                   "iterations": res.iterations,
                                   "ms_per_iter": res.wall_ms / max(res.iterations, 1)})


_MODES = {
    "single": _single,
    "sampling-density": _sampling_density,
    "grid-sweep": _grid_sweep,
    "overlap-study": _overlap_study,
    "tuple-size": _tuple_size,
}
