"""PLY point clouds and CSV/JSON reports.

Every CSV has a fixed header listed in ``SCHEMAS``; rows are checked
against it before writing. Wall-clock data lives only in ``timing.csv`` so
the other files are reproducible byte for byte.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
from plyfile import PlyData, PlyElement

SCHEMAS = {
    "report.csv": ("mesh", "method", "n_samples", "n_cameras", "total", "mean", "in_focus_area_mm2",
                   "unassigned_cost", "lower_bound", "iterations"),
    "trace.csv": ("mesh", "method", "iteration", "phase", "total"),
    "timing.csv": ("mesh", "method", "stage", "wall_ms"),
    "focus.csv": ("mesh", "method", "camera", "focus_mm"),
    "sampling_density.csv": ("n_samples", "reseed", "seed", "em_total", "kview_total",
                             "kview_normalised", "kview_ms_per_iter"),
    "sampling_summary.csv": ("n_samples", "mean_normalised", "sigma", "mean_ms_per_iter"),
    "grid_sweep.csv": ("n_cameras", "a", "z", "aspect_ratio", "em_total", "kview_total"),
    "overlap.csv": ("cam_a", "cam_b", "overlap", "n_samples", "decrease"),
    "tuple_size.csv": ("k", "total", "relative_to_k2", "iterations", "ms_per_iter"),
}


def cost_colors(costs: np.ndarray) -> np.ndarray:
    """Linear blue (0) to red (1), as uint8 RGB."""
    c = np.clip(np.asarray(costs, dtype=np.float64), 0.0, 1.0)
    rgb = np.column_stack([255 * c, np.zeros_like(c), 255 * (1 - c)])
    return np.rint(rgb).astype(np.uint8)


def export_cost_pointcloud(positions, costs, path) -> Path:
    positions = np.asarray(positions, dtype=np.float64)
    costs = np.asarray(costs, dtype=np.float64)
    if len(costs) != len(positions):
        raise ValueError("one cost per point required")
    if np.any((costs < 0) | (costs > 1)):
        raise ValueError("costs must lie in [0, 1]")
    rgb = cost_colors(costs)
    v = np.empty(len(costs), dtype=[("x", "f8"), ("y", "f8"), ("z", "f8"), ("red", "u1"),
                                    ("green", "u1"), ("blue", "u1"), ("cost", "f8")])
    v["x"], v["y"], v["z"] = positions.T
    v["red"], v["green"], v["blue"] = rgb.T
    v["cost"] = costs
    path = Path(path)
    PlyData([PlyElement.describe(v, "vertex")], text=False).write(str(path))
    return path


def export_focus_spheres(cameras, focus, path) -> Path:
    """One point per focused camera at position + direction * focus."""
    focus = np.asarray(focus, dtype=np.float64)
    keep = [i for i in range(len(cameras)) if not np.isnan(focus[i])]
    v = np.empty(len(keep), dtype=[("x", "f8"), ("y", "f8"), ("z", "f8"), ("camera", "i4"),
                                   ("focus", "f8"), ("cam_x", "f8"), ("cam_y", "f8"), ("cam_z", "f8")])
    for row, i in enumerate(keep):
        cam = cameras[i]
        v[row] = (*(cam.position + focus[i] * cam.direction), cam.id, focus[i], *cam.position)
    path = Path(path)
    PlyData([PlyElement.describe(v, "vertex")], text=False).write(str(path))
    return path


def read_ply_vertices(path) -> np.ndarray:
    return PlyData.read(str(path))["vertex"].data


def validate_row(name: str, row: dict) -> None:
    header = SCHEMAS[name]
    if tuple(row) != header:
        raise ValueError(f"{name} row keys {tuple(row)} do not match header {header}")


def write_csv(path, rows) -> Path:
    """Write ``rows`` (dicts) to a CSV whose name has a registered schema."""
    path = Path(path)
    header = SCHEMAS[path.name]
    for row in rows:
        validate_row(path.name, row)
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=header, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return path


def read_csv(path) -> list[dict]:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


def write_json(path, payload) -> Path:
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path
