"""Camera-by-sample visibility: lateral frustum, front-facing and unoccluded."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from focusplan.geometry.bvh import BVH, build_bvh, segments_occluded
from focusplan.geometry.mesh import TriangleMesh
from focusplan.geometry.sampling import SampleSet

OCCLUSION_OFFSET = 1e-3  # mm, pulled back from the sample toward the camera


@dataclass(frozen=True)
class VisibilityTable:
    matrix: np.ndarray  # (cameras, samples) bool

    def __post_init__(self):
        m = np.ascontiguousarray(self.matrix, dtype=bool)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def __getitem__(self, key):
        return self.matrix[key]

    def blind_cameras(self) -> np.ndarray:
        return np.flatnonzero(~self.matrix.any(axis=1))

    def checksum(self) -> str:
        return hashlib.sha256(np.packbits(self.matrix, axis=None).tobytes()).hexdigest()

    def save(self, path, seed: int | None = None) -> tuple[Path, Path]:
        """Write ``<path>.bin`` (row-major packed bits) and ``<path>.json``."""
        path = Path(path)
        bin_path, json_path = path.with_suffix(".bin"), path.with_suffix(".json")
        bin_path.write_bytes(np.packbits(self.matrix, axis=None).tobytes())
        meta = {"cameras": self.shape[0], "samples": self.shape[1], "seed": seed,
                "bit_order": "big", "layout": "row-major camera x sample",
                "sha256": self.checksum()}
        json_path.write_text(json.dumps(meta, indent=2) + "\n")
        return bin_path, json_path

    @classmethod
    def load(cls, path) -> "VisibilityTable":
        path = Path(path)
        meta = json.loads(path.with_suffix(".json").read_text())
        bits = np.frombuffer(path.with_suffix(".bin").read_bytes(), dtype=np.uint8)
        n = meta["cameras"] * meta["samples"]
        matrix = np.unpackbits(bits, count=n).astype(bool).reshape(meta["cameras"], meta["samples"])
        table = cls(matrix)
        if table.checksum() != meta["sha256"]:
            raise ValueError(f"visibility checksum mismatch for {path}")
        return table


def lateral_and_facing(samples: SampleSet, camera) -> np.ndarray:
    """Clauses (a) and (b): inside the image and front-facing."""
    facing = samples.normals @ camera.direction > 0
    return camera.in_image(samples.positions) & facing


def build_visibility(mesh: TriangleMesh, samples: SampleSet, cameras, *, bvh: BVH | None = None,
                     offset: float = OCCLUSION_OFFSET, brute_force: bool = False) -> VisibilityTable:
    if len(samples) == 0 or len(cameras) == 0:
        raise ValueError("need at least one sample and one camera")
    if bvh is None:
        bvh = build_bvh(mesh.vertices, mesh.triangles)
    matrix = np.zeros((len(cameras), len(samples)), dtype=bool)
    for row, cam in enumerate(cameras):
        candidates = np.flatnonzero(lateral_and_facing(samples, cam))
        if len(candidates) == 0:
            continue
        targets = samples.positions[candidates]
        direction = targets - cam.position
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        ends = targets - offset * direction
        blocked = segments_occluded(bvh, cam.position, ends, brute_force=brute_force)
        matrix[row, candidates[~blocked]] = True
    return VisibilityTable(matrix)
