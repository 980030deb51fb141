"""Experiment descriptor: one JSON document per run."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from focusplan.harness.grid import GridSpec
from focusplan.optics import CameraIntrinsics, CostParams
from focusplan.solver.common import SolverConfig

MODES = ("single", "sampling-density", "grid-sweep", "overlap-study", "tuple-size")
METHODS = ("closest", "avg", "em", "kview")
BUILTIN_PREFIX = "builtin:"
BUILTIN_MESHES = ("capsule_body", "sphere", "cylinder", "two_plane")


@dataclass(frozen=True)
class ExperimentConfig:
    meshes: tuple[str, ...] = (BUILTIN_PREFIX + "capsule_body",)
    grid: GridSpec = GridSpec()
    cost: CostParams = CostParams()
    intrinsics: CameraIntrinsics = CameraIntrinsics()
    solver: SolverConfig = SolverConfig()
    n_samples: int = 1024
    seed: int = 0
    output_dir: str = "out"
    mode: str = "single"
    methods: tuple[str, ...] = METHODS
    # sampling-density
    sample_sizes: tuple[int, ...] = tuple(2 ** e for e in range(7, 14))
    reseeds: int = 10
    # grid-sweep: total camera counts; shapes are every (a, z) factorisation
    camera_budgets: tuple[int, ...] = (60, 120, 240)
    min_angular: int = 4
    min_vertical: int = 2
    # overlap-study: None means every grid edge
    max_pairs: int | None = None
    # tuple-size
    tuple_sizes: tuple[int, ...] = (2, 3)
    base_dir: str = field(default=".", compare=False)

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("sample count must be at least 1")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ValueError(f"unknown methods {bad}")
        if not self.meshes:
            raise ValueError("at least one mesh is required")
        for m in self.meshes:
            if m.startswith(BUILTIN_PREFIX):
                if m[len(BUILTIN_PREFIX):] not in BUILTIN_MESHES:
                    raise ValueError(f"unknown builtin mesh {m!r}")
            elif not self.resolve(m).is_file():
                raise FileNotFoundError(f"mesh not found: {self.resolve(m)}")
        if self.reseeds < 2:
            raise ValueError("sampling-density needs at least 2 reseeds")

    def resolve(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else Path(self.base_dir) / p

    @property
    def output_path(self) -> Path:
        return self.resolve(self.output_dir)

    @classmethod
    def from_dict(cls, d: dict, base_dir: str | Path = ".") -> "ExperimentConfig":
        d = dict(d)
        mesh = d.pop("mesh", None)
        if mesh is not None:
            d["meshes"] = [mesh] if isinstance(mesh, str) else mesh
        if "grid" in d:
            g = dict(d["grid"])
            if g.get("extent") is not None:
                g["extent"] = tuple(g["extent"])
            d["grid"] = GridSpec(**g)
        if "cost" in d:
            d["cost"] = CostParams(**d["cost"])
        if "intrinsics" in d:
            d["intrinsics"] = CameraIntrinsics.from_dict(d["intrinsics"])
        if "solver" in d:
            d["solver"] = SolverConfig(**d["solver"])
        for key in ("meshes", "methods", "sample_sizes", "camera_budgets", "tuple_sizes"):
            if key in d:
                d[key] = tuple(d[key])
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d, base_dir=str(base_dir))

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text()), base_dir=path.parent)

    def to_dict(self) -> dict:
        d = {
            "meshes": list(self.meshes),
            "grid": asdict(self.grid),
            "cost": asdict(self.cost),
            "intrinsics": self.intrinsics.to_dict(),
            "solver": self.solver.to_dict(),
        }
        for key in ("n_samples", "seed", "output_dir", "mode", "reseeds", "min_angular",
                    "min_vertical", "max_pairs"):
            d[key] = getattr(self, key)
        for key in ("methods", "sample_sizes", "camera_budgets", "tuple_sizes"):
            d[key] = list(getattr(self, key))
        if d["grid"]["extent"] is not None:
            d["grid"]["extent"] = list(d["grid"]["extent"])
        return d

    def with_overrides(self, **kw) -> "ExperimentConfig":
        """Apply CLI overrides; solver fields may be given flat."""
        solver_keys = set(SolverConfig.__dataclass_fields__)
        solver_kw = {k: v for k, v in kw.items() if k in solver_keys and v is not None}
        rest = {k: v for k, v in kw.items() if k not in solver_keys and v is not None}
        cfg = replace(self, **rest) if rest else self
        if solver_kw:
            cfg = replace(cfg, solver=replace(cfg.solver, **solver_kw))
        return cfg
