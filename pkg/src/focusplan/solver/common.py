from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np

from focusplan.assignment import CostCache, FocusPlan, assign_step, total_cost


class InitPolicy(str, Enum):
    CLOSEST = "closest"
    AVG = "avg"
    MIDRANGE = "midrange"


@dataclass(frozen=True)
class SolverConfig:
    k: int = 2
    max_iters: int = 50
    tol: float = 1e-6  # relative decrease per iteration
    init: InitPolicy = InitPolicy.AVG
    ring: int = 1
    prune: bool = True
    # "pass": global re-assignment after every sweep over all batches;
    # "batch": after every batch as well
    reassign: str = "pass"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.k > 3:
            raise ValueError("tuples larger than 3 are not supported")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if self.ring not in (1, 2):
            raise ValueError("ring radius must be 1 or 2")
        if self.reassign not in ("pass", "batch"):
            raise ValueError("reassign must be 'pass' or 'batch'")
        object.__setattr__(self, "init", InitPolicy(self.init))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["init"] = self.init.value
        return d


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    phase: str
    total: float
    wall_ms: float


class Trace(list):
    """Per-step cost log; wall time is kept apart from the deterministic data."""

    def __init__(self):
        super().__init__()
        self._t0 = time.perf_counter()

    def record(self, iteration: int, phase: str, plan: FocusPlan, cache: CostCache) -> float:
        total = total_cost(plan, cache).total
        self.append(TraceRow(iteration, phase, total, 1e3 * (time.perf_counter() - self._t0)))
        return total

    @property
    def totals(self) -> np.ndarray:
        return np.array([row.total for row in self])

    def is_monotone(self, rtol: float = 1e-12) -> bool:
        t = self.totals
        return bool(np.all(np.diff(t) <= rtol * np.maximum(np.abs(t[:-1]), 1.0)))


def converged(previous: float, current: float, tol: float) -> bool:
    return previous - current <= tol * max(abs(previous), 1e-300)


def plan_from_focus(focus: np.ndarray, cache: CostCache) -> FocusPlan:
    focus = np.asarray(focus, dtype=np.float64).copy()
    return FocusPlan(focus, assign_step(focus, cache))
