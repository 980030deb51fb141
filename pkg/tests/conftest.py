from __future__ import annotations

import functools

import pytest

from focusplan.harness.grid import GridSpec, generate_cylindrical_grid
from focusplan.harness.scenes import Scene, capsule_body

ACCEPTANCE: dict[int, tuple[str, str]] = {}  # criterion -> (PASS | FAIL | SKIP, detail)


@functools.lru_cache(maxsize=None)
def capsule_scene(n_samples: int = 1024, seed: int = 0) -> Scene:
    mesh = capsule_body()
    grid = generate_cylindrical_grid(GridSpec(24, 7, 750.0), mesh)
    return Scene.build(mesh, grid.cameras, grid.edges, n_samples, seed)


@pytest.fixture(scope="session")
def capsule():
    return capsule_scene()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:>2}: {status}  {detail}")
