#!/usr/bin/env python3
"""Cost against grid aspect ratio for several camera budgets."""
from _common import run_config

from focusplan.harness.export import read_csv

if __name__ == "__main__":
    root = run_config("grid_sweep.json", __doc__)
    rows = read_csv(root / "grid_sweep.csv")
    for budget in sorted({int(r["n_cameras"]) for r in rows}):
        mine = [r for r in rows if int(r["n_cameras"]) == budget]
        best = min(mine, key=lambda r: float(r["kview_total"]))
        print(f"{budget:>4} cameras: best 2-view {float(best['kview_total']):.2f} at "
              f"{best['a']}x{best['z']} (aspect {float(best['aspect_ratio']):.2f})")
