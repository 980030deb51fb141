#!/usr/bin/env python3
"""Per camera pair: view overlap against the gain of one 2-view step from EM."""
import numpy as np
from _common import run_config

from focusplan.harness.export import read_csv

if __name__ == "__main__":
    root = run_config("overlap_study.json", __doc__)
    rows = read_csv(root / "overlap.csv")
    overlap = np.array([float(r["overlap"]) for r in rows])
    gain = np.array([float(r["decrease"]) for r in rows])
    bins = np.linspace(0, 1, 6)
    for lo, hi in zip(bins[:-1], bins[1:]):
        sel = (overlap >= lo) & (overlap < hi if hi < 1 else overlap <= hi)
        if sel.any():
            print(f"overlap [{lo:.1f}, {hi:.1f}]: {sel.sum():4d} pairs, mean gain {gain[sel].mean():.4f}")
