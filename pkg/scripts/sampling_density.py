#!/usr/bin/env python3
"""Spread of the 2-view cost estimate over reseeded samplings, per sample count."""
from _common import run_config

from focusplan.harness.export import read_csv

if __name__ == "__main__":
    root = run_config("sampling_density.json", __doc__)
    print(f"{'|P|':>6} {'sigma':>8} {'ms/iter':>9}")
    for r in read_csv(root / "sampling_summary.csv"):
        print(f"{r['n_samples']:>6} {float(r['sigma']):8.3f} {float(r['mean_ms_per_iter']):9.1f}")
