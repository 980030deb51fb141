#!/usr/bin/env python3
"""2-view against 3-view: final cost and time per iteration."""
from _common import run_config

from focusplan.harness.export import read_csv

if __name__ == "__main__":
    root = run_config("tuple_size.json", __doc__)
    for r in read_csv(root / "tuple_size.csv"):
        print(f"k={r['k']}: total {float(r['total']):.3f}  relative {100 * float(r['relative_to_k2']):+.2f}%"
              f"  {float(r['ms_per_iter']):.0f} ms/iter")
