#!/usr/bin/env python3
"""All four methods on the capsule figure inside the default 7 x 24 grid."""
from _common import run_config

from focusplan.harness.export import read_csv

if __name__ == "__main__":
    root = run_config("capsule_single.json", __doc__)
    rows = {r["method"]: float(r["total"]) for r in read_csv(root / "report.csv")}
    best = min(rows["closest"], rows["avg"])
    for m, total in rows.items():
        print(f"{m:<8} {total:10.3f}  {100 * (best - total) / best:+6.2f}% vs best baseline")
