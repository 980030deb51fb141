"""``focusplan`` command line: run, grid, report."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from focusplan.harness.config import METHODS, MODES, ExperimentConfig


def _run(args) -> int:
    from focusplan.harness.experiments import run_experiment

    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    cfg = cfg.with_overrides(k=args.k, ring=args.ring, max_iters=args.max_iters, tol=args.tol,
                             init=args.init, seed=args.seed, n_samples=args.samples, mode=args.mode,
                             methods=(args.method,) if args.method else None,
                             output_dir=str(Path(args.output).resolve()) if args.output else None)
    root = run_experiment(cfg)
    print(f"wrote {root}")
    if cfg.mode == "single":
        _print_report(root)
    return 0


def _grid(args) -> int:
    from focusplan.harness.experiments import load_source
    from focusplan.harness.grid import GridSpec, generate_cylindrical_grid

    cfg = ExperimentConfig(meshes=(args.mesh,))
    extent = tuple(args.extent) if args.extent else None
    spec = GridSpec(a=args.a, z=args.z, r=args.r, extent=extent)
    grid = generate_cylindrical_grid(spec, load_source(args.mesh, cfg).mesh, cfg.intrinsics)
    print(f"cameras {len(grid.cameras)}  edges {len(grid.edges)}")
    print(f"extent [{grid.extent[0]:.1f}, {grid.extent[1]:.1f}] mm  axis ({grid.axis[0]:.1f}, {grid.axis[1]:.1f})")
    print(f"vertical spacing {grid.vertical_spacing:.1f} mm  angular spacing {grid.angular_spacing:.1f} mm"
          f"  aspect {grid.aspect_ratio:.3f}")
    if args.json:
        payload = {"spec": {"a": spec.a, "z": spec.z, "r": spec.r, "extent": list(grid.extent)},
                   "cameras": [c.to_dict() for c in grid.cameras], "edges": [list(e) for e in grid.edges]}
        Path(args.json).write_text(json.dumps(payload, indent=2) + "\n")
    return 0


def _print_report(root: Path) -> None:
    from focusplan.harness.export import read_csv

    rows = read_csv(root / "report.csv")
    print(f"{'mesh':<14}{'method':<9}{'|P|':>6}{'|C|':>6}{'total':>12}{'mean':>9}{'bound':>12}{'iters':>6}")
    for r in rows:
        print(f"{r['mesh']:<14}{r['method']:<9}{r['n_samples']:>6}{r['n_cameras']:>6}"
              f"{float(r['total']):>12.3f}{float(r['mean']):>9.4f}{float(r['lower_bound']):>12.3f}"
              f"{r['iterations']:>6}")


def _report(args) -> int:
    root = Path(args.dir)
    if (root / "FAILED").exists():
        print(f"{root}: run FAILED, partial results only", file=sys.stderr)
    summary = json.loads((root / "report.json").read_text())
    print(f"mode {summary['mode']}  status {summary['status']}")
    if (root / "report.csv").exists():
        _print_report(root)
    for name in ("sampling_summary.csv", "grid_sweep.csv", "tuple_size.csv"):
        if (root / name).exists():
            print(f"\n{name}")
            print((root / name).read_text().rstrip())
    return 0 if summary["status"] == "ok" else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="focusplan", description="Per-camera focus distance planning.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment from a JSON config")
    run.add_argument("--config", help="experiment JSON (defaults apply when omitted)")
    run.add_argument("--method", choices=METHODS, help="run only this method (single mode)")
    run.add_argument("--mode", choices=MODES)
    run.add_argument("--k", type=int, choices=(1, 2, 3))
    run.add_argument("--ring", type=int, choices=(1, 2))
    run.add_argument("--max-iters", type=int)
    run.add_argument("--tol", type=float)
    run.add_argument("--seed", type=int)
    run.add_argument("--samples", type=int, help="surface sample count")
    run.add_argument("--init", choices=("closest", "avg", "midrange"))
    run.add_argument("--output", help="output directory (overrides the config)")
    run.set_defaults(func=_run)

    grid = sub.add_parser("grid", help="describe a cylindrical camera grid")
    grid.add_argument("--a", type=int, default=24)
    grid.add_argument("--z", type=int, default=7)
    grid.add_argument("--r", type=float, default=750.0)
    grid.add_argument("--extent", type=float, nargs=2, metavar=("ZMIN", "ZMAX"))
    grid.add_argument("--mesh", default="builtin:capsule_body")
    grid.add_argument("--json", help="write cameras and edges to this file")
    grid.set_defaults(func=_grid)

    report = sub.add_parser("report", help="summarise an output directory")
    report.add_argument("--dir", required=True)
    report.set_defaults(func=_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
