"""Shared helpers for the experiment scripts."""
from __future__ import annotations

import argparse
from pathlib import Path

from focusplan.harness.config import ExperimentConfig
from focusplan.harness.experiments import run_experiment

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run_config(name: str, description: str) -> Path:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--config", default=str(CONFIGS / name))
    p.add_argument("--output", help="output directory (overrides the config)")
    p.add_argument("--seed", type=int)
    args = p.parse_args()
    cfg = ExperimentConfig.load(args.config).with_overrides(
        seed=args.seed, output_dir=str(Path(args.output).resolve()) if args.output else None)
    root = run_experiment(cfg)
    print(f"artifacts in {root}")
    return root
