"""Shared helpers for the experiment scripts."""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from occlusion_swarm.cli import parse_seeds

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"


def parser(description: str, default_seeds: str = "0..19") -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--seeds", default=default_seeds, type=parse_seeds)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", type=Path, default=ROOT / "results")
    return p


def save(out: Path, name: str, doc) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{name}.json"
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def line(label: str, rep) -> str:
    return (f"{label:<32} success {rep.success_rate:5.2f}  steps {rep.steps_mean:8.1f} ± {rep.steps_std:7.1f}"
            f"  final deficiency {rep.final_deficiency_mean:.4f}")
