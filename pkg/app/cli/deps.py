"""
Flags and plumbing shared by the run verbs.
"""
from __future__ import annotations

import argparse
from typing import Any, Dict

from app.core.logging import get_logger
from app.services.experiment_service import load_config, run_experiment

logger = get_logger(__name__)


# -----------------------------
# Flags every run verb accepts
# -----------------------------
def add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON experiment file")
    parser.add_argument("--out", help="run directory to create (must not hold files)")
    parser.add_argument("--seed", type=int, help="noise RNG seed")
    parser.add_argument("--epochs", type=int, help="maximum training epochs")
    parser.add_argument("--n", type=int, help="number of qubits")
    parser.add_argument("--preset", help="training preset name")
    parser.add_argument("--quiet", action="store_true", help="log warnings and errors only")


def overrides_from(args: argparse.Namespace) -> Dict[str, Any]:
    """CLI flags as dotted config keys; unset flags map to None and are ignored."""
    return {
        "output_dir": args.out,
        "rng_seed": args.seed,
        "training.max_epochs": args.epochs,
        "n": args.n,
        "preset": args.preset,
    }


# -----------------------------
# Run one experiment of `kind`
# -----------------------------
def run_kind(args: argparse.Namespace, kind: str) -> int:
    """The verb decides the experiment kind, whatever the config file says."""
    cfg = load_config(args.config, {**overrides_from(args), "kind": kind})
    manifest, target = run_experiment(cfg)
    print(f"{target}: {kind} n={manifest.n} final_rms={manifest.final_rms}")
    return 0
