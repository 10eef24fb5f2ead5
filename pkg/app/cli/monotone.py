from __future__ import annotations

import argparse

from app.cli.deps import add_run_flags, run_kind

KIND = "monotone"


def handle(args: argparse.Namespace) -> int:
    return run_kind(args, KIND)


def register(commands: "argparse._SubParsersAction[argparse.ArgumentParser]") -> None:
    parser = commands.add_parser("monotone", help="Train a single monotone annealing function S_w")
    add_run_flags(parser)
    parser.set_defaults(handler=handle)
