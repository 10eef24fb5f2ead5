from __future__ import annotations

import argparse

from app.cli.deps import add_run_flags, run_kind

KIND = "size-bootstrap"


def handle(args: argparse.Namespace) -> int:
    return run_kind(args, KIND)


def register(commands: "argparse._SubParsersAction[argparse.ArgumentParser]") -> None:
    parser = commands.add_parser("bootstrap", help="Train GHZ schedules of growing size, each seeded by the previous one")
    add_run_flags(parser)
    parser.set_defaults(handler=handle)
