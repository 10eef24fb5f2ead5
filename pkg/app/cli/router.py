from __future__ import annotations

import argparse

from app import __version__
from app.cli import bootstrap, monotone, noise, path, report, train


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qanneal",
        description="Learn annealing schedules that drive N-qubit density matrices to target states.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    train.register(commands)
    bootstrap.register(commands)
    path.register(commands)
    noise.register(commands)
    monotone.register(commands)

    # Results
    report.register(commands)
    return parser
