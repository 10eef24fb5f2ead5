from __future__ import annotations

import argparse

from app.services.results_service import collect_manifests, render_report


def handle(args: argparse.Namespace) -> int:
    print(render_report(collect_manifests(args.root)))
    return 0


def register(commands: "argparse._SubParsersAction[argparse.ArgumentParser]") -> None:
    parser = commands.add_parser("report", help="Summary table of every run under a directory")
    parser.add_argument("root", nargs="?", default=".", help="directory to scan for manifest.json")
    parser.add_argument("--quiet", action="store_true", help="log warnings and errors only")
    parser.set_defaults(handler=handle)
