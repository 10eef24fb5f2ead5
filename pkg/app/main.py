from __future__ import annotations

import sys
from typing import List, Optional

from dotenv import load_dotenv
load_dotenv()

from app.cli.router import build_parser
from app.core.errors import AnnealError, classify_failure
from app.core.logging import get_logger, setup_logging

logger = get_logger(__name__)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point of the `qanneal` command. Returns the process exit code:
    0 success, 2 invalid config, 3 training diverged, 4 run output not writable,
    1 anything else.
    """
    args = build_parser().parse_args(argv)
    setup_logging(quiet=args.quiet)

    try:
        return int(args.handler(args))
    except AnnealError as e:
        logger.error("%s [%s]", e.message, classify_failure(e))
        print(f"error: {e.message}", file=sys.stderr)
        return e.exit_code
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
