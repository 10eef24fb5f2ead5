from __future__ import annotations

import os
import shutil
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Union

from app.core.errors import RunStorageError
from app.core.logging import get_logger

logger = get_logger(__name__)


class RunSession:
    """
    A run directory being written. Files go to a hidden staging directory beside
    the target; `commit` renames it into place, `rollback` removes it.
    """

    def __init__(self, target: Path) -> None:
        self.target = target
        self.path = target.parent / f".{target.name}.staging-{os.getpid()}"
        self.committed = False

    def open(self) -> None:
        if self.target.exists() and any(self.target.iterdir()):
            raise RunStorageError(str(self.target), "directory exists and is not empty")
        try:
            self.target.parent.mkdir(parents=True, exist_ok=True)
            if self.path.exists():
                shutil.rmtree(self.path)
            self.path.mkdir()
        except OSError as e:
            raise RunStorageError(str(self.target), e.strerror or str(e)) from e

    def commit(self) -> None:
        try:
            if self.target.exists():
                self.target.rmdir()
            os.replace(self.path, self.target)
        except OSError as e:
            raise RunStorageError(str(self.target), e.strerror or str(e)) from e
        self.committed = True
        logger.info("run written to %s", self.target)

    def rollback(self) -> None:
        shutil.rmtree(self.path, ignore_errors=True)
        logger.error("run at %s rolled back; no output kept", self.target)


@contextmanager
def run_session(output_dir: Union[str, Path]) -> Iterator[RunSession]:
    """
    Atomic run directory:
    with run_session(out) as session:
        write into session.path ...
    """
    session = RunSession(Path(output_dir))
    session.open()
    try:
        yield session
    except OSError as e:
        session.rollback()
        raise RunStorageError(str(session.target), e.strerror or str(e)) from e
    except BaseException:
        session.rollback()
        raise
    try:
        session.commit()
    except RunStorageError:
        session.rollback()
        raise
