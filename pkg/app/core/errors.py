"""
Error hierarchy for the QAnneal toolkit.

Every error carries the process exit code the CLI reports for it.
"""
from __future__ import annotations

from typing import Optional, Sequence


class AnnealError(Exception):
    exit_code: int = 1

    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message = message


class QubitArgumentError(AnnealError, ValueError):
    """Argument outside an operation's domain (site, qubit count, gamma, step index)."""

    exit_code = 2


class ContractViolation(AnnealError):
    """A numerical precondition (Hermiticity, unit trace) does not hold."""


class ExponentOverflowError(AnnealError):
    def __init__(self, exponent: float, limit: float, step: Optional[int] = None) -> None:
        where = f" at step {step}" if step is not None else ""
        super().__init__(
            f"exponent {exponent:.6g} exceeds the |{limit:g}| guard{where}"
        )
        self.exponent = exponent
        self.limit = limit
        self.step = step

    def at_step(self, step: int) -> "ExponentOverflowError":
        return ExponentOverflowError(self.exponent, self.limit, step=step)


class DegenerateScheduleError(AnnealError):
    """S_w has no range to map parameters onto."""


class RejectedSampleError(AnnealError):
    """A perturbed state could not be normalized (trace <= 0)."""


class PropagationError(AnnealError):
    def __init__(self, step: int, cause: Exception) -> None:
        super().__init__(f"forward run failed at step {step}: {cause}")
        self.step = step
        self.cause = cause


class ConfigValidationError(AnnealError):
    exit_code = 2

    def __init__(self, violations: Sequence[str]) -> None:
        self.violations = list(violations)
        lines = "\n".join(f"  - {v}" for v in self.violations)
        super().__init__(f"invalid experiment config ({len(self.violations)} violation(s)):\n{lines}")


class TrainingDivergedError(AnnealError):
    exit_code = 3

    def __init__(self, epoch: int, detail: str, gamma: Optional[float] = None) -> None:
        where = f"epoch {epoch}" if gamma is None else f"gamma={gamma:g}, epoch {epoch}"
        super().__init__(f"training diverged ({where}): {detail}")
        self.epoch = epoch
        self.gamma = gamma
        self.detail = detail

    def with_gamma(self, gamma: float) -> "TrainingDivergedError":
        return TrainingDivergedError(self.epoch, self.detail, gamma=gamma)


class RunStorageError(AnnealError):
    exit_code = 4

    def __init__(self, path: str, detail: str) -> None:
        super().__init__(f"cannot write run output at {path}: {detail}")
        self.path = path


def classify_failure(exc: BaseException) -> str:
    """
    Stable failure categories for manifests and exclusion ledgers:
      - overflow
      - diverged
      - config
      - storage
      - contract
      - rejected
      - argument
      - unknown
    """
    if isinstance(exc, PropagationError):
        return classify_failure(exc.cause)
    if isinstance(exc, ExponentOverflowError):
        return "overflow"
    if isinstance(exc, TrainingDivergedError):
        return "diverged"
    if isinstance(exc, ConfigValidationError):
        return "config"
    if isinstance(exc, (RunStorageError, OSError)):
        return "storage"
    if isinstance(exc, (ContractViolation, DegenerateScheduleError)):
        return "contract"
    if isinstance(exc, RejectedSampleError):
        return "rejected"
    if isinstance(exc, QubitArgumentError):
        return "argument"
    return "unknown"


def safe_error_summary(err: object, max_len: int = 200) -> Optional[str]:
    if not err:
        return None
    s = str(err).replace("\n", " ").replace("\r", " ").strip()
    if len(s) <= max_len:
        return s
    return s[:max_len] + "…"
