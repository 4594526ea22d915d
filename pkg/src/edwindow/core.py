"""Shared domain types and window arithmetic."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

#: Internal accuracy is the user accuracy divided by this constant.
EPSILON_DIVISOR = 35


class ConfigError(ValueError):
    """Raised for an invalid window/accuracy configuration.

    ``field`` names the offending parameter.
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class ContractError(ValueError):
    """A caller broke an operation's precondition."""


class QueryError(ValueError):
    """A query was issued with out-of-range arguments."""


class Mode(enum.Enum):
    SKETCH = "sketch"
    EXACT_FALLBACK = "exact"


@dataclass(frozen=True)
class StreamItem:
    index: int
    value: int

    def __post_init__(self):
        if self.index < 1:
            raise ContractError(f"index must be >= 1, got {self.index}")
        if self.value < 1:
            raise ContractError(f"value must be >= 1, got {self.value}")


@dataclass(frozen=True)
class WindowConfig:
    """Validated estimator configuration.

    ``w`` is ``None`` for the whole-stream model (an unbounded window).
    """

    w: Optional[int]
    epsilon: float
    epsilon_prime: float
    mode: Mode

    @property
    def whole_stream(self) -> bool:
        return self.w is None


@dataclass(frozen=True)
class WindowSpan:
    lo: int
    hi: int

    def __len__(self) -> int:
        return self.hi - self.lo + 1


def validate_config(w: Optional[int], epsilon: float) -> WindowConfig:
    """Check ``(w, epsilon)`` and derive the internal accuracy and mode.

    The exact fallback is selected when ``epsilon <= 1/w``: the window is then
    no larger than ``1/epsilon`` items and storing it outright is cheaper than
    any sketch.
    """
    if w is not None:
        if isinstance(w, bool) or not isinstance(w, int):
            raise ConfigError("w", f"window size must be an integer, got {w!r}")
        if w < 1:
            raise ConfigError("w", f"window size must be >= 1, got {w}")
    try:
        epsilon = float(epsilon)
    except (TypeError, ValueError):
        raise ConfigError("epsilon", f"not a number: {epsilon!r}") from None
    if not epsilon > 0:
        raise ConfigError("epsilon", f"must be > 0, got {epsilon}")
    if epsilon > 1:
        raise ConfigError("epsilon", f"must be <= 1, got {epsilon}")
    if w is not None and epsilon <= 1 / w:
        mode = Mode.EXACT_FALLBACK
    else:
        mode = Mode.SKETCH
    return WindowConfig(w=w, epsilon=epsilon, epsilon_prime=epsilon / EPSILON_DIVISOR, mode=mode)


def window_span(i: int, w: Optional[int]) -> WindowSpan:
    """Index range of the live window after ``i`` arrivals, clamped at 1."""
    if i < 0:
        raise ContractError(f"negative index {i}")
    if w is None:
        return WindowSpan(1, i)
    return WindowSpan(max(1, i - w + 1), i)
