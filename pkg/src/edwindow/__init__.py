"""Sliding-window estimation of the edit distance to monotonicity."""

from .core import (
    ConfigError,
    ContractError,
    Mode,
    QueryError,
    StreamItem,
    WindowConfig,
    WindowSpan,
    validate_config,
    window_span,
)
from .counting import TokenCounter
from .estimator import EdEstimate, EdEstimator, ed_arrive, ed_query, ed_tokens_live
from .oracle import exact_ed, exact_lis, exact_R, pruning_bound
from .quantiles import QuantileSummary

__all__ = [
    "ConfigError",
    "ContractError",
    "EdEstimate",
    "EdEstimator",
    "Mode",
    "QuantileSummary",
    "QueryError",
    "StreamItem",
    "TokenCounter",
    "WindowConfig",
    "WindowSpan",
    "ed_arrive",
    "ed_query",
    "ed_tokens_live",
    "exact_R",
    "exact_ed",
    "exact_lis",
    "pruning_bound",
    "validate_config",
    "window_span",
]
