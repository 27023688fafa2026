"""Sliding-window quantile estimation with sub-window aggregation."""

import json as _json

from ._winquant import (
    ConfigError,
    DataError,
    EmptyWindowError,
    Error,
    FrequencyMap,
    InsufficientDataError,
    NotEnabledError,
    StateCorruptionError,
    UndefinedBoundError,
    WarmupError,
    aomg_quantiles,
    burst_statistic,
    detect_burst,
    error_bound,
    generate,
    inject_burst,
    quantile_rank,
    quantize,
    rank_error,
    samplek_merge,
    sliding_quantiles,
    tail_rank,
    topk_merge,
    upper_normal_quantile,
    value_error,
)
from ._winquant import run as _run


def run(**kwargs):
    """Run the benchmark harness and return the report as a dict."""
    return _json.loads(_run(**kwargs))


__all__ = [
    "ConfigError",
    "DataError",
    "EmptyWindowError",
    "Error",
    "FrequencyMap",
    "InsufficientDataError",
    "NotEnabledError",
    "StateCorruptionError",
    "UndefinedBoundError",
    "WarmupError",
    "aomg_quantiles",
    "burst_statistic",
    "detect_burst",
    "error_bound",
    "generate",
    "inject_burst",
    "quantile_rank",
    "quantize",
    "rank_error",
    "run",
    "samplek_merge",
    "sliding_quantiles",
    "tail_rank",
    "topk_merge",
    "upper_normal_quantile",
    "value_error",
]
