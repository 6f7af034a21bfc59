"""Error-bounded compression and evaluation of tabular training data."""

from ._ppress import (
    GB,
    ApplicationError,
    ConfigError,
    DataError,
    Error,
    FormatError,
    InfeasibleError,
    column_stats,
    compress,
    container_info,
    core_threshold,
    decompress,
    error_report,
    hypervolume,
    load_records,
    min_cores,
    pareto_front,
    speedup,
    transfer_times,
)

__version__ = "0.1.0"

__all__ = [
    "GB",
    "ApplicationError",
    "ConfigError",
    "DataError",
    "Error",
    "FormatError",
    "InfeasibleError",
    "column_stats",
    "compress",
    "container_info",
    "core_threshold",
    "decompress",
    "error_report",
    "hypervolume",
    "load_records",
    "min_cores",
    "pareto_front",
    "speedup",
    "transfer_times",
]
