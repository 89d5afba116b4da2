"""Python bindings for the vmprox solvers."""

from ._core import (
    ALGORITHMS,
    ConfigError,
    Dataset,
    DegenerateRowError,
    DivergenceError,
    MaxIterationsError,
    MetricError,
    ParseError,
    RateHypothesisError,
    VmproxError,
    load_libsvm,
    parse_libsvm,
    reference,
    run,
    scaled_prox,
    theoretical_rate,
    verify,
)

__all__ = [
    "ALGORITHMS",
    "ConfigError",
    "Dataset",
    "DegenerateRowError",
    "DivergenceError",
    "MaxIterationsError",
    "MetricError",
    "ParseError",
    "RateHypothesisError",
    "VmproxError",
    "load_libsvm",
    "parse_libsvm",
    "reference",
    "run",
    "scaled_prox",
    "theoretical_rate",
    "verify",
]
