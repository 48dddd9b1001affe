"""Multi-threshold wavelet estimators aggregated with exponential weights."""

from ._core import (
    Error,
    WaveletFamily,
    apply_rule,
    beta_constants,
    estimate_density,
    estimate_regression,
    family_names,
    j1_level,
    min_rho,
    monte_carlo,
    rate_slope,
    sample_density,
    sample_regression,
    split_sample,
    target,
    target_names,
    verify_ongle,
)

__all__ = [
    "Error",
    "WaveletFamily",
    "apply_rule",
    "beta_constants",
    "estimate_density",
    "estimate_regression",
    "family_names",
    "j1_level",
    "min_rho",
    "monte_carlo",
    "rate_slope",
    "sample_density",
    "sample_regression",
    "split_sample",
    "target",
    "target_names",
    "verify_ongle",
]
