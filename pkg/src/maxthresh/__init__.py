"""Maximal thresholding tests for sparse faint signals in high-dimensional means.

The package implements a family of tests indexed by gamma in {0, 1, 2}:
the higher-criticism exceedance count (gamma = 0) and the maximal L1 and L2
thresholding tests (gamma = 1, 2), each maximizing a standardized
thresholding statistic over a data-driven set of levels and calibrated by a
Gumbel limit. Alongside the tests it ships the closed-form theory (detection
boundaries, separation rates, power-regime classification) and a seeded
Monte Carlo harness for empirical size, power, and size-adjusted critical
values, plus a CSV-emitting command line interface.
"""

from .boundaries import (
    CaseDecision,
    RegimeClassification,
    SignalRegime,
    classify_regime,
    delta2_separation,
    delta_gamma0,
    detectable_cases,
    detection_boundary,
    exists_detectable_s,
    restricted_boundary,
)
from .calibration import (
    GumbelNorming,
    NullMoments,
    TestReport,
    candidate_grid,
    critical_value,
    gumbel_norming,
    maximal_statistic,
    null_moments,
    restricted_grid,
    run_test,
    standardized_statistic,
)
from .errors import (
    CalibrationError,
    DataError,
    DomainError,
    MaxthreshError,
    SingularityError,
)
from .simulation import (
    DEFAULT_SEED,
    PRESET_CELLS,
    AlternativeSpec,
    PowerEstimate,
    ScenarioConfig,
    generate_noise,
    mc_calibrate,
    mc_power,
    mc_size,
    plant_signals,
    sample_mhats,
    scenario_presets,
    signal_count,
    upper_quantile,
)
from .stats import (
    MarginalSummary,
    SampleMatrix,
    ThresholdLevel,
    gumbel_cdf,
    lambda_p,
    marginal_summaries,
    normal_pdf,
    normal_survival,
    standardize_columns,
    threshold_statistic,
    truncated_moment_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "MaxthreshError",
    "DataError",
    "DomainError",
    "CalibrationError",
    "SingularityError",
    "SampleMatrix",
    "MarginalSummary",
    "ThresholdLevel",
    "marginal_summaries",
    "lambda_p",
    "threshold_statistic",
    "standardize_columns",
    "normal_pdf",
    "normal_survival",
    "gumbel_cdf",
    "truncated_moment_oracle",
    "NullMoments",
    "GumbelNorming",
    "TestReport",
    "null_moments",
    "standardized_statistic",
    "candidate_grid",
    "restricted_grid",
    "maximal_statistic",
    "gumbel_norming",
    "critical_value",
    "run_test",
    "SignalRegime",
    "RegimeClassification",
    "CaseDecision",
    "detection_boundary",
    "restricted_boundary",
    "delta_gamma0",
    "delta2_separation",
    "detectable_cases",
    "exists_detectable_s",
    "classify_regime",
    "DEFAULT_SEED",
    "PRESET_CELLS",
    "ScenarioConfig",
    "AlternativeSpec",
    "PowerEstimate",
    "generate_noise",
    "plant_signals",
    "sample_mhats",
    "mc_size",
    "mc_power",
    "mc_calibrate",
    "scenario_presets",
    "signal_count",
    "upper_quantile",
]
