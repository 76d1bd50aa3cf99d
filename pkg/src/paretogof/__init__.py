"""Stein-Laplace goodness-of-fit tests for the Pareto distribution."""
from __future__ import annotations

__version__ = "0.1.0"

from .bootstrap import RateResult, StudyCell, TestOutcome, bootstrap_test, rejection_rate, run_cells
from .competitors import (
    CompetitorKind,
    edf_tests,
    entropy_tests,
    ndwandwe_tests,
    transform_tests,
    ustat_tests,
    zhang_tests,
)
from .distributions import (
    PAPER_ALTERNATIVES,
    AlternativeSpec,
    ParetoModel,
    alt_density,
    alt_sample,
    normalization,
    parse_distribution,
    pareto_cdf,
    pareto_sample,
)
from .errors import (
    DatasetIOError,
    DegenerateSampleError,
    EmptySampleError,
    NumericalError,
    ParameterDomainError,
    ParetoGofError,
    ReplicationError,
    SampleValidationError,
    UnknownTestError,
)
from .estimation import Sample, bundled_path, load_dataset, mle_alpha, power_transform, preprocess_threshold
from .kernels import BACKEND
from .registry import TestDef, parse_test, parse_tests
from .rng import RngStream, derive_substream
from .stein import (
    COARSE_SUP,
    DEFAULT_SUP,
    SupSearchConfig,
    ds1,
    ds1_standardized,
    ds2,
    ds3,
    gen_exp_integral,
    psi_alpha,
    sigma2,
    stein_laplace_statistics,
)
from .study import PowerTable, StudyConfig, analyze_dataset, emit_table, run_study
