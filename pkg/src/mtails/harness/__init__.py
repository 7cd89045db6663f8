"""Verification harness: exact enumeration, deterministic checks, seeded Monte Carlo."""

from .config import ConfigError, Suite, load_suites
from .ensembles import (
    DiagSubgaussian,
    DiscreteAtoms,
    Ensemble,
    GaussianVectors,
    Moments,
    RademacherOuter,
    RmmSampler,
    Target,
)
from .exact import (
    CheckResult,
    Constant,
    Exponential,
    Uniform,
    exact_lemma2_check,
    exact_theorem3_check,
    lieb_concavity_check,
    lieb_midpoint_gap,
    mgf_hypothesis_grid_check,
    mgf_identity_check,
)
from .montecarlo import (
    CertSpec,
    TrialReport,
    hoeffding_slack,
    mc_validate,
    mc_validate_many,
    reports_to_csv,
    reports_to_json,
    trial_statistics,
)
