"""Asymptotic variance and spectral density estimation for reversible chains.

The core estimator projects an empirical autocovariance sequence onto the
cone of scale mixtures of exponential sequences, optionally under a
frequency-weighted norm, and reads the asymptotic variance and spectral
density off the fitted mixing measure. Classical lag-window, batch-means,
and initial-sequence estimators are included for comparison, along with a
seeded simulation harness.
"""

from .baselines import (
    convex_minorant,
    initial_seq,
    obm,
    politis_bandwidth,
    windowed_autocov,
    windowed_avar,
)
from .chains import Ar1Spec, GroundTruth, ar1_truth, simulate_ar1
from .estimators import (
    METHODS,
    SPECTRAL_METHODS,
    BartlettKernel,
    InitialSequence,
    MomentLS,
    OverlappingBatchMeans,
    TrapezoidKernel,
    make_estimator,
)
from .harness import ExperimentConfig, ExperimentResult, ise, run_experiment
from .nnls import NnlsError, QpSolution, QuadProgram, solve_nnls
from .projection import (
    AlphaGrid,
    MomentLSFit,
    RepresentingMeasure,
    Weight,
    assemble_qp,
    build_grid,
    fit_pipeline,
    modified_weight,
    project,
    support_size_bound,
    tune_delta,
    weight_from_values,
)
from .sequences import (
    cosine_transform,
    dtft_on_grid,
    empirical_autocov,
    exp_inner,
    poisson_kernel,
    x_alpha_l1,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaGrid",
    "Ar1Spec",
    "BartlettKernel",
    "ExperimentConfig",
    "ExperimentResult",
    "GroundTruth",
    "InitialSequence",
    "METHODS",
    "MomentLS",
    "MomentLSFit",
    "NnlsError",
    "OverlappingBatchMeans",
    "QpSolution",
    "QuadProgram",
    "RepresentingMeasure",
    "SPECTRAL_METHODS",
    "TrapezoidKernel",
    "Weight",
    "ar1_truth",
    "assemble_qp",
    "build_grid",
    "convex_minorant",
    "cosine_transform",
    "dtft_on_grid",
    "empirical_autocov",
    "exp_inner",
    "fit_pipeline",
    "initial_seq",
    "ise",
    "make_estimator",
    "modified_weight",
    "obm",
    "poisson_kernel",
    "politis_bandwidth",
    "project",
    "run_experiment",
    "simulate_ar1",
    "solve_nnls",
    "support_size_bound",
    "tune_delta",
    "weight_from_values",
    "windowed_autocov",
    "windowed_avar",
    "x_alpha_l1",
]
