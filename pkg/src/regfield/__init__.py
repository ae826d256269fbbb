"""Stationary random fields with linear two-sided regressions.

Given ``b_1..b_N`` with ``E(X_k | X_j, j != k) = sum_j b_j (X_{k-j} + X_{k+j})``,
decide existence, compute the correlations and conditional variance, the
one-sided (AR) representation, and check everything by simulation.
"""
from .correlation import (
    CorrelationSequence,
    check_v_identity,
    correlations_from_symbol,
    toeplitz_section,
)
from .errors import (
    DegenerateDesign,
    EmbeddingNotPSD,
    GridTooCoarse,
    InsufficientCorrelations,
    InsufficientData,
    InvalidCoefficient,
    NotMinimumPhase,
    NotPositiveDefinite,
    RegFieldError,
    SymbolNearSingular,
    SymbolNotInvertible,
    TruncationWarning,
)
from .factorization import (
    OneSidedModel,
    SpectralFactor,
    band_beta_to_b,
    beta_from_factor,
    fejer_riesz,
    szego_factor,
    verify_bbeta_identity,
    yule_walker,
)
from .simulation import (
    RegressionEstimate,
    SamplePath,
    empirical_correlations,
    estimate_one_sided,
    estimate_two_sided,
    simulate_ar,
    simulate_circulant,
)
from .symbol import (
    PositivityReport,
    SpectralGrid,
    SymbolCoefficients,
    build_symbol,
    check_positivity,
    evaluate_grid,
    invert_symbol,
)

__version__ = "0.1.0"
