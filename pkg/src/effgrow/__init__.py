"""Effective growth rates of heterogeneous populations growing and dividing by fission."""

from .correlation import (
    CorrelationReport,
    gamma_uniform_law,
    pearson_correlation_alpha,
)
from .errors import (
    ConvergenceError,
    DomainError,
    EffgrowError,
    InconsistencyError,
    SchemaError,
)
from .kernels import (
    HeredityKernel,
    KernelReport,
    alpha_neutral,
    make_kernel_alpha,
    make_kernel_alpha0,
    make_kernel_bimodal,
    make_kernel_noheredity,
    make_kernel_random,
    make_kernel_uniform,
    parse_kernel_spec,
    validate_kernel,
)
from .spectral import (
    EigenTriplet,
    GrowthMatrix,
    NoHeredityPolynomial,
    bimodal_limit_k1_to_zero,
    build_growth_matrix,
    dominant_eigentriplet,
    effective_trait,
    effective_trait_bimodal,
    noheredity_polynomial,
    population_fractions,
    solve_noheredity,
)
from .traits import MeanKind, TraitSet, make_trait_set, mean

__version__ = "0.1.0"
