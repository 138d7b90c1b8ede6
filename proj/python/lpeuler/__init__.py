"""Littlewood-Paley toolkit for the damped compressible Euler system."""

from ._core import (
    Band,
    ConfigError,
    DataError,
    DomainError,
    Grid,
    LPBasis,
    ProfileKind,
    RegimeViolation,
    SpectralField,
    basis_manifest,
    besov_seminorm,
    block_norms,
    block_project,
    bony_decompose,
    config_hash,
    dealiased_product,
    frequency_threshold,
    generate_ensemble,
    hl_shift_check,
    linear_propagator,
    lp_norm,
    normalized_config,
    parseval_l2,
    product_law_ratio,
    reconstruction_defect,
    run_experiment,
    symbol_eigenvalues,
)

__all__ = [name for name in dir() if not name.startswith("_")]
