"""Damped nonlinear wave equation on the 3-torus: spectral fields, energies and verified runs."""

from ._core import (
    ConfigError,
    DomainError,
    ParameterError,
    derive_exponents,
    epsilon_budgets,
    g_function,
    h_threshold,
    inverse_transform,
    l2_norm,
    modified_energy,
    run_file,
    run_text,
    sobolev_norm,
    standard_energy,
    sup_norm,
    transform,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "ParameterError",
    "derive_exponents",
    "epsilon_budgets",
    "g_function",
    "h_threshold",
    "inverse_transform",
    "l2_norm",
    "modified_energy",
    "run_file",
    "run_text",
    "sobolev_norm",
    "standard_energy",
    "sup_norm",
    "transform",
]
