"""Crank-Nicolson propagation of the 1D time-dependent Schroedinger equation."""

from ._cnprop import (
    Error,
    Propagator,
    abc_coefficients,
    analytic_barrier_transmission,
    analytic_source_solution,
    config_keys,
    gaussian_packet,
    grid_positions,
    log_abs_determinant,
    preset_config,
    presets,
    run,
    run_jsonl,
    source_omega,
    square_potential,
    tridiagonal_inverse,
    tridiagonal_solve,
)

__all__ = [
    "Error",
    "Propagator",
    "abc_coefficients",
    "analytic_barrier_transmission",
    "analytic_source_solution",
    "config_keys",
    "gaussian_packet",
    "grid_positions",
    "log_abs_determinant",
    "preset_config",
    "presets",
    "run",
    "run_jsonl",
    "source_omega",
    "square_potential",
    "tridiagonal_inverse",
    "tridiagonal_solve",
]
