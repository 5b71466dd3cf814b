"""Spatially coupled sparse-graph modulation: density evolution, capacity curves and link simulation."""

from ._sgmod import (
    awgn_capacity_fixed_point,
    biawgn_capacity,
    biawgn_capacity_inverse,
    c_eff,
    compare_with_de,
    ebn0_of,
    limit_ebn0,
    limit_efficiency,
    mse_g,
    run_de,
    run_link_sim,
    s_for_ebn0,
    sweep,
    wave_rate,
    wave_threshold,
    two_stage_max_rate,
    uncoupled_fixed_point,
)

__all__ = [
    "awgn_capacity_fixed_point",
    "biawgn_capacity",
    "biawgn_capacity_inverse",
    "c_eff",
    "compare_with_de",
    "ebn0_of",
    "limit_ebn0",
    "limit_efficiency",
    "mse_g",
    "run_de",
    "run_link_sim",
    "s_for_ebn0",
    "sweep",
    "wave_rate",
    "wave_threshold",
    "two_stage_max_rate",
    "uncoupled_fixed_point",
]
