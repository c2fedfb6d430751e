"""recurkit: escape-from-extinction dynamics in a two-type branching population.

Simulation (exact and leaping), closed-form limit laws for the extinction
time, path approximations, crossover and turnaround times, moment
quadratures, and the Monte Carlo harness that compares the two.
"""
from .params import (ModelParams, ScaledQuery, derive_params, params_from_config,
                     params_from_mu_x, s_x, scaled_query)

__version__ = "0.1.0"

__all__ = [
    "ModelParams", "ScaledQuery", "derive_params", "params_from_mu_x",
    "params_from_config", "s_x", "scaled_query", "__version__",
]
