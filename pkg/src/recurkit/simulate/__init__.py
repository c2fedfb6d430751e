from .backend import BACKEND, kernels
from .engine import (sample_extinction_time, sample_z1_at_fractions, simulate,
                     simulate_exact, simulate_hybrid, simulate_single_clone)
from .records import (RECORD_FULL, RECORD_NONE, RECORD_Z1,
                      STOP_HORIZON, STOP_REBOUND, STOP_SENSITIVE_EXTINCTION,
                      STOP_TOTAL_EXTINCTION, HybridControl, PathRecord,
                      StopPolicy, extract_crossover, extract_turnaround)

__all__ = [
    "BACKEND", "kernels",
    "simulate", "simulate_exact", "simulate_hybrid",
    "sample_extinction_time", "sample_z1_at_fractions", "simulate_single_clone",
    "StopPolicy", "HybridControl", "PathRecord",
    "extract_crossover", "extract_turnaround",
    "RECORD_FULL", "RECORD_NONE", "RECORD_Z1",
    "STOP_TOTAL_EXTINCTION", "STOP_REBOUND", "STOP_HORIZON",
    "STOP_SENSITIVE_EXTINCTION",
]
