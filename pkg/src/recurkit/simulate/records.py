"""Trajectory records, stopping policies, and mark-extraction scans."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

STOP_TOTAL_EXTINCTION = "total_extinction"
STOP_REBOUND = "rebound_detected"
STOP_HORIZON = "horizon_reached"
STOP_SENSITIVE_EXTINCTION = "sensitive_extinction"

RECORD_NONE = "none"
RECORD_FULL = "full"
RECORD_Z1 = "z1_changes"


@dataclass(frozen=True)
class StopPolicy:
    """When a simulated trajectory ends.

    ``rebound_multiplier`` stops the run once the total population has
    recovered to ``rebound_multiplier * x`` with the resistant type in the
    majority (1.0 means recovery to the initial size).  Requiring resistant
    dominance makes the trigger immune to birth/death jitter around the
    initial size at the very start of the run.
    ``stop_on_sensitive_extinction`` ends the run as soon as the sensitive
    population hits zero.  With
    ``resolve_extinction`` set, a run stopped early (rebound) still reports
    the sensitive extinction time by continuing the sensitive population
    alone on its dedicated random stream; the recorded events end at the
    stopping time either way.
    """

    horizon: float = math.inf
    rebound_multiplier: float = 1.0
    detect_threshold: int = 1
    stop_on_sensitive_extinction: bool = False
    resolve_extinction: bool = True

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError(f"horizon must be > 0, got {self.horizon}")
        if not self.rebound_multiplier > 0:
            raise ValueError(
                f"rebound_multiplier must be > 0, got {self.rebound_multiplier}")


@dataclass(frozen=True)
class HybridControl:
    """Step control for the large-population (leaping) simulator."""

    step_fraction: float = 0.01
    exact_clone_cutoff: float = 100
    z0_exact_threshold: int = 1000
    max_step_halvings: int = 40

    def __post_init__(self):
        if not 0.0 < self.step_fraction <= 0.1:
            raise ValueError(
                f"step_fraction must lie in (0, 0.1], got {self.step_fraction}")
        if self.exact_clone_cutoff < 10:
            raise ValueError(
                f"exact_clone_cutoff must be >= 10, got {self.exact_clone_cutoff}")


@dataclass
class PathRecord:
    """One simulated trajectory plus the random times extracted from it.

    ``events`` holds (time, z0, z1) rows: every state change in exact mode
    (optionally thinned), grid points in hybrid mode.  Marks are always
    computed from the unthinned state as the simulation runs.
    """

    times: np.ndarray
    z0: np.ndarray
    z1: np.ndarray
    t_extinct_sensitive: Optional[float]
    crossover: Optional[float]
    crossover_escaped: bool
    turnaround_first: Optional[float]
    turnaround_last: Optional[float]
    min_total: int
    stop_reason: str
    seed: int
    final_time: float
    final_z0: int
    final_z1: int
    probe_times: Optional[np.ndarray] = None
    probe_z0: Optional[np.ndarray] = None
    probe_z1: Optional[np.ndarray] = None
    n_mutations: int = 0

    def marks_dict(self) -> dict:
        return {
            "t_extinct_sensitive": self.t_extinct_sensitive,
            "crossover": self.crossover,
            "crossover_escaped": self.crossover_escaped,
            "tau_first": self.turnaround_first,
            "tau_last": self.turnaround_last,
            "min_total": self.min_total,
            "stop_reason": self.stop_reason,
            "seed": self.seed,
        }

    def marks_json(self) -> str:
        return json.dumps(self.marks_dict(), indent=2)

    def write_events_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("time,z0,z1\n")
            for t, a, b in zip(self.times, self.z0, self.z1):
                fh.write(f"{t!r},{int(a)},{int(b)}\n")

    def state_at(self, query_times):
        """Left-continuous (value just before the query instant) lookup."""
        q = np.atleast_1d(np.asarray(query_times, dtype=float))
        idx = np.searchsorted(self.times, q, side="left")
        idx = np.maximum(idx, 1) - 1
        return self.z0[idx], self.z1[idx]


def extract_crossover(record: PathRecord) -> dict:
    """First event at which the resistant count reaches the sensitive count.

    Literal first-crossing scan of the recorded events.  A crossing with
    ``z1 == 0`` (joint extinction) reports ``escaped=False``.
    """
    hit = np.nonzero(record.z1 >= record.z0)[0]
    if hit.size == 0:
        return {"xi": None, "escaped": False}
    i = hit[0]
    return {"xi": float(record.times[i]), "escaped": bool(record.z1[i] >= 1)}


def extract_turnaround(record: PathRecord) -> dict:
    """First/last attainment times of the minimum of the total population."""
    total = record.z0 + record.z1
    lo = int(total.min())
    at = np.nonzero(total == lo)[0]
    return {
        "tau_first": float(record.times[at[0]]),
        "tau_last": float(record.times[at[-1]]),
        "min_total": lo,
    }
