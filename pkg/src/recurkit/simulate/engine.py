"""Public simulation API: exact, hybrid, and specialized samplers.

All entry points are pure functions of (params, seed, policy): replicates
are reproducible bit for bit and safe to run concurrently.
"""
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from ..params import ModelParams
from ..rng import replicate_fingerprint, replicate_streams
from . import backend
from .records import (RECORD_FULL, HybridControl, PathRecord, StopPolicy)


def _finish(res: dict, seed_id: int, probe_times) -> PathRecord:
    n_filled = res["probe_filled"]
    probes = None if probe_times is None else np.asarray(probe_times, float)
    pz0 = pz1 = None
    if probes is not None:
        pz0 = np.asarray(res["probe_z0"], dtype=np.int64)
        pz1 = np.asarray(res["probe_z1"], dtype=np.int64)
        if n_filled < len(probes):
            pz0 = pz0.astype(float)
            pz1 = pz1.astype(float)
            pz0[n_filled:] = np.nan
            pz1[n_filled:] = np.nan
    return PathRecord(
        times=np.asarray(res["times"], dtype=float),
        z0=np.asarray(res["z0"], dtype=np.int64),
        z1=np.asarray(res["z1"], dtype=np.int64),
        t_extinct_sensitive=res["t_extinct_sensitive"],
        crossover=res["crossover"],
        crossover_escaped=res["crossover_escaped"],
        turnaround_first=res["tau_first"],
        turnaround_last=res["tau_last"],
        min_total=int(res["min_total"]),
        stop_reason=res["stop_reason"],
        seed=seed_id,
        final_time=res["final_time"],
        final_z0=int(res["final_z0"]),
        final_z1=int(res["final_z1"]),
        probe_times=probes,
        probe_z0=pz0,
        probe_z1=pz1,
        n_mutations=int(res["n_mutations"]),
    )


def _sorted_probes(probe_times):
    if probe_times is None:
        return None
    p = np.asarray(probe_times, dtype=float)
    if p.ndim != 1:
        raise ValueError("probe_times must be one-dimensional")
    if not np.all(np.diff(p) >= 0):
        raise ValueError("probe_times must be sorted ascending")
    return p


def simulate_exact(params: ModelParams, seed: int, policy: StopPolicy | None = None,
                   *, replicate: int = 0, record: str = RECORD_FULL, thin: int = 1,
                   probe_times: Optional[Sequence[float]] = None,
                   z0_only: bool = False, mu_x_override: float | None = None,
                   backend_name: str | None = None) -> PathRecord:
    """Exact event-driven simulation of one trajectory."""
    policy = policy or StopPolicy()
    probes = _sorted_probes(probe_times)
    g0, g1, g2 = replicate_streams(seed, replicate)
    mu_x = params.mu_x if mu_x_override is None else mu_x_override
    res = backend.kernels(backend_name).exact_kernel(
        params.x, params.r0, params.d0, params.r1, params.d1, mu_x,
        policy.horizon, policy.rebound_multiplier,
        policy.stop_on_sensitive_extinction, policy.resolve_extinction,
        z0_only, g0, g1, g2, record, thin, probes)
    return _finish(res, replicate_fingerprint(seed, replicate), probes)


def simulate_hybrid(params: ModelParams, seed: int, policy: StopPolicy | None = None,
                    ctrl: HybridControl | None = None,
                    *, replicate: int = 0, record: str = RECORD_FULL, thin: int = 1,
                    probe_times: Optional[Sequence[float]] = None,
                    z0_only: bool = False,
                    backend_name: str | None = None) -> PathRecord:
    """Leaping simulation of one trajectory (for large populations)."""
    policy = policy or StopPolicy()
    ctrl = ctrl or HybridControl()
    probes = _sorted_probes(probe_times)
    g0, g1, g2 = replicate_streams(seed, replicate)
    res = backend.kernels(backend_name).hybrid_kernel(
        params.x, params.r0, params.d0, params.r1, params.d1, params.mu_x,
        policy.horizon, policy.rebound_multiplier,
        policy.stop_on_sensitive_extinction, policy.resolve_extinction,
        z0_only,
        ctrl.step_fraction, float(ctrl.exact_clone_cutoff),
        ctrl.z0_exact_threshold, ctrl.max_step_halvings,
        g0, g1, g2, record, thin, probes)
    return _finish(res, replicate_fingerprint(seed, replicate), probes)


def simulate(params: ModelParams, seed: int, policy: StopPolicy | None = None,
             mode: str = "exact", ctrl: HybridControl | None = None, **kw) -> PathRecord:
    if mode == "exact":
        return simulate_exact(params, seed, policy, **kw)
    if mode == "hybrid":
        return simulate_hybrid(params, seed, policy, ctrl, **kw)
    raise ValueError(f"unknown mode {mode!r}")


def sample_extinction_time(params: ModelParams, seed: int, *, replicate: int = 0,
                           horizon: float = np.inf,
                           backend_name: str | None = None) -> float:
    """Extinction time of the sensitive population alone (no mutation
    bookkeeping); the fast path for extinction-law ensembles."""
    rec = simulate_exact(
        params, seed, StopPolicy(horizon=horizon), replicate=replicate,
        record="none", z0_only=True, backend_name=backend_name)
    if rec.t_extinct_sensitive is None:
        raise RuntimeError("horizon reached before sensitive extinction")
    return rec.t_extinct_sensitive


def sample_z1_at_fractions(params: ModelParams, seed: int, fractions: Sequence[float],
                           *, replicate: int = 0, mode: str = "exact",
                           ctrl: HybridControl | None = None,
                           backend_name: str | None = None):
    """Resistant population size at given fractions of the extinction time.

    Two passes over the same streams: the first finds the sensitive
    extinction time from the sensitive stream alone, the second replays the
    identical sensitive path (same stream) with mutation and resistant
    dynamics switched on, probing at ``v * t_extinct`` for each fraction v.
    Returns (t_extinct, array of z1 values).
    """
    fr = np.asarray(fractions, dtype=float)
    if np.any(fr <= 0):
        raise ValueError("fractions must be positive")
    if np.any(np.diff(fr) < 0):
        raise ValueError("fractions must be sorted ascending")
    kw = dict(replicate=replicate, backend_name=backend_name)
    if mode == "exact":
        first = simulate_exact(params, seed, StopPolicy(), record="none",
                               z0_only=True, **kw)
    else:
        first = simulate_hybrid(params, seed, StopPolicy(), ctrl, record="none",
                                z0_only=True, **kw)
    tx = first.t_extinct_sensitive
    if tx is None:
        raise RuntimeError("sensitive population did not go extinct")
    probes = fr * tx
    horizon = float(probes[-1])
    policy = StopPolicy(horizon=np.nextafter(horizon, np.inf),
                        rebound_multiplier=np.inf, resolve_extinction=False)
    if mode == "exact":
        rec = simulate_exact(params, seed, policy, record="none",
                             probe_times=probes, **kw)
    else:
        rec = simulate_hybrid(params, seed, policy, ctrl, record="none",
                              probe_times=probes, **kw)
    z1 = np.asarray(rec.probe_z1, dtype=float)
    if np.any(np.isnan(z1)):
        raise RuntimeError("probe beyond simulated horizon")
    return tx, z1


def simulate_single_clone(params: ModelParams, seed: int, *, replicate: int = 0,
                          size_cap: float = 1e6, horizon: float = np.inf):
    """One resistant lineage from a single cell; returns (size, time, hit_cap).

    ``size == 0`` means the lineage died out.  Used to check the lineage
    extinction probability d1/r1.
    """
    _, _, g2 = replicate_streams(seed, replicate)
    kern = backend.kernels()
    return kern.clone_kernel(params.r1, params.d1, float(size_cap),
                             float(horizon), g2)
