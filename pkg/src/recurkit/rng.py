"""Reproducible random-number streams.

Every replicate of every ensemble draws from counter-based Philox streams
keyed by ``(master_seed, replicate_index, stream_tag)``.  The three stream
tags separate the randomness of the sensitive population, the mutation
arrivals, and the resistant dynamics, so the sensitive trajectory is a
function of its own stream alone: simulating with the mutation rate zeroed
out reproduces the sensitive path bit for bit.
"""
from __future__ import annotations

import numpy as np

STREAM_SENSITIVE = 0
STREAM_MUTATION = 1
STREAM_RESISTANT = 2


def stream(master_seed: int, replicate: int, tag: int) -> np.random.Generator:
    """One independent generator for (seed, replicate, tag)."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(replicate, tag))
    return np.random.Generator(np.random.Philox(ss))


def replicate_streams(master_seed: int, replicate: int):
    """The (sensitive, mutation, resistant) generator triple for one replicate."""
    return (
        stream(master_seed, replicate, STREAM_SENSITIVE),
        stream(master_seed, replicate, STREAM_MUTATION),
        stream(master_seed, replicate, STREAM_RESISTANT),
    )


def replicate_fingerprint(master_seed: int, replicate: int) -> int:
    """Stable 64-bit identifier recorded alongside each replicate's marks."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(replicate,))
    return int(ss.generate_state(2, dtype=np.uint32).view(np.uint64)[0])
