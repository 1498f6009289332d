"""Seeded, labeled random streams.

All randomness in the package flows through numpy's PCG64 generator.  A
stream is addressed by ``(seed, label)``: the label is a stable string per
subsystem (e.g. ``"gen/planted"``, ``"solve/small"``), hashed with SHA-256
into the seed sequence's spawn key.  The same (seed, label) pair always
yields the same stream, independent of call order elsewhere.
"""

from __future__ import annotations

import hashlib

import numpy as np


def stream(seed: int, label: str) -> np.random.Generator:
    """Return the PCG64 generator addressed by (seed, label)."""
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    key = tuple(int.from_bytes(digest[i : i + 4], "big") for i in range(0, 16, 4))
    ss = np.random.SeedSequence(entropy=int(seed) & (2**63 - 1), spawn_key=key)
    return np.random.Generator(np.random.PCG64(ss))


def substream(seed: int, label: str, index: int) -> np.random.Generator:
    """Per-trial stream: (seed, label, trial-index) -> independent generator."""
    return stream(seed, f"{label}#{index}")
