"""Counter-based random streams.

Every stochastic component draws from ``stream(seed, index)`` where ``index``
identifies the component (tree number, bootstrap round, ...).  Streams are
independent of how many other streams exist, so growing a forest from 25 to
200 trees reuses the first 25 trees bit for bit.
"""

from __future__ import annotations

import numpy as np

__all__ = ["stream"]


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Generator for substream ``index`` of ``seed``, stable across ensemble sizes."""
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(index,))
    return np.random.Generator(np.random.Philox(seq))
