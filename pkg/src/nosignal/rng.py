"""Counter-addressed uniform draws.

Backed by Philox4x64-10 (numpy's ``Philox`` bit generator) keyed by the
seed. Every 64-bit output word has a fixed position in the stream, so
``uniforms(seed, start, count)`` returns the same numbers whether the
stream is read in one go or in independent chunks, e.g. one per worker.
Words become doubles in [0, 1) from their top 53 bits.
"""
from __future__ import annotations

import numpy as np

WORDS_PER_BLOCK = 4


def uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """Doubles at stream positions ``start .. start + count - 1``."""
    if seed < 0 or start < 0 or count < 0:
        raise ValueError("seed, start and count must be non-negative")
    block, skip = divmod(start, WORDS_PER_BLOCK)
    gen = np.random.Philox(key=seed, counter=block)
    words = gen.random_raw(skip + count)[skip:]
    return (words >> np.uint64(11)).astype(np.float64) * 2.0**-53


def position(bit_index: int, sample_index: int, samples_per_bit: int) -> int:
    """Stream position of sample ``sample_index`` of message bit ``bit_index``."""
    return bit_index * samples_per_bit + sample_index
