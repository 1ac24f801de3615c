"""Reproducible random streams.

Built on numpy's Philox counter-based generator. The 64-bit user seed goes
into the key; up to three stream indices occupy the high words of the
256-bit counter, so distinct streams are independent regardless of how many
values each draws, and parallel trial loops reproduce serial runs exactly.
"""

from __future__ import annotations

import numpy as np

from .exceptions import ValidationError

_KEY_SALT = 0x9E3779B97F4A7C15  # golden-ratio constant, distinguishes us from key=0 users

MAX_SEED = 2**64 - 1


def check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)):
        raise ValidationError(f"seed must be an integer, got {type(seed).__name__}")
    if not 0 <= int(seed) <= MAX_SEED:
        raise ValidationError(f"seed must fit in 64 bits, got {seed}")
    return int(seed)


def stream(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for ``seed`` and up to three stream indices."""
    seed = check_seed(seed)
    if len(path) > 3:
        raise ValidationError(f"at most 3 stream indices supported, got {len(path)}")
    counter = [0, 0, 0, 0]
    for i, p in enumerate(path):
        counter[i + 1] = int(p) % 2**64
    key = np.array([seed, _KEY_SALT], dtype=np.uint64)
    bitgen = np.random.Philox(counter=np.array(counter, dtype=np.uint64), key=key)
    return np.random.Generator(bitgen)
