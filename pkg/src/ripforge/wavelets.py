"""CDF 9/7 biorthogonal wavelet transforms (periodic, lifting implementation).

Multi-level layouts follow the decimated Mallat convention: 1-D vectors are
``[approx_L | detail_L | ... | detail_1]``; 2-D arrays keep the coarse
approximation in the top-left ``(n1/2^L) x (n2/2^L)`` block.
"""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionError, LevelError

# lifting coefficients of the 9/7 filter pair
ALPHA = -1.586134342059924
BETA = -0.052980118572961
GAMMA = 0.882911075530934
DELTA = 0.443506852043971
KAPPA = 1.1496043988602418


def _analyze_axis0(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One periodic lifting level along axis 0 (length must be even)."""
    s = a[0::2].astype(np.float64, copy=True)
    d = a[1::2].astype(np.float64, copy=True)
    d += ALPHA * (s + np.roll(s, -1, axis=0))
    s += BETA * (d + np.roll(d, 1, axis=0))
    d += GAMMA * (s + np.roll(s, -1, axis=0))
    s += DELTA * (d + np.roll(d, 1, axis=0))
    s *= KAPPA
    d /= KAPPA
    return s, d


def _synthesize_axis0(s: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Invert one lifting level along axis 0."""
    s = s.astype(np.float64, copy=True)
    d = d.astype(np.float64, copy=True)
    s /= KAPPA
    d *= KAPPA
    s -= DELTA * (d + np.roll(d, 1, axis=0))
    d -= GAMMA * (s + np.roll(s, -1, axis=0))
    s -= BETA * (d + np.roll(d, 1, axis=0))
    d -= ALPHA * (s + np.roll(s, -1, axis=0))
    out = np.empty((s.shape[0] + d.shape[0],) + s.shape[1:], dtype=np.float64)
    out[0::2] = s
    out[1::2] = d
    return out


def check_levels(length: int, levels: int, what: str = "signal") -> None:
    if levels < 1:
        raise LevelError(f"need levels >= 1, got {levels}")
    if length < 2 ** levels or length % 2 ** levels != 0:
        raise LevelError(
            f"{what} length {length} does not support {levels} levels "
            f"(must be a positive multiple of {2 ** levels})"
        )


def analyze_1d(x: np.ndarray, levels: int) -> np.ndarray:
    """Multi-level periodic analysis of a 1-D signal (or a batch along axis 0)."""
    x = np.asarray(x, dtype=np.float64)
    check_levels(x.shape[0], levels)
    out = x.copy()
    n = x.shape[0]
    for _ in range(levels):
        s, d = _analyze_axis0(out[:n])
        out[:n // 2] = s
        out[n // 2:n] = d
        n //= 2
    return out


def synthesize_1d(c: np.ndarray, levels: int) -> np.ndarray:
    """Invert ``analyze_1d``."""
    c = np.asarray(c, dtype=np.float64)
    check_levels(c.shape[0], levels)
    out = c.copy()
    n = c.shape[0] >> levels
    for _ in range(levels):
        out[:2 * n] = _synthesize_axis0(out[:n], out[n:2 * n])
        n *= 2
    return out


def analyze_2d(Z: np.ndarray, levels: int) -> np.ndarray:
    """Separable bivariate analysis: the full multi-level 1-D transform
    applied along each axis (tensor-product decomposition).

    Equals ``W1 @ Z @ W2.T`` for the dense 1-D analysis matrices, so images
    factor as ``Z = D1 @ X @ D2.T`` with ``D_i`` the synthesis matrices.
    """
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim != 2:
        raise DimensionError(f"need a 2-D array, got ndim={Z.ndim}")
    check_levels(Z.shape[0], levels, "row")
    check_levels(Z.shape[1], levels, "column")
    return analyze_1d(analyze_1d(Z, levels).T, levels).T


def synthesize_2d(X: np.ndarray, levels: int) -> np.ndarray:
    """Invert ``analyze_2d``."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionError(f"need a 2-D array, got ndim={X.ndim}")
    check_levels(X.shape[0], levels, "row")
    check_levels(X.shape[1], levels, "column")
    return synthesize_1d(synthesize_1d(X, levels).T, levels).T


def wavelet_2d(image: np.ndarray, levels: int, direction: str) -> np.ndarray:
    """Separable 2-D transform; ``direction`` is ``"analyze"`` or ``"synthesize"``."""
    if direction == "analyze":
        return analyze_2d(image, levels)
    if direction == "synthesize":
        return synthesize_2d(image, levels)
    raise ValueError(f"direction must be 'analyze' or 'synthesize', got {direction!r}")


def synthesis_matrix_1d(n: int, levels: int) -> np.ndarray:
    """Dense n x n synthesis matrix: signal = matrix @ coefficients."""
    check_levels(n, levels)
    return synthesize_1d(np.eye(n), levels)


def wavelet_atom(signal_len: int, level: int, max_level: int | None = None) -> np.ndarray:
    """Periodized synthesis wavelet atom of one level, positioned at the origin.

    The atom is the inverse transform of a unit impulse placed at the start
    of the requested detail band.
    """
    if max_level is None:
        max_level = level
    check_levels(signal_len, max_level)
    if not 1 <= level <= max_level:
        raise LevelError(f"level {level} outside 1..{max_level}")
    coeffs = np.zeros(signal_len)
    # detail band of `level` occupies [n/2^level, n/2^(level-1))
    coeffs[signal_len >> level] = 1.0
    return synthesize_1d(coeffs, max_level)


def highpass_mask_1d(n: int, levels: int) -> np.ndarray:
    """True on detail coefficients, False on the coarse approximation band."""
    check_levels(n, levels)
    mask = np.ones(n, dtype=bool)
    mask[: n >> levels] = False
    return mask


def highpass_mask_2d(n1: int, n2: int, levels: int) -> np.ndarray:
    """True everywhere except the top-left approximation block."""
    check_levels(n1, levels, "row")
    check_levels(n2, levels, "column")
    mask = np.ones((n1, n2), dtype=bool)
    mask[: n1 >> levels, : n2 >> levels] = False
    return mask
