"""Image quality metrics: PSNR and SSIM."""

from __future__ import annotations

import math

import numpy as np

from .exceptions import DimensionError, ValidationError
from .linalg import as_matrix

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5


def psnr(ref, test, peak: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; ``inf`` for identical images."""
    R = as_matrix(ref, "ref")
    T = as_matrix(test, "test")
    if R.shape != T.shape:
        raise DimensionError(f"shape mismatch: {R.shape} vs {T.shape}")
    if peak <= 0:
        raise ValidationError(f"peak must be positive, got {peak}")
    mse = float(np.mean((R - T) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak ** 2 / mse)


def _gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    half = (size - 1) / 2.0
    x = np.arange(size) - half
    g = np.exp(-(x ** 2) / (2.0 * sigma ** 2))
    w = np.outer(g, g)
    return w / w.sum()


def _window_means(Z: np.ndarray, w: np.ndarray) -> np.ndarray:
    size = w.shape[0]
    view = np.lib.stride_tricks.sliding_window_view(Z, (size, size))
    return np.tensordot(view, w, axes=([2, 3], [0, 1]))


def ssim(ref, test, peak: float = 1.0) -> float:
    """Structural similarity: 11x11 Gaussian window (sigma 1.5), mean over windows.

    Stabilizers are C1 = (0.01 * peak)^2 and C2 = (0.03 * peak)^2.
    """
    R = as_matrix(ref, "ref")
    T = as_matrix(test, "test")
    if R.shape != T.shape:
        raise DimensionError(f"shape mismatch: {R.shape} vs {T.shape}")
    if peak <= 0:
        raise ValidationError(f"peak must be positive, got {peak}")
    if min(R.shape) < SSIM_WINDOW:
        raise DimensionError(
            f"images must be at least {SSIM_WINDOW}x{SSIM_WINDOW} for SSIM"
        )
    w = _gaussian_window()
    c1 = (0.01 * peak) ** 2
    c2 = (0.03 * peak) ** 2
    mu_r = _window_means(R, w)
    mu_t = _window_means(T, w)
    var_r = _window_means(R * R, w) - mu_r ** 2
    var_t = _window_means(T * T, w) - mu_t ** 2
    cov = _window_means(R * T, w) - mu_r * mu_t
    num = (2 * mu_r * mu_t + c1) * (2 * cov + c2)
    den = (mu_r ** 2 + mu_t ** 2 + c1) * (var_r + var_t + c2)
    return float(np.mean(num / den))
