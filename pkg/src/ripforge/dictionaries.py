"""Sparsifying dictionaries: shifted wavelet-atom banks, patch extraction,
OMP sparse coding, and K-SVD learning."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rng
from .exceptions import DimensionError, LevelError, ValidationError
from .linalg import as_matrix
from .wavelets import check_levels, wavelet_atom


@dataclass(frozen=True)
class WaveletDict:
    """Unit-norm dictionary with bookkeeping of wavelet-band columns.

    ``lowpass_cols``/``highpass_cols`` partition the wavelet-derived
    columns; any remaining columns are random completion atoms.
    """

    D: np.ndarray = field(repr=False)
    levels: int
    lowpass_cols: np.ndarray = field(repr=False)
    highpass_cols: np.ndarray = field(repr=False)

    @property
    def shape(self):
        return self.D.shape


@dataclass(frozen=True)
class PatchSet:
    """Vectorized zero-mean patches, one per column."""

    patches: np.ndarray = field(repr=False)
    patch_dims: tuple[int, int]
    stride: tuple[int, int]

    @property
    def count(self) -> int:
        return self.patches.shape[1]


@dataclass(frozen=True)
class CoeffGrid:
    """2-D transform coefficients with the highpass region marked."""

    X: np.ndarray = field(repr=False)
    highpass_mask: np.ndarray = field(repr=False)

    def highpass(self) -> np.ndarray:
        return self.X[self.highpass_mask]


def cdf97_dictionary(signal_len: int, levels: int, total_cols: int,
                     seed: int) -> WaveletDict:
    """Shift-invariant CDF 9/7 atom bank plus random completion columns.

    Levels 1..levels each contribute ``signal_len`` columns (the periodized
    synthesis wavelet at every circular shift); the remaining
    ``total_cols - levels*signal_len`` columns are i.i.d. Gaussian. All
    columns are normalized to unit Euclidean norm.
    """
    try:
        check_levels(signal_len, levels)
    except LevelError:
        raise LevelError(
            f"signal length {signal_len} does not admit {levels} periodic "
            f"wavelet levels"
        ) from None
    n_wav = levels * signal_len
    if total_cols < n_wav:
        raise DimensionError(
            f"total_cols = {total_cols} cannot hold {levels} levels x "
            f"{signal_len} shifts = {n_wav} wavelet columns"
        )
    cols = np.empty((signal_len, total_cols))
    j = 0
    for level in range(1, levels + 1):
        proto = wavelet_atom(signal_len, level, max_level=levels)
        for shift in range(signal_len):
            cols[:, j] = np.roll(proto, shift)
            j += 1
    if total_cols > n_wav:
        g = rng.stream(seed)
        cols[:, n_wav:] = g.standard_normal((signal_len, total_cols - n_wav))
    cols /= np.linalg.norm(cols, axis=0)
    return WaveletDict(
        D=cols,
        levels=levels,
        lowpass_cols=np.empty(0, dtype=np.int64),
        highpass_cols=np.arange(n_wav, dtype=np.int64),
    )


def extract_patches(image, patch_dims: tuple[int, int],
                    stride: tuple[int, int]) -> PatchSet:
    """All patches on the stride grid, vectorized and centered to zero mean."""
    Z = as_matrix(image, "image")
    h, w = patch_dims
    s1, s2 = stride
    H, W = Z.shape
    if h > H or w > W:
        raise DimensionError(f"patch {h}x{w} does not fit image {H}x{W}")
    if s1 < 1 or s2 < 1:
        raise ValidationError(f"stride must be >= 1, got {stride}")
    rows = (H - h) // s1 + 1
    cols = (W - w) // s2 + 1
    out = np.empty((h * w, rows * cols))
    k = 0
    for i in range(rows):
        for j in range(cols):
            p = Z[i * s1:i * s1 + h, j * s2:j * s2 + w].ravel()
            out[:, k] = p - p.mean()
            k += 1
    return PatchSet(patches=out, patch_dims=(h, w), stride=(s1, s2))


def omp(D, y, L: int, tol: float = 0.0) -> np.ndarray:
    """Orthogonal matching pursuit: greedy L-sparse code of ``y`` in ``D``.

    Stops at support size ``L`` or when the residual norm drops to ``tol``.
    The residual is orthogonal to the selected columns at every step.
    """
    D = as_matrix(D, "D")
    y = np.asarray(y, dtype=np.float64).ravel()
    m, n = D.shape
    if y.shape[0] != m:
        raise DimensionError(f"y has length {y.shape[0]}, dictionary rows {m}")
    if L < 1:
        raise ValidationError(f"need sparsity >= 1, got {L}")
    L = min(L, m, n)
    x = np.zeros(n)
    support: list[int] = []
    resid = y.copy()
    for _ in range(L):
        if np.linalg.norm(resid) <= tol:
            break
        corr = np.abs(D.T @ resid)
        corr[support] = -1.0
        j = int(np.argmax(corr))
        support.append(j)
        coef, *_ = np.linalg.lstsq(D[:, support], y, rcond=None)
        resid = y - D[:, support] @ coef
    if support:
        x[support] = coef
    return x


def _init_dictionary(patches: np.ndarray, K: int, g: np.random.Generator,
                     init=None) -> np.ndarray:
    m, P = patches.shape
    if init is not None:
        D0 = as_matrix(init, "init")
        if D0.shape != (m, K):
            raise DimensionError(f"init must be {m}x{K}, got {D0.shape}")
        D0 = D0.copy()
    else:
        picks = g.choice(P, size=K, replace=False)
        D0 = patches[:, picks].copy()
    norms = np.linalg.norm(D0, axis=0)
    for j in np.flatnonzero(norms < 1e-12):
        D0[:, j] = g.standard_normal(m)
    D0 /= np.linalg.norm(D0, axis=0)
    return D0


def ksvd_learn(patches: PatchSet, K: int, L: int, iters: int,
               error_goal: float, seed: int,
               init=None) -> tuple[np.ndarray, list[float]]:
    """K-SVD dictionary learning over a patch set.

    Alternates OMP sparse coding with per-atom rank-1 updates; atoms used by
    no patch are replaced with the currently worst-represented patch.
    Returns the learned unit-norm dictionary and the per-iteration mean
    squared representation error trace. Stops after ``iters`` iterations or
    once the mean patch error reaches ``error_goal``.
    """
    P = patches.patches
    m, n_patches = P.shape
    if n_patches == 0:
        raise ValidationError("empty patch set")
    if K > n_patches:
        raise ValidationError(f"K = {K} exceeds patch count {n_patches}")
    if L < 1:
        raise ValidationError(f"need sparsity >= 1, got {L}")
    g = rng.stream(seed)
    D = _init_dictionary(P, K, g, init)
    trace: list[float] = []
    for _ in range(iters):
        X = np.column_stack([omp(D, P[:, i], L, tol=np.sqrt(error_goal))
                             for i in range(n_patches)])
        R = P - D @ X
        err = float(np.mean(np.sum(R ** 2, axis=0)))
        trace.append(err)
        if err <= error_goal:
            break
        patch_err = np.sum(R ** 2, axis=0)
        for k in range(K):
            users = np.flatnonzero(X[k, :])
            if users.size == 0:
                worst = int(np.argmax(patch_err))
                atom = P[:, worst]
                nrm = np.linalg.norm(atom)
                D[:, k] = atom / nrm if nrm > 1e-12 else g.standard_normal(m)
                D[:, k] /= np.linalg.norm(D[:, k])
                continue
            E = R[:, users] + np.outer(D[:, k], X[k, users])
            U, s, Vt = np.linalg.svd(E, full_matrices=False)
            D[:, k] = U[:, 0]
            X[k, users] = s[0] * Vt[0]
            R[:, users] = E - np.outer(D[:, k], X[k, users])
    return D, trace
