"""Random matrix ensembles, row selection, and empirical RIP diagnostics."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from math import comb

import numpy as np

from . import rng
from .exceptions import DimensionError, ValidationError
from .linalg import as_matrix


class EnsembleKind(Enum):
    """Entry distributions normalized for isotropy: E||Ax||^2 = ||x||^2."""

    GAUSSIAN = "gaussian"     # i.i.d. N(0, 1/n)
    BERNOULLI = "bernoulli"   # i.i.d. +-1/sqrt(n) equiprobable

    @classmethod
    def parse(cls, name: str) -> "EnsembleKind":
        try:
            return cls(name.lower())
        except ValueError:
            raise ValidationError(
                f"unknown ensemble {name!r}; expected one of "
                f"{[k.value for k in cls]}"
            ) from None


def draw_ensemble(kind: EnsembleKind, l: int, n: int, seed: int,
                  path: tuple[int, ...] = ()) -> np.ndarray:
    """Draw an l x n matrix from the ensemble; bit-identical per (seed, path)."""
    if l < 1 or n < 1:
        raise DimensionError(f"ensemble dims must be >= 1, got {l}x{n}")
    g = rng.stream(seed, *path)
    if kind is EnsembleKind.GAUSSIAN:
        return g.standard_normal((l, n)) / np.sqrt(n)
    if kind is EnsembleKind.BERNOULLI:
        signs = g.integers(0, 2, size=(l, n)) * 2 - 1
        return signs / np.sqrt(n)
    raise ValidationError(f"unknown ensemble kind {kind!r}")


@dataclass(frozen=True)
class RowSelector:
    """Keeps ``m`` of ``l`` rows, in their original order."""

    m: int
    l: int
    indices: np.ndarray = field(repr=False)

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        if idx.shape != (self.m,):
            raise DimensionError(f"need {self.m} indices, got shape {idx.shape}")
        if self.m < 1 or self.m > self.l:
            raise DimensionError(f"need 1 <= m <= l, got m={self.m}, l={self.l}")
        if np.any(idx < 0) or np.any(idx >= self.l):
            raise ValidationError("row indices out of range")
        if np.any(np.diff(idx) <= 0):
            raise ValidationError("row indices must be strictly increasing")
        object.__setattr__(self, "indices", idx)

    def apply(self, M: np.ndarray) -> np.ndarray:
        """Select the chosen rows of ``M``."""
        if M.shape[0] != self.l:
            raise DimensionError(
                f"selector built for {self.l} rows, matrix has {M.shape[0]}"
            )
        return M[self.indices, :]

    def as_matrix(self) -> np.ndarray:
        """Dense m x l 0/1 selection matrix."""
        E = np.zeros((self.m, self.l))
        E[np.arange(self.m), self.indices] = 1.0
        return E


def full_selector(l: int) -> RowSelector:
    return RowSelector(m=l, l=l, indices=np.arange(l, dtype=np.int64))


def draw_row_selector(m: int, l: int, seed: int,
                      path: tuple[int, ...] = ()) -> RowSelector:
    """Uniform without-replacement choice of ``m`` of ``l`` rows, sorted."""
    if m > l:
        raise DimensionError(f"cannot select {m} of {l} rows")
    if m < 1:
        raise DimensionError(f"need m >= 1, got {m}")
    g = rng.stream(seed, *path)
    idx = np.sort(g.choice(l, size=m, replace=False))
    return RowSelector(m=m, l=l, indices=idx.astype(np.int64))


def support_rip_extreme(M: np.ndarray, support) -> float:
    """Exact RIP deviation on one support: max(s_max^2 - 1, 1 - s_min^2)."""
    sub = M[:, np.asarray(support, dtype=np.int64)]
    s = np.linalg.svd(sub, compute_uv=False)
    return float(max(s[0] ** 2 - 1.0, 1.0 - s[-1] ** 2))


EXHAUSTIVE_LIMIT = 10_000


def estimate_rip_delta(M, k: int, trials: int = 1000, seed: int = 0,
                       mode: str = "auto", supports=None) -> float:
    """Empirical RIP constant of order ``k`` for ``M``.

    When all ``C(cols, k)`` supports can be enumerated (at most
    ``EXHAUSTIVE_LIMIT``), every k-column submatrix's singular values are
    examined and the result is the exact delta_k. Otherwise random k-sparse
    unit vectors are sampled and the result is a lower bound. The sampled
    estimate evaluates nested trial sets for every sparsity level up to
    ``k``, so it is monotone non-decreasing in ``k`` at fixed seed.

    ``supports`` restricts either mode to the given list of supports
    (useful for cross-checking the two modes on common ground).
    """
    A = as_matrix(M, "M")
    n = A.shape[1]
    if k < 1 or k > n:
        raise DimensionError(f"need 1 <= k <= cols, got k={k}, cols={n}")
    if trials < 1:
        raise ValidationError(f"need trials >= 1, got {trials}")

    if supports is not None:
        supports = [np.asarray(s, dtype=np.int64) for s in supports]

    if mode == "auto":
        mode = "exact" if comb(n, k) <= EXHAUSTIVE_LIMIT else "sampled"
    if mode == "exact":
        if supports is None:
            if comb(n, k) > EXHAUSTIVE_LIMIT:
                raise ValidationError(
                    f"C({n},{k}) = {comb(n, k)} supports exceed the "
                    f"exhaustive limit {EXHAUSTIVE_LIMIT}"
                )
            supports = itertools.combinations(range(n), k)
        return max(support_rip_extreme(A, s) for s in supports)
    if mode != "sampled":
        raise ValidationError(f"unknown mode {mode!r}")

    delta = 0.0
    if supports is not None:
        for t in range(trials):
            g = rng.stream(seed, 1, t)
            for s in supports:
                v = g.standard_normal(len(s))
                v /= np.linalg.norm(v)
                delta = max(delta, abs(np.linalg.norm(A[:, s] @ v) ** 2 - 1.0))
        return float(delta)
    for j in range(1, k + 1):
        for t in range(trials):
            g = rng.stream(seed, j, t)
            s = g.choice(n, size=j, replace=False)
            v = g.standard_normal(j)
            v /= np.linalg.norm(v)
            delta = max(delta, abs(np.linalg.norm(A[:, s] @ v) ** 2 - 1.0))
    return float(delta)
