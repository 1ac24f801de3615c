"""Dense real/complex matrix kernels and structured solvers.

Conventions used throughout the package:

* real matrices are C-contiguous float64 2-D arrays, complex ones complex128;
* constructors/validators reject NaN and Inf;
* eigenvalues and singular values are returned in descending order;
* the numerical-rank tolerance defaults to ``max(rows, cols) * eps * sigma_max``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DimensionError,
    SingularPencilError,
    SymmetryError,
    RankError,
    ValidationError,
)

EPS = np.finfo(np.float64).eps


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Validate and return ``M`` as a finite float64 2-D array."""
    A = np.asarray(M, dtype=np.float64)
    if A.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got ndim={A.ndim}")
    if not np.all(np.isfinite(A)):
        raise ValidationError(f"{name} contains non-finite entries")
    return np.ascontiguousarray(A)


def as_complex_matrix(M, name: str = "matrix") -> np.ndarray:
    """Validate and return ``M`` as a finite complex128 2-D array."""
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got ndim={A.ndim}")
    if not np.all(np.isfinite(A)):
        raise ValidationError(f"{name} contains non-finite entries")
    return np.ascontiguousarray(A)


def as_vector(v, name: str = "vector") -> np.ndarray:
    """Validate and return ``v`` as a finite float64 1-D array."""
    a = np.asarray(v, dtype=np.float64).ravel()
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} contains non-finite entries")
    return a


def fro(M) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(M))


def default_rank_tol(M: np.ndarray, smax: float) -> float:
    return max(M.shape) * EPS * smax


@dataclass(frozen=True)
class SpectralDecomp:
    """Orthonormal eigenbasis ``Q`` and eigenvalues of a symmetric matrix.

    Eigenvalues are sorted descending; ``M = Q @ diag(eigenvalues) @ Q.T``.
    """

    Q: np.ndarray
    eigenvalues: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.Q * self.eigenvalues) @ self.Q.T


def sym_eig(M, sym_tol: float = 1e-10) -> SpectralDecomp:
    """Spectral decomposition of a symmetric matrix.

    Raises ``DimensionError`` for non-square input and ``SymmetryError``
    when the asymmetry exceeds ``sym_tol * ||M||_F``.
    """
    A = as_matrix(M, "M")
    n, m = A.shape
    if n != m:
        raise DimensionError(f"sym_eig needs a square matrix, got {n}x{m}")
    scale = fro(A)
    if fro(A - A.T) > sym_tol * max(scale, 1.0):
        raise SymmetryError(
            f"matrix is not symmetric: ||M - M.T||_F = {fro(A - A.T):.3e}"
        )
    # eigh works on the symmetrized matrix so roundoff asymmetry cannot leak
    w, Q = np.linalg.eigh(0.5 * (A + A.T))
    order = np.argsort(w)[::-1]
    return SpectralDecomp(Q=np.ascontiguousarray(Q[:, order]), eigenvalues=w[order])


def svd(M) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full SVD. Returns ``(U, s, V)`` with ``M = U @ Sigma @ V.T``.

    ``U`` is rows x rows, ``V`` cols x cols, ``s`` descending and
    non-negative of length ``min(rows, cols)``.
    """
    A = as_matrix(M, "M")
    U, s, Vt = np.linalg.svd(A, full_matrices=True)
    return U, s, Vt.T


def matrix_rank(M, rank_tol: float | None = None) -> int:
    """Numerical rank via singular values above ``rank_tol``."""
    A = as_matrix(M, "M")
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0:
        return 0
    tol = default_rank_tol(A, s[0]) if rank_tol is None else rank_tol
    return int(np.count_nonzero(s > tol))


def cond(M) -> float:
    """2-norm condition number; ``inf`` for singular matrices."""
    s = np.linalg.svd(as_matrix(M, "M"), compute_uv=False)
    if s.size == 0 or s[-1] == 0.0:
        return float("inf")
    return float(s[0] / s[-1])


def pinv(M, rank_tol: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudo-inverse with explicit rank cutoff."""
    A = as_matrix(M, "M")
    U, s, V = svd(A)
    if s.size == 0:
        return A.T.copy()
    tol = default_rank_tol(A, s[0]) if rank_tol is None else rank_tol
    inv = np.where(s > tol, 1.0 / np.where(s > tol, s, 1.0), 0.0)
    r = len(s)
    return (V[:, :r] * inv) @ U[:, :r].T


def canonical_column_signs(B: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Flip column signs so the first significant entry of each is positive.

    Makes SVD-derived orthonormal bases reproducible across runs.
    """
    B = np.array(B, copy=True)
    for j in range(B.shape[1]):
        col = B[:, j]
        nz = np.flatnonzero(np.abs(col) > tol * max(np.abs(col).max(), 1e-300))
        if nz.size and col[nz[0]] < 0:
            B[:, j] = -col
    return B


def nullspace_basis(M, rank_tol: float | None = None) -> np.ndarray:
    """Orthonormal basis of the nullspace of ``M`` (cols x (cols - rank)).

    Columns carry a deterministic sign convention (first significant
    component positive). Full-rank square/tall input yields a 0-column basis.
    """
    A = as_matrix(M, "M")
    U, s, V = svd(A)
    smax = s[0] if s.size else 0.0
    tol = default_rank_tol(A, smax) if rank_tol is None else rank_tol
    r = int(np.count_nonzero(s > tol))
    N = V[:, r:]
    return canonical_column_signs(N)


def range_basis(M, rank_tol: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal bases ``(row_space, nullspace)`` of ``M`` from one SVD.

    Together the two blocks form an orthonormal cols x cols matrix. Both
    carry the deterministic sign convention.
    """
    A = as_matrix(M, "M")
    U, s, V = svd(A)
    smax = s[0] if s.size else 0.0
    tol = default_rank_tol(A, smax) if rank_tol is None else rank_tol
    r = int(np.count_nonzero(s > tol))
    Vc = canonical_column_signs(V)
    return Vc[:, :r], Vc[:, r:]


def complete_to_invertible(B, rank_tol: float | None = None) -> np.ndarray:
    """Append orthonormal columns to ``B`` to form an invertible square matrix.

    The first ``cols`` columns of the result are ``B`` itself (bit-equal);
    appended columns are orthonormal and orthogonal to range(B). Raises
    ``RankError`` when the columns of ``B`` are dependent.
    """
    A = as_matrix(B, "B")
    m, k = A.shape
    if m < k:
        raise DimensionError(f"need rows >= cols, got {m}x{k}")
    if k == 0:
        U = np.eye(m)
    else:
        U, s, _ = svd(A)
        tol = default_rank_tol(A, s[0] if s.size else 0.0) if rank_tol is None else rank_tol
        if s.size < k or s[-1] <= tol:
            raise RankError(
                f"columns of B are dependent (sigma_min = {s[-1] if s.size else 0.0:.3e})"
            )
    if m == k:
        return A.copy()
    tail = canonical_column_signs(U[:, k:])
    return np.hstack([A, tail])


def inv_via_svd(M, rank_tol: float | None = None) -> tuple[np.ndarray, float]:
    """Inverse of a square matrix through its SVD, plus the condition number.

    Raises ``RankError`` when a singular value falls at or below the rank
    tolerance.
    """
    A = as_matrix(M, "M")
    n, m = A.shape
    if n != m:
        raise DimensionError(f"need a square matrix, got {n}x{m}")
    U, s, V = svd(A)
    tol = default_rank_tol(A, s[0] if s.size else 0.0) if rank_tol is None else rank_tol
    if s.size == 0 or s[-1] <= tol:
        raise RankError(f"matrix is numerically singular (sigma_min = {s[-1]:.3e})")
    return (V / s) @ U.T, float(s[0] / s[-1])


def dft_matrix(n: int) -> np.ndarray:
    """Unitary, symmetric DFT matrix: entry (j, k) = exp(-2*pi*i*j*k/n)/sqrt(n)."""
    if n < 1:
        raise DimensionError(f"DFT size must be >= 1, got {n}")
    j = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(j, j) / n) / np.sqrt(n)


def is_symmetric(M: np.ndarray, tol: float = 1e-10) -> bool:
    return M.shape[0] == M.shape[1] and fro(M - M.T) <= tol * max(fro(M), 1.0)


def _check_sylvester_shapes(P, Q, C):
    P = as_matrix(P, "P")
    Q = as_matrix(Q, "Q")
    C = as_matrix(C, "C")
    p = P.shape[0]
    q = Q.shape[0]
    if P.shape != (p, p) or Q.shape != (q, q):
        raise DimensionError("P and Q must be square")
    if C.shape != (p, q):
        raise DimensionError(
            f"C must be {p}x{q} to match P ({p}x{p}) and Q ({q}x{q}), got {C.shape}"
        )
    return P, Q, C


def _sylvester_spectral(P, Q, C, tol):
    ep = sym_eig(P)
    eq = sym_eig(Q)
    lam = ep.eigenvalues
    mu = eq.eigenvalues
    denom = lam[:, None] + mu[None, :]
    scale = max(np.abs(lam).max(initial=0.0), np.abs(mu).max(initial=0.0), 1.0)
    if np.abs(denom).min() <= tol * scale:
        raise SingularPencilError(
            "spectra of P and -Q overlap: min |lambda_i + mu_j| = "
            f"{np.abs(denom).min():.3e}"
        )
    Ct = ep.Q.T @ (-C) @ eq.Q
    return ep.Q @ (Ct / denom) @ eq.Q.T


def _sylvester_krylov(P, Q, C, tol, max_iters=None):
    # CG on the normal equations of the matrix-free operator X -> PX + XQ.
    lam = np.linalg.eigvals(P)
    mu = np.linalg.eigvals(Q)
    pair = np.abs(lam[:, None] + mu[None, :])
    scale = max(np.abs(lam).max(initial=0.0), np.abs(mu).max(initial=0.0), 1.0)
    if pair.min() <= 1e-12 * scale:
        raise SingularPencilError(
            f"spectra of P and -Q overlap: min |lambda_i + mu_j| = {pair.min():.3e}"
        )

    def op(X):
        return P @ X + X @ Q

    def op_t(Y):
        return P.T @ Y + Y @ Q.T

    target = -C
    X = np.zeros_like(C)
    R = op_t(target)          # residual of the normal equations
    Dir = R.copy()
    rs = np.vdot(R, R).real
    coeff_scale = fro(P) + fro(Q)
    if max_iters is None:
        max_iters = 200 * max(C.size, 1)
    for _ in range(max_iters):
        resid = op(X) - target
        if fro(resid) <= tol * (coeff_scale * fro(X) + fro(C)) + 1e-300:
            break
        AD = op_t(op(Dir))
        alpha = rs / max(np.vdot(Dir, AD).real, 1e-300)
        X = X + alpha * Dir
        R = R - alpha * AD
        rs_new = np.vdot(R, R).real
        Dir = R + (rs_new / max(rs, 1e-300)) * Dir
        rs = rs_new
    return X


def solve_sylvester(P, Q, C, method: str = "auto", tol: float = 1e-10) -> np.ndarray:
    """Solve ``P X + X Q + C = 0`` for ``X``.

    method
        ``"spectral"``: diagonalize symmetric ``P`` and ``Q`` and solve
        entrywise (exact). ``"krylov"``: conjugate gradient on the normal
        equations of the matrix-free operator, for general coefficients.
        ``"auto"`` picks spectral when both coefficients are symmetric.

    Raises ``SingularPencilError`` when an eigenvalue of ``P`` coincides
    with an eigenvalue of ``-Q`` within tolerance.
    """
    P, Q, C = _check_sylvester_shapes(P, Q, C)
    if method == "auto":
        method = "spectral" if is_symmetric(P) and is_symmetric(Q) else "krylov"
    if method == "spectral":
        return _sylvester_spectral(P, Q, C, tol)
    if method == "krylov":
        return _sylvester_krylov(P, Q, C, tol)
    raise ValidationError(f"unknown Sylvester method {method!r}")


def sylvester_residual(P, Q, C, X) -> float:
    """Frobenius norm of ``P X + X Q + C``."""
    return fro(P @ X + X @ Q + C)
