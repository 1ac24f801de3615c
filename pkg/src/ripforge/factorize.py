"""Dictionary factorizations D = G A H and the derived sensing systems.

Every construction returns an invertible ``G``, the ensemble matrix ``A``
and an orthonormal ``H`` with ``D = G @ A @ H``, so a row selection of
``G^{-1}`` acts on signals synthesized from ``D`` exactly as the same row
selection of ``A H`` acts on the coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ensembles import RowSelector
from .exceptions import (
    ConditioningError,
    DimensionError,
    RankError,
    TightFrameError,
    ValidationError,
)
from .linalg import (
    as_matrix,
    cond,
    fro,
    inv_via_svd,
    matrix_rank,
    pinv,
    range_basis,
    complete_to_invertible,
    sym_eig,
)

EXACT_RESIDUAL_TOL = 1e-8
MAX_COND_G = 1e12


@dataclass(frozen=True)
class Factorization:
    """Triple (G, A, H) with D = G A H, plus exactness diagnostics.

    residual    relative reconstruction error ||G A H - D||_F / ||D||_F
    orth_defect ||H H^T - I||_F
    cond_G      2-norm condition number of G
    """

    G: np.ndarray = field(repr=False)
    A: np.ndarray = field(repr=False)
    H: np.ndarray = field(repr=False)
    residual: float
    orth_defect: float
    cond_G: float


@dataclass(frozen=True)
class SensingSystem:
    """Sensing matrix S (selected rows of G^{-1}) composed with D."""

    S: np.ndarray = field(repr=False)
    D: np.ndarray = field(repr=False)
    composed: np.ndarray = field(repr=False)
    selector: RowSelector
    A: np.ndarray = field(repr=False)
    H: np.ndarray = field(repr=False)
    cond_G: float


def _check_pair(D, A):
    D = as_matrix(D, "D")
    A = as_matrix(A, "A")
    if D.shape != A.shape:
        raise DimensionError(f"D and A must share a shape, got {D.shape} vs {A.shape}")
    l, n = D.shape
    if l > n:
        raise DimensionError(f"need rows <= cols, got {l}x{n}")
    return D, A


def _check_ranks(D, A, rank_tol):
    rd = matrix_rank(D, rank_tol)
    ra = matrix_rank(A, rank_tol)
    if rd != ra:
        raise RankError(
            f"rank mismatch: rank(D) = {rd}, rank(A) = {ra}; no invertible-G, "
            "orthonormal-H factorization exists",
            rank_left=rd,
            rank_right=ra,
        )
    return rd


def _diagnostics(D, G, A, H) -> tuple[float, float, float]:
    n = H.shape[0]
    residual = fro(G @ A @ H - D) / max(fro(D), 1e-300)
    orth_defect = fro(H @ H.T - np.eye(n))
    return residual, orth_defect, cond(G)


def factor_spectral(D, A, rank_tol: float | None = None) -> Factorization:
    """Factorization through the spectral decompositions of DD^T and AA^T.

    Pairs both spectra in descending order, replaces the trailing zero
    eigenvalues (rank deficiency) by ones, and builds
    ``G = Q_D (S'_D / S'_A)^{1/2} Q_A^T`` so that ``G^{-1} D D^T G^{-T} = A A^T``
    and ``H = A^+ G^{-1} D + N_A N_D^T`` is orthonormal.

    Raises ``RankError`` (carrying both measured ranks) when rank(D) != rank(A).
    """
    D, A = _check_pair(D, A)
    l, n = D.shape
    r = _check_ranks(D, A, rank_tol)

    ed = sym_eig(D @ D.T)
    ea = sym_eig(A @ A.T)
    # descending order puts the rank-deficient zeros in trailing positions
    sd = ed.eigenvalues.copy()
    sa = ea.eigenvalues.copy()
    sd[r:] = 1.0
    sa[r:] = 1.0
    sd = np.maximum(sd, 1e-300)
    sa = np.maximum(sa, 1e-300)

    ratio = np.sqrt(sd / sa)
    G = (ed.Q * ratio) @ ea.Q.T            # D = G A H
    G_prop = (ea.Q * (1.0 / ratio)) @ ed.Q.T   # = G^{-1}; maps DD^T onto AA^T

    _, N_D = range_basis(D, rank_tol)
    _, N_A = range_basis(A, rank_tol)
    H = pinv(A, rank_tol) @ G_prop @ D + N_A @ N_D.T

    residual, orth_defect, cg = _diagnostics(D, G, A, H)
    return Factorization(G=G, A=A, H=H, residual=residual,
                         orth_defect=orth_defect, cond_G=cg)


def factor_range(D, A, rank_tol: float | None = None) -> Factorization:
    """Factorization from orthonormal row-space/nullspace bases.

    With ``[U N]`` the row-space/nullspace split of each matrix,
    ``G = ext(D U_D) ext(A U_A)^{-1}`` (completions to invertible square
    matrices) and ``H = U_A U_D^T + N_A N_D^T``; then ``G A U_A = D U_D``
    forces ``G A H = D``.
    """
    D, A = _check_pair(D, A)
    _check_ranks(D, A, rank_tol)

    U_D, N_D = range_basis(D, rank_tol)
    U_A, N_A = range_basis(A, rank_tol)
    ext_D = complete_to_invertible(D @ U_D, rank_tol)
    ext_A = complete_to_invertible(A @ U_A, rank_tol)
    G = np.linalg.solve(ext_A.T, ext_D.T).T
    H = U_A @ U_D.T + N_A @ N_D.T

    residual, orth_defect, cg = _diagnostics(D, G, A, H)
    return Factorization(G=G, A=A, H=H, residual=residual,
                         orth_defect=orth_defect, cond_G=cg)


def factor_tight_frame(D, A, O=None, tight_tol: float = 1e-6,
                       rank_tol: float | None = None) -> Factorization:
    """Factorization for a tight-frame dictionary (DD^T = I).

    ``G = O (A A^T)^{-1/2}`` for any orthonormal ``O`` (identity by default)
    and ``H = A^T G^T D + N_A N_D^T``. When ``A`` is itself a tight frame,
    ``G`` comes out orthonormal.

    Raises ``TightFrameError`` (reporting ||DD^T - I||_F) when ``D`` is not
    a tight frame within ``tight_tol * l``, and ``RankError`` when ``A`` is
    not full-rank.
    """
    D, A = _check_pair(D, A)
    l, n = D.shape
    defect = fro(D @ D.T - np.eye(l))
    if defect > tight_tol * l:
        raise TightFrameError(
            f"D is not a tight frame: ||D D^T - I||_F = {defect:.3e} "
            f"exceeds {tight_tol * l:.3e}",
            defect=defect,
        )
    if matrix_rank(A, rank_tol) != l:
        raise RankError(
            f"A must have full rank {l}, got {matrix_rank(A, rank_tol)}",
            rank_left=l,
            rank_right=matrix_rank(A, rank_tol),
        )
    if O is None:
        O = np.eye(l)
    else:
        O = as_matrix(O, "O")
        if O.shape != (l, l) or fro(O @ O.T - np.eye(l)) > 1e-8 * l:
            raise ValidationError("O must be an orthonormal l x l matrix")

    ea = sym_eig(A @ A.T)
    inv_sqrt = (ea.Q * (1.0 / np.sqrt(np.maximum(ea.eigenvalues, 1e-300)))) @ ea.Q.T
    G = O @ inv_sqrt

    _, N_D = range_basis(D, rank_tol)
    _, N_A = range_basis(A, rank_tol)
    H = A.T @ G.T @ D + N_A @ N_D.T

    residual, orth_defect, cg = _diagnostics(D, G, A, H)
    return Factorization(G=G, A=A, H=H, residual=residual,
                         orth_defect=orth_defect, cond_G=cg)


def build_sensing(fact: Factorization, D, selector: RowSelector,
                  max_cond: float = MAX_COND_G,
                  allow_ill_conditioned: bool = False) -> SensingSystem:
    """Sensing system S = (rows of G^{-1} kept by the selector), composed with D.

    The composed operator equals the same row selection of ``A H`` up to
    the factorization residual. ``G`` is inverted through its SVD; a
    condition number beyond ``max_cond`` raises ``ConditioningError``
    unless explicitly allowed (the condition number is always reported in
    the result).
    """
    D = as_matrix(D, "D")
    if fact.residual > 1e-6:
        raise ValidationError(
            f"factorization residual {fact.residual:.3e} too large to build "
            "a sensing system (limit 1e-6)"
        )
    if selector.l != D.shape[0]:
        raise DimensionError(
            f"selector expects {selector.l} rows, dictionary has {D.shape[0]}"
        )
    G_inv, cond_G = inv_via_svd(fact.G)
    if cond_G > max_cond and not allow_ill_conditioned:
        raise ConditioningError(
            f"cond(G) = {cond_G:.3e} exceeds {max_cond:.1e}; pass "
            "allow_ill_conditioned=True to proceed"
        )
    S = G_inv[selector.indices, :]
    return SensingSystem(S=S, D=D, composed=S @ D, selector=selector,
                         A=fact.A, H=fact.H, cond_G=cond_G)
