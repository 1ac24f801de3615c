"""Sparse recovery solvers: CoSaMP, highpass-weighted FISTA, and a
total-variation baseline for masked Fourier measurements."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .dictionaries import CoeffGrid
from .exceptions import DimensionError, NumericalError, ValidationError
from .factorize import SensingSystem
from .linalg import as_complex_matrix, as_matrix, fro


@dataclass(frozen=True)
class SparseRecoveryConfig:
    """Target sparsity plus iteration/halting controls."""

    k: int
    max_iters: int = 50
    halt_tol: float | None = None   # defaults to 1e-6 * ||z||

    def __post_init__(self):
        if self.k < 1:
            raise ValidationError(f"need k >= 1, got {self.k}")
        if self.max_iters < 1:
            raise ValidationError(f"need max_iters >= 1, got {self.max_iters}")


@dataclass
class RecoveryResult:
    """Solver output: the estimate plus its convergence record."""

    estimate: object
    residual_trace: list[float]
    iterations: int
    converged: bool
    objective_trace: list[float] | None = None


def cosamp(Phi, z, cfg: SparseRecoveryConfig) -> RecoveryResult:
    """Compressive sampling matching pursuit.

    Each iteration correlates the residual with the columns of ``Phi``,
    merges the 2k strongest indices into the current support, solves least
    squares on the merged support (pseudo-inverse handles rank deficiency),
    and prunes back to the k largest coefficients.
    """
    Phi = as_matrix(Phi, "Phi")
    z = np.asarray(z, dtype=np.float64).ravel()
    m, n = Phi.shape
    if z.shape[0] != m:
        raise DimensionError(f"z has length {z.shape[0]}, Phi has {m} rows")
    k = cfg.k
    if k > m / 3:
        warnings.warn(
            f"sparsity k={k} above m/3={m / 3:.1f}; recovery may be unreliable",
            stacklevel=2,
        )
    halt = cfg.halt_tol if cfg.halt_tol is not None else 1e-6 * np.linalg.norm(z)

    x = np.zeros(n)
    support = np.empty(0, dtype=np.int64)
    resid = z.copy()
    trace: list[float] = []
    converged = False
    iterations = 0
    for _ in range(cfg.max_iters):
        iterations += 1
        proxy = np.abs(Phi.T @ resid)
        top = np.argpartition(proxy, -min(2 * k, n))[-min(2 * k, n):]
        merged = np.union1d(support, top)
        sol, *_ = np.linalg.lstsq(Phi[:, merged], z, rcond=None)
        keep = np.argsort(np.abs(sol))[-k:]
        support = np.sort(merged[keep])
        x = np.zeros(n)
        x[support] = sol[keep]
        resid = z - Phi @ x
        trace.append(float(np.linalg.norm(resid)))
        if trace[-1] <= halt:
            converged = True
            break
    return RecoveryResult(estimate=x, residual_trace=trace,
                          iterations=iterations, converged=converged)


def recover_synthesis(system: SensingSystem, z,
                      cfg: SparseRecoveryConfig) -> RecoveryResult:
    """CoSaMP through the composed operator of a sensing system."""
    return cosamp(system.composed, z, cfg)


@dataclass(frozen=True)
class LinOp2D:
    """Two-sided matrix operator ``X -> left @ X @ right.T``."""

    left: np.ndarray = field(repr=False)
    right: np.ndarray = field(repr=False)

    def apply(self, X: np.ndarray) -> np.ndarray:
        return self.left @ X @ self.right.T

    def adjoint(self, Y: np.ndarray) -> np.ndarray:
        return self.left.T @ Y @ self.right


def adjoint_mismatch(op: LinOp2D, in_shape: tuple[int, int],
                     probes: int = 10, seed: int = 0) -> float:
    """Largest relative defect of <op(X), Y> = <X, op*(Y)> over random probes."""
    g = rng.stream(seed)
    out_shape = (op.left.shape[0], op.right.shape[0])
    worst = 0.0
    for _ in range(probes):
        X = g.standard_normal(in_shape)
        Y = g.standard_normal(out_shape)
        a = float(np.sum(op.apply(X) * Y))
        b = float(np.sum(X * op.adjoint(Y)))
        worst = max(worst, abs(a - b) / max(abs(a), abs(b), 1e-300))
    return worst


@dataclass(frozen=True)
class ComplexSplitOp:
    """Real and imaginary measurement channels acting on a real array.

    The data fidelity of a measurement pair ``(Y_re, Y_im)`` is the sum of
    both channels' squared Frobenius residuals.
    """

    real_part: LinOp2D
    imag_part: LinOp2D

    def apply(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self.real_part.apply(X), self.imag_part.apply(X)

    def adjoint(self, Yr: np.ndarray, Yi: np.ndarray) -> np.ndarray:
        return self.real_part.adjoint(Yr) + self.imag_part.adjoint(Yi)

    def fidelity(self, X, Yr, Yi) -> float:
        Rr = self.real_part.apply(X) - Yr
        Ri = self.imag_part.apply(X) - Yi
        return 0.5 * (fro(Rr) ** 2 + fro(Ri) ** 2)

    def fidelity_grad(self, X, Yr, Yi) -> np.ndarray:
        Rr = self.real_part.apply(X) - Yr
        Ri = self.imag_part.apply(X) - Yi
        return self.real_part.adjoint(Rr) + self.imag_part.adjoint(Ri)


def operator_step_bound(op: ComplexSplitOp, in_shape: tuple[int, int],
                        iters: int = 60, seed: int = 0) -> float:
    """Power-iteration estimate of the squared spectral norm of the stacked
    channels (the Lipschitz constant of the fidelity gradient)."""
    g = rng.stream(seed)
    X = g.standard_normal(in_shape)
    X /= fro(X)
    lam = 1.0
    for _ in range(iters):
        Yr, Yi = op.apply(X)
        Z = op.adjoint(Yr, Yi)
        lam = fro(Z)
        if lam < 1e-300:
            return 1e-300
        X = Z / lam
    return float(lam)


def soft_threshold(X: np.ndarray, t: float) -> np.ndarray:
    return np.sign(X) * np.maximum(np.abs(X) - t, 0.0)


def fista_weighted_l1(op: ComplexSplitOp, Ytilde, gamma: float,
                      highpass_mask, max_iters: int = 500,
                      tol: float = 1e-8, x0=None) -> RecoveryResult:
    """Minimize fidelity(X) + gamma * ||highpass(X)||_1 by accelerated
    proximal gradient.

    Only entries under ``highpass_mask`` are soft-thresholded; the
    approximation band is driven by the fidelity gradient alone. Momentum
    restarts whenever the objective increases, keeping the objective trace
    non-increasing. Returns a ``RecoveryResult`` whose estimate is a
    ``CoeffGrid``; ``residual_trace`` holds the per-iteration fidelity and
    ``objective_trace`` the full objective.
    """
    Yc = as_complex_matrix(Ytilde, "Ytilde")
    Yr, Yi = Yc.real.copy(), Yc.imag.copy()
    mask = np.asarray(highpass_mask, dtype=bool)
    if gamma < 0:
        raise ValidationError(f"gamma must be >= 0, got {gamma}")
    in_shape = (op.real_part.left.shape[1], op.real_part.right.shape[1])
    if mask.shape != in_shape:
        raise DimensionError(
            f"highpass mask shape {mask.shape} does not match coefficient "
            f"shape {in_shape}"
        )

    L = operator_step_bound(op, in_shape)
    step = 1.0 / max(L, 1e-300)

    def objective(X):
        return op.fidelity(X, Yr, Yi) + gamma * np.abs(X[mask]).sum()

    X = np.zeros(in_shape) if x0 is None else as_matrix(x0, "x0").copy()
    Xprev = X.copy()
    Ymom = X.copy()
    t_mom = 1.0
    fid_trace: list[float] = []
    obj_trace: list[float] = []
    best = objective(X)
    converged = False
    iterations = 0
    backtracks = 0
    for _ in range(max_iters):
        iterations += 1
        grad = op.fidelity_grad(Ymom, Yr, Yi)
        Xnew = Ymom - step * grad
        if gamma > 0:
            Xnew[mask] = soft_threshold(Xnew[mask], gamma * step)
        obj = objective(Xnew)
        if not np.isfinite(obj):
            backtracks += 1
            if backtracks > 20:
                raise NumericalError(
                    "objective became non-finite and backtracking failed "
                    f"(step = {step:.3e})"
                )
            step *= 0.5
            Ymom = X.copy()
            t_mom = 1.0
            continue
        if obj > best + 1e-12 * max(abs(best), 1.0):
            # momentum overshoot: restart from the last accepted iterate
            Ymom = X.copy()
            t_mom = 1.0
            grad = op.fidelity_grad(Ymom, Yr, Yi)
            Xnew = Ymom - step * grad
            if gamma > 0:
                Xnew[mask] = soft_threshold(Xnew[mask], gamma * step)
            obj = objective(Xnew)
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_mom ** 2))
        Ymom = Xnew + ((t_mom - 1.0) / t_next) * (Xnew - Xprev)
        Xprev = X
        X = Xnew
        t_mom = t_next
        fid_trace.append(op.fidelity(X, Yr, Yi))
        obj_trace.append(min(obj, best))
        if abs(best - obj) <= tol * max(abs(best), 1e-12) and iterations > 1:
            best = min(best, obj)
            converged = True
            break
        best = min(best, obj)
    grid = CoeffGrid(X=X, highpass_mask=mask)
    return RecoveryResult(estimate=grid, residual_trace=fid_trace,
                          iterations=iterations, converged=converged,
                          objective_trace=obj_trace)


def _grad2d(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    gx = np.zeros_like(u)
    gy = np.zeros_like(u)
    gx[:-1, :] = u[1:, :] - u[:-1, :]
    gy[:, :-1] = u[:, 1:] - u[:, :-1]
    return gx, gy


def _div2d(px: np.ndarray, py: np.ndarray) -> np.ndarray:
    d = np.zeros_like(px)
    d[0, :] = px[0, :]
    d[1:-1, :] = px[1:-1, :] - px[:-2, :]
    d[-1, :] = -px[-2, :]
    d[:, 0] += py[:, 0]
    d[:, 1:-1] += py[:, 1:-1] - py[:, :-2]
    d[:, -1] += -py[:, -2]
    return d


def tv_norm(u: np.ndarray) -> float:
    """Isotropic total variation (forward differences, Neumann boundary)."""
    gx, gy = _grad2d(u)
    return float(np.sum(np.sqrt(gx ** 2 + gy ** 2)))


def tv_prox(v: np.ndarray, tau: float, iters: int = 20) -> np.ndarray:
    """Proximal map of ``tau * TV`` via dual projection iterations."""
    if tau <= 0:
        return v.copy()
    px = np.zeros_like(v)
    py = np.zeros_like(v)
    sigma = 0.125
    for _ in range(iters):
        u = _div2d(px, py) - v / tau
        gx, gy = _grad2d(u)
        mag = np.sqrt(gx ** 2 + gy ** 2)
        denom = 1.0 + sigma * mag
        px = (px + sigma * gx) / denom
        py = (py + sigma * gy) / denom
    return v - tau * _div2d(px, py)


def tv_reconstruct(Y, row_mask, F1, F2, lam: float, max_iters: int = 150,
                   tol: float = 1e-7, inner_iters: int = 20) -> RecoveryResult:
    """Total-variation reconstruction from masked 2-D Fourier data.

    Approximately minimizes ``||R(F1 Z F2) - Y||_F^2 + lam * TV(Z)`` over
    real images ``Z`` by proximal gradient with an inner dual TV prox. With
    ``lam = 0`` and a full mask the first step inverts the transform
    exactly.
    """
    Yc = as_complex_matrix(Y, "Y")
    F1 = as_complex_matrix(F1, "F1")
    F2 = as_complex_matrix(F2, "F2")
    sel = np.asarray(row_mask, dtype=bool).ravel()
    n1, n2 = Yc.shape
    if sel.shape[0] != n1:
        raise DimensionError(f"row mask length {sel.shape[0]} != {n1} rows")
    if lam < 0:
        raise ValidationError(f"lam must be >= 0, got {lam}")
    Ysel = Yc.copy()
    Ysel[~sel, :] = 0.0
    F1c = F1.conj()
    F2c = F2.conj()

    def fidelity(Z):
        R = F1 @ Z @ F2
        R[~sel, :] = 0.0
        return float(np.sum(np.abs(R - Ysel) ** 2))

    def grad(Z):
        R = F1 @ Z @ F2
        R[~sel, :] = 0.0
        return 2.0 * (F1c @ (R - Ysel) @ F2c).real

    def objective(Z):
        return fidelity(Z) + lam * tv_norm(Z)

    step = 0.5  # gradient is 2-Lipschitz for unitary transforms
    Z = np.zeros((n1, n2))
    obj = objective(Z)
    fid_trace: list[float] = []
    obj_trace: list[float] = []
    converged = False
    iterations = 0
    for _ in range(max_iters):
        iterations += 1
        W = Z - step * grad(Z)
        Znew = tv_prox(W, step * lam, inner_iters) if lam > 0 else W
        obj_new = objective(Znew)
        if obj_new > obj + 1e-12 * max(abs(obj), 1.0):
            # inexact prox overshoot: shrink the step and retry once
            step *= 0.5
            W = Z - step * grad(Z)
            Znew = tv_prox(W, step * lam, inner_iters) if lam > 0 else W
            obj_new = objective(Znew)
            if obj_new > obj:
                fid_trace.append(fidelity(Z))
                obj_trace.append(obj)
                converged = True
                break
        Z = Znew
        fid_trace.append(fidelity(Z))
        obj_trace.append(min(obj_new, obj))
        if abs(obj - obj_new) <= tol * max(abs(obj), 1e-12):
            obj = obj_new
            converged = True
            break
        obj = obj_new
    return RecoveryResult(estimate=Z, residual_trace=fid_trace,
                          iterations=iterations, converged=converged,
                          objective_trace=obj_trace)
