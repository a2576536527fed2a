"""Krylov solvers: right-preconditioned GMRES and a CG baseline.

GMRES runs Arnoldi with modified Gram-Schmidt on the right-preconditioned
operator, a zero initial guess, and Givens rotations for the least-squares
update. With right preconditioning the recurrence residual estimates the
true residual of the original system, so the iteration stops on the
preconditioned-system criterion and a single true-residual check is reported
at the end. The preconditioned basis vectors are stored, which makes the
implementation valid for flexible (iteration-dependent) preconditioners as
well; the package only passes fixed linear operators.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .sparse import CsrMatrix

__all__ = ["SolveConfig", "SolveReport", "as_operator", "gmres", "cg_reference"]


@dataclass(frozen=True)
class SolveConfig:
    """Stopping criteria and bookkeeping for the Krylov solvers."""

    rel_tol: float = 1e-6
    max_iters: int = 500
    restart: int | None = None  # None = full (non-restarted) GMRES
    record_history: bool = True

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be at least 1, got {self.max_iters}")
        if self.restart is not None and self.restart < 1:
            raise ValueError(f"restart must be at least 1, got {self.restart}")


@dataclass
class SolveReport:
    """Outcome of one solve.

    ``residual_history`` holds relative residuals per accepted iteration
    (recurrence estimates for GMRES); ``true_residual`` is the explicitly
    recomputed relative residual of the returned solution.
    """

    converged: bool
    iterations: int
    residual_history: np.ndarray
    solution: np.ndarray
    true_residual: float
    setup_seconds: float = 0.0
    solve_seconds: float = 0.0


def as_operator(obj, n: int):
    """Coerce a matrix / preconditioner / callable into a matvec callable."""
    if obj is None:
        return lambda v: v.copy()
    if isinstance(obj, CsrMatrix):
        if obj.shape != (n, n):
            raise ValueError(f"operator shape {obj.shape} does not match system size {n}")
        mat = obj.to_scipy()
        return lambda v: mat @ v
    if hasattr(obj, "apply"):
        return obj.apply
    if callable(obj):
        return obj
    raise TypeError(f"cannot interpret {type(obj).__name__} as a linear operator")


def _solve_upper(r: np.ndarray, g: np.ndarray) -> np.ndarray:
    return scipy.linalg.solve_triangular(r, g, lower=False, check_finite=False)


def gmres(a, b: np.ndarray, m=None, cfg: SolveConfig | None = None) -> SolveReport:
    """Right-preconditioned GMRES with a zero initial guess.

    Parameters
    ----------
    a : CsrMatrix, callable or object with ``apply``
        The system operator; must be a fixed linear operator.
    b : ndarray
        Right-hand side.
    m : optional
        Right preconditioner, same duck typing as ``a``; identity if None.
    cfg : SolveConfig, optional

    Notes
    -----
    A happy breakdown (the Arnoldi residual vanishing) reports convergence
    with the exact solution of the current Krylov space. Non-convergence
    within ``max_iters`` returns the best iterate with ``converged=False``.
    """
    cfg = cfg or SolveConfig()
    b = np.asarray(b, dtype=np.float64)
    if not np.all(np.isfinite(b)):
        raise ValueError("gmres: right-hand side contains nonfinite entries")
    n = len(b)
    apply_a = as_operator(a, n)
    apply_m = as_operator(m, n)
    t0 = time.perf_counter()

    b_norm = np.linalg.norm(b)
    if b_norm == 0.0:
        return SolveReport(
            converged=True,
            iterations=0,
            residual_history=np.array([0.0]),
            solution=np.zeros(n),
            true_residual=0.0,
            solve_seconds=time.perf_counter() - t0,
        )

    x = np.zeros(n)
    history = [1.0]
    total_iters = 0
    converged = False
    cycle = cfg.max_iters if cfg.restart is None else cfg.restart

    while total_iters < cfg.max_iters and not converged:
        r = b - apply_a(x) if total_iters else b.copy()
        beta = np.linalg.norm(r)
        if beta / b_norm <= cfg.rel_tol:
            converged = True
            break
        steps = min(cycle, cfg.max_iters - total_iters)
        v = np.zeros((steps + 1, n))
        z = np.zeros((steps, n))
        h = np.zeros((steps + 1, steps))
        cs = np.zeros(steps)
        sn = np.zeros(steps)
        g = np.zeros(steps + 1)
        g[0] = beta
        v[0] = r / beta
        k_done = 0
        for k in range(steps):
            z[k] = apply_m(v[k])
            w = apply_a(z[k])
            for i in range(k + 1):  # modified Gram-Schmidt
                h[i, k] = v[i] @ w
                w -= h[i, k] * v[i]
            h[k + 1, k] = np.linalg.norm(w)
            breakdown = h[k + 1, k] <= 1e-14 * max(beta, np.abs(h[: k + 1, k]).max())
            if not breakdown:
                v[k + 1] = w / h[k + 1, k]
            for i in range(k):  # previously accumulated Givens rotations
                hi = cs[i] * h[i, k] + sn[i] * h[i + 1, k]
                h[i + 1, k] = -sn[i] * h[i, k] + cs[i] * h[i + 1, k]
                h[i, k] = hi
            denom = np.hypot(h[k, k], h[k + 1, k])
            cs[k] = h[k, k] / denom
            sn[k] = h[k + 1, k] / denom
            h[k, k] = denom
            h[k + 1, k] = 0.0
            g[k + 1] = -sn[k] * g[k]
            g[k] = cs[k] * g[k]
            k_done = k + 1
            total_iters += 1
            rel = np.abs(g[k + 1]) / b_norm
            history.append(rel)
            if rel <= cfg.rel_tol or breakdown:
                converged = rel <= cfg.rel_tol or breakdown
                break
        if k_done:
            y = _solve_upper(h[:k_done, :k_done], g[:k_done])
            x = x + z[:k_done].T @ y

    true_res = np.linalg.norm(b - apply_a(x)) / b_norm
    return SolveReport(
        converged=bool(converged),
        iterations=total_iters,
        residual_history=np.asarray(history if cfg.record_history else history[-1:]),
        solution=x,
        true_residual=float(true_res),
        solve_seconds=time.perf_counter() - t0,
    )


def cg_reference(a, b: np.ndarray, cfg: SolveConfig | None = None) -> SolveReport:
    """Unpreconditioned conjugate gradients, the baseline for iteration
    count comparisons. Expects a symmetric positive definite operator."""
    cfg = cfg or SolveConfig()
    b = np.asarray(b, dtype=np.float64)
    n = len(b)
    apply_a = as_operator(a, n)
    t0 = time.perf_counter()
    b_norm = np.linalg.norm(b)
    if b_norm == 0.0:
        return SolveReport(
            converged=True,
            iterations=0,
            residual_history=np.array([0.0]),
            solution=np.zeros(n),
            true_residual=0.0,
            solve_seconds=time.perf_counter() - t0,
        )
    x = np.zeros(n)
    r = b.copy()
    p = r.copy()
    rr = r @ r
    history = [1.0]
    converged = False
    iterations = 0
    for _ in range(cfg.max_iters):
        ap = apply_a(p)
        alpha = rr / (p @ ap)
        x += alpha * p
        r -= alpha * ap
        iterations += 1
        rel = np.linalg.norm(r) / b_norm
        history.append(rel)
        if rel <= cfg.rel_tol:
            converged = True
            break
        rr_new = r @ r
        p = r + (rr_new / rr) * p
        rr = rr_new
    true_res = np.linalg.norm(b - apply_a(x)) / b_norm
    return SolveReport(
        converged=converged,
        iterations=iterations,
        residual_history=np.asarray(history if cfg.record_history else history[-1:]),
        solution=x,
        true_residual=float(true_res),
        solve_seconds=time.perf_counter() - t0,
    )
