"""Jacobian-free inexact Newton-Krylov solver with Armijo backtracking.

Operates on plain numpy arrays of any shape (a director state passes its
(3, N1, N2, N3) data); the residual callback must map an array to an array
of the same shape.  The Jacobian is never formed: Jacobian-vector products
are one-sided finite differences of the residual, and the linear solves use
restarted GMRES to a loose forcing tolerance.

Norms are RMS (2-norm divided by sqrt of the entry count), so tolerances
are grid-size independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class SolverFailure(RuntimeError):
    """Raised by callers that require convergence; carries the stats."""

    def __init__(self, message: str, stats: "SolveStats"):
        super().__init__(message)
        self.stats = stats


@dataclass
class SolverConfig:
    abs_tol: float = 1e-8            # RMS residual stopping tolerance
    max_newton_iters: int = 50
    krylov_restart: int = 30
    krylov_max_iters: int = 200
    forcing_eta: float = 1e-3        # fixed linear-solve relative tolerance
    eisenstat_walker: bool = False   # adapt the forcing term instead
    armijo_c: float = 1e-4
    backtrack_factor: float = 0.5
    max_backtracks: int = 10
    jfnk_eps_scale: float = float(np.sqrt(np.finfo(float).eps))

    def __post_init__(self):
        if self.abs_tol <= 0:
            raise ValueError("abs_tol must be > 0")
        if not 0 < self.backtrack_factor < 1:
            raise ValueError("backtrack_factor must lie in (0, 1)")
        if not 0 < self.armijo_c < 1:
            raise ValueError("armijo_c must lie in (0, 1)")


@dataclass
class SolveStats:
    newton_iters: int = 0
    krylov_iters_total: int = 0
    function_evals: int = 0
    final_residual_norm: float = float("inf")
    converged: bool = False
    line_search_warnings: int = 0
    diverged: bool = False


def rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.square(x))))


def jfnk_matvec(residual, u: np.ndarray, r_u: np.ndarray, v: np.ndarray,
                eps_scale: float = SolverConfig.jfnk_eps_scale) -> np.ndarray:
    """Directional finite difference (residual(u + eps v) - residual(u)) / eps."""
    v_norm = rms(v)
    if v_norm == 0.0:
        return np.zeros_like(v)
    eps = eps_scale * (1.0 + rms(u)) / v_norm
    return (residual(u + eps * v) - r_u) / eps


def krylov_solve(matvec, rhs: np.ndarray, rel_tol: float,
                 restart: int = 30, max_iters: int = 200,
                 preconditioner=None) -> tuple[np.ndarray, int, bool]:
    """Restarted GMRES for matvec(x) = rhs, starting from zero.

    preconditioner, if given, applies an approximate inverse (right
    preconditioning).  Returns (x, iterations, converged); on stagnation the
    best iterate so far is returned with converged=False.
    """
    b_norm = float(np.linalg.norm(rhs))
    if b_norm == 0.0:
        return np.zeros_like(rhs), 0, True
    target = rel_tol * b_norm

    x = np.zeros_like(rhs)
    total_iters = 0
    prev_res = b_norm

    while total_iters < max_iters:
        if total_iters == 0:
            r = rhs.copy()
        else:
            r = rhs - matvec(_apply_prec(preconditioner, x))
            total_iters += 1
        beta = float(np.linalg.norm(r))
        if beta <= target:
            return _apply_prec(preconditioner, x), total_iters, True
        m = min(restart, max_iters - total_iters)
        basis = [r / beta]
        h = np.zeros((m + 1, m))
        cs = np.zeros(m)
        sn = np.zeros(m)
        g = np.zeros(m + 1)
        g[0] = beta
        k_used = 0
        for j in range(m):
            # fresh array: a matvec may return its argument (e.g. identity)
            w = np.array(matvec(_apply_prec(preconditioner, basis[j])), dtype=float)
            total_iters += 1
            # modified Gram-Schmidt
            for i in range(j + 1):
                h[i, j] = float(np.vdot(basis[i], w))
                w -= h[i, j] * basis[i]
            w_norm = float(np.linalg.norm(w))
            h[j + 1, j] = w_norm
            # apply accumulated Givens rotations to the new column
            for i in range(j):
                t = cs[i] * h[i, j] + sn[i] * h[i + 1, j]
                h[i + 1, j] = -sn[i] * h[i, j] + cs[i] * h[i + 1, j]
                h[i, j] = t
            denom = float(np.hypot(h[j, j], h[j + 1, j]))
            if denom == 0.0:  # column annihilated: Krylov space exhausted
                k_used = j
                break
            # new rotation zeroing the subdiagonal entry
            cs[j], sn[j] = h[j, j] / denom, h[j + 1, j] / denom
            h[j, j] = denom
            h[j + 1, j] = 0.0
            g[j + 1] = -sn[j] * g[j]
            g[j] = cs[j] * g[j]
            k_used = j + 1
            happy = w_norm < 1e-14 * b_norm  # exact Krylov invariant subspace
            if w_norm > 0:
                basis.append(w / w_norm)
            if abs(g[j + 1]) <= target or happy or total_iters >= max_iters:
                break
        if k_used > 0:
            y = np.linalg.solve(h[:k_used, :k_used], g[:k_used])
            for i in range(k_used):
                x += y[i] * basis[i]
        res = abs(g[k_used])
        if res <= target:
            return _apply_prec(preconditioner, x), total_iters, True
        if res >= prev_res * (1.0 - 1e-12):  # stagnated across a cycle
            return _apply_prec(preconditioner, x), total_iters, False
        prev_res = res
    return _apply_prec(preconditioner, x), total_iters, False


def _apply_prec(preconditioner, v: np.ndarray) -> np.ndarray:
    return v if preconditioner is None else preconditioner(v)


def armijo_backtrack(residual, u: np.ndarray, delta: np.ndarray, r_norm: float,
                     cfg: SolverConfig) -> tuple[float, np.ndarray, np.ndarray, float, bool]:
    """Largest lam in {1, rho, rho^2, ...} with
    ||residual(u + lam*delta)|| <= (1 - c*lam) * r_norm.

    Returns (lam, new iterate, its residual, its norm, warning).  If no trial
    satisfies the decrease condition the smallest step is accepted with
    warning=True; non-finite trials just shrink the step further.
    """
    lam = 1.0
    fallback = None  # smallest finite-residual trial, accepted if none decrease
    for _ in range(cfg.max_backtracks + 1):
        trial = u + lam * delta
        r_trial = residual(trial)
        rn = rms(r_trial)
        if np.isfinite(rn):
            if rn <= (1.0 - cfg.armijo_c * lam) * r_norm:
                return lam, trial, r_trial, rn, False
            fallback = (lam, trial, r_trial, rn)
        lam *= cfg.backtrack_factor
    if fallback is None:  # every trial was non-finite
        return lam, u, residual(u), r_norm, True
    return fallback[0], fallback[1], fallback[2], fallback[3], True


def solve(residual, guess: np.ndarray, cfg: SolverConfig | None = None,
          preconditioner=None) -> tuple[np.ndarray, SolveStats]:
    """Newton iteration on residual(u) = 0 from guess.

    Every call of residual is counted in stats.function_evals.  Convergence
    means RMS residual <= cfg.abs_tol; on a non-finite residual the solver
    stops with stats.diverged set.
    """
    cfg = cfg or SolverConfig()
    stats = SolveStats()

    def counted(u):
        stats.function_evals += 1
        return residual(u)

    u = np.array(guess, dtype=float, copy=True)
    r = counted(u)
    r_norm = rms(r)
    stats.final_residual_norm = r_norm
    if not np.isfinite(r_norm):
        stats.diverged = True
        return u, stats
    if r_norm <= cfg.abs_tol:
        stats.converged = True
        return u, stats

    prev_norm = r_norm
    eta = cfg.forcing_eta
    for k in range(cfg.max_newton_iters):
        if cfg.eisenstat_walker:
            eta = 0.5 if k == 0 else min(0.9, max(1e-4, 0.9 * (r_norm / prev_norm) ** 2))
        matvec = lambda v, u=u, r=r: jfnk_matvec(counted, u, r, v, cfg.jfnk_eps_scale)
        delta, kry_iters, _ = krylov_solve(
            matvec, -r, eta, cfg.krylov_restart, cfg.krylov_max_iters, preconditioner
        )
        stats.krylov_iters_total += kry_iters
        prev_norm = r_norm
        lam, u, r, r_norm, warned = armijo_backtrack(counted, u, delta, r_norm, cfg)
        stats.newton_iters = k + 1
        stats.line_search_warnings += int(warned)
        stats.final_residual_norm = r_norm
        if not np.isfinite(r_norm):
            stats.diverged = True
            return u, stats
        if r_norm <= cfg.abs_tol:
            stats.converged = True
            return u, stats
    return u, stats
