"""Implicit rotational time step, run loop, and adaptive step control.

One step solves, for the new state n_new,

    (n_new - n_old)/tau = -n_half x (D x n_half),    n_half = (n_new + n_old)/2,

where D is a discrete gradient of the elastic energy evaluated on the pair
(n_old, n_new).  Dotting the update with n_half shows |n_new| = |n_old|
pointwise whatever D is, so the unit length survives up to the nonlinear
solver tolerance; no renormalization is applied anywhere.  When D satisfies
the energy-difference identity the step also dissipates:

    F[n_new] - F[n_old] = -tau * ||D x n_half||^2.

The adaptive controller shrinks the step when the energy moves fast:

    tau_next = max(tau_min, tau_max / sqrt(1 + alpha * |dF/tau|^2)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import newton_krylov
from .discrete_gradient import DiscreteGradientKind, evaluate as evaluate_dg
from .energy import ElasticParams, EnergyBreakdown, energy
from .fields import DirectorField, _require_same_grid, cross_data, linf_length_error
from .newton_krylov import SolveStats, SolverConfig, SolverFailure
from .spectral import SpectralPlan


@dataclass(frozen=True)
class TimeControls:
    """Fixed-step (tau) or adaptive (tau_min/tau_max/alpha) march over [t_start, t_end]."""

    t_start: float
    t_end: float
    tau: float | None = None
    tau_min: float | None = None
    tau_max: float | None = None
    alpha: float | None = None
    extrapolate_guess: bool = False  # start Newton from 2*n^m - n^{m-1}

    def __post_init__(self):
        if self.t_end <= self.t_start:
            raise ValueError("t_end must exceed t_start")
        if self.adaptive:
            if self.tau_min is None or self.tau_max is None or self.alpha is None:
                raise ValueError("adaptive mode needs tau_min, tau_max and alpha")
            if not 0 < self.tau_min <= self.tau_max:
                raise ValueError("need 0 < tau_min <= tau_max")
            if self.alpha <= 0:
                raise ValueError("alpha must be > 0")
        elif self.tau is None or self.tau <= 0:
            raise ValueError("fixed mode needs tau > 0")

    @property
    def adaptive(self) -> bool:
        return self.tau is None

    @classmethod
    def fixed(cls, tau: float, t_start: float = 0.0, t_end: float = 1.0, **kw) -> "TimeControls":
        return cls(t_start=t_start, t_end=t_end, tau=tau, **kw)

    @classmethod
    def adaptive_controls(cls, tau_min: float, tau_max: float, alpha: float,
                          t_start: float = 0.0, t_end: float = 1.0, **kw) -> "TimeControls":
        return cls(t_start=t_start, t_end=t_end,
                   tau_min=tau_min, tau_max=tau_max, alpha=alpha, **kw)


@dataclass
class StepRecord:
    step: int
    t: float                 # time after the step
    tau: float
    energy: EnergyBreakdown
    length_error: float      # L-inf |n|-1 of the new state
    stats: SolveStats


class StepFailure(RuntimeError):
    """Nonlinear solve failed (after any retries); carries partial history."""

    def __init__(self, message: str, records: list[StepRecord] | None = None):
        super().__init__(message)
        self.records = records or []


def rdg_residual(
    plan: SpectralPlan,
    nm: DirectorField,
    candidate: DirectorField,
    tau: float,
    kind: DiscreteGradientKind,
    p: ElasticParams,
    forcing: DirectorField | None = None,
) -> DirectorField:
    """(candidate - nm)/tau + n_half x (D x n_half) - forcing."""
    _require_same_grid(nm.grid, candidate.grid)
    if tau <= 0:
        raise ValueError("tau must be > 0")
    d = evaluate_dg(plan, kind, nm, candidate, p)
    n_half = 0.5 * (nm.data + candidate.data)
    out = (candidate.data - nm.data) / tau + cross_data(n_half, cross_data(d.data, n_half))
    if forcing is not None:
        _require_same_grid(nm.grid, forcing.grid)
        out -= forcing.data
    return DirectorField(nm.grid, out)


def spectral_preconditioner(plan: SpectralPlan, tau: float, p: ElasticParams):
    """Approximate inverse of I/tau + k_max * Laplacian, applied in Fourier space.

    Optional GMRES accelerator; disabled by default.
    """
    grid = plan.grid
    k2 = np.zeros(grid.dims)
    for a in range(3):
        n, L = grid.dims[a], grid.lengths[a]
        k = 2.0 * np.pi * np.fft.fftfreq(n, d=1.0 / n) / L
        shape = [1, 1, 1]
        shape[a] = n
        k2 = k2 + (k.reshape(shape)) ** 2
    k_max = max(p.k1, p.k2, p.k3)
    symbol = 1.0 / tau + k_max * k2

    def apply(v: np.ndarray) -> np.ndarray:
        spec = np.fft.fftn(v, axes=(-3, -2, -1))
        spec /= symbol
        return np.real(np.fft.ifftn(spec, axes=(-3, -2, -1)))

    return apply


def step(
    plan: SpectralPlan,
    nm: DirectorField,
    tau: float,
    kind: DiscreteGradientKind,
    p: ElasticParams,
    solver_cfg: SolverConfig | None = None,
    forcing: DirectorField | None = None,
    t: float = 0.0,
    step_index: int = 1,
    guess: DirectorField | None = None,
    precondition: bool = False,
) -> tuple[DirectorField, StepRecord]:
    """One implicit step from nm over tau; raises SolverFailure if the
    nonlinear solve does not converge."""
    solver_cfg = solver_cfg or SolverConfig()

    def residual(data: np.ndarray) -> np.ndarray:
        c = DirectorField(nm.grid, data)
        return rdg_residual(plan, nm, c, tau, kind, p, forcing).data

    prec = spectral_preconditioner(plan, tau, p) if precondition else None
    start = nm.data if guess is None else guess.data
    data, stats = newton_krylov.solve(residual, start, solver_cfg, preconditioner=prec)
    if not stats.converged:
        reason = "diverged (non-finite residual)" if stats.diverged else "max Newton iterations"
        raise SolverFailure(
            f"step {step_index} at t={t:.6g}, tau={tau:.3g}: {reason}; "
            f"residual {stats.final_residual_norm:.3e}",
            stats,
        )
    np1 = DirectorField(nm.grid, data)
    record = StepRecord(
        step=step_index,
        t=t + tau,
        tau=tau,
        energy=energy(plan, np1, p),
        length_error=linf_length_error(np1),
        stats=stats,
    )
    return np1, record


def adaptive_tau(f_m: float, f_mm1: float, tau_m: float, controls: TimeControls) -> float:
    """max(tau_min, tau_max / sqrt(1 + alpha |(F_m - F_{m-1})/tau_m|^2))."""
    if tau_m <= 0:
        raise ValueError("tau_m must be > 0")
    rate = (f_m - f_mm1) / tau_m
    proposal = controls.tau_max / np.sqrt(1.0 + controls.alpha * rate * rate)
    return float(max(controls.tau_min, proposal))


def run(
    plan: SpectralPlan,
    n0: DirectorField,
    p: ElasticParams,
    kind: DiscreteGradientKind,
    controls: TimeControls,
    solver_cfg: SolverConfig | None = None,
    forcing=None,                # callable t -> DirectorField, sampled at t + tau/2
    on_step=None,                # callable (StepRecord, DirectorField)
    precondition: bool = False,
    max_retries: int = 3,
) -> list[StepRecord]:
    """March from t_start to t_end, landing exactly on t_end.

    Adaptive mode starts at tau_max and keeps every controller step inside
    [tau_min, tau_max] (the final landing step is adjusted so it never drops
    below tau_min).  A failed solve is retried with tau halved up to
    max_retries times before aborting with the partial history attached.
    """
    solver_cfg = solver_cfg or SolverConfig()
    records: list[StepRecord] = []
    n = n0
    n_prev: DirectorField | None = None
    t = controls.t_start
    t_end = controls.t_end
    eps_time = 1e-12 * max(1.0, abs(t_end))

    tau_next = controls.tau_max if controls.adaptive else controls.tau
    f_curr = energy(plan, n0, p).total if controls.adaptive else None  # F[n^m]
    m = 0

    while t < t_end - eps_time:
        tau = min(tau_next, t_end - t)
        # keep the landing step from dropping below tau_min in adaptive mode
        if controls.adaptive:
            remaining = t_end - t
            if remaining - tau < controls.tau_min and remaining - tau > eps_time:
                tau = max(remaining - controls.tau_min, controls.tau_min)
        m += 1
        f_mid = forcing(t + 0.5 * tau) if forcing is not None else None
        guess = None
        if controls.extrapolate_guess and n_prev is not None:
            guess = DirectorField(n.grid, 2.0 * n.data - n_prev.data)

        attempt_tau = tau
        last_err: SolverFailure | None = None
        for attempt in range(max_retries + 1):
            try:
                np1, record = step(
                    plan, n, attempt_tau, kind, p, solver_cfg,
                    forcing=f_mid, t=t, step_index=m, guess=guess,
                    precondition=precondition,
                )
                break
            except SolverFailure as err:
                last_err = err
                attempt_tau *= 0.5
                if forcing is not None:
                    f_mid = forcing(t + 0.5 * attempt_tau)
        else:
            raise StepFailure(
                f"solver failed after {max_retries} tau halvings: {last_err}", records
            )

        n_prev, n = n, np1
        t = record.t
        records.append(record)
        if on_step is not None:
            on_step(record, n)

        if controls.adaptive:
            f_prev, f_curr = f_curr, record.energy.total
            tau_next = adaptive_tau(f_curr, f_prev, record.tau, controls)
    return records
