"""Manufactured-solution verification on the periodic box [0, 2pi]^3.

The reference trajectory is the unit field built from spherical angles

    a(x, t) = sin(x1 + t) cos(x2) sin(x3),
    b(x, t) = cos(x1) sin(x2 + t) cos(x3),
    n = (sin a cos b, sin a sin b, cos a),

which is 2pi-periodic in every coordinate and exactly unit length.  A body
force f = n_t + (n x dF/dn) x n makes it an exact solution of the forced
flow, so time and space discretization errors can be measured directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .energy import ElasticParams, variational_derivative
from .fields import DirectorField, Grid, cross_data
from .newton_krylov import SolverConfig
from .spectral import SpectralPlan
from .stepper import TimeControls, run


def _angles(x1, x2, x3, t):
    a = np.sin(x1 + t) * np.cos(x2) * np.sin(x3)
    b = np.cos(x1) * np.sin(x2 + t) * np.cos(x3)
    return a, b


def exact_solution(x1, x2, x3, t: float):
    """Reference director at (x, t); unit length by construction."""
    a, b = _angles(x1, x2, x3, t)
    return np.sin(a) * np.cos(b), np.sin(a) * np.sin(b), np.cos(a)


def exact_time_derivative(x1, x2, x3, t: float):
    """d/dt of the reference director (chain rule through the angles)."""
    a, b = _angles(x1, x2, x3, t)
    a_t = np.cos(x1 + t) * np.cos(x2) * np.sin(x3)
    b_t = np.cos(x1) * np.cos(x2 + t) * np.cos(x3)
    return (
        np.cos(a) * np.cos(b) * a_t - np.sin(a) * np.sin(b) * b_t,
        np.cos(a) * np.sin(b) * a_t + np.sin(a) * np.cos(b) * b_t,
        -np.sin(a) * a_t,
    )


def exact_field(grid: Grid, t: float) -> DirectorField:
    x1, x2, x3 = grid.meshgrid()
    return DirectorField(grid, np.stack(exact_solution(x1, x2, x3, t)))


def exact_rate_field(grid: Grid, t: float) -> DirectorField:
    x1, x2, x3 = grid.meshgrid()
    return DirectorField(grid, np.stack(exact_time_derivative(x1, x2, x3, t)))


@lru_cache(maxsize=8)
def _refined_plan(grid: Grid, factor: int) -> SpectralPlan:
    fine = Grid(tuple(max(1, factor * n) if n > 1 else 1 for n in grid.dims),
                grid.lengths, grid.origin)
    return SpectralPlan(fine)


def forcing(plan: SpectralPlan, t: float, p: ElasticParams, fine_factor: int = 1) -> DirectorField:
    """Body force making the reference trajectory an exact solution:
    f = n_t + (n x dF/dn) x n, sampled on the grid.

    With fine_factor=1 the derivative is evaluated on the run grid itself; the
    sampled trajectory then solves the semi-discrete system exactly, so runs
    measure pure time-discretization error.  fine_factor>1 evaluates the
    derivative on a refined grid and restricts (coarse points are a subset of
    the fine ones), approximating the continuum force to spectral accuracy so
    spatial truncation error becomes visible.
    """
    if fine_factor < 1:
        raise ValueError("fine_factor must be >= 1")
    if fine_factor == 1:
        n = exact_field(plan.grid, t)
        nt = exact_rate_field(plan.grid, t)
        g = variational_derivative(plan, n, p).data
        return DirectorField(plan.grid, nt.data + cross_data(cross_data(n.data, g), n.data))
    fine_plan = _refined_plan(plan.grid, fine_factor)
    fine = forcing(fine_plan, t, p, fine_factor=1)
    s = tuple(slice(None, None, fine_factor) if n > 1 else slice(None) for n in plan.grid.dims)
    return DirectorField(plan.grid, fine.data[(slice(None),) + s].copy())


def default_grid(n: int) -> Grid:
    return Grid((n, n, n), (2.0 * np.pi, 2.0 * np.pi, 2.0 * np.pi))


# ---------------------------------------------------------------------------
# convergence studies

@dataclass
class ConvergenceReport:
    """L-inf errors per component over a parameter sweep (tau or N)."""

    parameter_name: str                 # "tau" or "N"
    parameters: list[float]
    errors: list[tuple[float, float, float]]
    orders: list[tuple[float, float, float]]  # between consecutive rows; len-1 entries

    def max_errors(self) -> list[float]:
        return [max(e) for e in self.errors]


def _observed_orders(parameters, errors) -> list[tuple[float, float, float]]:
    """Per-component decay exponents between consecutive rows.

    For a decreasing parameter (tau) this is the rate p in err ~ tau^p; for
    an increasing one (N) the rate p in err ~ N^-p.  Positive = improving.
    """
    orders = []
    for i in range(1, len(parameters)):
        ratio = parameters[i - 1] / parameters[i]
        if ratio < 1.0:
            ratio = 1.0 / ratio
        row = tuple(
            float(np.log(errors[i - 1][c] / errors[i][c]) / np.log(ratio)) if errors[i][c] > 0 else float("nan")
            for c in range(3)
        )
        orders.append(row)
    return orders


def _linf_errors(n: DirectorField, t: float) -> tuple[float, float, float]:
    ref = exact_field(n.grid, t)
    err = np.max(np.abs(n.data - ref.data), axis=(1, 2, 3))
    return float(err[0]), float(err[1]), float(err[2])


def _forced_run(plan, kind, p, tau, t_end, solver_cfg, fine_factor=1) -> DirectorField:
    n0 = exact_field(plan.grid, 0.0)
    controls = TimeControls.fixed(tau=tau, t_start=0.0, t_end=t_end)
    final = [n0]

    def keep_last(record, field):
        final[0] = field

    run(plan, n0, p, kind, controls, solver_cfg,
        forcing=lambda t: forcing(plan, t, p, fine_factor), on_step=keep_last)
    return final[0]


def temporal_convergence_study(
    kind,
    p: ElasticParams,
    n_points: int,
    tau_list: list[float],
    t_end: float,
    solver_cfg: SolverConfig | None = None,
) -> ConvergenceReport:
    """Forced runs from the exact initial state at a fixed resolution;
    L-inf errors at t_end for each step size (tau_list decreasing)."""
    if any(b >= a for a, b in zip(tau_list, tau_list[1:])):
        raise ValueError("tau_list must be strictly decreasing")
    plan = SpectralPlan(default_grid(n_points))
    errors = []
    for tau in tau_list:
        final = _forced_run(plan, kind, p, tau, t_end, solver_cfg)
        errors.append(_linf_errors(final, t_end))
    return ConvergenceReport("tau", list(tau_list), errors, _observed_orders(tau_list, errors))


def spatial_convergence_study(
    kind,
    p: ElasticParams,
    n_list: list[int],
    tau: float,
    t_end: float,
    solver_cfg: SolverConfig | None = None,
    fine_factor: int = 2,
) -> ConvergenceReport:
    """Forced runs at fixed small tau over increasing resolutions.

    The forcing is evaluated on a fine_factor-refined grid so it carries the
    continuum force: the measured error is then the spatial truncation error
    of each run grid, decaying spectrally until the time-error floor.
    """
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly increasing")
    errors = []
    for n_points in n_list:
        plan = SpectralPlan(default_grid(n_points))
        final = _forced_run(plan, kind, p, tau, t_end, solver_cfg, fine_factor)
        errors.append(_linf_errors(final, t_end))
    params = [float(n) for n in n_list]
    return ConvergenceReport("N", params, errors, _observed_orders(params, errors))
