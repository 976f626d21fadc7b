"""Fourier-collocation derivatives on periodic grids.

First derivatives are exact for the trigonometric interpolant.  On axes with
an even point count the Nyquist mode is zeroed in the derivative multiplier,
which keeps every partial-derivative matrix exactly skew-symmetric in the
uniform-grid inner product; div/grad and curl are then mutually adjoint (up
to sign) as discrete operators, which the energy-difference identities of
the discrete gradients rely on.

Collapsed axes (N_a = 1) carry zero wavenumbers, so z-derivatives of 2D
fields vanish identically.
"""

from __future__ import annotations

import numpy as np

from .fields import DirectorField, Grid, GridMismatchError, ScalarField


class SpectralPlan:
    """Wavenumber tables and derivative kernels for one grid.

    dealias=True applies a 2/3-rule truncation inside every derivative; the
    default is no dealiasing (plain collocation).
    """

    def __init__(self, grid: Grid, dealias: bool = False):
        self.grid = grid
        self.dealias = dealias
        # rfft-layout multipliers i*k per axis, Nyquist zeroed for odd derivatives
        self._ik = []
        for a in range(3):
            n, L = grid.dims[a], grid.lengths[a]
            k = 2.0 * np.pi * np.fft.rfftfreq(n, d=1.0 / n) / L
            if n % 2 == 0 and n > 1:
                k[-1] = 0.0
            if dealias:
                cut = n // 3
                k[np.arange(k.size) > cut] = 0.0
            self._ik.append(1j * k)

    def _check(self, grid: Grid):
        if grid != self.grid:
            raise GridMismatchError("field grid does not match plan grid")

    def deriv(self, values: np.ndarray, axis: int) -> np.ndarray:
        """d/dx_axis of grid data; the last three array axes are the grid axes.

        Leading axes are batched (a (3, N1, N2, N3) stack differentiates all
        three components in one transform).
        """
        if not 0 <= axis <= 2:
            raise ValueError(f"axis must be 0, 1 or 2, got {axis}")
        n = self.grid.dims[axis]
        if n == 1:
            return np.zeros_like(values)
        ax = values.ndim - 3 + axis
        spec = np.fft.rfft(values, axis=ax)
        shape = [1] * values.ndim
        shape[ax] = self._ik[axis].size
        spec *= self._ik[axis].reshape(shape)
        return np.fft.irfft(spec, n=n, axis=ax)

    def roundtrip(self, values: np.ndarray) -> np.ndarray:
        """Forward+inverse transform (identity up to roundoff); test hook."""
        out = values
        for a in range(3):
            n = self.grid.dims[a]
            ax = values.ndim - 3 + a
            out = np.fft.irfft(np.fft.rfft(out, axis=ax), n=n, axis=ax)
        return out


def partial(plan: SpectralPlan, s: ScalarField, axis: int) -> ScalarField:
    plan._check(s.grid)
    return ScalarField(s.grid, plan.deriv(s.data, axis))


def divergence(plan: SpectralPlan, n: DirectorField) -> ScalarField:
    plan._check(n.grid)
    return ScalarField(n.grid, divergence_data(plan, n.data))


def divergence_data(plan: SpectralPlan, data: np.ndarray) -> np.ndarray:
    out = plan.deriv(data[0], 0)
    out += plan.deriv(data[1], 1)
    out += plan.deriv(data[2], 2)
    return out


def curl(plan: SpectralPlan, n: DirectorField) -> DirectorField:
    plan._check(n.grid)
    return DirectorField(n.grid, curl_data(plan, n.data))


def curl_data(plan: SpectralPlan, data: np.ndarray) -> np.ndarray:
    # batched: one transform per axis differentiates all three components
    d1 = plan.deriv(data, 0)
    d2 = plan.deriv(data, 1)
    d3 = plan.deriv(data, 2)
    out = np.empty_like(data)
    out[0] = d2[2] - d3[1]
    out[1] = d3[0] - d1[2]
    out[2] = d1[1] - d2[0]
    return out


def grad(plan: SpectralPlan, s: ScalarField) -> DirectorField:
    plan._check(s.grid)
    return DirectorField(s.grid, grad_data(plan, s.data))


def grad_data(plan: SpectralPlan, data: np.ndarray) -> np.ndarray:
    return np.stack([plan.deriv(data, a) for a in range(3)])


def grad_div(plan: SpectralPlan, n: DirectorField) -> DirectorField:
    plan._check(n.grid)
    return DirectorField(n.grid, grad_data(plan, divergence_data(plan, n.data)))
