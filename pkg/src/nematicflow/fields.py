"""Periodic grids and field containers.

A Grid is a uniform periodic box sampled at N_a points per axis (the right
endpoint is excluded).  Scalar quantities live on (N1, N2, N3) arrays,
director (3-vector) fields on (3, N1, N2, N3) arrays; axis 0 of the grid
arrays is x1.  Flattened storage, wherever it leaks into files, is
x1-fastest (Fortran ravel of the grid axes).

2D problems use N3 = 1; all machinery treats the collapsed axis uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class GridMismatchError(ValueError):
    """Two fields that must share a grid do not."""


class FieldConstructionError(ValueError):
    """A sampled field contains non-finite entries."""


@dataclass(frozen=True)
class Grid:
    """Uniform periodic box: point j on axis a sits at origin_a + j*L_a/N_a."""

    dims: tuple[int, int, int]
    lengths: tuple[float, float, float]
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if len(self.dims) != 3 or len(self.lengths) != 3 or len(self.origin) != 3:
            raise ValueError("dims, lengths and origin must each have 3 entries")
        if any(int(n) != n or n < 1 for n in self.dims):
            raise ValueError(f"grid dims must be positive integers, got {self.dims}")
        if any(not np.isfinite(L) or L <= 0 for L in self.lengths):
            raise ValueError(f"grid lengths must be positive, got {self.lengths}")
        object.__setattr__(self, "dims", tuple(int(n) for n in self.dims))
        object.__setattr__(self, "lengths", tuple(float(L) for L in self.lengths))
        object.__setattr__(self, "origin", tuple(float(x) for x in self.origin))

    @property
    def num_points(self) -> int:
        return self.dims[0] * self.dims[1] * self.dims[2]

    @property
    def cell_volume(self) -> float:
        """h = (L1*L2*L3)/(N1*N2*N3), the quadrature weight per point."""
        return float(np.prod(self.lengths) / self.num_points)

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    def axis_coords(self, axis: int) -> np.ndarray:
        """Periodic collocation points along one axis (right endpoint excluded)."""
        n, L, x0 = self.dims[axis], self.lengths[axis], self.origin[axis]
        return x0 + np.arange(n) * (L / n)

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return np.meshgrid(*(self.axis_coords(a) for a in range(3)), indexing="ij")


def _require_same_grid(*grids: Grid) -> Grid:
    g0 = grids[0]
    for g in grids[1:]:
        if g != g0:
            raise GridMismatchError(f"grids differ: {g0} vs {g}")
    return g0


@dataclass
class ScalarField:
    grid: Grid
    data: np.ndarray  # (N1, N2, N3)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.shape != self.grid.dims:
            raise ValueError(
                f"scalar data shape {self.data.shape} does not match grid {self.grid.dims}"
            )

    def ravel(self) -> np.ndarray:
        """Flat copy in x1-fastest order (the canonical file layout)."""
        return self.data.ravel(order="F")


@dataclass
class DirectorField:
    """Three-component vector field; components stacked on axis 0."""

    grid: Grid
    data: np.ndarray  # (3, N1, N2, N3)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.shape != (3,) + self.grid.dims:
            raise ValueError(
                f"director data shape {self.data.shape} does not match grid {self.grid.dims}"
            )

    @property
    def components(self) -> tuple[ScalarField, ScalarField, ScalarField]:
        return tuple(ScalarField(self.grid, self.data[i]) for i in range(3))

    def component(self, i: int) -> np.ndarray:
        return self.data[i]

    def copy(self) -> "DirectorField":
        return DirectorField(self.grid, self.data.copy())

    def ravel(self) -> np.ndarray:
        """Components concatenated, each in x1-fastest order."""
        return np.concatenate([self.data[i].ravel(order="F") for i in range(3)])


def zeros_like(n: DirectorField) -> DirectorField:
    return DirectorField(n.grid, np.zeros_like(n.data))


def constant_field(grid: Grid, v: tuple[float, float, float]) -> DirectorField:
    data = np.empty((3,) + grid.dims)
    for i in range(3):
        data[i] = v[i]
    return DirectorField(grid, data)


def field_from_fn(grid: Grid, fn) -> DirectorField:
    """Sample fn(x1, x2, x3) -> (v1, v2, v3) on the grid.

    fn must accept the broadcast meshgrid arrays; each returned component is
    broadcast to the grid shape.  Non-finite samples raise, naming the first
    offending multi-index.
    """
    x1, x2, x3 = grid.meshgrid()
    v = fn(x1, x2, x3)
    data = np.empty((3,) + grid.dims)
    for i in range(3):
        data[i] = np.broadcast_to(np.asarray(v[i], dtype=float), grid.dims)
    if not np.all(np.isfinite(data)):
        comp, i1, i2, i3 = np.argwhere(~np.isfinite(data))[0]
        raise FieldConstructionError(
            f"non-finite sample for component n{comp + 1} at index ({i1}, {i2}, {i3})"
        )
    return DirectorField(grid, data)


def scalar_from_fn(grid: Grid, fn) -> ScalarField:
    x1, x2, x3 = grid.meshgrid()
    data = np.broadcast_to(np.asarray(fn(x1, x2, x3), dtype=float), grid.dims).copy()
    if not np.all(np.isfinite(data)):
        i1, i2, i3 = np.argwhere(~np.isfinite(data))[0]
        raise FieldConstructionError(f"non-finite sample at index ({i1}, {i2}, {i3})")
    return ScalarField(grid, data)


# ---------------------------------------------------------------------------
# quadrature and norms

def discrete_inner(a: DirectorField, b: DirectorField) -> float:
    """h * sum_points a.b  (trapezoid rule; spectrally accurate on periodic data)."""
    g = _require_same_grid(a.grid, b.grid)
    return g.cell_volume * float(np.sum(a.data * b.data))


def integrate_scalar(s: ScalarField) -> float:
    return s.grid.cell_volume * float(np.sum(s.data))


def linf_length_error(n: DirectorField) -> float:
    """max_points | |n| - 1 |."""
    length = np.sqrt(np.sum(n.data * n.data, axis=0))
    return float(np.max(np.abs(length - 1.0)))


# ---------------------------------------------------------------------------
# pointwise algebra

def cross(a: DirectorField, b: DirectorField) -> DirectorField:
    g = _require_same_grid(a.grid, b.grid)
    return DirectorField(g, cross_data(a.data, b.data))


def cross_data(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.empty_like(a)
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]
    return out


def dot(a: DirectorField, b: DirectorField) -> ScalarField:
    g = _require_same_grid(a.grid, b.grid)
    return ScalarField(g, np.sum(a.data * b.data, axis=0))


def lincomb(ca: float, a: DirectorField, cb: float, b: DirectorField) -> DirectorField:
    g = _require_same_grid(a.grid, b.grid)
    return DirectorField(g, ca * a.data + cb * b.data)


def scale_by_scalar_field(s: ScalarField, a: DirectorField) -> DirectorField:
    g = _require_same_grid(s.grid, a.grid)
    return DirectorField(g, s.data[None, :, :, :] * a.data)


# ---------------------------------------------------------------------------
# random smooth fields (verification utilities)

def random_band_limited_scalar(
    grid: Grid, rng: np.random.Generator, max_mode: int = 2, amplitude: float = 1.0
) -> ScalarField:
    """Random real trigonometric polynomial with per-axis mode numbers <= max_mode.

    Coefficients decay like 1/(1+|k|^2) so the field is smooth at any resolution.
    """
    x1, x2, x3 = grid.meshgrid()
    t1 = 2.0 * np.pi * (x1 - grid.origin[0]) / grid.lengths[0]
    t2 = 2.0 * np.pi * (x2 - grid.origin[1]) / grid.lengths[1]
    t3 = 2.0 * np.pi * (x3 - grid.origin[2]) / grid.lengths[2]
    out = np.zeros(grid.dims)
    for k1 in range(0, max_mode + 1):
        for k2 in range(-max_mode, max_mode + 1):
            for k3 in range(-max_mode, max_mode + 1):
                if k1 == 0 and (k2 < 0 or (k2 == 0 and k3 < 0)):
                    continue  # conjugate half; keep one representative per mode
                w = amplitude / (1.0 + k1 * k1 + k2 * k2 + k3 * k3)
                c, phi = rng.standard_normal(), rng.uniform(0.0, 2.0 * np.pi)
                out += w * c * np.cos(k1 * t1 + k2 * t2 + k3 * t3 + phi)
    return ScalarField(grid, out)


def random_unit_director(
    grid: Grid, rng: np.random.Generator, max_mode: int = 2, amplitude: float = 1.0
) -> DirectorField:
    """Unit-length smooth random director via spherical angles."""
    theta = random_band_limited_scalar(grid, rng, max_mode, amplitude).data
    phi = random_band_limited_scalar(grid, rng, max_mode, amplitude).data
    data = np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
    return DirectorField(grid, data)


def random_unit_pair(
    grid: Grid,
    rng: np.random.Generator,
    max_mode: int = 2,
    amplitude: float = 1.0,
    separation: float = 0.1,
) -> tuple[DirectorField, DirectorField]:
    """Two nearby unit-length smooth fields (both exactly unit pointwise)."""
    theta = random_band_limited_scalar(grid, rng, max_mode, amplitude).data
    phi = random_band_limited_scalar(grid, rng, max_mode, amplitude).data
    dtheta = random_band_limited_scalar(grid, rng, max_mode, separation).data
    dphi = random_band_limited_scalar(grid, rng, max_mode, separation).data

    def spherical(th, ph):
        return np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])

    return (
        DirectorField(grid, spherical(theta, phi)),
        DirectorField(grid, spherical(theta + dtheta, phi + dphi)),
    )
