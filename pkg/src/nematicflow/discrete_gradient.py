"""Two-point discrete gradients of the elastic energy.

A discrete gradient D(n_old, n_new) approximates the variational derivative
at the midpoint while satisfying the exact energy-difference identity

    <D, n_new - n_old> = F[n_new] - F[n_old]

in the collocation inner product.  Three constructions are provided:

* mean_value   - Gauss-Legendre quadrature of the variational derivative
                 along the segment between the states.  The derivative is
                 cubic in n, so 2 or more nodes make the identity exact;
                 the default of 4 nodes is kept for headroom.
* gonzalez     - midpoint derivative plus a rank-one correction enforcing
                 the identity; a small regularizer eps0 in the denominator
                 guards the near-equilibrium limit n_new -> n_old.
* oseen_frank  - energy-tailored form: the midpoint gradient kernel fed with
                 trapezoidal averages of the twist scalar and bend vector.
                 Satisfies the identity exactly by construction and is
                 second-order accurate.

All three are symmetric in (n_old, n_new) and reduce to the variational
derivative when the two states coincide.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .energy import ElasticParams, assemble_gradient_data, deformations, energy, variational_derivative
from .fields import DirectorField, _require_same_grid, discrete_inner, lincomb
from .spectral import SpectralPlan


# ---------------------------------------------------------------------------
# kind selectors

@dataclass(frozen=True)
class MeanValue:
    num_gauss_points: int = 4

    def __post_init__(self):
        if self.num_gauss_points < 1:
            raise ValueError("num_gauss_points must be >= 1")


@dataclass(frozen=True)
class Gonzalez:
    eps0: float | None = None  # None -> 1e-14 * box volume

    def __post_init__(self):
        if self.eps0 is not None and self.eps0 < 0:
            raise ValueError("eps0 must be >= 0")


@dataclass(frozen=True)
class OseenFrank:
    pass


DiscreteGradientKind = MeanValue | Gonzalez | OseenFrank


def kind_from_name(name: str, num_gauss_points: int = 4, eps0: float | None = None) -> DiscreteGradientKind:
    key = name.strip().lower().replace("_", "-")
    if key == "mean-value":
        return MeanValue(num_gauss_points)
    if key == "gonzalez":
        return Gonzalez(eps0)
    if key == "oseen-frank":
        return OseenFrank()
    raise ValueError(f"unknown discrete gradient kind {name!r}")


def kind_name(kind: DiscreteGradientKind) -> str:
    if isinstance(kind, MeanValue):
        return "mean-value"
    if isinstance(kind, Gonzalez):
        return "gonzalez"
    return "oseen-frank"


def default_eps0(kind: Gonzalez, grid) -> float:
    # scaled by box volume, matching the integral in the denominator
    return 1e-14 * grid.volume if kind.eps0 is None else kind.eps0


# ---------------------------------------------------------------------------
# Gauss-Legendre nodes (Newton on the Legendre recurrence; no tables)

@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point rule on [-1, 1], to machine precision."""
    if n < 1:
        raise ValueError("need at least one quadrature node")

    def legendre_pair(x):
        # (P_n, P_{n-1}) by the three-term recurrence
        p0, p1 = np.ones_like(x), x.copy()
        for m in range(2, n + 1):
            p0, p1 = p1, ((2 * m - 1) * x * p1 - (m - 1) * p0) / m
        return p1, p0

    # Chebyshev-like initial guesses, refined by Newton on P_n
    k = np.arange(1, n + 1)
    x = np.cos(np.pi * (k - 0.25) / (n + 0.5))
    for _ in range(100):
        pn, pn1 = legendre_pair(x)
        dpn = n * (x * pn - pn1) / (x * x - 1.0)
        dx = pn / dpn
        x -= dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    pn, pn1 = legendre_pair(x)
    dpn = n * (x * pn - pn1) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dpn * dpn)
    order = np.argsort(x)
    x, w = x[order], w[order]
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


# ---------------------------------------------------------------------------
# trapezoidal midpoint quantities

@dataclass
class MidstepFields:
    """Averages entering the energy-tailored gradient between two states."""

    n_half: DirectorField
    twist: np.ndarray  # (n.curl n averaged over the two states)
    bend: np.ndarray   # (n x curl n averaged), (3,...)


def midstep_fields(plan: SpectralPlan, nm: DirectorField, np1: DirectorField) -> MidstepFields:
    _require_same_grid(nm.grid, np1.grid)
    dm = deformations(plan, nm)
    dp = deformations(plan, np1)
    n_half = lincomb(0.5, nm, 0.5, np1)
    return MidstepFields(n_half, 0.5 * (dm.twist + dp.twist), 0.5 * (dm.bend + dp.bend))


# ---------------------------------------------------------------------------
# the three gradients

def dg_oseen_frank(
    plan: SpectralPlan, nm: DirectorField, np1: DirectorField, p: ElasticParams
) -> DirectorField:
    _require_same_grid(nm.grid, np1.grid)
    dm = deformations(plan, nm)
    dp = deformations(plan, np1)
    n_half = 0.5 * (nm.data + np1.data)
    out = assemble_gradient_data(
        plan,
        p,
        n_half,
        0.5 * (dm.div + dp.div),
        0.5 * (dm.curl + dp.curl),
        0.5 * (dm.twist + dp.twist),
        0.5 * (dm.bend + dp.bend),
    )
    return DirectorField(nm.grid, out)


def dg_mean_value(
    plan: SpectralPlan, nm: DirectorField, np1: DirectorField, p: ElasticParams, num_gauss_points: int = 4
) -> DirectorField:
    _require_same_grid(nm.grid, np1.grid)
    if num_gauss_points < 1:
        raise ValueError("num_gauss_points must be >= 1")
    xi, w = gauss_legendre(num_gauss_points)
    mid = 0.5 * (nm.data + np1.data)
    half_diff = 0.5 * (nm.data - np1.data)
    out = np.zeros_like(nm.data)
    for x, wk in zip(xi, w):
        state = DirectorField(nm.grid, mid + x * half_diff)
        out += 0.5 * wk * variational_derivative(plan, state, p).data
    return DirectorField(nm.grid, out)


def dg_gonzalez(
    plan: SpectralPlan,
    nm: DirectorField,
    np1: DirectorField,
    p: ElasticParams,
    eps0: float = 0.0,
) -> DirectorField:
    _require_same_grid(nm.grid, np1.grid)
    n_half = lincomb(0.5, nm, 0.5, np1)
    g = variational_derivative(plan, n_half, p)
    dn = lincomb(1.0, np1, -1.0, nm)
    denom = discrete_inner(dn, dn) + eps0
    if denom == 0.0:
        return g  # n_new == n_old and eps0 == 0: correction is 0/0 with zero numerator
    df = energy(plan, np1, p).total - energy(plan, nm, p).total
    coeff = (df - discrete_inner(g, dn)) / denom
    return DirectorField(nm.grid, g.data + coeff * dn.data)


def evaluate(
    plan: SpectralPlan,
    kind: DiscreteGradientKind,
    nm: DirectorField,
    np1: DirectorField,
    p: ElasticParams,
) -> DirectorField:
    if isinstance(kind, OseenFrank):
        return dg_oseen_frank(plan, nm, np1, p)
    if isinstance(kind, MeanValue):
        return dg_mean_value(plan, nm, np1, p, kind.num_gauss_points)
    if isinstance(kind, Gonzalez):
        return dg_gonzalez(plan, nm, np1, p, default_eps0(kind, nm.grid))
    raise TypeError(f"unknown discrete gradient kind {kind!r}")


def energy_difference_residual(
    plan: SpectralPlan,
    kind: DiscreteGradientKind,
    nm: DirectorField,
    np1: DirectorField,
    p: ElasticParams,
) -> float:
    """| <D, dn> - (F[n_new]-F[n_old]) | / (1 + |F[n_new]-F[n_old]|)."""
    d = evaluate(plan, kind, nm, np1, p)
    dn = lincomb(1.0, np1, -1.0, nm)
    df = energy(plan, np1, p).total - energy(plan, nm, p).total
    return abs(discrete_inner(d, dn) - df) / (1.0 + abs(df))
