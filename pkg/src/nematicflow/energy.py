"""Oseen-Frank elastic energy for unit director fields, and its gradient.

The energy density splits into the three elementary deformations

    splay  (div n)^2,   twist  (n . curl n)^2,   bend  |n x curl n|^2,

weighted by the elastic moduli k1, k2, k3.  The saddle-splay term is absent:
on a periodic box it reduces to a surface integral and contributes nothing.

Convention used throughout (and required by the discrete-gradient energy
identities): nonlinear products are formed pointwise in physical space and
only then differentiated spectrally.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import DirectorField, cross_data
from .spectral import SpectralPlan, curl_data, divergence_data, grad_data


@dataclass(frozen=True)
class ElasticParams:
    """Splay/twist/bend moduli; all nonnegative."""

    k1: float
    k2: float
    k3: float

    def __post_init__(self):
        for name in ("k1", "k2", "k3"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class EnergyBreakdown:
    """Unweighted deformation integrals and the weighted total.

    splay = integral (div n)^2, twist = integral (n.curl n)^2,
    bend = integral |n x curl n|^2, total = (k1*splay + k2*twist + k3*bend)/2.
    """

    splay: float
    twist: float
    bend: float
    total: float


@dataclass
class Deformations:
    """Pointwise deformation measures of one state (plain arrays)."""

    div: np.ndarray    # div n
    curl: np.ndarray   # curl n, (3,...)
    twist: np.ndarray  # n . curl n
    bend: np.ndarray   # n x curl n, (3,...)


def deformations(plan: SpectralPlan, n: DirectorField) -> Deformations:
    plan._check(n.grid)
    div = divergence_data(plan, n.data)
    crl = curl_data(plan, n.data)
    twist = np.sum(n.data * crl, axis=0)
    bend = cross_data(n.data, crl)
    return Deformations(div, crl, twist, bend)


def energy(plan: SpectralPlan, n: DirectorField, p: ElasticParams) -> EnergyBreakdown:
    d = deformations(plan, n)
    h = n.grid.cell_volume
    f1 = h * float(np.sum(d.div * d.div))
    f2 = h * float(np.sum(d.twist * d.twist))
    f3 = h * float(np.sum(d.bend * d.bend))
    return EnergyBreakdown(f1, f2, f3, 0.5 * (p.k1 * f1 + p.k2 * f2 + p.k3 * f3))


def assemble_gradient_data(
    plan: SpectralPlan,
    p: ElasticParams,
    n_data: np.ndarray,
    div: np.ndarray,
    curl: np.ndarray,
    twist: np.ndarray,
    bend: np.ndarray,
) -> np.ndarray:
    """Shared kernel for the energy gradient:

        -k1 grad(div) + k2 [twist*curl + curl(twist*n)]
                      + k3 [curl x bend + curl(bend x n)].

    Evaluated at one state it is the variational derivative; evaluated at the
    trapezoidal midpoint quantities it is the energy-tailored discrete
    gradient.  Using one kernel makes the two coincide exactly when both
    arguments of the discrete gradient are equal.
    """
    out = -p.k1 * grad_data(plan, div)
    if p.k2 != 0.0:
        out += p.k2 * (twist[None] * curl + curl_data(plan, twist[None] * n_data))
    if p.k3 != 0.0:
        out += p.k3 * (cross_data(curl, bend) + curl_data(plan, cross_data(bend, n_data)))
    return out


def variational_derivative(plan: SpectralPlan, n: DirectorField, p: ElasticParams) -> DirectorField:
    """Unconstrained variational derivative of the energy (periodic box)."""
    d = deformations(plan, n)
    return DirectorField(
        n.grid, assemble_gradient_data(plan, p, n.data, d.div, d.curl, d.twist, d.bend)
    )


def constrained_rhs(plan: SpectralPlan, n: DirectorField, p: ElasticParams) -> DirectorField:
    """-(n x dF/dn) x n: the steepest-descent direction tangent to |n|=const."""
    g = variational_derivative(plan, n, p).data
    return DirectorField(n.grid, -cross_data(cross_data(n.data, g), n.data))
