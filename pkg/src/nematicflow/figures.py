"""Matplotlib renderings of run diagnostics and convergence reports.

Figures are written next to the CSV they illustrate; everything uses the Agg
backend so rendering works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .fields import DirectorField
from .manufactured import ConvergenceReport
from .output import TimeseriesData


def _save(fig, path):
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_energy_history(data: TimeseriesData, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(data.t, data.f_total, "k", label="energy", lw=1.5)
    # unweighted deformation integrals (weighted by k_i/2 inside the total)
    ax.plot(data.t, data.f_splay, label="splay integral", lw=0.8)
    ax.plot(data.t, data.f_twist, label="twist integral", lw=0.8)
    ax.plot(data.t, data.f_bend, label="bend integral", lw=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel("energy")
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_length_error_history(data: TimeseriesData, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    err = np.maximum(data.length_err, 1e-18)  # keep the log axis finite
    ax.semilogy(data.t, err, lw=1.0)
    ax.set_xlabel("t")
    ax.set_ylabel(r"max $|\,|n|-1\,|$")
    return _save(fig, path)


def plot_cost_history(data: TimeseriesData, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(data.t, data.fevals, lw=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel("residual evaluations per step")
    return _save(fig, path)


def plot_step_size_history(data: TimeseriesData, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(data.t, data.tau, lw=1.0)
    ax.set_xlabel("t")
    ax.set_ylabel(r"$\tau$")
    return _save(fig, path)


def plot_convergence(report: ConvergenceReport, path, reference_order: float | None = None):
    fig, ax = plt.subplots(figsize=(6, 4))
    params = np.asarray(report.parameters)
    errs = np.asarray(report.errors)
    labels = ("n1", "n2", "n3")
    if report.parameter_name == "tau":
        for c in range(3):
            ax.loglog(params, errs[:, c], "o-", label=labels[c], lw=1.0)
        if reference_order:
            ref = errs[0, :].max() * (params / params[0]) ** reference_order
            ax.loglog(params, ref, "k--", lw=0.8, label=f"order {reference_order:g}")
        ax.set_xlabel(r"$\tau$")
    else:
        for c in range(3):
            ax.semilogy(params, errs[:, c], "o-", label=labels[c], lw=1.0)
        ax.set_xlabel("N")
    ax.set_ylabel(r"$L^\infty$ error")
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_director_slice(field: DirectorField, path, k3: int = 0):
    """Quiver of the in-plane components on the x1-x2 plane at index k3,
    colored by the out-of-plane component."""
    grid = field.grid
    x1 = grid.axis_coords(0)
    x2 = grid.axis_coords(1)
    u = field.data[0][:, :, k3]
    v = field.data[1][:, :, k3]
    w = field.data[2][:, :, k3]
    fig, ax = plt.subplots(figsize=(5.5, 5))
    x, y = np.meshgrid(x1, x2, indexing="ij")
    q = ax.quiver(x, y, u, v, w, cmap="coolwarm", clim=(-1, 1),
                  pivot="mid", scale=30, width=0.003)
    fig.colorbar(q, ax=ax, label="n3")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_aspect("equal")
    return _save(fig, path)
