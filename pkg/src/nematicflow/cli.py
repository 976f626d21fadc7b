"""Command-line entry points.

Subcommands:

  run                integrate a configured flow; writes timeseries.csv,
                     snapshots and figures into the output directory
  convergence-time   temporal refinement study on the manufactured problem
  convergence-space  spatial refinement study on the manufactured problem
  verify-dg          energy-difference identity residuals of all discrete
                     gradients on random unit-field pairs

Exit codes: 0 success, 1 validation error, 2 solver failure, 3 check failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import figures, manufactured, output
from .config import ConfigError, parse_config_file
from .discrete_gradient import (
    Gonzalez,
    MeanValue,
    OseenFrank,
    energy_difference_residual,
    kind_from_name,
)
from .energy import ElasticParams, energy
from .fields import Grid, random_unit_pair
from .newton_krylov import SolverConfig
from .spectral import SpectralPlan
from .stepper import StepFailure, run

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SOLVER = 2
EXIT_CHECK = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nematicflow",
        description="Pseudospectral solver for unit-director gradient flows "
                    "of the splay/twist/bend elastic energy.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate a configured flow")
    p_run.add_argument("--config", required=True, help="path to a key = value config file")
    p_run.add_argument("--out", default=None, help="output directory (overrides output.dir)")

    for name in ("convergence-time", "convergence-space"):
        p = sub.add_parser(name, help=f"{name.split('-')[1]} refinement study")
        p.add_argument("--kind", default="oseen-frank",
                       choices=["mean-value", "gonzalez", "oseen-frank"])
        p.add_argument("--out", default="out")
        p.add_argument("--k1", type=float, default=2.0)
        p.add_argument("--k2", type=float, default=3.0)
        p.add_argument("--k3", type=float, default=4.0)
        if name == "convergence-time":
            p.add_argument("--grid", type=int, default=24, help="collocation points per axis")
            p.add_argument("--taus", default="0.01,0.005,0.0025",
                           help="comma-separated decreasing step sizes")
            p.add_argument("--t-end", type=float, default=0.2)
        else:
            p.add_argument("--grids", default="8,12,16,20,24,28,32",
                           help="comma-separated increasing resolutions")
            p.add_argument("--tau", type=float, default=1e-4)
            p.add_argument("--t-end", type=float, default=0.05)

    p_dg = sub.add_parser("verify-dg", help="energy-difference identity check")
    p_dg.add_argument("--grid", type=int, default=16, help="collocation points per axis")
    p_dg.add_argument("--trials", type=int, default=20)
    p_dg.add_argument("--seed", type=int, default=42)
    p_dg.add_argument("--tol", type=float, default=1e-10)
    p_dg.add_argument("--k1", type=float, default=2.0)
    p_dg.add_argument("--k2", type=float, default=3.0)
    p_dg.add_argument("--k3", type=float, default=4.0)
    return parser


def _cmd_run(args) -> int:
    cfg = parse_config_file(args.config)
    out_dir = Path(args.out if args.out is not None else cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    plan = SpectralPlan(cfg.grid)
    n0 = cfg.initial_field()
    writer = output.TimeseriesWriter(out_dir / "timeseries.csv")
    schedule = cfg.snapshots
    pending_times = list(schedule.times)
    is_2d = cfg.grid.dims[2] == 1

    def snapshot(record, field):
        stem = out_dir / f"snapshot_{record.step:06d}"
        output.write_snapshot(field, record.t, stem.with_suffix(".rdgsnap"))
        if cfg.vtk:
            output.write_vtk(field, stem.with_suffix(".vtk"))
        if cfg.figures and is_2d:
            figures.plot_director_slice(field, stem.with_suffix(".png"))

    def on_step(record, field):
        writer.append(record)
        take = schedule.every_steps > 0 and record.step % schedule.every_steps == 0
        while pending_times and record.t >= pending_times[0] - 1e-12:
            pending_times.pop(0)
            take = True
        if take:
            snapshot(record, field)

    try:
        records = run(
            plan, n0, cfg.params, cfg.kind, cfg.time, cfg.solver,
            on_step=on_step, precondition=cfg.precondition,
        )
    except StepFailure as err:
        writer.close()
        print(f"error: solver-failure: {err}", file=sys.stderr)
        return EXIT_SOLVER
    finally:
        writer.close()

    f0 = energy(plan, n0, cfg.params).total
    last = records[-1]
    print(f"completed {len(records)} steps to t={last.t:.17g}")
    print(f"energy: initial={f0:.17g} final={last.energy.total:.17g}")
    print(f"max length error (final state): {last.length_error:.3e}")

    if cfg.figures:
        data = output.read_timeseries(out_dir / "timeseries.csv")
        figures.plot_energy_history(data, out_dir / "energy_history.png")
        figures.plot_length_error_history(data, out_dir / "length_error_history.png")
        figures.plot_cost_history(data, out_dir / "solver_cost_history.png")
        if cfg.time.adaptive:
            figures.plot_step_size_history(data, out_dir / "step_size_history.png")
    return EXIT_OK


def _cmd_convergence_time(args) -> int:
    taus = [float(v) for v in args.taus.split(",")]
    kind = kind_from_name(args.kind)
    p = ElasticParams(args.k1, args.k2, args.k3)
    report = manufactured.temporal_convergence_study(kind, p, args.grid, taus, args.t_end)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"temporal_convergence_{args.kind}.csv"
    output.write_convergence_csv(report, csv_path)
    figures.plot_convergence(report, out_dir / f"temporal_convergence_{args.kind}.png",
                             reference_order=2.0)
    print(f"wrote {csv_path}")
    print("tau        err_n1       err_n2       err_n3     orders")
    for i, (tau, err) in enumerate(zip(report.parameters, report.errors)):
        tail = ""
        if i > 0:
            tail = "  " + " ".join(f"{o:.3f}" for o in report.orders[i - 1])
        print(f"{tau:<10.5g} {err[0]:<12.5e} {err[1]:<12.5e} {err[2]:<12.5e}{tail}")
    return EXIT_OK


def _cmd_convergence_space(args) -> int:
    grids = [int(v) for v in args.grids.split(",")]
    kind = kind_from_name(args.kind)
    p = ElasticParams(args.k1, args.k2, args.k3)
    report = manufactured.spatial_convergence_study(kind, p, grids, args.tau, args.t_end)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"spatial_convergence_{args.kind}.csv"
    output.write_convergence_csv(report, csv_path)
    figures.plot_convergence(report, out_dir / f"spatial_convergence_{args.kind}.png")
    print(f"wrote {csv_path}")
    print("N        err_n1       err_n2       err_n3")
    for n_pts, err in zip(report.parameters, report.errors):
        print(f"{int(n_pts):<8d} {err[0]:<12.5e} {err[1]:<12.5e} {err[2]:<12.5e}")
    return EXIT_OK


def verify_discrete_gradients(
    n_points: int, trials: int, seed: int, p: ElasticParams
) -> dict[str, float]:
    """Worst energy-difference identity residual per gradient construction
    over `trials` random nearby unit-field pairs."""
    grid = Grid((n_points, n_points, n_points), (2 * np.pi, 2 * np.pi, 2 * np.pi))
    plan = SpectralPlan(grid)
    rng = np.random.default_rng(seed)
    kinds = {
        "oseen-frank": OseenFrank(),
        "gonzalez(eps0=0)": Gonzalez(eps0=0.0),
        "mean-value(ng=2)": MeanValue(2),
        "mean-value(ng=4)": MeanValue(4),
    }
    worst = {name: 0.0 for name in kinds}
    for _ in range(trials):
        nm, np1 = random_unit_pair(grid, rng)
        for name, kind in kinds.items():
            res = energy_difference_residual(plan, kind, nm, np1, p)
            worst[name] = max(worst[name], res)
    return worst


def _cmd_verify_dg(args) -> int:
    p = ElasticParams(args.k1, args.k2, args.k3)
    worst = verify_discrete_gradients(args.grid, args.trials, args.seed, p)
    ok = True
    for name, res in worst.items():
        status = "PASS" if res <= args.tol else "FAIL"
        ok &= res <= args.tol
        print(f"kind={name} grid={args.grid} trials={args.trials} "
              f"max_residual={res:.3e} tol={args.tol:.1e} {status}")
    if not ok:
        print(f"error: identity-check-failed: residual above {args.tol:.1e}", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "convergence-time":
            return _cmd_convergence_time(args)
        if args.command == "convergence-space":
            return _cmd_convergence_space(args)
        if args.command == "verify-dg":
            return _cmd_verify_dg(args)
        raise AssertionError(f"unhandled command {args.command}")
    except (ConfigError, FileNotFoundError, ValueError) as err:
        print(f"error: invalid-input: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except StepFailure as err:
        print(f"error: solver-failure: {err}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
