"""Run configuration: a line-oriented ``section.key = value`` format.

Blank lines and ``#`` comments are ignored.  Every key is validated against
the schema below; unknown keys, missing required keys, type mismatches and
constraint violations all raise ConfigError naming the key, so no partially
valid configuration ever reaches the solver.

Initial conditions come either from a named preset (``ic.preset``) or from
inline expressions ``ic.n1``/``ic.n2``/``ic.n3`` in the coordinates x1, x2,
x3 (numpy functions available by name, e.g. ``sin(pi*x1)``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .discrete_gradient import DiscreteGradientKind, kind_from_name
from .energy import ElasticParams
from .fields import DirectorField, Grid, field_from_fn
from .manufactured import exact_solution
from .newton_krylov import SolverConfig
from .stepper import TimeControls


class ConfigError(ValueError):
    pass


# named initial states; all exactly unit length

def _preset_polar_stripe(x1, x2, x3):
    # angles 2*sin(pi*x1) (polar) and pi*x2 (azimuth)
    a = 2.0 * np.sin(np.pi * x1)
    return np.sin(a) * np.cos(np.pi * x2), np.sin(a) * np.sin(np.pi * x2), np.cos(a)


def _preset_inplane_wave(x1, x2, x3):
    # director confined to the x1-x3 plane, phase pi*x1 + 2*cos(pi*x2)
    a = np.pi * x1 + 2.0 * np.cos(np.pi * x2)
    return np.sin(a), np.zeros_like(a), np.cos(a)


IC_PRESETS = {
    "utest1": _preset_polar_stripe,
    "utest2": _preset_inplane_wave,
    "ana": lambda x1, x2, x3: exact_solution(x1, x2, x3, 0.0),
}


_EXPR_NAMES = {
    name: getattr(np, name)
    for name in (
        "sin", "cos", "tan", "arcsin", "arccos", "arctan", "arctan2", "sinh",
        "cosh", "tanh", "exp", "log", "sqrt", "abs", "minimum", "maximum",
    )
}
_EXPR_NAMES["pi"] = math.pi
_EXPR_NAMES["e"] = math.e


@dataclass
class SnapshotSchedule:
    every_steps: int = 0                      # 0 = disabled
    times: list[float] = field(default_factory=list)

    @property
    def enabled(self) -> bool:
        return self.every_steps > 0 or bool(self.times)


@dataclass
class RunConfig:
    grid: Grid
    params: ElasticParams
    kind: DiscreteGradientKind
    time: TimeControls
    solver: SolverConfig
    ic_preset: str | None
    ic_exprs: tuple[str, str, str] | None
    ic_normalize: bool
    output_dir: str
    snapshots: SnapshotSchedule
    figures: bool
    vtk: bool
    precondition: bool

    def initial_field(self) -> DirectorField:
        if self.ic_preset is not None:
            fn = IC_PRESETS[self.ic_preset]
        else:
            e1, e2, e3 = self.ic_exprs

            def fn(x1, x2, x3):
                env = dict(_EXPR_NAMES, x1=x1, x2=x2, x3=x3)
                return tuple(eval(expr, {"__builtins__": {}}, env) for expr in (e1, e2, e3))

        n0 = field_from_fn(self.grid, fn)
        if self.ic_normalize:
            length = np.sqrt(np.sum(n0.data**2, axis=0))
            if np.any(length == 0):
                raise ConfigError("ic: cannot normalize a zero vector")
            n0.data /= length[None]
        return n0


def _parse_lines(text: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value in {raw!r}")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key}")
        entries[key] = value
    return entries


class _Entries:
    """Typed access with key-naming errors; tracks consumption for the
    unknown-key check."""

    def __init__(self, entries: dict[str, str]):
        self._entries = entries
        self._used: set[str] = set()

    def has(self, key: str) -> bool:
        return key in self._entries

    def raw(self, key: str) -> str:
        self._used.add(key)
        return self._entries[key]

    def get_float(self, key: str, default=None) -> float:
        if key not in self._entries:
            if default is None:
                raise ConfigError(f"missing required key {key}")
            return default
        try:
            return float(self.raw(key))
        except ValueError:
            raise ConfigError(f"{key}: expected a number, got {self._entries[key]!r}") from None

    def get_int(self, key: str, default=None) -> int:
        v = self.get_float(key, default)
        if int(v) != v:
            raise ConfigError(f"{key}: expected an integer, got {v}")
        return int(v)

    def get_bool(self, key: str, default: bool) -> bool:
        if key not in self._entries:
            return default
        v = self.raw(key).lower()
        if v in ("true", "yes", "on", "1"):
            return True
        if v in ("false", "no", "off", "0"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {v!r}")

    def get_str(self, key: str, default=None) -> str:
        if key not in self._entries:
            if default is None:
                raise ConfigError(f"missing required key {key}")
            return default
        return self.raw(key)

    def get_floats(self, key: str, count: int, default=None) -> tuple[float, ...]:
        if key not in self._entries:
            if default is None:
                raise ConfigError(f"missing required key {key}")
            return default
        parts = self.raw(key).split()
        if len(parts) != count:
            raise ConfigError(f"{key}: expected {count} values, got {len(parts)}")
        try:
            return tuple(float(p) for p in parts)
        except ValueError:
            raise ConfigError(f"{key}: expected numbers, got {self._entries[key]!r}") from None

    def unknown(self) -> list[str]:
        return sorted(set(self._entries) - self._used)


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate configuration text (see module docstring)."""
    e = _Entries(_parse_lines(text))

    dims_f = e.get_floats("grid.dims", 3)
    if any(d < 1 or d != int(d) for d in dims_f):
        raise ConfigError(f"grid.dims: entries must be positive integers, got {dims_f}")
    dims = tuple(int(d) for d in dims_f)
    lengths = e.get_floats("grid.lengths", 3)
    if any(L <= 0 for L in lengths):
        raise ConfigError(f"grid.lengths: entries must be positive, got {lengths}")
    origin = e.get_floats("grid.origin", 3, default=(0.0, 0.0, 0.0))
    grid = Grid(dims, lengths, origin)

    k1 = e.get_float("params.k1")
    k2 = e.get_float("params.k2")
    k3 = e.get_float("params.k3")
    for name, v in (("params.k1", k1), ("params.k2", k2), ("params.k3", k3)):
        if v < 0 or not np.isfinite(v):
            raise ConfigError(f"{name}: must be finite and >= 0, got {v}")
    params = ElasticParams(k1, k2, k3)

    kind_name = e.get_str("dg.kind", "oseen-frank")
    gauss_points = e.get_int("dg.gauss_points", 4)
    if gauss_points < 1:
        raise ConfigError("dg.gauss_points: must be >= 1")
    eps0 = e.get_float("dg.eps0", -1.0)
    if e.has("dg.eps0") and eps0 < 0:
        raise ConfigError("dg.eps0: must be >= 0")
    try:
        kind = kind_from_name(kind_name, gauss_points, eps0 if e.has("dg.eps0") else None)
    except ValueError as err:
        raise ConfigError(f"dg.kind: {err}") from None

    mode = e.get_str("time.mode", "fixed")
    t_start = e.get_float("time.t_start", 0.0)
    t_end = e.get_float("time.t_end")
    extrapolate = e.get_bool("time.extrapolate_guess", False)
    if t_end <= t_start:
        raise ConfigError("time.t_end: must exceed time.t_start")
    try:
        if mode == "fixed":
            time = TimeControls.fixed(e.get_float("time.tau"), t_start, t_end,
                                      extrapolate_guess=extrapolate)
        elif mode == "adaptive":
            time = TimeControls.adaptive_controls(
                e.get_float("time.tau_min"), e.get_float("time.tau_max"),
                e.get_float("time.alpha"), t_start, t_end,
                extrapolate_guess=extrapolate)
        else:
            raise ConfigError(f"time.mode: expected 'fixed' or 'adaptive', got {mode!r}")
    except ValueError as err:
        raise ConfigError(f"time: {err}") from None

    try:
        solver = SolverConfig(
            abs_tol=e.get_float("solver.abs_tol", 1e-8),
            max_newton_iters=e.get_int("solver.max_newton_iters", 50),
            krylov_restart=e.get_int("solver.krylov_restart", 30),
            krylov_max_iters=e.get_int("solver.krylov_max_iters", 200),
            forcing_eta=e.get_float("solver.forcing_eta", 1e-3),
            eisenstat_walker=e.get_bool("solver.eisenstat_walker", False),
            armijo_c=e.get_float("solver.armijo_c", 1e-4),
            backtrack_factor=e.get_float("solver.backtrack_factor", 0.5),
            max_backtracks=e.get_int("solver.max_backtracks", 10),
        )
    except ValueError as err:
        raise ConfigError(f"solver: {err}") from None
    precondition = e.get_bool("solver.precondition", False)

    ic_preset = e.get_str("ic.preset", "") or None
    ic_exprs = None
    if ic_preset is not None:
        if ic_preset not in IC_PRESETS:
            raise ConfigError(
                f"ic.preset: unknown preset {ic_preset!r}; available: {sorted(IC_PRESETS)}"
            )
    else:
        if not (e.has("ic.n1") and e.has("ic.n2") and e.has("ic.n3")):
            raise ConfigError("ic: provide ic.preset or all of ic.n1, ic.n2, ic.n3")
        ic_exprs = (e.get_str("ic.n1"), e.get_str("ic.n2"), e.get_str("ic.n3"))
    ic_normalize = e.get_bool("ic.normalize", False)

    output_dir = e.get_str("output.dir", "out")
    every = e.get_int("output.snapshot_every", 0)
    if every < 0:
        raise ConfigError("output.snapshot_every: must be >= 0")
    times: list[float] = []
    if e.has("output.snapshot_times"):
        parts = e.raw("output.snapshot_times").split()
        try:
            times = [float(p) for p in parts]
        except ValueError:
            raise ConfigError("output.snapshot_times: expected numbers") from None
        if sorted(times) != times:
            raise ConfigError("output.snapshot_times: must be increasing")
    snapshots = SnapshotSchedule(every, times)
    figures = e.get_bool("output.figures", True)
    vtk = e.get_bool("output.vtk", False)

    unknown = e.unknown()
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(unknown)}")

    cfg = RunConfig(
        grid=grid, params=params, kind=kind, time=time, solver=solver,
        ic_preset=ic_preset, ic_exprs=ic_exprs, ic_normalize=ic_normalize,
        output_dir=output_dir, snapshots=snapshots, figures=figures, vtk=vtk,
        precondition=precondition,
    )
    # fail early if inline expressions do not evaluate
    if ic_exprs is not None:
        try:
            cfg.initial_field()
        except ConfigError:
            raise
        except Exception as err:
            raise ConfigError(f"ic expressions failed to evaluate: {err}") from None
    return cfg


def parse_config_file(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
