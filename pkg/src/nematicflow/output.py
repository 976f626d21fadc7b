"""Diagnostic time series (CSV), binary snapshots, and VTK export.

Floats are serialized with 17 significant digits so every double round-trips
bit-exactly; the time-series writer flushes at least every 100 rows so an
aborted run keeps its partial history.

Snapshot layout (all little-endian, fixed regardless of host):

    magic     8 bytes   b"RDGSNAP1"
    dims      3 x uint32
    lengths   3 x float64
    origin    3 x float64
    time      1 x float64
    order     8 bytes   b"n1n2n3\\x00\\x00"  (component order of the payload)
    width     1 x uint32 = 8                 (IEEE-754 scalar width)
    payload   3 * N1*N2*N3 float64, per component, x1-fastest
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .fields import DirectorField, Grid
from .manufactured import ConvergenceReport
from .stepper import StepRecord

SNAPSHOT_MAGIC = b"RDGSNAP1"
_COMPONENT_ORDER = b"n1n2n3\x00\x00"
_HEADER = struct.Struct("<8s3I3d3dd8sI")

TIMESERIES_COLUMNS = (
    "step,t,tau,F_total,F_splay,F_twist,F_bend,linf_length_err,"
    "newton_iters,krylov_iters,fevals,converged"
)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def record_row(r: StepRecord) -> str:
    return ",".join(
        [
            str(r.step),
            _fmt(r.t),
            _fmt(r.tau),
            _fmt(r.energy.total),
            _fmt(r.energy.splay),
            _fmt(r.energy.twist),
            _fmt(r.energy.bend),
            _fmt(r.length_error),
            str(r.stats.newton_iters),
            str(r.stats.krylov_iters_total),
            str(r.stats.function_evals),
            "1" if r.stats.converged else "0",
        ]
    )


class TimeseriesWriter:
    """Append-only CSV sink; flushes every `flush_every` rows and on close."""

    def __init__(self, path, flush_every: int = 100):
        self.path = path
        self._fh = open(path, "w", encoding="utf-8", newline="\n")
        self._fh.write(TIMESERIES_COLUMNS + "\n")
        self._pending = 0
        self._flush_every = flush_every

    def append(self, record: StepRecord):
        self._fh.write(record_row(record) + "\n")
        self._pending += 1
        if self._pending >= self._flush_every:
            self._fh.flush()
            self._pending = 0

    def close(self):
        if not self._fh.closed:
            self._fh.flush()
            self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def write_timeseries(records: list[StepRecord], path):
    if not records:
        raise ValueError("no records to write")
    with TimeseriesWriter(path) as writer:
        for r in records:
            writer.append(r)


@dataclass
class TimeseriesData:
    step: np.ndarray
    t: np.ndarray
    tau: np.ndarray
    f_total: np.ndarray
    f_splay: np.ndarray
    f_twist: np.ndarray
    f_bend: np.ndarray
    length_err: np.ndarray
    newton_iters: np.ndarray
    krylov_iters: np.ndarray
    fevals: np.ndarray
    converged: np.ndarray


def read_timeseries(path) -> TimeseriesData:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != TIMESERIES_COLUMNS:
            raise ValueError(f"{path}: unexpected time-series header {header!r}")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    cols = list(zip(*rows)) if rows else [[] for _ in range(12)]
    return TimeseriesData(
        step=np.array([int(v) for v in cols[0]]),
        t=np.array([float(v) for v in cols[1]]),
        tau=np.array([float(v) for v in cols[2]]),
        f_total=np.array([float(v) for v in cols[3]]),
        f_splay=np.array([float(v) for v in cols[4]]),
        f_twist=np.array([float(v) for v in cols[5]]),
        f_bend=np.array([float(v) for v in cols[6]]),
        length_err=np.array([float(v) for v in cols[7]]),
        newton_iters=np.array([int(v) for v in cols[8]]),
        krylov_iters=np.array([int(v) for v in cols[9]]),
        fevals=np.array([int(v) for v in cols[10]]),
        converged=np.array([v == "1" for v in cols[11]]),
    )


# ---------------------------------------------------------------------------
# snapshots

def write_snapshot(field: DirectorField, t: float, path):
    grid = field.grid
    header = _HEADER.pack(
        SNAPSHOT_MAGIC,
        *grid.dims,
        *grid.lengths,
        *grid.origin,
        float(t),
        _COMPONENT_ORDER,
        8,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        for i in range(3):
            fh.write(np.ascontiguousarray(field.data[i].ravel(order="F"), dtype="<f8").tobytes())


def read_snapshot(path) -> tuple[DirectorField, float]:
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        if len(raw) < _HEADER.size:
            raise ValueError(f"{path}: truncated snapshot header")
        fields = _HEADER.unpack(raw)
        magic = fields[0]
        if magic != SNAPSHOT_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}, expected {SNAPSHOT_MAGIC!r}")
        dims = fields[1:4]
        lengths = fields[4:7]
        origin = fields[7:10]
        t = fields[10]
        order, width = fields[11], fields[12]
        if order != _COMPONENT_ORDER or width != 8:
            raise ValueError(f"{path}: unsupported component order or scalar width")
        npts = dims[0] * dims[1] * dims[2]
        payload = fh.read(3 * npts * 8)
        if len(payload) != 3 * npts * 8:
            raise ValueError(
                f"{path}: truncated payload, expected {3 * npts * 8} bytes, got {len(payload)}"
            )
    grid = Grid(tuple(dims), tuple(lengths), tuple(origin))
    flat = np.frombuffer(payload, dtype="<f8")
    data = np.stack([
        flat[i * npts:(i + 1) * npts].reshape(grid.dims, order="F") for i in range(3)
    ])
    return DirectorField(grid, data), float(t)


def write_vtk(field: DirectorField, path, name: str = "director"):
    """Legacy-VTK ASCII rectilinear export (x1-fastest point order)."""
    grid = field.grid
    n1, n2, n3 = grid.dims
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write("director field snapshot\n")
        fh.write("ASCII\n")
        fh.write("DATASET RECTILINEAR_GRID\n")
        fh.write(f"DIMENSIONS {n1} {n2} {n3}\n")
        for label, axis in (("X_COORDINATES", 0), ("Y_COORDINATES", 1), ("Z_COORDINATES", 2)):
            coords = grid.axis_coords(axis)
            fh.write(f"{label} {coords.size} double\n")
            fh.write(" ".join(_fmt(c) for c in coords) + "\n")
        fh.write(f"POINT_DATA {grid.num_points}\n")
        fh.write(f"VECTORS {name} double\n")
        flat = [field.data[i].ravel(order="F") for i in range(3)]
        for j in range(grid.num_points):
            fh.write(f"{_fmt(flat[0][j])} {_fmt(flat[1][j])} {_fmt(flat[2][j])}\n")


# ---------------------------------------------------------------------------
# convergence reports

def write_convergence_csv(report: ConvergenceReport, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{report.parameter_name},err_n1,err_n2,err_n3,order_n1,order_n2,order_n3\n")
        for i, (param, err) in enumerate(zip(report.parameters, report.errors)):
            if i == 0:
                order_cells = ["", "", ""]
            else:
                order_cells = [_fmt(o) for o in report.orders[i - 1]]
            fh.write(",".join([_fmt(param)] + [_fmt(v) for v in err] + order_cells) + "\n")
