"""Parameter-grid evaluation, contour extraction and reproducible tabular output."""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product
from pathlib import Path

import numpy as np
from skimage.measure import find_contours

from . import __version__
from .ed import EDConfig, converge_cutoff
from .errors import HybridDickeError, InvalidAxis, IoFailure, NotAGrid, UnstableRegime
from .model import ModelParams, PhaseLabel, classify_phase, dressed_frame
from .thermo import PHASE_POINT_FIELDS, solve_point

AXIS_NAMES = ("chi", "g0", "lambda", "N")

ED_FIELDS = (
    "phase", "chi", "chi_n", "ratio_Omega_omega_n", "psi_q_inf",
    "ground_energy", "n_b", "jz", "x_mean", "x2_mean", "b_mean", "parity",
    "psi_q", "delta_x", "cutoff_used", "converged", "splitting",
)


@dataclass(frozen=True)
class AxisSpec:
    """One linear grid axis.

    ``values`` overrides the linear spacing (used for lists of ``N``).  A
    single-point axis is written with ``count=1`` and ``start == stop``.
    """

    name: str
    start: float = 0.0
    stop: float = 0.0
    count: int = 2
    values: tuple | None = None

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise InvalidAxis(f"unknown axis {self.name!r}; expected one of {AXIS_NAMES}")
        if self.values is not None:
            vals = tuple(self.values)
            if not vals:
                raise InvalidAxis(f"axis {self.name!r} has no values")
            if self.name == "N" and any(int(v) != v or v < 1 for v in vals):
                raise InvalidAxis("N values must be positive integers")
            object.__setattr__(self, "values", vals)
            object.__setattr__(self, "count", len(vals))
            return
        if self.name == "N":
            raise InvalidAxis("the N axis takes an explicit list of values")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise InvalidAxis(f"axis {self.name!r} bounds must be finite")
        if self.count == 1:
            if self.start != self.stop:
                raise InvalidAxis("a single-point axis needs start == stop")
        elif self.count < 2 or not self.start < self.stop:
            raise InvalidAxis(
                f"axis {self.name!r} needs start < stop and count >= 2, "
                f"got {self.start}:{self.stop}:{self.count}"
            )

    @classmethod
    def single(cls, name: str, value: float) -> "AxisSpec":
        return cls(name, value, value, 1)

    @classmethod
    def parse(cls, text: str) -> "AxisSpec":
        """Parse ``name=start:stop:count`` or ``N=4,10,40``."""
        try:
            name, spec = text.split("=", 1)
            name = name.strip()
            if name == "N" or ("," in spec and ":" not in spec):
                return cls(name, values=tuple(_number(v) for v in spec.split(",")))
            start, stop, count = spec.split(":")
            return cls(name, float(start), float(stop), int(count))
        except InvalidAxis:
            raise
        except ValueError as exc:
            raise InvalidAxis(f"malformed axis {text!r}: {exc}") from exc

    def points(self) -> list:
        if self.values is not None:
            return list(self.values)
        if self.count == 1:
            return [float(self.start)]
        return np.linspace(self.start, self.stop, self.count).tolist()

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "start": self.start,
            "stop": self.stop,
            "count": self.count,
            "values": list(self.values) if self.values is not None else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AxisSpec":
        values = d.get("values")
        return cls(d["name"], d["start"], d["stop"], d["count"],
                   tuple(values) if values is not None else None)


def _number(text: str):
    value = float(text)
    return int(value) if value.is_integer() else value


def apply_axis(p: ModelParams, name: str, value) -> ModelParams:
    if name == "chi":
        return p.with_chi(value)
    if name == "lambda":
        return replace(p, lam=value)
    if name == "g0":
        return replace(p, g0=value)
    return replace(p, N=int(value))


@dataclass
class SweepResult:
    """Records of one sweep in row-major order (first axis outermost)."""

    base: ModelParams
    axes: tuple
    backend: str
    ed_config: EDConfig | None
    columns: tuple
    records: list = field(repr=False)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def column(self, name: str) -> list:
        return [r[name] for r in self.records]

    def status_counts(self) -> dict:
        return dict(sorted(Counter(r["status"] for r in self.records).items()))


def _observable_columns(axes, backend: str) -> tuple:
    names = {a.name for a in axes}
    fields = PHASE_POINT_FIELDS if backend == "analytic" else ED_FIELDS
    return tuple(f for f in fields if f not in names)


def _evaluate_analytic(p: ModelParams, tol: float) -> dict:
    point = solve_point(p, tol).as_dict()
    point["status"] = "unstable" if point["phase"] == PhaseLabel.UNSTABLE.value else "ok"
    return point


def _evaluate_ed(p: ModelParams, cfg: EDConfig, tol: float) -> dict:
    f = dressed_frame(p)
    phase = classify_phase(p, tol)
    row = {"phase": phase.value, "chi": f.chi, "chi_n": f.chi_n,
           "ratio_Omega_omega_n": p.Omega / f.omega_n if f.omega_n else None}
    if phase is PhaseLabel.UNSTABLE:
        row["status"] = "unstable"
        return row
    row["psi_q_inf"] = solve_point(p, tol).psi_q
    try:
        result = converge_cutoff(p, cfg)
    except UnstableRegime:
        row["status"] = "unstable"
        return row
    except HybridDickeError as exc:
        row["status"] = f"error:{type(exc).__name__}"
        return row
    row.update(result.summary())
    row["status"] = "ok" if result.converged else "unconverged"
    return row


def _evaluate(task):
    coords, p, backend, cfg, tol = task
    if backend == "analytic":
        values = _evaluate_analytic(p, tol)
    else:
        values = _evaluate_ed(p, cfg, tol)
    return coords, values


def run_sweep(
    base: ModelParams,
    axes,
    backend="analytic",
    workers: int = 1,
    tol: float = 1e-10,
) -> SweepResult:
    """Evaluate every point of a 1-D or 2-D grid.

    Parameters
    ----------
    base : ModelParams
        Parameters not set by an axis.
    axes : sequence of AxisSpec
        One or two axes; the first is outermost in the record order.
    backend : "analytic", "ed" or EDConfig
        ``"ed"`` uses the default :class:`EDConfig`.
    workers : int
        Process count; output is identical for any value.

    Failures at individual points are recorded in the ``status`` column and
    never abort the sweep.
    """
    axes = tuple(axes)
    if not 1 <= len(axes) <= 2:
        raise InvalidAxis(f"expected 1 or 2 axes, got {len(axes)}")
    names = [a.name for a in axes]
    if len(set(names)) != len(names) or {"chi", "lambda"} <= set(names):
        raise InvalidAxis(f"axes {names} set the same parameter twice")
    if isinstance(backend, EDConfig):
        cfg, backend = backend, "ed"
    elif backend == "ed":
        cfg = EDConfig()
    elif backend == "analytic":
        cfg = None
    else:
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "ed" and base.N is None and "N" not in names:
        raise ValueError("the ED backend needs a finite N")

    tasks = []
    for coords in product(*(a.points() for a in axes)):
        p = base
        for axis, value in zip(axes, coords):
            p = apply_axis(p, axis.name, value)
        tasks.append((coords, p, backend, cfg, tol))

    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            evaluated = list(pool.map(_evaluate, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        evaluated = [_evaluate(t) for t in tasks]

    obs_cols = _observable_columns(axes, backend)
    columns = tuple(names) + obs_cols + ("status",)
    records = []
    for coords, values in evaluated:
        row = dict(zip(names, coords))
        for col in obs_cols:
            row[col] = values.get(col)
        row["status"] = values["status"]
        records.append(row)
    return SweepResult(base, axes, backend, cfg, columns, records)


def _grid(result: SweepResult, name: str):
    if len(result.axes) != 2:
        raise NotAGrid(f"contours need a 2-D sweep, got {len(result.axes)} axes")
    a0, a1 = result.axes
    shape = (a0.count, a1.count)
    if len(result.records) != shape[0] * shape[1]:
        raise NotAGrid("record count does not match the axis product")
    raw = [r.get(name) for r in result.records]
    values = np.array([np.nan if v is None else float(v) for v in raw]).reshape(shape)
    return values, np.asarray(a0.points(), float), np.asarray(a1.points(), float)


def extract_contour(result: SweepResult, field: str, level: float) -> list:
    """Marching-squares level set of a numeric column on a 2-D sweep.

    Returns a list of ``(k, 2)`` arrays; each row is a point in axis
    coordinates ``(first axis, second axis)``.  Cells touching a missing
    value (e.g. an unstable point) are skipped.
    """
    values, x0, x1 = _grid(result, field)
    finite = np.isfinite(values)
    if finite.sum() < 4 or np.nanmin(values) == np.nanmax(values):
        return []
    filled = np.where(finite, values, np.nanmin(values))
    lines = find_contours(filled, level, mask=finite)
    idx0, idx1 = np.arange(x0.size), np.arange(x1.size)
    out = []
    for line in lines:
        coords = np.column_stack([np.interp(line[:, 0], idx0, x0), np.interp(line[:, 1], idx1, x1)])
        out.append(coords)
    return out


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".12g")
    return str(value)


def render_table(records, columns) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in records:
        writer.writerow([format_value(r.get(c)) for c in columns])
    return buf.getvalue()


def _write_bytes(destination, data: bytes) -> int:
    try:
        path = Path(destination)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
    except OSError as exc:
        raise IoFailure(f"cannot write {destination}: {exc}") from exc
    return len(data)


def write_table(records, destination, columns=None) -> int:
    """Write records as CSV and return the number of bytes written.

    ``records`` is a :class:`SweepResult` or a list of dicts (then
    ``columns`` is required).  Floats carry 12 significant digits and missing
    values are empty cells.
    """
    if isinstance(records, SweepResult):
        columns = columns or records.columns
        records = records.records
    if not records:
        raise ValueError("no records to write")
    if columns is None:
        raise ValueError("columns are required for plain record lists")
    return _write_bytes(destination, render_table(records, columns).encode("ascii"))


def sweep_metadata(result: SweepResult) -> dict:
    return {
        "tool": "hybrid_dicke",
        "version": __version__,
        "base": result.base.as_dict(),
        "axes": [a.as_dict() for a in result.axes],
        "backend": result.backend,
        "ed_config": result.ed_config.as_dict() if result.ed_config else None,
        "columns": list(result.columns),
        "record_count": len(result.records),
        "status_counts": result.status_counts(),
    }


def render_manifest(metadata: dict) -> str:
    return json.dumps(metadata, indent=2, sort_keys=True) + "\n"


def write_manifest(metadata, destination) -> int:
    """Write sweep metadata as JSON with sorted keys; returns bytes written."""
    if isinstance(metadata, SweepResult):
        metadata = sweep_metadata(metadata)
    if not metadata.get("axes", True):
        raise InvalidAxis("manifest without axes")
    return _write_bytes(destination, render_manifest(metadata).encode("ascii"))


def read_manifest(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc


def rerun_from_manifest(metadata: dict, workers: int = 1) -> SweepResult:
    """Repeat the sweep a manifest describes."""
    base = ModelParams(**metadata["base"])
    axes = [AxisSpec.from_dict(a) for a in metadata["axes"]]
    backend = metadata["backend"]
    if backend == "ed":
        backend = EDConfig(**metadata["ed_config"])
    return run_sweep(base, axes, backend, workers=workers)
