"""Parameter scans over diagonal and rectangular grids, and their CSV output."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .estimator import MerminCorrelator
from .exceptions import InvalidParameterError

CSV_HEADER = ("param1", "param2", "value", "violated", "method")


@dataclass(frozen=True)
class DiagonalGrid:
    """``param1 = p_min, p_min + step, ... <= p_max`` and ``param2 = param1 + offset``."""

    p_min: float = 0.001
    p_max: float = 0.95
    step: float = 0.005
    offset: float = 0.001

    def points(self) -> np.ndarray:
        if self.step <= 0:
            raise InvalidParameterError(f"step must be positive, got {self.step}")
        if self.p_max < self.p_min:
            raise InvalidParameterError("p_max must be >= p_min")
        count = math.floor((self.p_max - self.p_min) / self.step + 1e-9) + 1
        p1 = np.round(self.p_min + self.step * np.arange(count), 12)
        p2 = np.round(p1 + self.offset, 12)
        return np.column_stack([p1, p2])


@dataclass(frozen=True)
class RectangularGrid:
    """Row-major product grid: ``param1`` varies slowest."""

    p1_min: float = 0.001
    p1_max: float = 0.95
    p1_num: int = 200
    p2_min: float = 0.001
    p2_max: float = 0.95
    p2_num: int = 200

    def points(self) -> np.ndarray:
        if self.p1_num < 1 or self.p2_num < 1:
            raise InvalidParameterError("grid sizes must be positive")
        p1 = np.round(np.linspace(self.p1_min, self.p1_max, self.p1_num), 12)
        p2 = np.round(np.linspace(self.p2_min, self.p2_max, self.p2_num), 12)
        g1, g2 = np.meshgrid(p1, p2, indexing="ij")
        return np.column_stack([g1.ravel(), g2.ravel()])


@dataclass(frozen=True)
class ScanRequest:
    state: str = "sc"
    setup: int = 1
    phi: float | str | None = None
    angles: object = "sc-pi"
    grid: DiagonalGrid | RectangularGrid = field(default_factory=DiagonalGrid)
    method: str = "analytic"
    cutoff: int | None = None
    n_jobs: int | None = None

    def estimator(self) -> MerminCorrelator:
        return MerminCorrelator(
            state=self.state,
            setup=self.setup,
            phi=self.phi,
            angles=self.angles,
            method=self.method,
            cutoff=self.cutoff,
            n_jobs=self.n_jobs,
        )


@dataclass(frozen=True)
class ScanRow:
    param1: float
    param2: float
    mermin_value: float | None
    violated: bool
    method: str


def run_scan(request: ScanRequest):
    """Evaluate every grid point; returns ``(rows, fitted_estimator)``."""
    X = request.grid.points()
    est = request.estimator().fit(X)
    values = est.evaluate(X)
    method = est.correlator_method_.value
    rows = []
    for (p1, p2), v in zip(X, values):
        if np.isnan(v):
            rows.append(ScanRow(float(p1), float(p2), None, False, method))
        else:
            rows.append(
                ScanRow(float(p1), float(p2), float(v), abs(v) > est.classical_bound_, method)
            )
    return rows, est


def _fmt(x) -> str:
    return f"{x:.12g}"


def write_csv(rows, out):
    """Write rows to a path or text stream with LF line endings."""
    if isinstance(out, (str, bytes)) or hasattr(out, "__fspath__"):
        with open(out, "w", newline="", encoding="utf-8") as fh:
            return write_csv(rows, fh)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow(
            [
                _fmt(r.param1),
                _fmt(r.param2),
                "" if r.mermin_value is None else _fmt(r.mermin_value),
                "true" if r.violated else "false",
                r.method,
            ]
        )


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def read_csv(path):
    """Parse a CSV produced by :func:`write_csv` back into rows."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        return [
            ScanRow(
                float(rec["param1"]),
                float(rec["param2"]),
                float(rec["value"]) if rec["value"] else None,
                rec["violated"] == "true",
                rec["method"],
            )
            for rec in reader
        ]


@dataclass(frozen=True)
class MaxViolation:
    param1: float
    param2: float
    mermin_value: float
    classical_bound: float
    quantum_bound: float

    @property
    def magnitude(self) -> float:
        return abs(self.mermin_value)

    @property
    def gap_to_quantum_bound(self) -> float:
        return self.quantum_bound - self.magnitude


def max_violation(rows, classical, quantum) -> MaxViolation:
    """Row with the largest ``|value|``; ties go to the smallest ``(param1, param2)``."""
    valid = [r for r in rows if r.mermin_value is not None]
    if not valid:
        raise InvalidParameterError("every grid point is degenerate; nothing to maximize")
    best = min(valid, key=lambda r: (-abs(r.mermin_value), r.param1, r.param2))
    return MaxViolation(best.param1, best.param2, best.mermin_value, classical, quantum)
