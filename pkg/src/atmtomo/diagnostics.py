"""Per-iteration convergence records, error metrics and CSV round-trip."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

CSV_HEADER = ["iter", "F", "step_norm", "rel_error", "grad_norm", "discrepancy", "seconds"]


@dataclass(frozen=True)
class ConvergenceRecord:
    iteration: int
    objective: float
    step_norm: float
    relative_error: float | None
    gradient_norm: float
    discrepancy: float
    seconds: float


def _values_of(obj) -> np.ndarray:
    values = obj.values if hasattr(obj, "values") else obj
    return np.asarray(values, dtype=float)


def _check_pair(phi, truth):
    if hasattr(phi, "grid") and hasattr(truth, "grid") and phi.grid != truth.grid:
        raise ValueError("fields live on different grids")
    a, b = _values_of(phi), _values_of(truth)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return a, b


def total_error(phi, truth) -> float:
    """Euclidean distance ||phi - truth||."""
    a, b = _check_pair(phi, truth)
    return float(np.linalg.norm(a - b))


def relative_error(phi, truth) -> float:
    """||phi - truth|| / ||truth||; zero everywhere matches itself at 0."""
    a, b = _check_pair(phi, truth)
    tn = float(np.linalg.norm(b))
    if tn == 0.0:
        if float(np.linalg.norm(a)) == 0.0:
            return 0.0
        raise ValueError("relative error undefined against a zero truth")
    return float(np.linalg.norm(a - b)) / tn


def _cell(value) -> str:
    return "" if value is None else repr(value)


def write_csv(records, path) -> None:
    """One row per record; missing relative errors become empty cells."""
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for r in records:
                writer.writerow(
                    [
                        r.iteration,
                        _cell(r.objective),
                        _cell(r.step_norm),
                        _cell(r.relative_error),
                        _cell(r.gradient_norm),
                        _cell(r.discrepancy),
                        _cell(r.seconds),
                    ]
                )
    except OSError as exc:
        raise OSError(f"failed to write convergence CSV {path}: {exc}") from exc


def read_csv(path) -> list[ConvergenceRecord]:
    """Inverse of write_csv; text round-trips exactly via repr floats."""
    records = []
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != CSV_HEADER:
                raise ValueError(f"{path}: unexpected CSV header {header}")
            for row in reader:
                records.append(
                    ConvergenceRecord(
                        iteration=int(row[0]),
                        objective=float(row[1]),
                        step_norm=float(row[2]),
                        relative_error=None if row[3] == "" else float(row[3]),
                        gradient_norm=float(row[4]),
                        discrepancy=float(row[5]),
                        seconds=float(row[6]),
                    )
                )
    except OSError as exc:
        raise OSError(f"failed to read convergence CSV {path}: {exc}") from exc
    return records
