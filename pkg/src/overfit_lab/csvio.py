"""Deterministic CSV persistence for reports, spectra, and singular values.

Floats are written as their shortest round-trip decimal (repr), infinities
as "inf", missing fields as empty cells; lines end with LF regardless of
platform.  Identical reports serialize to identical bytes.
"""

from __future__ import annotations

import math
from dataclasses import fields

import numpy as np

from .errors import ShapeError
from .experiments import ExperimentReport, TrialRecord
from .spectra import Spectrum

CSV_COLUMNS = tuple(f.name for f in fields(TrialRecord))


def format_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


def write_csv(report: ExperimentReport, path) -> None:
    """Write one row per trial record in the documented column order."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for rec in report.records:
            fh.write(",".join(format_cell(getattr(rec, c)) for c in CSV_COLUMNS) + "\n")


def write_spectrum_csv(s: Spectrum, path) -> None:
    """Columns k, lambda_k for eigen-decay plots."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("k,lambda_k\n")
        for k, lam in enumerate(s.eigenvalues, start=1):
            fh.write(f"{k},{format_cell(lam)}\n")


def write_singular_values_csv(values, path) -> None:
    """Columns index, singular_value; input must be a 1-d sequence."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ShapeError("singular values must form a 1-d sequence")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("index,singular_value\n")
        for i, v in enumerate(arr, start=1):
            fh.write(f"{i},{format_cell(v)}\n")
