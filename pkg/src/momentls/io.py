"""File formats: chain input, CSV outputs for autocovariance and spectra.

Chains are read either as one decimal value per line, or from a CSV file
with a header when a column name is given. All floating-point output is
printed with 17 significant digits so files round-trip losslessly.
"""

from __future__ import annotations

import csv

import numpy as np

__all__ = ["read_chain", "write_chain", "write_csv", "fmt"]


def fmt(x: float) -> str:
    """Format a float with 17 significant digits (lossless round-trip)."""
    return format(float(x), ".17g")


def read_chain(path, column: str | None = None) -> np.ndarray:
    """Read a chain from ``path``.

    Without ``column`` the file must hold one decimal value per line (blank
    lines are ignored). With ``column`` the file is parsed as CSV with a
    header row and that column is extracted. Parse errors report the
    offending line number.
    """
    if column is None:
        values = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                text = line.strip()
                if not text:
                    continue
                try:
                    values.append(float(text))
                except ValueError:
                    raise ValueError(
                        f"{path}: line {lineno}: cannot parse {text!r} as a number"
                    ) from None
        return np.asarray(values, dtype=float)

    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or column not in reader.fieldnames:
            have = ", ".join(reader.fieldnames or [])
            raise ValueError(f"{path}: no column {column!r} (have: {have})")
        values = []
        for lineno, row in enumerate(reader, start=2):
            text = (row[column] or "").strip()
            try:
                values.append(float(text))
            except ValueError:
                raise ValueError(
                    f"{path}: line {lineno}: cannot parse {text!r} as a number"
                ) from None
    return np.asarray(values, dtype=float)


def write_chain(path, values) -> None:
    """Write a chain as one value per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for v in np.asarray(values, dtype=float):
            fh.write(fmt(v) + "\n")


def write_csv(path_or_handle, header, rows) -> None:
    """Write rows of (mixed int/float) values with formatted floats."""

    def _emit(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([
                fmt(v) if isinstance(v, float) else v for v in row
            ])

    if hasattr(path_or_handle, "write"):
        _emit(path_or_handle)
    else:
        with open(path_or_handle, "w", encoding="utf-8", newline="") as fh:
            _emit(fh)
