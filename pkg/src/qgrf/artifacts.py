"""Deterministic CSV and PGM artifact writers.

Every CSV starts with a ``# params:`` comment echoing the producing
configuration, then a header row; decimals use '.' and lines end with LF
regardless of platform.  PGM output is plain P2 with a linear value-to-gray
mapping over an explicitly stated range.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = ["format_params", "write_csv", "write_pgm", "field_csv_rows"]


def format_params(params: dict) -> str:
    return " ".join(f"{k}={v}" for k, v in sorted(params.items()))


def _write_text(path: str | os.PathLike, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_csv(path, header: str, rows, params: dict) -> None:
    """Rows are pre-formatted strings or tuples joined with commas."""
    lines = [f"# params: {format_params(params)}", header]
    for row in rows:
        if isinstance(row, str):
            lines.append(row)
        else:
            lines.append(",".join(_fmt(v) for v in row))
    _write_text(path, "\n".join(lines) + "\n")


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (np.floating,)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def field_csv_rows(points: np.ndarray, values: np.ndarray):
    """Rows ``x0,...,x{d-1},value`` for a list of points and their values."""
    for x, v in zip(points, values):
        yield tuple(float(c) for c in np.atleast_1d(x)) + (float(v),)


def write_pgm(path, values: np.ndarray, lo: float, hi: float, comment: str = "") -> None:
    """8-bit plain (P2) PGM with values mapped linearly from [lo, hi].

    Values outside the range are clipped; the range is recorded in the
    header comment so the mapping is invertible.
    """
    arr = np.asarray(values, float)
    if arr.ndim != 2:
        raise ValueError("PGM export needs a 2-d array")
    if not hi > lo:
        raise ValueError("PGM range must satisfy lo < hi")
    gray = np.clip(np.rint((arr - lo) / (hi - lo) * 255), 0, 255).astype(int)
    lines = ["P2", f"# range [{lo!r}, {hi!r}] {comment}".rstrip(),
             f"{arr.shape[1]} {arr.shape[0]}", "255"]
    lines += [" ".join(str(v) for v in row) for row in gray]
    _write_text(path, "\n".join(lines) + "\n")
