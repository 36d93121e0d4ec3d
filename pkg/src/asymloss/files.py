"""CSV readers and writers for residual and prediction files.

Residual files have a header row containing ``residual`` and one value per
line, with z = prediction - observation. Prediction files have a header
containing ``prediction``; other columns are carried through unchanged.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .errors import InputError


def _open(path):
    try:
        return open(Path(path), newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: cannot open ({exc.strerror})") from exc


def _parse_float(text: str, path, line: int, field: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise InputError(f"{path}: line {line}: field {field!r} is not a number: {text!r}") from None
    if not math.isfinite(value):
        raise InputError(f"{path}: line {line}: field {field!r} is not finite: {text!r}")
    return value


def _read_column(path, column: str):
    with _open(path) as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: file is empty, expected a header with {column!r}") from None
        except (csv.Error, UnicodeDecodeError) as exc:
            raise InputError(f"{path}: line 1: {exc}") from exc
        header = [h.strip().lstrip("﻿") for h in header]
        if column not in header:
            raise InputError(f"{path}: line 1: header has no {column!r} column (found {header})")
        idx = header.index(column)
        rows, values = [], []
        try:
            for row in reader:
                line = reader.line_num
                if not row or all(not cell.strip() for cell in row):
                    continue
                if len(row) != len(header):
                    raise InputError(f"{path}: line {line}: expected {len(header)} fields, got {len(row)}")
                values.append(_parse_float(row[idx].strip(), path, line, column))
                rows.append(row)
        except (csv.Error, UnicodeDecodeError) as exc:
            raise InputError(f"{path}: line {reader.line_num}: {exc}") from exc
    return header, rows, values


def read_residuals(path) -> np.ndarray:
    _, _, values = _read_column(path, "residual")
    return np.asarray(values, dtype=np.float64)


def write_residuals(path, values) -> None:
    with open(Path(path), "w", newline="", encoding="utf-8") as fh:
        fh.write("residual\n")
        fh.writelines(f"{float(v)!r}\n" for v in values)


def apply_correction(src, dst, C: float) -> int:
    """Copy a prediction file to ``dst`` with a column corrected = prediction + C."""
    header, rows, values = _read_column(src, "prediction")
    if "corrected" in header:
        raise InputError(f"{src}: line 1: header already has a 'corrected' column")
    with open(Path(dst), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header + ["corrected"])
        for row, value in zip(rows, values):
            writer.writerow(row + [repr(value + C)])
    return len(rows)
