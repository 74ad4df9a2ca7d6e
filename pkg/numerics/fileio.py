"""
Plain-text state and matrix files.

State file:  first line "N", then N lines "re im".
Matrix file: first line "N M", then N·M lines "re im" in row-major order.
Values are written with 17 significant digits so files round-trip exactly.
"""
from pathlib import Path

import numpy as np

from .exceptions import ScheduleFormatError


def _format_complex(z) -> str:
    return f"{z.real:.17g} {z.imag:.17g}"


def _parse_lines(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScheduleFormatError(f"cannot read {path}: {exc}") from exc
    return [line.split() for line in text.splitlines() if line.strip()]


def _parse_entries(rows, count, path):
    if len(rows) != count:
        raise ScheduleFormatError(f"{path}: expected {count} entries, found {len(rows)}")
    values = np.empty(count, dtype=np.complex128)
    for i, row in enumerate(rows):
        if len(row) != 2:
            raise ScheduleFormatError(f"{path}: entry {i + 1} must be 're im'")
        try:
            values[i] = complex(float(row[0]), float(row[1]))
        except ValueError as exc:
            raise ScheduleFormatError(f"{path}: entry {i + 1}: {exc}") from exc
    return values


def _write_lines(path, lines):
    try:
        Path(path).write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise ScheduleFormatError(f"cannot write {path}: {exc}") from exc


def read_state(path) -> np.ndarray:
    rows = _parse_lines(path)
    if not rows or len(rows[0]) != 1:
        raise ScheduleFormatError(f"{path}: first line must hold the dimension N")
    try:
        dim = int(rows[0][0])
    except ValueError as exc:
        raise ScheduleFormatError(f"{path}: bad dimension {rows[0][0]!r}") from exc
    return _parse_entries(rows[1:], dim, path)


def write_state(path, c) -> None:
    c = np.asarray(c, dtype=np.complex128).ravel()
    lines = [str(c.shape[0])] + [_format_complex(z) for z in c]
    _write_lines(path, lines)


def read_matrix(path) -> np.ndarray:
    rows = _parse_lines(path)
    if not rows or len(rows[0]) != 2:
        raise ScheduleFormatError(f"{path}: first line must be 'N M'")
    try:
        n, m = int(rows[0][0]), int(rows[0][1])
    except ValueError as exc:
        raise ScheduleFormatError(f"{path}: bad shape line {' '.join(rows[0])!r}") from exc
    return _parse_entries(rows[1:], n * m, path).reshape(n, m)


def write_matrix(path, a) -> None:
    a = np.asarray(a, dtype=np.complex128)
    n, m = a.shape
    lines = [f"{n} {m}"] + [_format_complex(z) for z in a.ravel()]
    _write_lines(path, lines)
