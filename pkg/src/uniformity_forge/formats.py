"""Plain-text formats for arrays (.moa), difference schemes (.ds) and states (.qst).

.moa  line 1 ``r N k``; line 2 the N column levels; then r rows of N symbols.
.ds   line 1 ``s N d t``; then s rows of N symbols (``pm=True`` reads +-1 entries).
.qst  line 1 ``N``; line 2 the N dims; then one ``j_1 ... j_N re im`` line per amplitude.

Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import os
from collections.abc import Iterator
from pathlib import Path

import numpy as np

from .arrays import MixedArray
from .constructions import DifferenceScheme
from .errors import FormatError, InputError
from .states import PureState

PathLike = str | os.PathLike


def _lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield number, body.split()


def _ints(tokens: list[str], line: int) -> list[int]:
    out = []
    for col, tok in enumerate(tokens, start=1):
        try:
            out.append(int(tok))
        except ValueError:
            raise FormatError(f"expected an integer, got {tok!r}", line, col) from None
    return out


def _header(lines: Iterator[tuple[int, list[str]]], n_fields: int, what: str) -> tuple[int, list[int]]:
    try:
        number, tokens = next(lines)
    except StopIteration:
        raise FormatError(f"empty {what} file") from None
    if len(tokens) != n_fields:
        raise FormatError(f"header needs {n_fields} fields, got {len(tokens)}", number)
    return number, _ints(tokens, number)


def _matrix(
    lines: Iterator[tuple[int, list[str]]], n_rows: int, n_cols: int, last_line: int
) -> tuple[list[list[int]], list[int]]:
    rows, numbers = [], []
    for number, tokens in lines:
        if len(rows) == n_rows:
            raise FormatError(f"more than the declared {n_rows} rows", number)
        if len(tokens) != n_cols:
            raise FormatError(f"expected {n_cols} symbols, got {len(tokens)}", number)
        rows.append(_ints(tokens, number))
        numbers.append(number)
        last_line = number
    if len(rows) < n_rows:
        raise FormatError(f"truncated: {len(rows)} of {n_rows} rows present", last_line + 1)
    return rows, numbers


# ---------------------------------------------------------------------------
# arrays


def parse_moa(text: str) -> MixedArray:
    lines = _lines(text)
    number, (r, n, k) = _header(lines, 3, "array")
    try:
        level_line, tokens = next(lines)
    except StopIteration:
        raise FormatError("missing levels line", number + 1) from None
    if len(tokens) != n:
        raise FormatError(f"expected {n} levels, got {len(tokens)}", level_line)
    levels = _ints(tokens, level_line)
    for col, d in enumerate(levels, start=1):
        if d < 2:
            raise FormatError(f"level {d} must be >= 2", level_line, col)
    rows, numbers = _matrix(lines, r, n, level_line)
    for row, number in zip(rows, numbers):
        for col, (x, d) in enumerate(zip(row, levels), start=1):
            if not 0 <= x < d:
                raise FormatError(f"symbol {x} outside 0..{d - 1}", number, col)
    try:
        return MixedArray.from_rows(np.array(rows, dtype=np.int64).reshape(r, n), levels, k)
    except InputError as exc:
        raise FormatError(str(exc)) from None


def read_moa(path: PathLike) -> MixedArray:
    return parse_moa(Path(path).read_text())


def format_moa(M: MixedArray) -> str:
    lines = [f"{M.r} {M.n_columns} {M.strength}", " ".join(map(str, M.levels))]
    lines += [" ".join(map(str, row)) for row in M.rows.tolist()]
    return "\n".join(lines) + "\n"


def write_moa(M: MixedArray, path: PathLike) -> None:
    Path(path).write_text(format_moa(M))


# ---------------------------------------------------------------------------
# difference schemes


def parse_ds(text: str, *, pm: bool = False) -> DifferenceScheme:
    lines = _lines(text)
    number, (s, n, d, t) = _header(lines, 4, "difference scheme")
    rows, numbers = _matrix(lines, s, n, number)
    allowed = (-1, 1) if pm else range(d)
    for row, line in zip(rows, numbers):
        for col, x in enumerate(row, start=1):
            if x not in allowed:
                raise FormatError(f"entry {x} not allowed (expected {list(allowed)})", line, col)
    matrix = np.array(rows, dtype=np.int64).reshape(s, n)
    if pm:
        if d != 2:
            raise FormatError("+-1 form is only meaningful for d = 2", number)
        matrix = (matrix > 0).astype(np.int64)
    try:
        return DifferenceScheme(matrix, d, t)
    except InputError as exc:
        raise FormatError(str(exc)) from None


def read_ds(path: PathLike, *, pm: bool = False) -> DifferenceScheme:
    return parse_ds(Path(path).read_text(), pm=pm)


def format_ds(D: DifferenceScheme) -> str:
    lines = [f"{D.s} {D.n_columns} {D.order} {D.strength}"]
    lines += [" ".join(map(str, row)) for row in D.matrix.tolist()]
    return "\n".join(lines) + "\n"


def write_ds(D: DifferenceScheme, path: PathLike) -> None:
    Path(path).write_text(format_ds(D))


# ---------------------------------------------------------------------------
# states


def parse_qst(text: str) -> PureState:
    lines = _lines(text)
    number, (n,) = _header(lines, 1, "state")
    try:
        dim_line, tokens = next(lines)
    except StopIteration:
        raise FormatError("missing dims line", number + 1) from None
    if len(tokens) != n:
        raise FormatError(f"expected {n} dims, got {len(tokens)}", dim_line)
    dims = _ints(tokens, dim_line)
    amps: dict[tuple[int, ...], complex] = {}
    for line, tokens in lines:
        if len(tokens) != n + 2:
            raise FormatError(f"expected {n} indices and re im, got {len(tokens)} fields", line)
        key = tuple(_ints(tokens[:n], line))
        for col, (x, d) in enumerate(zip(key, dims), start=1):
            if not 0 <= x < d:
                raise FormatError(f"index {x} outside 0..{d - 1}", line, col)
        try:
            value = complex(float(tokens[n]), float(tokens[n + 1]))
        except ValueError:
            raise FormatError("amplitude must be two real numbers", line, n + 1) from None
        if key in amps:
            raise FormatError(f"duplicate basis index {key}", line)
        amps[key] = value
    if not amps:
        raise FormatError("state has no amplitudes")
    try:
        return PureState.create(dims, amps)
    except InputError as exc:
        raise FormatError(str(exc)) from None


def read_qst(path: PathLike) -> PureState:
    return parse_qst(Path(path).read_text())


def format_qst(s: PureState) -> str:
    lines = [str(s.n_parties), " ".join(map(str, s.dims))]
    for key in sorted(s.amplitudes):
        a = s.amplitudes[key]
        lines.append(" ".join(map(str, key)) + f" {a.real!r} {a.imag!r}")
    return "\n".join(lines) + "\n"


def write_qst(s: PureState, path: PathLike) -> None:
    Path(path).write_text(format_qst(s))


def detect_kind(path: PathLike) -> str:
    suffix = Path(path).suffix.lower()
    kinds = {".moa": "array", ".ds": "scheme", ".qst": "state"}
    if suffix not in kinds:
        raise InputError(f"unknown file type {suffix!r}; expected .moa, .ds or .qst")
    return kinds[suffix]
