"""Mixed orthogonal arrays: representation, exhaustive verification, column operations.

Columns are always stored with levels in nonincreasing order. Constructors that
receive columns in another order re-sort them (stably) and keep the permutation
in :attr:`MixedArray.column_order`.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ContractError, InputError


@dataclass(frozen=True)
class LevelSignature:
    """Run-length form ``d_1^{n_1} ... d_l^{n_l}`` of the column levels."""

    entries: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise InputError("signature needs at least one column")
        prev = None
        for level, mult in self.entries:
            if level < 2 or mult < 1:
                raise InputError(f"bad signature entry {level}^{mult}")
            if prev is not None and level >= prev:
                raise InputError("signature levels must be strictly decreasing")
            prev = level

    @classmethod
    def from_levels(cls, levels: Sequence[int]) -> LevelSignature:
        entries: list[tuple[int, int]] = []
        for level, group in itertools.groupby(levels):
            entries.append((int(level), len(list(group))))
        return cls(tuple(entries))

    @classmethod
    def parse(cls, text: str) -> LevelSignature:
        """Parse ``"4^1 2^4"`` (a bare ``d`` means ``d^1``)."""
        entries = []
        for token in text.split():
            level, _, mult = token.partition("^")
            entries.append((int(level), int(mult or 1)))
        return cls(tuple(entries))

    @property
    def levels(self) -> tuple[int, ...]:
        return tuple(level for level, mult in self.entries for _ in range(mult))

    @property
    def n_columns(self) -> int:
        return sum(mult for _, mult in self.entries)

    def __str__(self) -> str:
        return " ".join(f"{level}^{mult}" for level, mult in self.entries)


def _sorted_order(levels: Sequence[int]) -> list[int]:
    return sorted(range(len(levels)), key=lambda j: -levels[j])


@dataclass(frozen=True, eq=False)
class MixedArray:
    """An r x N symbol matrix with per-column levels and a claimed strength.

    ``verified`` is only ever set by :func:`certify`; every transformation returns
    an unverified array.
    """

    rows: np.ndarray
    levels: tuple[int, ...]
    strength: int
    verified: bool = False
    column_order: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        rows = np.array(self.rows, dtype=np.int64)
        if rows.ndim != 2:
            raise InputError("rows must form a 2-D matrix")
        r, n = rows.shape
        levels = tuple(int(x) for x in self.levels)
        if r < 1 or n < 1:
            raise InputError("array needs at least one row and one column")
        if len(levels) != n:
            raise InputError(f"{len(levels)} levels given for {n} columns")
        if any(d < 2 for d in levels):
            raise InputError("levels must be >= 2")
        if any(levels[j] < levels[j + 1] for j in range(n - 1)):
            raise InputError("levels must be nonincreasing; use MixedArray.from_rows")
        if self.strength < 1 or self.strength > n:
            raise InputError(f"strength {self.strength} outside 1..{n}")
        bad = (rows < 0) | (rows >= np.array(levels))
        if bad.any():
            i, j = map(int, np.argwhere(bad)[0])
            raise InputError(
                f"symbol {rows[i, j]} at row {i}, column {j} outside 0..{levels[j] - 1}"
            )
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "levels", levels)
        if not self.column_order:
            object.__setattr__(self, "column_order", tuple(range(n)))

    @classmethod
    def from_rows(
        cls,
        rows: np.ndarray | Sequence[Sequence[int]],
        levels: Sequence[int],
        strength: int,
    ) -> MixedArray:
        """Build an array from columns in any level order, sorting them descending."""
        rows = np.asarray(rows, dtype=np.int64)
        if rows.ndim == 1:
            rows = rows[:, None]
        order = _sorted_order(list(levels))
        return cls(
            rows[:, order],
            tuple(levels[j] for j in order),
            strength,
            column_order=tuple(order),
        )

    @property
    def r(self) -> int:
        return self.rows.shape[0]

    @property
    def n_columns(self) -> int:
        return self.rows.shape[1]

    @property
    def signature(self) -> LevelSignature:
        return LevelSignature.from_levels(self.levels)

    def describe(self) -> str:
        tag = "MOA" if len(set(self.levels)) > 1 else "OA"
        return f"{tag}({self.r},{self.signature},{self.strength})"

    def __repr__(self) -> str:
        status = "verified" if self.verified else "unverified"
        return f"<MixedArray {self.describe()} {status}>"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MixedArray):
            return NotImplemented
        return (
            self.levels == other.levels
            and self.strength == other.strength
            and np.array_equal(self.rows, other.rows)
        )

    __hash__ = None  # type: ignore[assignment]


def _as_rows(M: MixedArray | np.ndarray | Sequence[Sequence[int]]) -> np.ndarray:
    if isinstance(M, MixedArray):
        return M.rows
    rows = np.asarray(M, dtype=np.int64)
    if rows.ndim == 1:
        rows = rows[:, None]
    return rows


def trivial_oa(d: int) -> MixedArray:
    """The single column ``(0, 1, ..., d-1)^T``, verified at strength 1."""
    return MixedArray(np.arange(d)[:, None], (d,), 1, verified=True)


# ---------------------------------------------------------------------------
# distances


def hamming_distance(a: Sequence[int], b: Sequence[int]) -> int:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise InputError(f"rows have different lengths {a.shape} and {b.shape}")
    return int(np.count_nonzero(a != b))


def _pairwise_min(rows: np.ndarray) -> int:
    r = rows.shape[0]
    chunk = max(1, 20_000_000 // max(1, r * rows.shape[1]))
    best = rows.shape[1]
    for start in range(0, r - 1, chunk):
        block = rows[start : start + chunk]
        dist = (block[:, None, :] != rows[None, start + 1 :, :]).sum(axis=2)
        # keep only pairs (i, j) with j > i
        for off in range(block.shape[0]):
            row = dist[off, off:]
            if row.size:
                best = min(best, int(row.min()))
        if best == 0:
            break
    return best


def min_hamming_distance(M: MixedArray | np.ndarray | Sequence[Sequence[int]]) -> int:
    """Minimum Hamming distance over all pairs of rows."""
    rows = _as_rows(M)
    if rows.shape[0] < 2:
        raise InputError("minimum distance needs at least two rows")
    return _pairwise_min(rows)


def is_simple(M: MixedArray | np.ndarray) -> bool:
    rows = _as_rows(M)
    return len(np.unique(rows, axis=0)) == rows.shape[0]


# ---------------------------------------------------------------------------
# strength


@dataclass
class StrengthVerdict:
    passed: bool
    k: int
    witness: tuple[int, ...] | None = None
    counts: dict[tuple[int, ...], int] | None = None
    replication: dict[tuple[int, ...], int] = field(default_factory=dict)
    reason: str = ""

    def __bool__(self) -> bool:
        return self.passed


def _encode(rows: np.ndarray, cols: Sequence[int], levels: Sequence[int]) -> tuple[np.ndarray, int]:
    code = np.zeros(rows.shape[0], dtype=np.int64)
    size = 1
    for c in cols:
        code = code * levels[c] + rows[:, c]
        size *= levels[c]
    return code, size


def _decode(code: int, sizes: Sequence[int]) -> tuple[int, ...]:
    out = []
    for s in reversed(sizes):
        code, rem = divmod(code, s)
        out.append(rem)
    return tuple(reversed(out))


def verify_strength(M: MixedArray, k: int) -> StrengthVerdict:
    """Exhaustively check that every r x k subarray is balanced.

    On success the verdict carries the replication index r / prod(levels) of
    every column subset; on failure the first offending subset and its tuple
    counts.
    """
    n = M.n_columns
    if not 1 <= k <= n:
        raise InputError(f"strength {k} outside 1..{n}")
    replication = {}
    for cols in itertools.combinations(range(n), k):
        code, size = _encode(M.rows, cols, M.levels)
        sizes = [M.levels[c] for c in cols]
        if M.r % size:
            return StrengthVerdict(
                False, k, cols, None, reason=f"r={M.r} not divisible by {size}"
            )
        counts = np.bincount(code, minlength=size)
        if counts.min() != counts.max():
            tally = {_decode(i, sizes): int(c) for i, c in enumerate(counts)}
            return StrengthVerdict(False, k, cols, tally, reason="unbalanced tuples")
        replication[cols] = M.r // size
    return StrengthVerdict(True, k, replication=replication)


def certify(M: MixedArray, k: int | None = None) -> MixedArray:
    """Return a copy of ``M`` flagged verified at strength ``k`` (default: its claim)."""
    k = M.strength if k is None else k
    verdict = verify_strength(M, k)
    if not verdict:
        raise ContractError(
            f"{M.describe()} fails strength {k} on columns {verdict.witness}: {verdict.reason}"
        )
    return replace(M, strength=k, verified=True)


# ---------------------------------------------------------------------------
# irredundancy


def is_irredundant(M: MixedArray, k: int, *, require_verified: bool = True) -> bool:
    """Irredundancy through the minimum-distance criterion ``MD >= k + 1``.

    The equivalence does not depend on the orthogonality property, so
    ``require_verified=False`` lets callers apply it to arbitrary arrays.
    """
    if require_verified and not (M.verified and M.strength >= k):
        raise ContractError(
            f"strength {k} of {M.describe()} is not verified; call certify() first"
        )
    if M.r < 2:
        return True
    return min_hamming_distance(M) >= k + 1


def is_irredundant_direct(M: MixedArray | np.ndarray, k: int) -> bool:
    """Definition check: deleting any k columns leaves all rows distinct."""
    rows = _as_rows(M)
    r, n = rows.shape
    if not 1 <= k < n:
        raise InputError(f"k={k} must satisfy 1 <= k < N={n}")
    for removed in itertools.combinations(range(n), k):
        keep = [j for j in range(n) if j not in removed]
        if len(np.unique(rows[:, keep], axis=0)) < r:
            return False
    return True


# ---------------------------------------------------------------------------
# column operations


def delete_columns(M: MixedArray, cols: Iterable[int]) -> MixedArray:
    """Drop the given columns; remaining columns keep their order."""
    drop = sorted(set(cols))
    if any(not 0 <= c < M.n_columns for c in drop):
        raise InputError(f"column index out of range 0..{M.n_columns - 1}")
    keep = [j for j in range(M.n_columns) if j not in drop]
    if not keep:
        raise InputError("cannot remove every column")
    return MixedArray(
        M.rows[:, keep],
        tuple(M.levels[j] for j in keep),
        min(M.strength, len(keep)),
        column_order=tuple(M.column_order[j] for j in keep),
    )


def split_column(M: MixedArray, col: int, d1: int, d2: int) -> MixedArray:
    """Replace a column of level d1*d2 by the digit pair (c // d2, c % d2)."""
    if not 0 <= col < M.n_columns:
        raise InputError(f"column {col} out of range")
    if M.levels[col] != d1 * d2:
        raise InputError(f"column {col} has level {M.levels[col]}, not {d1}*{d2}")
    c = M.rows[:, col]
    rows = np.column_stack([M.rows[:, :col], c // d2, c % d2, M.rows[:, col + 1 :]])
    levels = M.levels[:col] + (d1, d2) + M.levels[col + 1 :]
    return MixedArray.from_rows(rows, levels, M.strength)


def merge_columns(M: MixedArray, i: int, j: int) -> MixedArray:
    """Inverse of :func:`split_column`: fuse columns i, j into one of level d_i * d_j.

    The result is generally *not* an orthogonal array of the same strength; it
    is offered for building test inputs and must be certified before use.
    """
    if i == j:
        raise InputError("need two distinct columns")
    d_i, d_j = M.levels[i], M.levels[j]
    fused = M.rows[:, i] * d_j + M.rows[:, j]
    keep = [c for c in range(M.n_columns) if c not in (i, j)]
    rows = np.column_stack([fused] + [M.rows[:, c] for c in keep])
    levels = (d_i * d_j,) + tuple(M.levels[c] for c in keep)
    return MixedArray.from_rows(rows, levels, min(M.strength, len(levels)))


def replication_index(M: MixedArray, cols: Sequence[int]) -> int:
    return M.r // math.prod(M.levels[c] for c in cols)
