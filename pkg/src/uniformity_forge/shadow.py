"""Shadow inequalities for AME states with exact rational arithmetic.

For an AME state on parties of dimensions d_1..d_N (N odd unless all equal)
the quantities

    S_j = sum_k K_{N-j}(k; N) A'_k,   j = 0..N

must all be nonnegative. ``A'_k`` is the k-th elementary symmetric polynomial
of the 1/d_i for k <= (N-1)/2, mirrored by A'_k = A'_{N-k}.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, prod

from .errors import InputError

MAX_SCAN_DIM = 16


@lru_cache(maxsize=None)
def krawtchouk(n: int, j: int, k: int) -> int:
    """K_{n-j}(k; n) = sum_a (-1)^a C(n-k, n-j-a) C(k, a)."""
    if not (0 <= j <= n and 0 <= k <= n):
        raise InputError(f"indices j={j}, k={k} outside 0..{n}")
    total = 0
    for a in range(k + 1):
        top = n - j - a
        if 0 <= top <= n - k:
            total += (-1) ** a * comb(n - k, top) * comb(k, a)
    return total


@lru_cache(maxsize=None)
def krawtchouk_matrix(n: int) -> tuple[tuple[int, ...], ...]:
    """Row j holds K_{n-j}(k; n) for k = 0..n."""
    return tuple(tuple(krawtchouk(n, j, k) for k in range(n + 1)) for j in range(n + 1))


def _check_dims(dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(sorted((int(d) for d in dims), reverse=True))
    if len(dims) < 2:
        raise InputError("need at least two parties")
    if dims[-1] < 2:
        raise InputError("local dimensions must be >= 2")
    if len(dims) % 2 == 0 and len(set(dims)) > 1:
        raise InputError(
            "heterogeneous AME states need an odd number of parties: for even N the "
            "smallest N/2 dimensions would have to multiply to at least the largest N/2"
        )
    return dims


def elementary_symmetric(values: Sequence[Fraction | int]) -> list:
    """e_0..e_n of the given values by the usual one-pass recurrence."""
    e = [1] + [0] * len(values)
    for x in values:
        for m in range(len(values), 0, -1):
            e[m] += e[m - 1] * x
    return e


def shadow_coefficients(dims: Sequence[int]) -> list[Fraction]:
    """A'_0..A'_N as exact fractions."""
    dims = _check_dims(dims)
    n = len(dims)
    if len(set(dims)) == 1:
        d = dims[0]
        return [Fraction(comb(n, k), d ** min(k, n - k)) for k in range(n + 1)]
    e = elementary_symmetric([Fraction(1, d) for d in dims])
    A = [Fraction(0)] * (n + 1)
    for k in range((n - 1) // 2 + 1):
        A[k] = A[n - k] = Fraction(e[k])
    return A


def subset_sum_coefficient(dims: Sequence[int], k: int) -> Fraction:
    """A'_k by direct enumeration of k-subsets (reference path for small N)."""
    return sum(
        (Fraction(1, prod(sub)) for sub in itertools.combinations(dims, k)), Fraction(0)
    )


def shadow_values(dims: Sequence[int]) -> list[Fraction]:
    """S_0..S_N."""
    A = shadow_coefficients(dims)
    K = krawtchouk_matrix(len(A) - 1)
    return [sum((c * a for c, a in zip(row, A)), Fraction(0)) for row in K]


@dataclass
class ShadowVerdict:
    dims: tuple[int, ...]
    excluded: bool
    first_violation: int | None
    values: list[Fraction]

    def violations(self) -> list[int]:
        return [j for j, s in enumerate(self.values) if s < 0]


def ame_excluded(dims: Sequence[int]) -> ShadowVerdict:
    """True when some S_j < 0, i.e. no AME state can exist on these dims."""
    values = shadow_values(dims)
    first = next((j for j, s in enumerate(values) if s < 0), None)
    return ShadowVerdict(_check_dims(dims), first is not None, first, values)


# ---------------------------------------------------------------------------
# scanning


@dataclass
class ScanEntry:
    dims: tuple[int, ...]
    first_violation: int
    value: Fraction


def _nonincreasing(n: int, max_dim: int) -> Iterator[tuple[tuple[int, ...], list[int]]]:
    """Yield (dims, e(d)) for every nonincreasing vector over 2..max_dim.

    ``e`` holds the elementary symmetric polynomials of the d_i themselves,
    updated incrementally along the recursion.
    """

    def rec(prefix: tuple[int, ...], top: int, e: list[int]):
        if len(prefix) == n:
            yield prefix, e
            return
        for d in range(top, 1, -1):
            nxt = e[:]
            for m in range(len(prefix) + 1, 0, -1):
                nxt[m] += nxt[m - 1] * d
            yield from rec(prefix + (d,), d, nxt)

    yield from rec((), max_dim, [1] + [0] * n)


def scan_nonexistence(n: int, max_dim: int) -> list[ScanEntry]:
    """All nonincreasing dim vectors in {2..max_dim}^n excluded by some S_j < 0.

    Uses the integer identity A'_k * prod(d) = e_{n-k}(d) so every sign test is
    exact without building fractions; only reported values become fractions.
    Entries are ordered lexicographically on the (descending) dims.
    """
    if n < 3 or n % 2 == 0:
        raise InputError("scan needs an odd number of parties >= 3")
    if not 2 <= max_dim <= MAX_SCAN_DIM:
        raise InputError(f"max_dim must lie in 2..{MAX_SCAN_DIM}")
    K = krawtchouk_matrix(n)
    half = (n - 1) // 2
    out = []
    for dims, e in _nonincreasing(n, max_dim):
        a = [0] * (n + 1)
        for k in range(half + 1):
            a[k] = a[n - k] = e[n - k]
        for j, row in enumerate(K):
            t = sum(c * x for c, x in zip(row, a))
            if t < 0:
                out.append(ScanEntry(dims, j, Fraction(t, prod(dims))))
                break
    out.sort(key=lambda entry: entry.dims)
    return out


def format_dims(dims: Sequence[int]) -> str:
    """``(3, 2, 2)`` -> ``"3 2^2"``."""
    parts = []
    for d, group in itertools.groupby(dims):
        cnt = len(list(group))
        parts.append(f"{d}^{cnt}" if cnt > 1 else str(d))
    return " ".join(parts)
