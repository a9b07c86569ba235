"""Difference schemes, Hadamard matrices and the three array constructions.

All constructions recompute the minimum distance they promise and raise
:class:`ConstructionError` when the recomputed value disagrees.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .arrays import MixedArray, is_simple, min_hamming_distance, trivial_oa, verify_strength
from .errors import ConstructionError, ContractError, InputError


@dataclass(frozen=True, eq=False)
class DifferenceScheme:
    """An s x N matrix over Z_d claimed to be a difference scheme of strength t."""

    matrix: np.ndarray
    order: int
    strength: int = 2

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=np.int64)
        if m.ndim != 2 or m.size == 0:
            raise InputError("difference scheme must be a nonempty 2-D matrix")
        if self.order < 2:
            raise InputError("group order must be >= 2")
        if self.strength not in (2, 3):
            raise InputError("only strengths 2 and 3 are supported")
        if ((m < 0) | (m >= self.order)).any():
            raise InputError(f"entries must lie in Z_{self.order}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def s(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_columns(self) -> int:
        return self.matrix.shape[1]

    @property
    def is_square(self) -> bool:
        return self.s == self.n_columns

    def describe(self) -> str:
        if self.strength == 2:
            return f"D({self.s},{self.n_columns},{self.order})"
        return f"D_{self.strength}({self.s},{self.n_columns},{self.order})"

    def __repr__(self) -> str:
        return f"<DifferenceScheme {self.describe()}>"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DifferenceScheme):
            return NotImplemented
        return self.order == other.order and np.array_equal(self.matrix, other.matrix)

    __hash__ = None  # type: ignore[assignment]


@dataclass
class SchemeVerdict:
    passed: bool
    strength: int
    witness: tuple[int, ...] | None = None
    counts: dict[tuple[int, ...], int] | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.passed


def verify_difference_scheme(D: DifferenceScheme, strength: int | None = None) -> SchemeVerdict:
    """Check that every s x t submatrix hits each coset of the diagonal equally often.

    A row ``(x_1, ..., x_t)`` is reduced to the coset representative
    ``(x_2 - x_1, ..., x_t - x_1)``. Matrices with fewer than t columns pass
    vacuously.
    """
    t = D.strength if strength is None else strength
    d, s = D.order, D.s
    if D.n_columns < t:
        return SchemeVerdict(True, t, reason="fewer than t columns")
    n_cosets = d ** (t - 1)
    if s % n_cosets:
        return SchemeVerdict(False, t, reason=f"s={s} not divisible by {n_cosets}")
    M = D.matrix
    for cols in itertools.combinations(range(D.n_columns), t):
        code = np.zeros(s, dtype=np.int64)
        for c in cols[1:]:
            code = code * d + (M[:, c] - M[:, cols[0]]) % d
        counts = np.bincount(code, minlength=n_cosets)
        if counts.min() != counts.max():
            tally = {}
            for idx, cnt in enumerate(counts):
                digits = []
                for _ in range(t - 1):
                    idx, rem = divmod(idx, d)
                    digits.append(rem)
                tally[tuple(reversed(digits))] = int(cnt)
            return SchemeVerdict(False, t, cols, tally, reason="unbalanced cosets")
    return SchemeVerdict(True, t)


def _require_scheme(D: DifferenceScheme, name: str, strength: int | None = None) -> None:
    verdict = verify_difference_scheme(D, strength)
    if not verdict:
        raise InputError(
            f"{name} {D.describe()} fails strength {verdict.strength} "
            f"on columns {verdict.witness}: {verdict.reason}"
        )


def _require_strength(M: MixedArray, k: int, name: str) -> None:
    need = min(k, M.n_columns)
    if not (M.verified and M.strength >= need):
        raise ContractError(f"{name} must be certified at strength {need} first")


# ---------------------------------------------------------------------------
# generators


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % p for p in range(2, int(n**0.5) + 1))


def ghm_from_prime(p: int) -> DifferenceScheme:
    """The multiplication table of GF(p), a generalized Hadamard matrix D(p, p, p)."""
    if not is_prime(p):
        raise InputError(f"{p} is not prime")
    i = np.arange(p)
    return DifferenceScheme(np.outer(i, i) % p, p, 2)


# GH(6, Z_3); no prime-field construction gives lambda = 2 over Z_3.
_GH_6_3 = np.array(
    [
        [0, 0, 0, 0, 0, 0],
        [0, 0, 1, 1, 2, 2],
        [0, 1, 0, 2, 1, 2],
        [0, 1, 2, 0, 2, 1],
        [0, 2, 1, 2, 0, 1],
        [0, 2, 2, 1, 1, 0],
    ]
)


def _sylvester(m: int) -> np.ndarray:
    """Sylvester matrix with rows in bit-reversed order (order 4: ++++, ++--, +-+-, +--+)."""
    H = np.array([[1]])
    while H.shape[0] < m:
        H = np.block([[H, H], [H, -H]])
    bits = m.bit_length() - 1
    order = [int(format(i, f"0{bits}b")[::-1] or "0", 2) for i in range(m)]
    return H[order]


def _paley_one(q: int) -> np.ndarray:
    residues = {(x * x) % q for x in range(1, q)}
    chi = np.array([0] + [1 if a in residues else -1 for a in range(1, q)])
    idx = np.arange(q)
    Q = chi[(idx[None, :] - idx[:, None]) % q]
    S = np.zeros((q + 1, q + 1), dtype=np.int64)
    S[0, 1:] = 1
    S[1:, 0] = -1
    S[1:, 1:] = Q
    return np.eye(q + 1, dtype=np.int64) + S


def hadamard_pm(m: int) -> np.ndarray:
    """A +-1 Hadamard matrix of order m from Sylvester doubling of 1, 2 or a Paley-I seed."""
    if m in (1, 2) or (m > 0 and m & (m - 1) == 0):
        return _sylvester(m)
    if m % 4 == 0:
        doublings = 0
        base = m
        while base % 2 == 0:
            q = base - 1
            if q % 4 == 3 and is_prime(q):
                H = _paley_one(q)
                for _ in range(doublings):
                    H = np.block([[H, H], [H, -H]])
                return H
            base //= 2
            doublings += 1
    raise InputError(
        f"Hadamard matrix of order {m} is not constructible by built-in methods; supply via file"
    )


def pm_to_binary(H: np.ndarray) -> np.ndarray:
    """Map +1 to 1 and -1 to 0."""
    H = np.asarray(H)
    if not np.isin(H, (-1, 1)).all():
        raise InputError("matrix entries must be +1 or -1")
    return (H > 0).astype(np.int64)


def hadamard(m: int) -> DifferenceScheme:
    """Hadamard matrix of order m as a 0/1 difference scheme over Z_2."""
    H = pm_to_binary(hadamard_pm(m))
    return DifferenceScheme(H, 2, 3 if m % 4 == 0 else 2)


def generalized_hadamard(d: int, lam: int) -> DifferenceScheme:
    """A built-in GHM D(lam*d, lam*d, d).

    Available: d = 2 (Hadamard), d prime with lam a power of d (Kronecker sums of
    the GF(d) table), and lam*d = 6 over Z_3, plus Kronecker sums of these.
    """
    if lam < 1:
        raise InputError("lambda must be >= 1")
    if d == 2:
        H = hadamard(2 * lam)
        return DifferenceScheme(H.matrix, 2, 2)
    if lam == 1 and is_prime(d):
        return ghm_from_prime(d)
    if d == 3 and lam == 2:
        return DifferenceScheme(_GH_6_3, 3, 2)
    if lam % d == 0 and is_prime(d):
        inner = generalized_hadamard(d, lam // d)
        return DifferenceScheme(kron_sum(ghm_from_prime(d).matrix, inner.matrix, d), d, 2)
    raise InputError(
        f"no built-in GHM D({lam * d},{lam * d},{d}); supply one via file"
    )


def linear_oa(d: int, n: int) -> MixedArray:
    """OA(d^m, d^n, 2) over GF(d), d prime, from n pairwise independent columns.

    n = 1 gives the trivial column. Columns are the first n normalized vectors
    of GF(d)^m (first nonzero coordinate 1) for the smallest adequate m.
    """
    if not is_prime(d):
        raise InputError("linear_oa needs a prime d")
    if n < 1:
        raise InputError("need at least one column")
    if n == 1:
        return trivial_oa(d)
    m = 2
    while (d**m - 1) // (d - 1) < n:
        m += 1
    points = []
    for v in itertools.product(range(d), repeat=m):
        nz = [x for x in v if x]
        if nz and nz[0] == 1:
            points.append(v)
    # unit vectors first keeps the small cases readable
    points.sort(key=lambda v: (sum(1 for x in v if x), [-x for x in v]))
    G = np.array(points[:n]).T
    X = np.array(list(itertools.product(range(d), repeat=m)))
    return MixedArray(X @ G % d, (d,) * n, 2)


# ---------------------------------------------------------------------------
# constructions


def kron_sum(A: np.ndarray, B: np.ndarray, d: int) -> np.ndarray:
    """Kronecker sum over Z_d: block (i, j) of the result is ``A[i, j] + B``."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if A.ndim == 1:
        A = A[:, None]
    if B.ndim == 1:
        B = B[:, None]
    rA, nA = A.shape
    rB, nB = B.shape
    out = (A[:, None, :, None] + B[None, :, None, :]) % d
    return out.reshape(rA * rB, nA * nB)


def expansive_replace(A1: MixedArray, col: int, A2: MixedArray) -> MixedArray:
    """Replace symbol c of column ``col`` of A1 by row c of the simple array A2."""
    _require_strength(A1, 2, "A1")
    _require_strength(A2, 2, "A2")
    if not 0 <= col < A1.n_columns:
        raise InputError(f"column {col} out of range")
    if A2.r != A1.levels[col]:
        raise InputError(f"A2 has {A2.r} rows but the replaced column has level {A1.levels[col]}")
    if not is_simple(A2):
        raise InputError("A2 must be simple (all rows distinct)")
    block = A2.rows[A1.rows[:, col]]
    rows = np.column_stack([A1.rows[:, :col], block, A1.rows[:, col + 1 :]])
    levels = A1.levels[:col] + A2.levels + A1.levels[col + 1 :]
    return MixedArray.from_rows(rows, levels, 2)


def scheme_extend(A1: MixedArray, D: DifferenceScheme) -> MixedArray:
    """``(m^T, A1 (+) D)`` with prefix column ``m_j = j mod s``; an MOA(rs, s^1 d^{N N1}, 2).

    Works for any verified D(s, N1, d); the minimum distance is not predicted.
    """
    _require_strength(A1, 2, "A1")
    d = D.order
    if set(A1.levels) != {d}:
        raise InputError(f"A1 must have every level equal to {d}")
    _require_scheme(D, "D", 2)
    body = kron_sum(A1.rows, D.matrix, d)
    prefix = np.arange(body.shape[0]) % D.s
    rows = np.column_stack([prefix, body])
    levels = (D.s,) + (d,) * body.shape[1]
    return MixedArray.from_rows(rows, levels, 2)


def kron_extend_distance(d: int, lam: int, n: int, b: int | None) -> int:
    """min{lam (d-1) N + 1, lam d b}; ``b=None`` when A1 has a single row."""
    first = lam * (d - 1) * n + 1
    return first if b is None else min(first, lam * d * b)


def kron_extend(A1: MixedArray, G: DifferenceScheme, *, check_distance: bool = True) -> MixedArray:
    """Extend an OA(r, d^N, 2) by a generalized Hadamard matrix D(lam d, lam d, d)."""
    if not G.is_square:
        raise InputError(f"{G.describe()} is not square, so not a generalized Hadamard matrix")
    if G.s % G.order:
        raise InputError(f"order {G.s} is not a multiple of {G.order}")
    out = scheme_extend(A1, G)
    if check_distance:
        lam = G.s // G.order
        b = min_hamming_distance(A1) if A1.r > 1 else None
        expected = kron_extend_distance(G.order, lam, A1.n_columns, b)
        measured = min_hamming_distance(out)
        if measured != expected:
            raise ConstructionError(f"measured MD {measured} != predicted {expected}")
    return out


def strength3_extend(
    A1: np.ndarray | Sequence[Sequence[int]] | None,
    A2: np.ndarray | Sequence[Sequence[int]],
    D: DifferenceScheme | None,
    H: DifferenceScheme,
    *,
    check_distance: bool = True,
) -> MixedArray:
    """``(A1 (+) D, A2 (+) H)`` for a strength-3 MOA (A1, A2) with A2 binary.

    ``A1`` may be empty (or None), in which case ``D`` is not needed.
    """
    A2 = np.asarray(A2, dtype=np.int64)
    r, n2 = A2.shape
    A1 = np.zeros((r, 0), dtype=np.int64) if A1 is None else np.asarray(A1, dtype=np.int64)
    if A1.ndim == 1:
        A1 = A1[:, None]
    if A1.shape[0] != r:
        raise InputError("A1 and A2 must have the same number of rows")
    n1 = A1.shape[1]
    if H.order != 2 or not H.is_square:
        raise InputError("H must be a square matrix over Z_2")
    _require_scheme(H, "H", 3)
    _require_scheme(H, "H", 2)
    m = H.s
    if n1:
        if D is None:
            raise InputError("D is required when A1 has columns")
        if D.s != m:
            raise InputError(f"D has {D.s} rows but H has order {m}")
        _require_scheme(D, "D", 3)
        d = D.order
    else:
        d = 2
    joint = MixedArray.from_rows(np.column_stack([A1, A2]), [d] * n1 + [2] * n2, 3)
    verdict = verify_strength(joint, 3)
    if not verdict:
        raise InputError(f"(A1, A2) is not a strength-3 MOA: columns {verdict.witness}")
    left = kron_sum(A1, D.matrix, d) if n1 else np.zeros((r * m, 0), dtype=np.int64)
    right = kron_sum(A2, H.matrix, 2)
    if check_distance and r > 1:
        b = min_hamming_distance(A2)
        expected = min(m // 2 * n2, m * b)
        measured = min_hamming_distance(right)
        if measured != expected:
            raise ConstructionError(f"binary block MD {measured} != predicted {expected}")
    levels = [d] * left.shape[1] + [2] * right.shape[1]
    return MixedArray.from_rows(np.column_stack([left, right]), levels, 3)
