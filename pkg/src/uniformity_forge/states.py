"""Sparse pure states on heterogeneous parties and their uniformity checks.

Party indices are 0-based throughout. Local dimensions are kept nonincreasing;
operations that would break the order re-sort the parties and record the
permutation in :attr:`PureState.perm` (``perm[i]`` is the position the party had
before sorting).
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .arrays import MixedArray, is_irredundant
from .errors import ContractError, InputError

NORM_TOL = 1e-10
STATE_TOL = 1e-9
RANK_TOL = 1e-8
SUPPORT_TOL = 1e-12
MAX_DENSE = 4096
MAX_VECTOR = 1 << 24

Index = tuple[int, ...]


@lru_cache(maxsize=None)
def roots_of_unity(d: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(d) / d)


def _sort_parties(
    dims: Sequence[int], amps: Mapping[Index, complex]
) -> tuple[tuple[int, ...], dict[Index, complex], tuple[int, ...]]:
    perm = tuple(sorted(range(len(dims)), key=lambda i: -dims[i]))
    if perm == tuple(range(len(dims))):
        return tuple(dims), dict(amps), perm
    new_dims = tuple(dims[i] for i in perm)
    new_amps = {tuple(key[i] for i in perm): a for key, a in amps.items()}
    return new_dims, new_amps, perm


@dataclass(frozen=True, eq=False)
class PureState:
    """A normalized pure state stored as ``{index tuple: amplitude}``."""

    dims: tuple[int, ...]
    amplitudes: dict[Index, complex]
    perm: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise InputError("a state needs at least one party")
        if any(d < 1 for d in dims):
            raise InputError("local dimensions must be >= 1")
        if any(dims[i] < dims[i + 1] for i in range(len(dims) - 1)):
            raise InputError("dims must be nonincreasing; use PureState.create")
        amps: dict[Index, complex] = {}
        for key, a in self.amplitudes.items():
            key = tuple(int(x) for x in key)
            if len(key) != len(dims) or any(not 0 <= x < d for x, d in zip(key, dims)):
                raise InputError(f"basis index {key} out of range for dims {dims}")
            if a != 0:
                amps[key] = complex(a)
        norm = sum(abs(a) ** 2 for a in amps.values())
        if abs(norm - 1) > NORM_TOL:
            raise InputError(f"state has squared norm {norm}, not 1")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)
        if not self.perm:
            object.__setattr__(self, "perm", tuple(range(len(dims))))

    @classmethod
    def create(
        cls, dims: Sequence[int], amplitudes: Mapping[Index, complex], *, normalize: bool = False
    ) -> PureState:
        """Build a state from parties in any order, sorting dims descending."""
        amps = {tuple(k): complex(a) for k, a in amplitudes.items()}
        if normalize:
            norm = math.sqrt(sum(abs(a) ** 2 for a in amps.values()))
            if norm == 0:
                raise InputError("cannot normalize the zero vector")
            amps = {k: a / norm for k, a in amps.items()}
        dims, amps, perm = _sort_parties(list(dims), amps)
        return cls(dims, amps, perm)

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def flat_index(self, key: Index) -> int:
        idx = 0
        for x, d in zip(key, self.dims):
            idx = idx * d + x
        return idx

    def to_dense(self) -> np.ndarray:
        if self.total_dim > MAX_VECTOR:
            raise InputError(f"dense vector of length {self.total_dim} is beyond desk scale")
        vec = np.zeros(self.total_dim, dtype=complex)
        for key, a in self.amplitudes.items():
            vec[self.flat_index(key)] = a
        return vec

    def __repr__(self) -> str:
        return f"<PureState dims={self.dims} support={len(self.amplitudes)}>"


def inner(a: PureState, b: PureState) -> complex:
    """<a|b>."""
    if a.dims != b.dims:
        raise InputError(f"dims differ: {a.dims} vs {b.dims}")
    small, large = (a, b) if len(a.amplitudes) <= len(b.amplitudes) else (b, a)
    total = 0j
    for key, x in small.amplitudes.items():
        y = large.amplitudes.get(key)
        if y is not None:
            total += x.conjugate() * y if small is a else y.conjugate() * x
    return total


def states_close(a: PureState, b: PureState, tol: float = 1e-12) -> bool:
    """Amplitude-wise equality within ``tol``."""
    if a.dims != b.dims:
        return False
    keys = set(a.amplitudes) | set(b.amplitudes)
    return all(abs(a.amplitudes.get(k, 0) - b.amplitudes.get(k, 0)) <= tol for k in keys)


# ---------------------------------------------------------------------------
# constructors


def superposition(rows: np.ndarray | Sequence[Sequence[int]], dims: Sequence[int]) -> PureState:
    """Uniform superposition of the rows as computational basis kets (no checks)."""
    amps: dict[Index, complex] = {}
    for row in np.asarray(rows, dtype=np.int64):
        key = tuple(int(x) for x in row)
        amps[key] = amps.get(key, 0) + 1
    return PureState.create(dims, amps, normalize=True)


def state_from_irmoa(M: MixedArray, k: int) -> PureState:
    """The k-uniform state ``r^{-1/2} sum_i |m_i>`` of an irredundant strength-k array."""
    n = M.n_columns
    if k > n // 2:
        raise InputError(f"k={k} exceeds the Schmidt bound floor(N/2)={n // 2}")
    if not is_irredundant(M, k):
        raise ContractError(f"{M.describe()} is not irredundant at strength {k}")
    return superposition(M.rows, M.levels)


def ghz(d: int, n: int) -> PureState:
    amp = 1 / math.sqrt(d)
    return PureState((d,) * n, {(j,) * n: amp for j in range(d)})


def product_state(dims: Sequence[int], symbols: Sequence[int]) -> PureState:
    return PureState.create(dims, {tuple(symbols): 1.0})


def computational_basis(dims: Sequence[int]) -> list[PureState]:
    return [product_state(dims, key) for key in itertools.product(*(range(d) for d in dims))]


# ---------------------------------------------------------------------------
# reductions


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    subset: tuple[int, ...]
    dims: tuple[int, ...]
    matrix: np.ndarray

    def validate(self) -> None:
        """Raise if the matrix is not Hermitian, unit-trace and PSD within tolerance."""
        rho = self.matrix
        if np.abs(rho - rho.conj().T).max() > 1e-10:
            raise ContractError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > 1e-10:
            raise ContractError(f"density matrix has trace {np.trace(rho)}")
        if np.linalg.eigvalsh(rho).min() < -1e-8:
            raise ContractError("density matrix is not positive semidefinite")

    def deviation_from_maximally_mixed(self) -> float:
        side = self.matrix.shape[0]
        return float(np.abs(self.matrix - np.eye(side) / side).max())


def _check_subset(s: PureState, subset: Iterable[int]) -> tuple[int, ...]:
    subset = tuple(sorted(set(subset)))
    if not subset:
        raise InputError("subset must be nonempty")
    if any(not 0 <= i < s.n_parties for i in subset):
        raise InputError(f"party index out of range 0..{s.n_parties - 1}")
    return subset


def partial_trace(s: PureState, subset: Iterable[int]) -> DensityMatrix:
    """Reduced density matrix on ``subset`` (the complement is traced out)."""
    subset = _check_subset(s, subset)
    if len(subset) == s.n_parties:
        raise InputError("subset must be a proper subset of the parties")
    sub_dims = tuple(s.dims[i] for i in subset)
    side = math.prod(sub_dims)
    if side > MAX_DENSE:
        raise InputError(f"reduced matrix side {side} exceeds {MAX_DENSE}; restrict the subset")
    rest = [i for i in range(s.n_parties) if i not in subset]
    keys = np.array(list(s.amplitudes), dtype=np.int64)
    vals = np.array(list(s.amplitudes.values()), dtype=complex)
    row = np.zeros(len(keys), dtype=np.int64)
    for i in subset:
        row = row * s.dims[i] + keys[:, i]
    comp = np.zeros(len(keys), dtype=np.int64)
    for i in rest:
        comp = comp * s.dims[i] + keys[:, i]
    _, col = np.unique(comp, return_inverse=True)
    psi = np.zeros((side, int(col.max()) + 1), dtype=complex)
    np.add.at(psi, (row, col.ravel()), vals)
    return DensityMatrix(subset, sub_dims, psi @ psi.conj().T)


@dataclass
class UniformityVerdict:
    passed: bool
    k: int
    max_deviation: float
    worst_subset: tuple[int, ...] | None
    witness: tuple[int, ...] | None = None
    subsets_checked: int = 0

    def __bool__(self) -> bool:
        return self.passed


def verify_k_uniform(s: PureState, k: int, tol: float = STATE_TOL) -> UniformityVerdict:
    """Check every k-party reduction against the maximally mixed state.

    ``witness`` is the first failing subset in lexicographic order.
    """
    n = s.n_parties
    if k < 0:
        raise InputError("k must be nonnegative")
    if k > n // 2:
        raise InputError(f"k={k} exceeds the Schmidt bound floor(N/2)={n // 2} for N={n}")
    if k == 0:
        return UniformityVerdict(True, 0, 0.0, None)
    worst, worst_dev, witness, count = None, -1.0, None, 0
    for subset in itertools.combinations(range(n), k):
        dev = partial_trace(s, subset).deviation_from_maximally_mixed()
        count += 1
        if dev > worst_dev:
            worst, worst_dev = subset, dev
        if dev > tol and witness is None:
            witness = subset
    return UniformityVerdict(witness is None, k, worst_dev, worst, witness, count)


def support(s: PureState) -> int:
    return sum(1 for a in s.amplitudes.values() if abs(a) > SUPPORT_TOL)


def minimum_support(dims: Sequence[int], k: int) -> int:
    return math.prod(sorted(dims, reverse=True)[:k])


def is_minimum_support(s: PureState, k: int) -> bool:
    return support(s) == minimum_support(s.dims, k)


# ---------------------------------------------------------------------------
# transformations


def measurement_probabilities(s: PureState, party: int) -> np.ndarray:
    """Outcome distribution of a computational-basis measurement on ``party``."""
    _check_subset(s, [party])
    probs = np.zeros(s.dims[party])
    for key, a in s.amplitudes.items():
        probs[key[party]] += abs(a) ** 2
    return probs


def project_reduce(s: PureState, party: int, outcome: int) -> PureState:
    """Post-measurement state of the other parties after outcome ``outcome`` on ``party``."""
    _check_subset(s, [party])
    if s.n_parties < 2:
        raise InputError("need at least two parties")
    if not 0 <= outcome < s.dims[party]:
        raise InputError(f"outcome {outcome} outside 0..{s.dims[party] - 1}")
    kept = {
        key[:party] + key[party + 1 :]: a for key, a in s.amplitudes.items() if key[party] == outcome
    }
    if sum(abs(a) ** 2 for a in kept.values()) < SUPPORT_TOL:
        raise InputError(f"outcome {outcome} on party {party} has zero probability")
    dims = s.dims[:party] + s.dims[party + 1 :]
    return PureState.create(dims, kept, normalize=True)


def coarse_grain(s: PureState, i: int, j: int) -> PureState:
    """Treat parties i and j as one party of dimension d_i * d_j (symbol d_j * a + b)."""
    _check_subset(s, [i, j])
    if i == j:
        raise InputError("need two distinct parties")
    d_j = s.dims[j]
    others = [p for p in range(s.n_parties) if p not in (i, j)]
    # the merged party takes the slot of the earlier of the two before re-sorting
    pos = sum(1 for p in others if p < min(i, j))
    slots: list[int | None] = others[:pos] + [None] + others[pos:]
    dims = [s.dims[i] * d_j if p is None else s.dims[p] for p in slots]
    amps = {
        tuple(key[i] * d_j + key[j] if p is None else key[p] for p in slots): a
        for key, a in s.amplitudes.items()
    }
    return PureState.create(dims, amps)


def tensor_parties(a: PureState, b: PureState) -> PureState:
    """Party-wise tensor product: party i gets dimension a_i * b_i (symbol x * s_i + y)."""
    if a.n_parties != b.n_parties:
        raise InputError(f"party counts differ: {a.n_parties} vs {b.n_parties}")
    dims = [da * db for da, db in zip(a.dims, b.dims)]
    amps = {}
    for ka, xa in a.amplitudes.items():
        for kb, xb in b.amplitudes.items():
            key = tuple(x * db + y for x, y, db in zip(ka, kb, b.dims))
            amps[key] = xa * xb
    return PureState.create(dims, amps)


@dataclass(frozen=True)
class PauliWord:
    """``Z^{v_1} ... Z^{v_k} X^{v_{k+1}} ... X^{v_N}``; ``split`` is k."""

    v: tuple[int, ...]
    split: int

    def check(self, dims: Sequence[int]) -> None:
        if len(self.v) != len(dims):
            raise InputError(f"word of length {len(self.v)} for {len(dims)} parties")
        if any(not 0 <= x < d for x, d in zip(self.v, dims)):
            raise InputError(f"word {self.v} out of range for dims {tuple(dims)}")
        if not 0 <= self.split <= len(dims):
            raise InputError("split point out of range")


def apply_pauli(s: PureState, w: PauliWord) -> PureState:
    w.check(s.dims)
    k = w.split
    amps = {}
    for key, a in s.amplitudes.items():
        phase = 1.0 + 0j
        for i in range(k):
            if w.v[i]:
                phase *= roots_of_unity(s.dims[i])[(key[i] * w.v[i]) % s.dims[i]]
        new_key = key[:k] + tuple((x + v) % d for x, v, d in zip(key[k:], w.v[k:], s.dims[k:]))
        amps[new_key] = a * phase
    return PureState(s.dims, amps, s.perm)


def pauli_words(dims: Sequence[int], k: int) -> Iterator[PauliWord]:
    for v in itertools.product(*(range(d) for d in dims)):
        yield PauliWord(v, k)


def generate_basis(s: PureState, k: int) -> list[PureState]:
    """The orbit ``{U(v)|psi>}`` of a minimum-support k-uniform state, v in lexicographic order."""
    if not is_minimum_support(s, k):
        raise ContractError(
            f"state has support {support(s)}, not the minimum {minimum_support(s.dims, k)}"
        )
    if not verify_k_uniform(s, k):
        raise ContractError(f"state is not {k}-uniform")
    return [apply_pauli(s, w) for w in pauli_words(s.dims, k)]


def max_overlap(states: Sequence[PureState]) -> float:
    """Largest |<s|t>| over distinct pairs."""
    vecs = np.array([st.to_dense() for st in states])
    gram = vecs.conj() @ vecs.T
    np.fill_diagonal(gram, 0)
    return float(np.abs(gram).max()) if len(states) > 1 else 0.0


def projector_sum(states: Sequence[PureState]) -> np.ndarray:
    vecs = np.array([st.to_dense() for st in states])
    if vecs.shape[1] > MAX_DENSE:
        raise InputError(f"projector side {vecs.shape[1]} exceeds {MAX_DENSE}")
    return vecs.T @ vecs.conj()


# ---------------------------------------------------------------------------
# orthogonality-preserving measurements


def hermitian_basis(d: int) -> list[np.ndarray]:
    """d^2 real coordinates: diagonal units, then symmetric and antisymmetric off-diagonals."""
    basis = []
    for a in range(d):
        E = np.zeros((d, d), dtype=complex)
        E[a, a] = 1
        basis.append(E)
    for a, b in itertools.combinations(range(d), 2):
        E = np.zeros((d, d), dtype=complex)
        E[a, b] = E[b, a] = 1
        basis.append(E)
        F = np.zeros((d, d), dtype=complex)
        F[a, b], F[b, a] = 1j, -1j
        basis.append(F)
    return basis


@dataclass
class OPMSolution:
    party: int
    dimension: int
    basis: list[np.ndarray]


def _constraint_matrix(states: Sequence[PureState], party: int) -> np.ndarray:
    dims = states[0].dims
    d = dims[party]
    vecs = np.array([st.to_dense() for st in states]).reshape((len(states),) + dims)
    psi = np.moveaxis(vecs, 1 + party, 1).reshape(len(states), d, -1)
    # G[s, t, a, b] = sum_c conj(psi_s[a, c]) psi_t[b, c]; <s|E (x) I|t> = sum_ab E_ab G_ab
    G = np.einsum("sac,tbc->stab", psi.conj(), psi)
    iu, ju = np.triu_indices(len(states), k=1)
    G = G[iu, ju].reshape(len(iu), d * d)
    B = np.array([E.reshape(-1) for E in hermitian_basis(d)])
    C = G @ B.T
    return np.vstack([C.real, C.imag])


def opm_solution_space(states: Sequence[PureState], party: int) -> OPMSolution:
    """Hermitian E on ``party`` with <s|(E (x) I)|t> = 0 for every pair s != t.

    Returns the dimension of the real solution space and a basis of it; the
    identity always solves the system.
    """
    if len(states) < 2:
        raise InputError("need at least two states")
    dims = states[0].dims
    if any(st.dims != dims for st in states):
        raise InputError("all states must share the same dims")
    if not 0 <= party < len(dims):
        raise InputError(f"party {party} out of range")
    if max_overlap(states) > STATE_TOL:
        raise InputError("states are not mutually orthogonal")
    d = dims[party]
    C = _constraint_matrix(states, party)
    identity = np.concatenate([np.ones(d), np.zeros(d * d - d)])
    assert np.abs(C @ identity).max() < RANK_TOL, "identity must solve the OPM system"
    _, sv, vh = np.linalg.svd(C, full_matrices=True)
    rank = int((sv > RANK_TOL).sum())
    null = vh[rank:]
    herm = hermitian_basis(d)
    basis = [sum(c * E for c, E in zip(vec, herm)) for vec in null]
    return OPMSolution(party, d * d - rank, basis)


@dataclass
class IrreducibilityVerdict:
    passed: bool
    dimensions: dict[int, int]
    failing_party: int | None = None

    def __bool__(self) -> bool:
        return self.passed


def is_locally_irreducible_certificate(states: Sequence[PureState]) -> IrreducibilityVerdict:
    """Pass iff no party admits a non-identity orthogonality-preserving POVM element.

    This is the sufficient criterion: every party's solution space is spanned
    by the identity.
    """
    dims = {}
    failing = None
    for party in range(states[0].n_parties):
        dims[party] = opm_solution_space(states, party).dimension
        if dims[party] != 1 and failing is None:
            failing = party
    return IrreducibilityVerdict(failing is None, dims, failing)
