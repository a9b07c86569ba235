import itertools

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

import oracles
from uniformity_forge.arrays import (
    MixedArray,
    certify,
    delete_columns,
    hamming_distance,
    is_irredundant,
    is_irredundant_direct,
    min_hamming_distance,
    split_column,
    verify_strength,
)
from uniformity_forge.constructions import hadamard, kron_extend, kron_sum, strength3_extend
from uniformity_forge.formats import format_moa, format_qst, parse_moa, parse_qst
from uniformity_forge.shadow import shadow_values
from uniformity_forge.shipped import load
from uniformity_forge.states import (
    PureState,
    coarse_grain,
    generate_basis,
    ghz,
    max_overlap,
    verify_k_uniform,
)


@st.composite
def arrays(draw, max_rows=16, max_cols=6, max_level=4):
    n = draw(st.integers(2, max_cols))
    levels = sorted(draw(st.lists(st.integers(2, max_level), min_size=n, max_size=n)), reverse=True)
    r = draw(st.integers(2, max_rows))
    rows = [[draw(st.integers(0, d - 1)) for d in levels] for _ in range(r)]
    return MixedArray(np.array(rows), tuple(levels), 1)


@given(arrays(), st.integers(1, 5))
def test_irredundancy_criteria_agree(M, k):
    k = min(k, M.n_columns - 1)
    fast = is_irredundant(M, k, require_verified=False)
    assert fast == is_irredundant_direct(M, k) == oracles.irredundant(M.rows.tolist(), k)


@given(arrays())
def test_min_distance_matches_oracle(M):
    assert min_hamming_distance(M) == oracles.md(M.rows.tolist())


@given(arrays(max_rows=12, max_cols=4, max_level=3), st.integers(1, 3))
def test_strength_matches_oracle(M, k):
    k = min(k, M.n_columns)
    assert verify_strength(M, k).passed == oracles.has_strength(M.rows.tolist(), M.levels, k)


@given(arrays())
def test_moa_text_round_trip(M):
    assert parse_moa(format_moa(M)) == M


@given(st.sampled_from([("moa_18_6_3x6", 0, 3, 2), ("oa_16_4x5", 2, 2, 2)]))
def test_split_keeps_strength_and_distance(case):
    name, col, d1, d2 = case
    M = certify(load(name))
    S = split_column(M, col, d1, d2)
    assert verify_strength(S, 2).passed
    assert min_hamming_distance(S) >= min_hamming_distance(M)


@given(st.data())
def test_deletion_within_endurance(data):
    M = certify(load("moa_18_3x7_2"))
    b = min_hamming_distance(M)
    c = data.draw(st.integers(0, b - 3))
    cols = data.draw(st.lists(st.integers(0, M.n_columns - 1), min_size=c, max_size=c, unique=True))
    D = certify(delete_columns(M, cols), 2)
    assert is_irredundant(D, 2)
    assert min_hamming_distance(D) >= b - len(cols)


@given(st.lists(st.integers(2, 5), min_size=3, max_size=7).filter(lambda v: len(v) % 2 == 1))
def test_shadow_matches_subset_oracle(dims):
    assert shadow_values(dims) == oracles.shadow(sorted(dims, reverse=True))


@given(st.integers(2, 3), st.integers(2, 4), st.integers(1, 4), st.integers(1, 4))
def test_kron_sum_blocks(d, n, ra, rb):
    rng = np.random.default_rng(d * 1000 + n * 100 + ra * 10 + rb)
    A = rng.integers(0, d, size=(ra, n))
    B = rng.integers(0, d, size=(rb, 2))
    out = kron_sum(A, B, d)
    for i, j in itertools.product(range(ra), range(n)):
        assert (out[i * rb : (i + 1) * rb, j * 2 : (j + 1) * 2] == (A[i, j] + B) % d).all()


@given(st.sampled_from([(2, 3), (2, 4), (3, 3), (3, 2), (4, 3)]))
def test_ghz_orbit_is_orthonormal_basis(case):
    d, n = case
    basis = generate_basis(ghz(d, n), 1)
    assert len(basis) == d**n
    assert max_overlap(basis) < 1e-10


@given(st.integers(0, 4), st.integers(0, 4))
def test_coarse_grain_lowers_uniformity_by_one(i, j):
    if i == j:
        return
    merged = coarse_grain(load("state_4_2222"), i, j)
    assert verify_k_uniform(merged, 1).passed


@given(st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 1)),
                       st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                       min_size=1))
def test_state_text_round_trip(amps):
    if all(abs(a) < 1e-6 for a in amps.values()):
        return
    s = PureState.create((3, 2), amps, normalize=True)
    back = parse_qst(format_qst(s))
    assert back.amplitudes == s.amplitudes


def test_hadamard_matches_shipped():
    assert hadamard(4) == load("h4")


def test_seeded_random_arrays(rng):
    # plain numpy draws honour --seed
    for _ in range(200):
        n = int(rng.integers(2, 7))
        levels = tuple(sorted(rng.integers(2, 5, size=n), reverse=True))
        r = int(rng.integers(2, 12))
        rows = np.column_stack([rng.integers(0, d, size=r) for d in levels])
        M = MixedArray(rows, levels, 1)
        k = int(rng.integers(1, n))
        assert is_irredundant(M, k, require_verified=False) == oracles.irredundant(rows.tolist(), k)


@given(st.integers(2, 3), st.data())
def test_kron_sum_associative(d, data):
    shapes = [data.draw(st.tuples(st.integers(1, 3), st.integers(1, 3))) for _ in range(3)]
    rng = np.random.default_rng(sum(a * 7 + b for a, b in shapes) + d)
    A, B, C = (rng.integers(0, d, size=s) for s in shapes)
    assert (kron_sum(A, kron_sum(B, C, d), d) == kron_sum(kron_sum(A, B, d), C, d)).all()


@given(st.lists(st.lists(st.integers(0, 3), min_size=5, max_size=5), min_size=3, max_size=3))
def test_hamming_is_a_metric(rows):
    a, b, c = rows
    assert hamming_distance(a, b) == hamming_distance(b, a)
    assert hamming_distance(a, a) == 0
    assert hamming_distance(a, c) <= hamming_distance(a, b) + hamming_distance(b, c)


@given(arrays(max_rows=16, max_cols=5, max_level=3))
def test_strength_is_monotone(M):
    for k in range(M.n_columns, 0, -1):
        if verify_strength(M, k).passed:
            assert all(verify_strength(M, j).passed for j in range(1, k))
            break


def test_strength3_duplicate_rows_give_zero_distance():
    even = np.array([w for w in itertools.product((0, 1), repeat=4) if sum(w) % 2 == 0])
    doubled = np.vstack([even, even])
    out = strength3_extend(None, doubled, None, hadamard(4))
    assert min_hamming_distance(out) == 0
    assert not is_irredundant(certify(out, 3), 3)


def test_kron_extend_with_h2():
    col = certify(MixedArray(np.array([[0], [1]]), (2,), 1))
    out = kron_extend(col, hadamard(2))
    assert out.describe() == "OA(4,2^3,2)"
    assert min_hamming_distance(out) == 2
