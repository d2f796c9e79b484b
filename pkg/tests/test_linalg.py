import random

import numpy as np
import pytest

from latticedex.errors import InvalidArgument
from latticedex.numberfield.linalg import (
    det_int,
    hnf_columns,
    hnf_contains,
    reduce_mod_hnf,
    reduce_mod_hnf_batch,
    short_vectors,
    shortest_nonzero,
    solve_columns,
)


def _random_cols(rng, n, m, span=9):
    while True:
        cols = [tuple(rng.randint(-span, span) for _ in range(n)) for _ in range(m)]
        if det_int([[cols[j][i] for j in range(n)] for i in range(n)]) != 0:
            return cols


def test_hnf_shape_and_reduction():
    rng = random.Random(7)
    for _ in range(40):
        n = rng.randint(1, 4)
        cols = _random_cols(rng, n, n + rng.randint(0, 2))
        H = hnf_columns(cols)
        for i in range(n):
            assert H[i][i] > 0
            for j in range(n):
                if j < i:
                    assert H[i][j] == 0
                elif j > i:
                    assert 0 <= H[i][j] < H[i][i]


def test_hnf_preserves_lattice():
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randint(1, 3)
        cols = _random_cols(rng, n, n)
        H = hnf_columns(cols)
        # same lattice: generators contained both ways, same covolume
        for c in cols:
            assert hnf_contains(H, c)
        d_in = abs(det_int([[cols[j][i] for j in range(n)] for i in range(n)]))
        d_h = 1
        for i in range(n):
            d_h *= H[i][i]
        assert d_in == d_h


def test_hnf_rejects_rank_deficient_input():
    with pytest.raises(InvalidArgument):
        hnf_columns([(1, 0)])  # fewer columns than rows
    with pytest.raises(InvalidArgument):
        hnf_columns([(1, 2), (2, 4)])  # rank 1 in dimension 2


def test_solve_columns_round_trip():
    rng = random.Random(11)
    for _ in range(30):
        n = rng.randint(1, 4)
        cols = _random_cols(rng, n, n + rng.randint(0, 2))
        z = [rng.randint(-4, 4) for _ in cols]
        target = tuple(sum(zj * cols[j][i] for j, zj in enumerate(z)) for i in range(n))
        sol = solve_columns(cols, target)
        assert sol is not None
        got = tuple(sum(sj * cols[j][i] for j, sj in enumerate(sol)) for i in range(n))
        assert got == target


def test_solve_columns_outside_lattice():
    # columns span 2Z^2; odd targets are unreachable
    assert solve_columns([(2, 0), (0, 2)], (1, 0)) is None
    assert solve_columns([(2, 0), (0, 2)], (3, 5)) is None


def test_reduce_mod_hnf_canonical_box():
    rng = random.Random(5)
    for _ in range(30):
        n = rng.randint(1, 3)
        H = hnf_columns(_random_cols(rng, n, n))
        v = tuple(rng.randint(-30, 30) for _ in range(n))
        r = reduce_mod_hnf(v, H)
        for i in range(n):
            assert 0 <= r[i] < H[i][i]
        diff = tuple(a - b for a, b in zip(v, r))
        assert hnf_contains(H, diff)


def test_reduce_mod_hnf_batch_matches_scalar():
    rng = random.Random(9)
    H = hnf_columns(_random_cols(rng, 3, 3))
    V = np.array([[rng.randint(-50, 50) for _ in range(3)] for _ in range(200)],
                 dtype=np.int64)
    R = reduce_mod_hnf_batch(V, H)
    for v, r in zip(V, R):
        assert tuple(int(x) for x in r) == reduce_mod_hnf(tuple(int(x) for x in v), H)


def test_det_int_against_numpy():
    rng = random.Random(13)
    for _ in range(50):
        n = rng.randint(1, 5)
        rows = [[rng.randint(-6, 6) for _ in range(n)] for _ in range(n)]
        want = round(np.linalg.det(np.array(rows, dtype=float)))
        assert det_int(rows) == want


def test_det_int_singular():
    assert det_int([[1, 2], [2, 4]]) == 0


def test_short_vectors_z2():
    gram2 = np.array([[2, 0], [0, 2]], dtype=np.int64)  # doubled identity
    X, norms2 = short_vectors(gram2, 4)
    got = {tuple(int(v) for v in row) for row in X}
    want = {(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)}
    assert got == want
    assert np.array_equal(norms2, np.einsum("ij,jk,ik->i", X, gram2, X))
    X0, _ = short_vectors(gram2, 4, include_zero=True)
    assert {tuple(int(v) for v in row) for row in X0} == want | {(0, 0)}


def test_shortest_nonzero_hexagonal():
    gram2 = np.array([[4, 2], [2, 4]], dtype=np.int64)
    val, vec = shortest_nonzero(gram2)
    assert val == 4
    v = np.asarray(vec, dtype=np.int64)
    assert int(v @ gram2 @ v) == 4


def test_shortest_nonzero_skewed_basis():
    # basis (1, 0), (100, 1): shortest vector needs a nontrivial combination
    B = np.array([[1, 100], [0, 1]], dtype=np.int64)
    gram2 = 2 * B.T @ B
    val, vec = shortest_nonzero(gram2)
    assert val == 2
    v = np.asarray(vec, dtype=np.int64)
    assert int(v @ gram2 @ v) == 2


def test_shortest_nonzero_matches_enumeration():
    rng = random.Random(17)
    for _ in range(20):
        n = rng.randint(1, 3)
        cols = _random_cols(rng, n, n, span=4)
        B = np.array(cols, dtype=np.int64).T
        gram2 = 2 * B.T @ B
        val, _ = shortest_nonzero(gram2)
        X, norms2 = short_vectors(gram2, int(val))
        assert int(norms2.min()) == val
