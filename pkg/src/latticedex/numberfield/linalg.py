"""Exact integer linear algebra for lattice computations.

Column-style Hermite normal form (with optional unimodular transform),
fraction-free determinants, triangular residue reduction, and bounded
enumeration of short vectors of an integer Gram matrix.  Everything is
arbitrary-precision Python int except the enumeration, which generates
candidates with numpy int64 and keeps scoring exact.
"""

from __future__ import annotations

import itertools

import numpy as np

from ..errors import InvalidArgument

# ============================================================
# Hermite normal form (column style)
# ============================================================
#
# Convention: a lattice is the Z-span of the *columns* of an integer matrix.
# The HNF here is upper triangular with positive diagonal and
# 0 <= H[i][j] < H[i][i] for i < j.  H is returned row-major as a tuple of
# tuples so it can be hashed and compared directly.


def _negate(A, U, j):
    A[j] = [-v for v in A[j]]
    if U is not None:
        U[j] = [-v for v in U[j]]


def _axpy(A, U, j, k, q):
    """col_j += q * col_k."""
    cj, ck = A[j], A[k]
    for r in range(len(cj)):
        cj[r] += q * ck[r]
    if U is not None:
        cj, ck = U[j], U[k]
        for r in range(len(cj)):
            cj[r] += q * ck[r]


def _swap(A, U, j, k):
    A[j], A[k] = A[k], A[j]
    if U is not None:
        U[j], U[k] = U[k], U[j]


def _hnf_core(A, U):
    """Reduce column list A in place; pivots end up in the last n columns."""
    n = len(A[0])
    m = len(A)
    if m < n:
        raise InvalidArgument(f"need at least {n} columns, got {m}")
    pc = m
    for i in range(n - 1, -1, -1):
        pc -= 1
        while True:
            nz = [j for j in range(pc + 1) if A[j][i] != 0]
            if not nz:
                raise InvalidArgument("columns do not span a full-rank lattice")
            jp = min(nz, key=lambda j: (abs(A[j][i]), j))
            if A[jp][i] < 0:
                _negate(A, U, jp)
            if len(nz) == 1:
                break
            for j in nz:
                if j != jp:
                    q = A[j][i] // A[jp][i]
                    if q:
                        _axpy(A, U, j, jp, -q)
        if jp != pc:
            _swap(A, U, jp, pc)
    base = m - n
    # normalize above-diagonal entries; descending i so later steps do not
    # disturb rows already reduced
    for j in range(1, n):
        cj = base + j
        for i in range(j - 1, -1, -1):
            piv = A[base + i][i]
            q = A[cj][i] // piv
            if q:
                _axpy(A, U, cj, base + i, -q)
    return base


def hnf_columns(cols):
    """HNF of the lattice spanned by integer columns; row-major tuple."""
    A = [list(c) for c in cols]
    n = len(A[0])
    base = _hnf_core(A, None)
    return tuple(tuple(A[base + j][i] for j in range(n)) for i in range(n))


def solve_columns(cols, target):
    """Integer solution z of sum_j z_j * col_j = target, or None.

    Used for CRT idempotents: membership of `target` in the column span
    with an explicit witness.
    """
    A = [list(c) for c in cols]
    n = len(A[0])
    m = len(A)
    U = [[1 if r == j else 0 for r in range(m)] for j in range(m)]
    base = _hnf_core(A, U)
    y = [0] * n
    t = list(target)
    for i in range(n - 1, -1, -1):
        r = t[i] - sum(A[base + j][i] * y[j] for j in range(i + 1, n))
        piv = A[base + i][i]
        if r % piv:
            return None
        y[i] = r // piv
    return [sum(U[base + j][r] * y[j] for j in range(n)) for r in range(m)]


def reduce_mod_hnf(coords, hnf):
    """Canonical residue of an integer vector modulo the HNF column lattice."""
    v = list(coords)
    n = len(v)
    for i in range(n - 1, -1, -1):
        q = v[i] // hnf[i][i]
        if q:
            for r in range(i + 1):
                v[r] -= q * hnf[r][i]
    return tuple(v)


def hnf_contains(hnf, coords):
    """Exact membership test of an integer vector in the HNF column lattice."""
    v = list(coords)
    n = len(v)
    for i in range(n - 1, -1, -1):
        if v[i] % hnf[i][i]:
            return False
        q = v[i] // hnf[i][i]
        if q:
            for r in range(i + 1):
                v[r] -= q * hnf[r][i]
    return True


def reduce_mod_hnf_batch(vecs, hnf):
    """Vectorized reduce_mod_hnf: vecs is (M, n) int64, returns same shape."""
    V = np.array(vecs, dtype=np.int64, copy=True)
    n = V.shape[1]
    H = np.asarray(hnf, dtype=np.int64)
    for i in range(n - 1, -1, -1):
        q = V[:, i] // H[i, i]
        V[:, : i + 1] -= q[:, None] * H[: i + 1, i]
    return V


# ============================================================
# Determinant (Bareiss, fraction free)
# ============================================================


def det_int(rows):
    """Exact determinant of a square integer matrix."""
    M = [list(r) for r in rows]
    n = len(M)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            M[i][k] = 0
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


# ============================================================
# Short-vector enumeration
# ============================================================

_CHUNK_LIMIT = 1 << 22  # max candidate rows per numpy block


def _axis_bounds(gram, bound2):
    """Per-axis box bound: max |x_i| over the ellipsoid x^T G x <= bound2."""
    inv = np.linalg.inv(np.asarray(gram, dtype=np.float64))
    d = np.maximum(np.diag(inv), 0.0)
    return np.floor(np.sqrt(d * float(bound2)) * (1.0 + 1e-9) + 1e-9).astype(np.int64)


def short_vectors(gram2, bound2, include_zero=False):
    """All integer vectors with x^T G2 x <= bound2 (exact int64 scoring).

    Returns (X, norms2): X is (M, n) int64, norms2 is (M,) int64.  Candidates
    come from an exact dual-diagonal box around the ellipsoid and are filtered
    by the exact quadratic form, so no boundary vector is missed.  Signs are
    not deduplicated; the zero vector is dropped unless include_zero.
    """
    G = np.asarray(gram2, dtype=np.int64)
    n = G.shape[0]
    if bound2 < 0 or (bound2 == 0 and not include_zero):
        return np.zeros((0, n), dtype=np.int64), np.zeros(0, dtype=np.int64)
    b = _axis_bounds(G, bound2)
    ranges = [np.arange(-bi, bi + 1, dtype=np.int64) for bi in b]
    # longest suffix of axes whose full grid fits in one numpy block
    split = 0
    tail = 1
    for i in range(n - 1, -1, -1):
        if tail * len(ranges[i]) > _CHUNK_LIMIT and i < n - 1:
            split = i + 1
            break
        tail *= len(ranges[i])
    rest = np.meshgrid(*ranges[split:], indexing="ij")
    rest = np.stack([g.ravel() for g in rest], axis=1)
    out_X, out_n = [], []

    def _score(block):
        norms = np.einsum("ij,jk,ik->i", block, G, block)
        mask = norms <= bound2
        if not include_zero:
            mask &= norms > 0
        if mask.any():
            out_X.append(block[mask])
            out_n.append(norms[mask])

    if split == 0:
        _score(rest)
    else:
        head = np.empty((rest.shape[0], split), dtype=np.int64)
        for prefix in itertools.product(*(tuple(r) for r in ranges[:split])):
            head[:] = prefix
            _score(np.concatenate([head, rest], axis=1))
    if not out_X:
        return np.zeros((0, n), dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(out_X), np.concatenate(out_n)


def shortest_nonzero(gram2):
    """(min positive x^T G2 x, lexicographically smallest minimizer).

    The search radius is the smallest diagonal entry of G2 (the shortest
    basis vector), which always contains a minimizer.
    """
    G = np.asarray(gram2, dtype=np.int64)
    bound2 = int(np.diag(G).min())
    X, norms = short_vectors(G, bound2)
    best = int(norms.min())
    cands = X[norms == best]
    order = np.lexsort(tuple(cands[:, i] for i in range(cands.shape[1] - 1, -1, -1)))
    return best, tuple(int(v) for v in cands[order[0]])
