"""CRT index codes: message tuples over residue fields mapped to minimum-energy
coset representatives of O_K modulo a product of coprime prime ideals.

Encoding picks, for the message (w_1, ..., w_K), the representative of
sum_k e_k * w_k mod I where the e_k are CRT idempotents and I = prod p_k.
Per-coset representatives minimize the canonical-embedding energy, with ties
broken lexicographically on exact integer coordinates, so constellations are
reproducible.  Message components are canonical HNF residues of O_K / p_k;
finite-field operations are ring operations followed by reduction.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import Infeasible, InvalidArgument, InvariantViolation
from .numberfield import (
    AlgebraicInt,
    Ideal,
    field_from_dict,
    ideal_from_dict,
    ideal_to_dict,
    is_coprime,
    prime_ideals_above,
    whole_ring,
)
from .numberfield.linalg import short_vectors, solve_columns

DEFAULT_ENUMERATION_CAP = 10**6
_BOX_CELL_LIMIT = 3 * 10**8  # hard guard on candidate-box size


@dataclass(frozen=True)
class Message:
    """K message symbols, each a canonical residue of O_K mod p_k."""

    residues: tuple

    def __len__(self):
        return len(self.residues)


@dataclass(frozen=True)
class CodePoint:
    """One constellation point: message label and exact coordinates."""

    index: int
    message: Message
    coords: tuple


def minkowski_bound_sq(field, ideal):
    """Square of the geometry-of-numbers shortest-vector bound for the ideal lattice."""
    n = field.n
    r1, r2 = field.signature
    return (
        (r1 + r2)
        * (math.sqrt(abs(field.discriminant)) * ideal.norm) ** (2.0 / n)
        * (2.0 / math.pi) ** (2.0 * r2 / n)
    )


def _ensure_prime_tags(field, primes):
    """Adopt (p, e, f) tags on explicitly supplied ideals by matching them
    against the factorization of their residue characteristic."""
    import sympy

    tagged = []
    for ideal in primes:
        if not isinstance(ideal, Ideal) or ideal.field != field:
            raise InvalidArgument("primes must be ideals of the code's field")
        if ideal.is_prime_tagged:
            tagged.append(ideal)
            continue
        fac = sympy.factorint(ideal.norm)
        if len(fac) != 1:
            raise InvalidArgument(f"ideal of norm {ideal.norm} is not prime")
        (p, f), = fac.items()
        match = next((q for q in prime_ideals_above(field, p) if q == ideal), None)
        if match is None:
            raise InvalidArgument(f"ideal of norm {ideal.norm} is not a prime ideal")
        tagged.append(match)
    return tuple(tagged)


def crt_idempotents(primes):
    """Elements e_k with e_k = 1 mod p_k and e_k = 0 mod p_j (j != k).

    Solves u + v = 1 with u in p_k and v in prod_{j != k} p_j over the
    concatenated Z-bases (HNF-based integer solve), which works in non-PIDs.
    """
    if not primes:
        raise InvalidArgument("need at least one prime ideal")
    field = primes[0].field
    for a in range(len(primes)):
        for b in range(a + 1, len(primes)):
            if not is_coprime(primes[a], primes[b]):
                raise InvalidArgument(
                    f"ideals {primes[a].label()} and {primes[b].label()} are not coprime"
                )
    one = (1,) + (0,) * (field.n - 1)
    out = []
    for k, pk in enumerate(primes):
        rest = whole_ring(field)
        for j, pj in enumerate(primes):
            if j != k:
                rest = rest * pj
        cols = pk.basis_columns() + rest.basis_columns()
        z = solve_columns(cols, one)
        if z is None:
            raise InvalidArgument("ideals are not coprime")
        qcols = rest.basis_columns()
        coords = [0] * field.n
        for j, zj in enumerate(z[field.n :]):
            if zj:
                for r in range(field.n):
                    coords[r] += zj * qcols[j][r]
        out.append(AlgebraicInt(field, tuple(coords)))
    return tuple(out)


def _min_energy_representatives(field, modulus, factor, cap):
    """Minimum-energy representative of every coset of the modulus ideal.

    Enumerates the origin-centered ball of squared radius factor^2 times the
    Minkowski bound of the modulus (doubling until every coset is covered)
    and keeps the lowest-energy point per coset, ties broken lexicographically
    on exact coordinates.  Returns (coords int64 (N, n), normsq2 int64 (N,))
    ordered by the modulus residue index.
    """
    n = field.n
    count = modulus.norm
    bound2 = max(int(math.ceil(2.0 * minkowski_bound_sq(field, modulus) * factor * factor)), 1)
    radix = np.array([modulus.hnf[i][i] for i in range(n)], dtype=np.int64)
    strides = np.ones(n, dtype=np.int64)
    for i in range(1, n):
        strides[i] = strides[i - 1] * radix[i - 1]
    while True:
        X, norms2 = short_vectors(field.gram2_np, bound2, include_zero=True)
        if X.shape[0] > _BOX_CELL_LIMIT:
            raise Infeasible(f"representative search scanned {X.shape[0]} points; giving up")
        res = modulus.reduce_batch(X)
        ridx = res @ strides
        keys = tuple(X[:, i] for i in range(n - 1, -1, -1)) + (norms2,)
        order = np.lexsort(keys)
        uniq, first = np.unique(ridx[order], return_index=True)
        if uniq.shape[0] == count:
            rows = order[first]
            out = np.empty((count, n), dtype=np.int64)
            out_norm = np.empty(count, dtype=np.int64)
            out[uniq] = X[rows]
            out_norm[uniq] = norms2[rows]
            return out, out_norm
        bound2 *= 2


class IndexCode:
    """Immutable index code over a number field; build with build_index_code."""

    def __init__(self, field, primes, modulus, idempotents, coords, norms2):
        self.field = field
        self.primes = primes
        self.modulus = modulus
        self.idempotents = idempotents
        self.size = coords.shape[0]
        self.alphabet_sizes = tuple(p.norm for p in primes)

        # order points by row-major message index (w_1 slowest)
        K = len(primes)
        res_idx = np.empty((self.size, K), dtype=np.int64)
        res_coords = []
        for k, p in enumerate(primes):
            rk = p.reduce_batch(coords)
            res_coords.append(rk)
            stride = np.ones(field.n, dtype=np.int64)
            for i in range(1, field.n):
                stride[i] = stride[i - 1] * p.hnf[i - 1][i - 1]
            res_idx[:, k] = rk @ stride
        msg_index = np.zeros(self.size, dtype=np.int64)
        for k in range(K):
            msg_index = msg_index * self.alphabet_sizes[k] + res_idx[:, k]
        if np.any(np.bincount(msg_index, minlength=self.size) != 1):
            raise InvariantViolation("message labels do not biject with cosets")
        order = np.argsort(msg_index)
        self.coords_matrix = coords[order]
        self.norms2 = norms2[order]
        self.residue_indices = res_idx[order]
        self._label_coords = [rc[order] for rc in res_coords]
        self.embedded = self.coords_matrix.astype(np.float64) @ field.embed_matrix.T

        total = int(self.norms2.sum())
        if total <= 0:
            raise InvariantViolation("constellation has no energy")
        self.mean_energy = Fraction(total, 2 * self.size)
        self.gamma = 1.0 / math.sqrt(total / (2.0 * self.size))

        self.points = tuple(
            CodePoint(
                i,
                Message(
                    tuple(
                        tuple(int(v) for v in self._label_coords[k][i])
                        for k in range(K)
                    )
                ),
                tuple(int(v) for v in self.coords_matrix[i]),
            )
            for i in range(self.size)
        )

    # ---- message plumbing ----

    @property
    def num_messages(self):
        return len(self.primes)

    def check_message(self, msg):
        if len(msg.residues) != len(self.primes):
            raise InvalidArgument(f"message needs {len(self.primes)} components")
        for k, (res, p) in enumerate(zip(msg.residues, self.primes)):
            if len(res) != self.field.n:
                raise InvalidArgument(f"w_{k+1} has wrong length")
            for i, v in enumerate(res):
                if not 0 <= v < p.hnf[i][i]:
                    raise InvalidArgument(f"w_{k+1} = {res} is not a canonical residue")

    def message_index(self, msg):
        self.check_message(msg)
        idx = 0
        for res, p in zip(msg.residues, self.primes):
            r = p.residue_index(res)
            idx = idx * p.norm + r
        return idx

    def representative(self, msg):
        """The CodePoint encoding this message."""
        return self.points[self.message_index(msg)]

    def message_from_index(self, idx):
        return self.points[idx].message

    def zero_message(self):
        return Message(tuple((0,) * self.field.n for _ in self.primes))

    def message_add(self, a, b):
        return Message(
            tuple(
                tuple(p.reduce(self.field.element(ra) + self.field.element(rb)).coords)
                for ra, rb, p in zip(a.residues, b.residues, self.primes)
            )
        )

    def message_mul(self, a, b):
        return Message(
            tuple(
                tuple(p.reduce(self.field.element(ra) * self.field.element(rb)).coords)
                for ra, rb, p in zip(a.residues, b.residues, self.primes)
            )
        )

    # ---- side information ----

    def check_side_info(self, s):
        s = tuple(sorted(set(int(k) for k in s)))
        if s and (s[0] < 1 or s[-1] > len(self.primes)):
            raise InvalidArgument(f"side-information set {s} not within 1..{len(self.primes)}")
        return s

    def side_ideal(self, s):
        """The ideal prod_{k in S} p_k (whole ring for empty S)."""
        s = self.check_side_info(s)
        ideal = whole_ring(self.field)
        for k in s:
            ideal = ideal * self.primes[k - 1]
        return ideal

    def subcode_indices(self, s, fixed=None):
        s = self.check_side_info(s)
        mask = np.ones(self.size, dtype=bool)
        for k in s:
            p = self.primes[k - 1]
            if fixed is None:
                want = 0
            else:
                res = fixed.residues[k - 1]
                if any(not 0 <= v < p.hnf[i][i] for i, v in enumerate(res)):
                    raise InvalidArgument(f"fixed w_{k} is not a canonical residue")
                want = p.residue_index(res)
            mask &= self.residue_indices[:, k - 1] == want
        return np.nonzero(mask)[0]

    def to_dict(self):
        return {
            "format": "latticedex-code-v1",
            "field": self.field.to_dict(),
            "primes": [ideal_to_dict(p) for p in self.primes],
            "modulus_hnf": [list(r) for r in self.modulus.hnf],
            "idempotents": [list(e.coords) for e in self.idempotents],
            "alphabet_sizes": list(self.alphabet_sizes),
            "gamma": self.gamma,
            "mean_energy": [self.mean_energy.numerator, self.mean_energy.denominator],
            "points": [
                {
                    "label": [list(r) for r in pt.message.residues],
                    "coords": list(pt.coords),
                    "embedded": [float(v) for v in self.embedded[pt.index]],
                }
                for pt in self.points
            ],
        }

    def content_hash(self):
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def __repr__(self):
        sizes = "x".join(str(v) for v in self.alphabet_sizes)
        return f"IndexCode({self.field.name}, {self.size} points, alphabets {sizes})"


def build_index_code(field, primes, energy_radius_factor=1.0, enumeration_cap=DEFAULT_ENUMERATION_CAP):
    """Build the index code for the given coprime prime ideals.

    energy_radius_factor scales the initial representative-search radius
    (relative to the Minkowski bound of the modulus); enumeration_cap limits
    the constellation size N(I).
    """
    if energy_radius_factor <= 0:
        raise InvalidArgument("energy_radius_factor must be positive")
    primes = _ensure_prime_tags(field, primes)
    if not primes:
        raise InvalidArgument("need at least one prime ideal")
    for a in range(len(primes)):
        for b in range(a + 1, len(primes)):
            if primes[a] == primes[b]:
                raise InvalidArgument(f"duplicate prime ideal {primes[a].label()}")
    idempotents = crt_idempotents(primes)  # also validates pairwise coprimality
    modulus = primes[0]
    for p in primes[1:]:
        modulus = modulus * p
    count = modulus.norm
    if count > enumeration_cap:
        raise Infeasible(f"product norm {count} exceeds enumeration cap {enumeration_cap}")

    idempotents = tuple(modulus.reduce(e) for e in idempotents)
    for k, e in enumerate(idempotents):
        for j, p in enumerate(primes):
            want = field.one if j == k else field.zero
            if p.reduce(e) != p.reduce(want):
                raise InvariantViolation(f"idempotent e_{k+1} wrong mod p_{j+1}")

    coords, norms2 = _min_energy_representatives(field, modulus, energy_radius_factor, enumeration_cap)
    return IndexCode(field, primes, modulus, idempotents, coords, norms2)


def encode(code, msg):
    """Transmit vector gamma * Psi(representative of the message)."""
    pt = code.representative(msg)
    return code.gamma * code.embedded[pt.index]


def decode_point(code, x):
    """Message labels of an arbitrary algebraic integer: w_k = x mod p_k."""
    if not isinstance(x, AlgebraicInt):
        x = code.field.element(x)
    return Message(tuple(tuple(p.reduce(x).coords) for p in code.primes))


def subcode_points(code, s, fixed=None):
    """Constellation points consistent with side information w_S (default 0)."""
    return [code.points[i] for i in code.subcode_indices(s, fixed)]


def rate(code, s):
    """(1/n) * sum_{k in S} log2 N(p_k) in bits per dimension."""
    s = code.check_side_info(s)
    return sum(math.log2(code.primes[k - 1].norm) for k in s) / code.field.n


def save_code(code, path):
    with open(path, "w") as fh:
        json.dump(code.to_dict(), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_code(path):
    with open(path) as fh:
        doc = json.load(fh)
    return code_from_dict(doc)


def code_from_dict(doc):
    if doc.get("format") != "latticedex-code-v1":
        raise InvalidArgument("not a latticedex code file")
    field = field_from_dict(doc["field"])
    primes = tuple(ideal_from_dict(field, d) for d in doc["primes"])
    modulus = primes[0]
    for p in primes[1:]:
        modulus = modulus * p
    if [list(r) for r in modulus.hnf] != doc["modulus_hnf"]:
        raise InvalidArgument("modulus HNF does not match the primes in the file")
    idempotents = tuple(
        AlgebraicInt(field, tuple(int(v) for v in c)) for c in doc["idempotents"]
    )
    coords = np.array([pt["coords"] for pt in doc["points"]], dtype=np.int64)
    norms2 = np.array(
        [field.normsq2_coords(tuple(int(v) for v in row)) for row in coords],
        dtype=np.int64,
    )
    code = IndexCode(field, primes, modulus, idempotents, coords, norms2)
    for pt, rec in zip(code.points, doc["points"]):
        if [list(r) for r in pt.message.residues] != rec["label"]:
            raise InvalidArgument("stored labels disagree with recomputed residues")
    if abs(code.gamma - doc["gamma"]) > 1e-12 * code.gamma:
        raise InvalidArgument("stored gamma disagrees with recomputed normalization")
    return code
