"""Number fields with a power integral basis and their canonical embeddings.

Three families, each with ring of integers exactly Z[theta]:

* quadratic Q(sqrt(d)), squarefree d not in {0, 1}: theta = sqrt(d) when
  d = 2, 3 (mod 4), theta = (1 + sqrt(d))/2 when d = 1 (mod 4);
* cyclotomic Q(zeta_m), m >= 3, m != 2 (mod 4): theta = zeta_m;
* maximal real subfield Q(zeta_m + zeta_m^{-1}) for prime m >= 5:
  theta = 2*cos(2*pi/m).

Elements are integer coordinate vectors over 1, theta, ..., theta^(n-1).
The canonical embedding maps an element to R^n: real embeddings first in
ascending order of their defining exponent, then one (Re, Im) pair per
conjugate pair of complex embeddings, ascending.  Complex coordinates are
counted once in squared norms, so the doubled trace form
G2[k][l] = Tr(theta^k * conj(theta^l)) is an integer matrix with
x^T G2 x = 2 * ||Psi(x)||^2 exactly.
"""

from __future__ import annotations

import cmath
import math
from functools import lru_cache

import numpy as np
import sympy

from ..errors import InvalidArgument
from .linalg import det_int

IMAGINARY_PID_DS = (-1, -2, -3, -7, -11, -19, -43, -67, -163)

# ============================================================
# Integer polynomial helpers (coefficient lists, low to high)
# ============================================================


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def _poly_divmod_exact(num, den):
    """Quotient of num / den when the division is exact over Z."""
    num = list(num)
    dn = len(den) - 1
    lead = den[-1]
    q = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c % lead:
            raise InvalidArgument("inexact polynomial division")
        qi = c // lead
        q[i - dn] = qi
        if qi:
            for j, dj in enumerate(den):
                num[i - dn + j] -= qi * dj
    if any(num[:dn]):
        raise InvalidArgument("inexact polynomial division")
    return q


@lru_cache(maxsize=None)
def cyclotomic_poly(m):
    """Coefficients of the m-th cyclotomic polynomial, low to high."""
    poly = [-1] + [0] * (m - 1) + [1]  # x^m - 1
    for d in range(1, m):
        if m % d == 0:
            poly = _poly_divmod_exact(poly, cyclotomic_poly(d))
    return tuple(poly)


def _maxreal_poly(m):
    """Minimal polynomial of 2*cos(2*pi/m) for prime m, via the palindromic
    reduction of x^(m-1) + ... + 1 with x^k + x^(-k) = P_k(y)."""
    n = (m - 1) // 2
    out = [1] + [0] * n
    p_prev = [2]  # P_0
    p_cur = [0, 1]  # P_1
    for _ in range(1, n + 1):
        for i, c in enumerate(p_cur):
            out[i] += c
        nxt = [0] + p_cur  # y * P_k - P_{k-1}
        for i, c in enumerate(p_prev):
            nxt[i] -= c
        p_prev, p_cur = p_cur, nxt
    return tuple(out)


def _power_traces(min_poly, upto):
    """Tr(theta^j) for j = 0..upto via Newton's identities (exact ints)."""
    n = len(min_poly) - 1
    a = min_poly
    p = [n]
    for k in range(1, upto + 1):
        if k <= n:
            s = -k * a[n - k]
            for i in range(1, k):
                s -= a[n - i] * p[k - i]
        else:
            s = 0
            for i in range(1, n + 1):
                s -= a[n - i] * p[k - i]
        p.append(s)
    return p


def kronecker_symbol(a, n):
    """Kronecker symbol (a / n) for integers a, n."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    res = 1
    if n < 0:
        n = -n
        if a < 0:
            res = -res
    t = 0
    while n % 2 == 0:
        n //= 2
        t += 1
    if t:
        if a % 2 == 0:
            return 0
        if t % 2 and a % 8 in (3, 5):
            res = -res
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                res = -res
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            res = -res
        a %= n
    return res if n == 1 else 0


# ============================================================
# Fields
# ============================================================


class NumberField:
    """A monogenic number field from one of the supported families.

    Use :func:`quadratic_field`, :func:`cyclotomic_field` or
    :func:`maximal_real_field` instead of calling this directly.
    """

    def __init__(self, family, param):
        if family == "quadratic":
            d = int(param)
            if d in (0, 1):
                raise InvalidArgument("d must be a squarefree integer other than 0, 1")
            if any(e >= 2 for e in sympy.factorint(abs(d)).values()):
                raise InvalidArgument(f"d = {d} is not squarefree")
            if d % 4 == 1:
                self.min_poly = ((1 - d) // 4, -1, 1)
                self.discriminant = d
                self.theta_name = f"(1+sqrt({d}))/2"
            else:
                self.min_poly = (-d, 0, 1)
                self.discriminant = 4 * d
                self.theta_name = f"sqrt({d})"
            self.r1, self.r2 = (2, 0) if d > 0 else (0, 1)
        elif family == "cyclotomic":
            m = int(param)
            if m < 3 or m % 4 == 2:
                raise InvalidArgument("need m >= 3 with m != 2 (mod 4)")
            self.min_poly = cyclotomic_poly(m)
            n = len(self.min_poly) - 1
            disc = m**n
            for p in sympy.factorint(m):
                disc //= p ** (n // (p - 1))
            if (n // 2) % 2:
                disc = -disc
            self.discriminant = disc
            self.theta_name = f"zeta_{m}"
            self.r1, self.r2 = 0, n // 2
        elif family == "maximal_real":
            m = int(param)
            if m < 5 or not sympy.isprime(m):
                raise InvalidArgument("need a prime m >= 5")
            self.min_poly = _maxreal_poly(m)
            n = (m - 1) // 2
            self.discriminant = m ** ((m - 3) // 2)
            self.theta_name = f"2*cos(2*pi/{m})"
            self.r1, self.r2 = n, 0
        else:
            raise InvalidArgument(f"unknown field family {family!r}")
        self.family = family
        self.param = int(param)
        self.n = len(self.min_poly) - 1
        self._init_tables()

    # ---- precomputed tables ----

    def _init_tables(self):
        n, a = self.n, self.min_poly
        pows = [[0] * n for _ in range(2 * n - 1)]
        for j in range(min(n, 2 * n - 1)):
            pows[j][j] = 1
        for j in range(n, 2 * n - 1):
            prev = pows[j - 1]
            top = prev[n - 1]
            pows[j] = [(prev[r - 1] if r else 0) - top * a[r] for r in range(n)]
        self._pow = tuple(tuple(p) for p in pows)
        self._trace_pow = _power_traces(a, 2 * n - 2)

        if self.r2 == 0:
            self._conj_pow = self._pow[:n]
        else:
            if self.family == "quadratic":
                ct = (1, -1) if self.param % 4 == 1 else (0, -1)
            else:
                ct = self._element_pow_coords(self._pow[1], self.param - 1)
            conj_pows = [self._pow[0], tuple(ct)]
            for _ in range(2, n):
                conj_pows.append(self.mul_coords(conj_pows[-1], ct))
            self._conj_pow = tuple(conj_pows[:n])

        g2 = [[0] * n for _ in range(n)]
        for k in range(n):
            for l in range(n):
                if self.r2 == 0:
                    g2[k][l] = 2 * self._trace_pow[k + l]
                else:
                    g2[k][l] = self.trace_coords(
                        self.mul_coords(self._pow[k], self._conj_pow[l])
                    )
        self.gram2 = tuple(tuple(r) for r in g2)
        self.gram2_np = np.array(g2, dtype=np.int64)

        embs = []
        if self.family == "quadratic":
            d = self.param
            if d > 0:
                rt = math.sqrt(d)
                if d % 4 == 1:
                    embs = [("r", (1 + rt) / 2), ("r", (1 - rt) / 2)]
                else:
                    embs = [("r", rt), ("r", -rt)]
            else:
                rt = math.sqrt(-d)
                z = complex(0.5, rt / 2) if d % 4 == 1 else complex(0.0, rt)
                embs = [("c", z)]
        elif self.family == "cyclotomic":
            m = self.param
            embs = [
                ("c", cmath.exp(2j * math.pi * j / m))
                for j in range(1, m // 2 + 1)
                if math.gcd(j, m) == 1
            ]
        else:
            m = self.param
            embs = [("r", 2 * math.cos(2 * math.pi * j / m)) for j in range(1, self.n + 1)]
        self.embeddings = tuple(embs)
        rows = []
        for kind, z in embs:
            if kind == "r":
                rows.append([z**k for k in range(n)])
            else:
                zp = [z**k for k in range(n)]
                rows.append([w.real for w in zp])
                rows.append([w.imag for w in zp])
        self.embed_matrix = np.array(rows, dtype=np.float64)

    # ---- identity ----

    @property
    def signature(self):
        return (self.r1, self.r2)

    @property
    def is_totally_real(self):
        return self.r2 == 0

    @property
    def is_totally_complex(self):
        return self.r1 == 0

    @property
    def is_imaginary_quadratic_pid(self):
        return self.family == "quadratic" and self.param in IMAGINARY_PID_DS

    @property
    def name(self):
        if self.family == "quadratic":
            return f"Q(sqrt({self.param}))"
        if self.family == "cyclotomic":
            return f"Q(zeta{self.param})"
        return f"Q(zeta{self.param}+)"

    def describe(self):
        return f"{self.name}, degree {self.n}, theta = {self.theta_name}, discriminant {self.discriminant}"

    def to_dict(self):
        return {"family": self.family, "param": self.param}

    def __eq__(self, other):
        return (
            isinstance(other, NumberField)
            and self.family == other.family
            and self.param == other.param
        )

    def __hash__(self):
        return hash((self.family, self.param))

    def __repr__(self):
        return f"NumberField({self.name})"

    # ---- coordinate arithmetic ----

    def mul_coords(self, a, b):
        n = self.n
        conv = [0] * (2 * n - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    conv[i + j] += ai * bj
        out = list(conv[:n])
        for j in range(n, 2 * n - 1):
            cj = conv[j]
            if cj:
                pw = self._pow[j]
                for r in range(n):
                    out[r] += cj * pw[r]
        return tuple(out)

    def _element_pow_coords(self, base, k):
        result = self._pow[0]
        cur = tuple(base)
        while k:
            if k & 1:
                result = self.mul_coords(result, cur)
            k >>= 1
            if k:
                cur = self.mul_coords(cur, cur)
        return result

    def trace_coords(self, c):
        return sum(cj * self._trace_pow[j] for j, cj in enumerate(c) if cj)

    def norm_coords(self, c):
        n = self.n
        a = self.min_poly
        cols = [list(c)]
        for _ in range(n - 1):
            prev = cols[-1]
            top = prev[n - 1]
            cols.append([(prev[r - 1] if r else 0) - top * a[r] for r in range(n)])
        return det_int([[cols[j][r] for j in range(n)] for r in range(n)])

    def normsq2_coords(self, c):
        g = self.gram2
        return sum(ci * sum(gi[j] * c[j] for j in range(self.n)) for ci, gi in zip(c, g))

    def conj_coords(self, c):
        if self.r2 == 0:
            return tuple(c)
        out = [0] * self.n
        for j, cj in enumerate(c):
            if cj:
                pw = self._conj_pow[j]
                for r in range(self.n):
                    out[r] += cj * pw[r]
        return tuple(out)

    def embed_coords(self, c):
        return self.embed_matrix @ np.asarray(c, dtype=np.float64)

    # ---- element constructors ----

    def element(self, coords):
        coords = tuple(int(v) for v in coords)
        if len(coords) != self.n:
            raise InvalidArgument(f"expected {self.n} coordinates, got {len(coords)}")
        return AlgebraicInt(self, coords)

    def from_int(self, k):
        return self.element((int(k),) + (0,) * (self.n - 1))

    @property
    def zero(self):
        return self.from_int(0)

    @property
    def one(self):
        return self.from_int(1)

    @property
    def theta(self):
        return self.element(self._pow[1]) if self.n > 1 else self.one


def quadratic_field(d):
    """Q(sqrt(d)) for squarefree d, with its full ring of integers."""
    return NumberField("quadratic", d)


def cyclotomic_field(m):
    """Q(zeta_m) for m >= 3, m != 2 (mod 4)."""
    return NumberField("cyclotomic", m)


def maximal_real_field(m):
    """Maximal real subfield of Q(zeta_m) for prime m >= 5."""
    return NumberField("maximal_real", m)


def field_from_dict(d):
    return NumberField(d["family"], d["param"])


# ============================================================
# Elements
# ============================================================


class AlgebraicInt:
    """An algebraic integer as coordinates over the power basis of its field."""

    __slots__ = ("field", "coords")

    def __init__(self, field, coords):
        self.field = field
        self.coords = coords

    def _check(self, other):
        if isinstance(other, int):
            return self.field.from_int(other)
        if not isinstance(other, AlgebraicInt) or other.field != self.field:
            raise InvalidArgument("elements belong to different fields")
        return other

    def __add__(self, other):
        other = self._check(other)
        return AlgebraicInt(self.field, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        return AlgebraicInt(self.field, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __rsub__(self, other):
        return self._check(other).__sub__(self)

    def __neg__(self):
        return AlgebraicInt(self.field, tuple(-a for a in self.coords))

    def __mul__(self, other):
        other = self._check(other)
        return AlgebraicInt(self.field, self.field.mul_coords(self.coords, other.coords))

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise InvalidArgument("exponent must be a nonnegative integer")
        return AlgebraicInt(self.field, self.field._element_pow_coords(self.coords, k))

    def __eq__(self, other):
        return (
            isinstance(other, AlgebraicInt)
            and self.field == other.field
            and self.coords == other.coords
        )

    def __hash__(self):
        return hash((self.field, self.coords))

    @property
    def is_zero(self):
        return not any(self.coords)

    def norm(self):
        return self.field.norm_coords(self.coords)

    def trace(self):
        return self.field.trace_coords(self.coords)

    def normsq2(self):
        """2 * ||Psi(x)||^2 as an exact integer."""
        return self.field.normsq2_coords(self.coords)

    def embed(self):
        return self.field.embed_coords(self.coords)

    def conj(self):
        return AlgebraicInt(self.field, self.field.conj_coords(self.coords))

    def __str__(self):
        terms = []
        for j, c in enumerate(self.coords):
            if c == 0:
                continue
            if j == 0:
                terms.append(str(c))
            else:
                var = "t" if j == 1 else f"t^{j}"
                if c == 1:
                    terms.append(var)
                elif c == -1:
                    terms.append(f"-{var}")
                else:
                    terms.append(f"{c}*{var}")
        if not terms:
            return "0"
        s = terms[0]
        for t in terms[1:]:
            s += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
        return s

    def __repr__(self):
        return f"AlgebraicInt({self} | {self.field.name})"
