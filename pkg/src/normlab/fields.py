"""Finite fields GF(q) for small prime powers, with table-based arithmetic.

Elements are ints ``0..q-1`` encoding polynomials over the prime field in
base-p digits (little-endian), reduced modulo a fixed irreducible
polynomial per q.  All arithmetic goes through precomputed tables, so
field ops are O(1) lookups; the whole setup is exhaustively checkable for
q <= 49.
"""

from __future__ import annotations

import math

# Fixed monic irreducible polynomials per prime power, little-endian
# coefficient lists including the leading 1.  Using a fixed table keeps
# element encodings reproducible across runs.
IRREDUCIBLE_POLYS = {
    (2, 2): [1, 1, 1],             # x^2 + x + 1
    (2, 3): [1, 1, 0, 1],          # x^3 + x + 1
    (2, 4): [1, 1, 0, 0, 1],       # x^4 + x + 1
    (2, 5): [1, 0, 1, 0, 0, 1],    # x^5 + x^2 + 1
    (2, 6): [1, 1, 0, 1, 1, 0, 1],  # x^6 + x^4 + x^3 + x + 1
    (3, 2): [2, 2, 1],             # x^2 + 2x + 2
    (3, 3): [1, 2, 0, 1],          # x^3 + 2x + 1
    (5, 2): [2, 4, 1],             # x^2 + 4x + 2
    (7, 2): [3, 6, 1],             # x^2 + 6x + 3
}


def factor_prime_power(q):
    """Return (p, k) with q = p^k, or raise ValueError."""
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            k = 0
            m = q
            while m % p == 0:
                m //= p
                k += 1
            if m != 1:
                raise ValueError(f"{q} is not a prime power")
            return p, k
    raise ValueError(f"{q} is not a prime power")


def _poly_trim(c):
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return _poly_trim(out)


def _poly_mod(a, m, p):
    a = list(a)
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        coef = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * c) % p
        _poly_trim(a)
        if not a:
            break
    return a


def _is_irreducible(poly, p):
    """Trial division by all monic polynomials of degree <= deg/2."""
    deg = len(poly) - 1
    if deg < 1:
        return False

    def monic_polys(d):
        for tail in range(p ** d):
            coeffs = []
            t = tail
            for _ in range(d):
                coeffs.append(t % p)
                t //= p
            yield coeffs + [1]

    for d in range(1, deg // 2 + 1):
        for div in monic_polys(d):
            if not _poly_mod(poly, div, p):
                return False
    return True


class FiniteField:
    """GF(q); elements are ints 0..q-1, arithmetic by table lookup."""

    def __init__(self, q):
        p, k = factor_prime_power(q)
        self.q = q
        self.p = p
        self.degree = k
        if k == 1:
            self.modulus = None
        else:
            try:
                self.modulus = list(IRREDUCIBLE_POLYS[(p, k)])
            except KeyError:
                raise ValueError(
                    f"no irreducible polynomial shipped for GF({p}^{k})") from None
            if not _is_irreducible(self.modulus, p):
                raise RuntimeError(f"shipped polynomial for GF({q}) is reducible")
        self._build_tables()

    # encoding: int <-> little-endian base-p digits = polynomial coefficients

    def _decode(self, x):
        digits = []
        for _ in range(self.degree):
            digits.append(x % self.p)
            x //= self.p
        return digits

    def _encode(self, digits):
        value = 0
        for d in reversed(digits):
            value = value * self.p + d
        return value

    def _build_tables(self):
        q, p = self.q, self.p
        if self.degree == 1:
            self._add = [[(a + b) % p for b in range(p)] for a in range(p)]
            self._mul = [[(a * b) % p for b in range(p)] for a in range(p)]
        else:
            polys = [self._decode(x) for x in range(q)]
            self._add = [[self._encode([(a + b) % p for a, b in
                                        zip(polys[x], polys[y])])
                          for y in range(q)] for x in range(q)]
            self._mul = []
            for x in range(q):
                row = []
                for y in range(q):
                    prod = _poly_mul([c for c in polys[x]], [c for c in polys[y]], p)
                    prod = _poly_mod(prod, self.modulus, p)
                    prod += [0] * (self.degree - len(prod))
                    row.append(self._encode(prod))
                self._mul.append(row)
        self._neg = [0] * q
        for x in range(q):
            for y in range(q):
                if self._add[x][y] == 0:
                    self._neg[x] = y
                    break
        self._inv = [None] * q
        for x in range(1, q):
            for y in range(1, q):
                if self._mul[x][y] == 1:
                    self._inv[x] = y
                    break
            if self._inv[x] is None:
                raise RuntimeError(f"GF({q}): {x} has no inverse; bad modulus?")

    # -- arithmetic

    def add(self, a, b):
        return self._add[a][b]

    def sub(self, a, b):
        return self._add[a][self._neg[b]]

    def neg(self, a):
        return self._neg[a]

    def mul(self, a, b):
        return self._mul[a][b]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return self._inv[a]

    def pow(self, a, e):
        if e < 0:
            return self.pow(self.inv(a), -e)
        out = 1
        base = a
        while e:
            if e & 1:
                out = self._mul[out][base]
            base = self._mul[base][base]
            e >>= 1
        return out

    def elements(self):
        return range(self.q)

    def nonzero(self):
        return range(1, self.q)

    # -- Frobenius involution x -> x^(p^(k/2)) for square q

    @property
    def has_involution(self):
        return self.degree % 2 == 0

    def involution(self, a):
        """The involutory automorphism x -> x^sqrt(q); requires square q."""
        if not self.has_involution:
            raise ValueError(f"GF({self.q}) has no involutory automorphism "
                             f"(degree {self.degree} is odd)")
        return self.pow(a, self.p ** (self.degree // 2))

    @property
    def sqrt_order(self):
        if not self.has_involution:
            raise ValueError(f"GF({self.q}) is not a square")
        return self.p ** (self.degree // 2)

    def norm_one_elements(self):
        """Elements with x^(sqrt(q)+1) = 1, i.e. the norm-1 kernel."""
        q0 = self.sqrt_order
        return [x for x in self.nonzero() if self.pow(x, q0 + 1) == 1]

    def __repr__(self):
        return f"FiniteField({self.q})"


_FIELD_CACHE = {}


def get_field(q):
    if q not in _FIELD_CACHE:
        _FIELD_CACHE[q] = FiniteField(q)
    return _FIELD_CACHE[q]


# ---------------------------------------------------------------------------
# matrices: flat row-major tuples of field elements

def mat_identity(n):
    return tuple(1 if i == j else 0 for i in range(n) for j in range(n))


def mat_mul(F, A, B, n):
    mul, add = F._mul, F._add
    out = []
    rng = range(n)
    for i in rng:
        row_off = i * n
        for j in rng:
            acc = 0
            for k in rng:
                acc = add[acc][mul[A[row_off + k]][B[k * n + j]]]
            out.append(acc)
    return tuple(out)


def mat_vec(F, A, v, n):
    mul, add = F._mul, F._add
    out = []
    for i in range(n):
        acc = 0
        off = i * n
        for k in range(n):
            acc = add[acc][mul[A[off + k]][v[k]]]
        out.append(acc)
    return tuple(out)


def mat_transpose(A, n):
    return tuple(A[j * n + i] for i in range(n) for j in range(n))


def mat_conj(F, A):
    return tuple(F.involution(x) for x in A)


def mat_scale(F, c, A):
    mul = F._mul
    return tuple(mul[c][x] for x in A)


def _row_reduce(F, rows, n):
    """In-place Gaussian elimination; returns the rank."""
    mul, add, neg, inv = F._mul, F._add, F._neg, F._inv
    rank = 0
    for col in range(n):
        pivot = None
        for r in range(rank, len(rows)):
            if rows[r][col]:
                pivot = r
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        piv_inv = inv[rows[rank][col]]
        rows[rank] = [mul[piv_inv][x] for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                factor = neg[rows[r][col]]
                rows[r] = [add[x][mul[factor][y]]
                           for x, y in zip(rows[r], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


def mat_rank(F, A, n):
    rows = [list(A[i * n:(i + 1) * n]) for i in range(n)]
    return _row_reduce(F, rows, n)


def mat_det(F, A, n):
    mul, neg, inv = F._mul, F._neg, F._inv
    rows = [list(A[i * n:(i + 1) * n]) for i in range(n)]
    det = 1
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if rows[r][col]:
                pivot = r
                break
        if pivot is None:
            return 0
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = neg[det]
        det = mul[det][rows[col][col]]
        piv_inv = inv[rows[col][col]]
        for r in range(col + 1, n):
            if rows[r][col]:
                factor = mul[rows[r][col]][piv_inv]
                rows[r] = [F.sub(x, mul[factor][y])
                           for x, y in zip(rows[r], rows[col])]
    return det


def mat_inv(F, A, n):
    mul, add, neg, inv = F._mul, F._add, F._neg, F._inv
    rows = [list(A[i * n:(i + 1) * n]) + [1 if j == i else 0 for j in range(n)]
            for i in range(n)]
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if rows[r][col]:
                pivot = r
                break
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        piv_inv = inv[rows[col][col]]
        rows[col] = [mul[piv_inv][x] for x in rows[col]]
        for r in range(n):
            if r != col and rows[r][col]:
                factor = neg[rows[r][col]]
                rows[r] = [add[x][mul[factor][y]]
                           for x, y in zip(rows[r], rows[col])]
    return tuple(rows[i][n + j] for i in range(n) for j in range(n))


def projective_canonical(F, A):
    """Scale so the first nonzero entry in row-major order is 1."""
    for x in A:
        if x:
            if x == 1:
                return A
            return mat_scale(F, F.inv(x), A)
    raise ValueError("zero matrix has no projective representative")
