"""Classical matrix groups over small finite fields.

Families: GL, SL, PGL, PSL (zero form), Sp (symplectic), U, SU
(hermitian over a square field), Oplus / Ominus (orthogonal; for odd q
the determinant-1 subgroup, for even q the kernel of the Dickson
invariant, matching the standard order formulas), and OmegaPlus /
OmegaMinus (derived subgroup of the full form-preserving group).

Matrices are enumerated column by column under the form constraints and
the final element list is sorted lexicographically by flattened entries,
so enumeration order is deterministic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .fields import (FiniteField, get_field, mat_det, mat_identity, mat_inv,
                     mat_mul, mat_rank, mat_vec, projective_canonical)
from .groups import CapacityError, DescriptorError, FiniteGroup, subgroup_generated

FAMILIES = ("GL", "SL", "PGL", "PSL", "Sp", "U", "SU",
            "Oplus", "Ominus", "OmegaPlus", "OmegaMinus")


# ---------------------------------------------------------------------------
# forms

@dataclass(frozen=True)
class SesquilinearForm:
    """A form on F^n: gram matrix plus, in characteristic 2, the quadratic
    values on basis vectors (the gram then stores the polar form)."""

    kind: str  # zero | symplectic | hermitian | symmetric | quadratic-char2
    gram: tuple
    quadratic_values: tuple | None = None

    @property
    def dim(self):
        return len(self.gram)

    def nonzero_entries(self):
        out = []
        for i, row in enumerate(self.gram):
            for j, g in enumerate(row):
                if g:
                    out.append((i, j, g))
        return out

    def evaluate(self, F, x, y):
        """f(x, y); hermitian forms apply the involution to the first slot."""
        conj = F.involution if self.kind == "hermitian" else (lambda a: a)
        acc = 0
        for i, j, g in self.nonzero_entries():
            acc = F.add(acc, F.mul(F.mul(conj(x[i]), g), y[j]))
        return acc

    def quadratic_value(self, F, v):
        if self.kind != "quadratic-char2":
            raise ValueError("quadratic values only exist for quadratic-char2 forms")
        acc = 0
        for i, qi in enumerate(self.quadratic_values):
            if qi and v[i]:
                acc = F.add(acc, F.mul(qi, F.mul(v[i], v[i])))
        for i, j, g in self.nonzero_entries():
            if i < j and v[i] and v[j]:
                acc = F.add(acc, F.mul(g, F.mul(v[i], v[j])))
        return acc

    def to_json(self):
        return {"kind": self.kind,
                "gram": [list(row) for row in self.gram],
                "quadratic_values": list(self.quadratic_values)
                if self.quadratic_values is not None else None}

    @staticmethod
    def from_json(data):
        qv = data.get("quadratic_values")
        return SesquilinearForm(
            data["kind"], tuple(tuple(row) for row in data["gram"]),
            tuple(qv) if qv is not None else None)


def _nonsquare(F):
    squares = {F.mul(x, x) for x in F.elements()}
    for x in F.nonzero():
        if x not in squares:
            return x
    raise ValueError(f"every element of GF({F.q}) is a square")


def _definite_plane_coefficient(F):
    # lambda with t^2 + t + lambda irreducible over GF(q), q even
    for lam in F.nonzero():
        if all(F.add(F.add(F.mul(t, t), t), lam) != 0 for t in F.elements()):
            return lam
    raise ValueError(f"no definite plane over GF({F.q})")


def standard_form(kind, n, F, eps=1):
    """The fixed standard form used for each family.

    symplectic: block-antidiagonal [[0, I], [-I, 0]]
    hermitian: identity gram (orthonormal basis)
    symmetric (odd q): hyperbolic 2x2 blocks, closed by a definite block
      for eps = -1 (even n) or a 1x1 block (odd n)
    quadratic-char2: hyperbolic planes, one definite plane for eps = -1
    """
    if kind == "zero":
        zero_row = tuple(0 for _ in range(n))
        return SesquilinearForm("zero", tuple(zero_row for _ in range(n)))
    if kind == "symplectic":
        if n % 2:
            raise DescriptorError("symplectic forms need even dimension")
        m = n // 2
        gram = [[0] * n for _ in range(n)]
        for i in range(m):
            gram[i][m + i] = 1
            gram[m + i][i] = F.neg(1)
        return SesquilinearForm("symplectic", tuple(tuple(r) for r in gram))
    if kind == "hermitian":
        if not F.has_involution:
            raise DescriptorError("hermitian forms need a square field size")
        return SesquilinearForm(
            "hermitian", tuple(tuple(1 if i == j else 0 for j in range(n))
                               for i in range(n)))
    if kind == "symmetric":
        if F.p == 2:
            raise DescriptorError("use quadratic-char2 in characteristic 2")
        gram = [[0] * n for _ in range(n)]
        pairs = (n - 2) // 2 if (n % 2 == 0 and eps == -1) else n // 2
        for i in range(pairs):
            gram[2 * i][2 * i + 1] = 1
            gram[2 * i + 1][2 * i] = 1
        if n % 2 == 1:
            gram[n - 1][n - 1] = 1 if eps == 1 else _nonsquare(F)
        elif eps == -1:
            nu = _nonsquare(F)
            gram[n - 2][n - 2] = 1
            gram[n - 1][n - 1] = F.neg(nu)
        return SesquilinearForm("symmetric", tuple(tuple(r) for r in gram))
    if kind == "quadratic-char2":
        if F.p != 2:
            raise DescriptorError("quadratic-char2 forms need even q")
        if n % 2:
            raise DescriptorError("characteristic-2 orthogonal groups are "
                                  "implemented for even dimension only")
        gram = [[0] * n for _ in range(n)]
        qvals = [0] * n
        for i in range(n // 2):
            gram[2 * i][2 * i + 1] = 1
            gram[2 * i + 1][2 * i] = 1
        if eps == -1:
            qvals[n - 2] = 1
            qvals[n - 1] = _definite_plane_coefficient(F)
        return SesquilinearForm("quadratic-char2", tuple(tuple(r) for r in gram),
                                tuple(qvals))
    raise DescriptorError(f"unknown form kind {kind!r}")


def verify_form_preserved(form, M, F, n=None):
    """True iff f(Mx, My) = f(x, y) on all basis pairs (and Q(Mx) = Q(x)
    in the characteristic-2 quadratic case)."""
    n = form.dim if n is None else n
    if len(M) != n * n:
        raise ValueError(f"matrix size {len(M)} does not match form dimension {n}")
    cols = [tuple(M[r * n + c] for r in range(n)) for c in range(n)]
    for i in range(n):
        for j in range(n):
            if form.evaluate(F, cols[i], cols[j]) != form.gram[i][j]:
                return False
    if form.kind == "quadratic-char2":
        for i in range(n):
            if form.quadratic_value(F, cols[i]) != form.quadratic_values[i]:
                return False
    return True


# ---------------------------------------------------------------------------
# enumeration

def _all_vectors(F, n):
    return [tuple(v) for v in itertools.product(F.elements(), repeat=n)]


def _enumerate_invertible(F, n, leaf_check=None, sink=None):
    """All invertible matrices by column extension; columns kept independent
    via an incrementally built span set."""
    vectors = _all_vectors(F, n)
    out = [] if sink is None else None

    def emit(cols):
        M = tuple(cols[j][i] for i in range(n) for j in range(n))
        if leaf_check is None or leaf_check(M):
            if sink is None:
                out.append(M)
            else:
                sink(M)

    def extend(cols, span):
        k = len(cols)
        if k == n:
            emit(cols)
            return
        for v in vectors:
            if v in span:
                continue
            new_span = set()
            for w in span:
                for c in F.elements():
                    new_span.add(tuple(F.add(w[i], F.mul(c, v[i]))
                                       for i in range(n)))
            extend(cols + [v], frozenset(new_span))

    zero = tuple(0 for _ in range(n))
    extend([], frozenset({zero}))
    return out


def _enumerate_form_preserving(F, n, form, leaf_check=None):
    """All matrices M with f(M e_i, M e_j) = f(e_i, e_j) (plus quadratic
    values in characteristic 2); nondegenerate forms force invertibility."""
    vectors = _all_vectors(F, n)
    is_quadratic = form.kind == "quadratic-char2"
    gram = form.gram
    out = []

    if is_quadratic:
        vec_pool = [[v for v in vectors
                     if form.quadratic_value(F, v) == form.quadratic_values[k]]
                    for k in range(n)]
    else:
        vec_pool = [[v for v in vectors
                     if form.evaluate(F, v, v) == gram[k][k]]
                    for k in range(n)]

    def extend(cols):
        k = len(cols)
        if k == n:
            M = tuple(cols[j][i] for i in range(n) for j in range(n))
            if leaf_check is None or leaf_check(M):
                out.append(M)
            return
        for v in vec_pool[k]:
            ok = True
            for i, c in enumerate(cols):
                if form.evaluate(F, c, v) != gram[i][k]:
                    ok = False
                    break
                if not is_quadratic and form.evaluate(F, v, c) != gram[k][i]:
                    ok = False
                    break
            if ok:
                extend(cols + [v])

    extend([])
    return out


def dickson_invariant(F, M, n):
    """Dickson invariant in characteristic 2: rank(M + I) mod 2."""
    identity = mat_identity(n)
    shifted = tuple(F.sub(a, b) for a, b in zip(M, identity))
    return mat_rank(F, shifted, n) % 2


# ---------------------------------------------------------------------------
# orders

def order_formula(family, n, q):
    """Exact order of the classical family from its product formula."""
    if n < 1:
        raise DescriptorError("dimension must be positive")
    if family == "GL":
        out = 1
        for i in range(n):
            out *= q ** n - q ** i
        return out
    if family == "SL":
        return order_formula("GL", n, q) // (q - 1)
    if family == "PGL":
        return order_formula("GL", n, q) // (q - 1)
    if family == "PSL":
        return order_formula("SL", n, q) // math.gcd(n, q - 1)
    if family == "Sp":
        if n % 2:
            raise DescriptorError("Sp needs even dimension")
        m = n // 2
        out = q ** (m * m)
        for i in range(1, m + 1):
            out *= q ** (2 * i) - 1
        return out
    if family == "U":
        # (q^n - (-1)^n) q^(n-1) (q^(n-1) - (-1)^(n-1)) q^(n-2) ... (q^2-1) q (q+1)
        out = 1
        for k in range(n, 1, -1):
            out *= (q ** k - (-1) ** k) * q ** (k - 1)
        return out * (q + 1)
    if family == "SU":
        return order_formula("U", n, q) // (q + 1)
    if family in ("Oplus", "Ominus"):
        eps = 1 if family == "Oplus" else -1
        if q % 2 == 1:
            if n % 2 == 1:
                out = 1
                for j in range(n - 1, 1, -2):
                    out *= (q ** j - 1) * q ** (j - 1)
                return out
            m = n // 2
            out = q ** (2 * m - 1) - eps * q ** (m - 1)
            for j in range(2 * m - 2, 1, -2):
                out *= (q ** j - 1) * q ** (j - 1)
            return out
        if n % 2:
            raise DescriptorError("characteristic-2 orthogonal groups are "
                                  "implemented for even dimension only")
        m = n // 2
        out = q ** m - eps
        for j in range(1, m):
            out *= (q ** (2 * j) - 1) * q ** (2 * j)
        return out
    raise DescriptorError(f"no order formula for family {family!r}")


# ---------------------------------------------------------------------------
# group construction

@dataclass(frozen=True)
class ClassicalGroupSpec:
    family: str
    n: int
    q: int  # base parameter; unitary families live over GF(q^2)

    def validate(self):
        if self.family not in FAMILIES:
            raise DescriptorError(f"unknown family {self.family!r}")
        if self.n < 1:
            raise DescriptorError("dimension must be >= 1")
        if self.family in ("Sp",) and self.n % 2:
            raise DescriptorError("Sp needs even dimension")
        if self.family in ("Oplus", "Ominus", "OmegaPlus", "OmegaMinus") \
                and self.q % 2 == 0 and self.n % 2:
            raise DescriptorError("characteristic-2 orthogonal groups need "
                                  "even dimension")

    @property
    def field_size(self):
        return self.q * self.q if self.family in ("U", "SU") else self.q


def _matrix_group(descriptor, F, n, elements, projective, cap, gens=None,
                  member_test=None):
    elements = sorted(set(elements))
    if projective:
        def op(a, b):
            return projective_canonical(F, mat_mul(F, a, b, n))

        def inv(a):
            return projective_canonical(F, mat_inv(F, a, n))
        identity = projective_canonical(F, mat_identity(n))
    else:
        def op(a, b):
            return mat_mul(F, a, b, n)

        def inv(a):
            return mat_inv(F, a, n)
        identity = mat_identity(n)
    return FiniteGroup(descriptor, len(elements), op, inv, identity, "matrix",
                       elements=elements, cap=cap, base_field=F, dim=n,
                       projective=projective, member_test=member_test)


def construct_classical_group(spec, cap=None):
    spec.validate()
    family, n, q = spec.family, spec.n, spec.q
    F = get_field(spec.field_size)
    descriptor = f"{family}:{n}:{q}"
    cap_value = cap if cap is not None else 10_000_000
    try:
        predicted = order_formula(
            {"OmegaPlus": "Oplus", "OmegaMinus": "Ominus"}.get(family, family),
            n, q)
        if predicted > cap_value:
            raise CapacityError(f"{descriptor}: order {predicted} exceeds cap "
                                f"{cap_value}")
    except DescriptorError:
        pass

    if family in ("GL", "SL", "PGL", "PSL"):
        det_one = family in ("SL", "PSL")
        leaf = (lambda M: mat_det(F, M, n) == 1) if det_one else None
        if family in ("GL", "SL"):
            elems = _enumerate_invertible(F, n, leaf_check=leaf)
            return _matrix_group(descriptor, F, n, elems, False, cap,
                                 member_test=_linear_member_test(F, n, det_one))
        seen = set()
        _enumerate_invertible(F, n, leaf_check=leaf,
                              sink=lambda M: seen.add(projective_canonical(F, M)))
        return _matrix_group(descriptor, F, n, seen, True, cap,
                             member_test=_projective_member_test(F, n, det_one))

    if family == "Sp":
        form = standard_form("symplectic", n, F)
        elems = _enumerate_form_preserving(F, n, form)
        group = _matrix_group(descriptor, F, n, elems, False, cap,
                              member_test=lambda M: verify_form_preserved(form, M, F, n))
        group.form = form
        return group

    if family in ("U", "SU"):
        form = standard_form("hermitian", n, F)
        leaf = (lambda M: mat_det(F, M, n) == 1) if family == "SU" else None
        elems = _enumerate_form_preserving(F, n, form, leaf_check=leaf)
        group = _matrix_group(descriptor, F, n, elems, False, cap,
                              member_test=lambda M: verify_form_preserved(form, M, F, n)
                              and (family != "SU" or mat_det(F, M, n) == 1))
        group.form = form
        return group

    if family in ("Oplus", "Ominus", "OmegaPlus", "OmegaMinus"):
        eps = 1 if family in ("Oplus", "OmegaPlus") else -1
        full, form = _full_orthogonal(F, n, eps)
        if family in ("Oplus", "Ominus"):
            if q % 2 == 1:
                elems = [M for M in full if mat_det(F, M, n) == 1]
            else:
                elems = [M for M in full if dickson_invariant(F, M, n) == 0]
            group = _matrix_group(descriptor, F, n, elems, False, cap)
            group.form = form
            return group
        # derived subgroup of the full form-preserving group
        full_group = _matrix_group(f"O{'+' if eps == 1 else '-'}:{n}:{q}",
                                   F, n, full, False, cap)
        commutators = {full_group.commutator(a, b)
                       for a in full_group.elements for b in full_group.elements}
        sub = subgroup_generated(full_group, commutators, name="derived")
        group = _matrix_group(descriptor, F, n, sub.members, False, cap)
        group.form = form
        return group

    raise DescriptorError(f"unsupported family {family!r}")


def _full_orthogonal(F, n, eps):
    if F.p == 2:
        form = standard_form("quadratic-char2", n, F, eps=eps)
    else:
        form = standard_form("symmetric", n, F, eps=eps)
    return _enumerate_form_preserving(F, n, form), form


def _linear_member_test(F, n, det_one):
    def test(M):
        return (isinstance(M, tuple) and len(M) == n * n
                and all(isinstance(x, int) and 0 <= x < F.q for x in M)
                and mat_det(F, M, n) != 0
                and (not det_one or mat_det(F, M, n) == 1))
    return test


def _projective_member_test(F, n, det_one):
    def test(M):
        if not (isinstance(M, tuple) and len(M) == n * n
                and all(isinstance(x, int) and 0 <= x < F.q for x in M)):
            return False
        d = mat_det(F, M, n)
        if d == 0:
            return False
        if projective_canonical(F, M) != M:
            return False
        if det_one:
            # some scaling of M must have determinant 1
            return any(F.mul(F.pow(c, n), d) == 1 for c in F.nonzero())
        return True
    return test


def construct_from_descriptor(descriptor, cap=None):
    parts = descriptor.split(":")
    if len(parts) != 3:
        raise DescriptorError(f"expected family:n:q, got {descriptor!r}")
    family = parts[0]
    try:
        n, q = int(parts[1]), int(parts[2])
    except ValueError as exc:
        raise DescriptorError(f"bad parameters in {descriptor!r}") from exc
    return construct_classical_group(ClassicalGroupSpec(family, n, q), cap=cap)


# ---------------------------------------------------------------------------
# operations used by the norms

def rank_shifted(M, F, n):
    """Map a -> rank(a*I - M) over all nonzero field elements a."""
    if len(M) != n * n:
        raise ValueError("matrix size does not match dimension")
    out = {}
    for a in F.nonzero():
        shifted = tuple(F.sub(a if i % (n + 1) == 0 else 0, x)
                        for i, x in enumerate(M))
        out[a] = mat_rank(F, shifted, n)
    return out


def min_shifted_rank(M, F, n):
    best = n
    for a in F.nonzero():
        shifted = tuple(F.sub(a if i % (n + 1) == 0 else 0, x)
                        for i, x in enumerate(M))
        r = mat_rank(F, shifted, n)
        if r < best:
            best = r
            if best == 0:
                break
    return best


def unitary_determinant_twist(n, F, target_det):
    """diag(1, ..., 1, d) for a norm-1 element d; preserves the standard
    hermitian form."""
    if not F.has_involution:
        raise ValueError("need a square field for unitary twists")
    q0 = F.sqrt_order
    if F.pow(target_det, q0 + 1) != 1:
        raise ValueError(f"{target_det} is not of norm 1 in GF({F.q})")
    M = list(mat_identity(n))
    M[-1] = target_det
    return tuple(M)


def transvection(F, n):
    """I + E_{0,n-1}: a determinant-1 matrix with rank(M - I) = 1."""
    if n < 2:
        raise ValueError("transvections need dimension >= 2")
    M = list(mat_identity(n))
    M[n - 1] = 1
    return tuple(M)
