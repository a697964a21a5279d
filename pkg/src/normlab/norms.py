"""Invariant (pseudo) length functions on finite groups.

Provides the base norms (Hamming, conjugacy, Jordan, class-graph), the
correction operators (restriction, quotient, lift, star, blend,
normalization), an axiom verifier and asymptotic comparison checks.

Values are Fractions where the norm is rational by construction (Hamming,
Jordan, graph distances) and floats otherwise; float comparisons use a
fixed 1e-12 tolerance.  Logarithms are natural throughout; the conjugacy
length is a ratio of logs, so the base cancels.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import groups as _groups
from .groups import (CapacityError, DescriptorError, Subgroup, CHECK_SEED,
                     cycle_type, moved_points, perm_parity,
                     alternating_subgroup, quotient_group)

TOL = 1e-12
VERIFY_CAP = 10_000
SAMPLE_TRIPLES = 100_000
_FULL_TRIANGLE_LIMIT = 2_000


# ---------------------------------------------------------------------------
# partitions (cycle types) for enumeration-free paths on S_n / A_n

def partitions(n, _cap=None):
    """All partitions of n as descending tuples."""
    cap = n if _cap is None else _cap
    if n == 0:
        yield ()
        return
    for first in range(min(n, cap), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def type_parity(ctype):
    return sum(length - 1 for length in ctype) % 2


class LengthFunction:
    """A total map from group elements to nonnegative reals.

    ``type_value`` (optional) computes the value from a cycle type for
    symmetric/alternating groups, enabling enumeration-free sups, minima
    and coset minima on large degrees.
    """

    def __init__(self, group, fn, name, claimed_invariant=True,
                 claimed_bound=None, type_value=None, min_nonzero_hint=None):
        self.group = group
        self.name = name
        self.claimed_invariant = claimed_invariant
        self.claimed_bound = claimed_bound
        self.type_value = type_value
        self.min_nonzero_hint = min_nonzero_hint  # (value, witness) or None
        self._fn = fn
        self._cache = {}

    def __call__(self, g):
        try:
            return self._cache[g]
        except (KeyError, TypeError):
            value = self._fn(g)
            try:
                self._cache[g] = value
            except TypeError:
                pass
            return value

    def __repr__(self):
        return f"LengthFunction({self.name!r} on {self.group.descriptor})"

    def items(self):
        for g in self.group.elements:
            yield g, self(g)

    def _partition_domain(self):
        G = self.group
        if self.type_value is None or G.kind != "perm":
            return None
        if G.descriptor.startswith("S:"):
            return list(partitions(G.degree))
        if G.descriptor.startswith("A:"):
            return [t for t in partitions(G.degree) if type_parity(t) == 0]
        return None

    def sup(self):
        """Maximum value over the group."""
        types = self._partition_domain()
        if types is not None:
            return max(self.type_value(t) for t in types)
        if self.group.enumerable:
            return max(v for _, v in self.items())
        raise CapacityError(f"cannot compute sup of {self.name} on "
                            f"{self.group.descriptor} without enumeration")

    def min_nonzero(self):
        """(min positive value, witness element); exhaustive when enumerable."""
        if self.group.enumerable:
            best = None
            witness = None
            for g, v in self.items():
                if v > TOL and (best is None or v < best):
                    best, witness = v, g
            if best is None:
                raise ValueError(f"{self.name} vanishes identically on "
                                 f"{self.group.descriptor}")
            return best, witness
        types = self._partition_domain()
        if types is not None:
            best = None
            best_type = None
            for t in types:
                v = self.type_value(t)
                if v > TOL and (best is None or v < best):
                    best, best_type = v, t
            if best is None:
                raise ValueError(f"{self.name} vanishes identically")
            return best, _perm_of_type(best_type, self.group.degree)
        if self.min_nonzero_hint is not None:
            value, witness = self.min_nonzero_hint
            actual = self(witness)
            if abs(actual - value) > TOL:
                raise RuntimeError("min-nonzero witness does not evaluate "
                                   "to the hinted value")
            return value, witness
        raise CapacityError(f"cannot compute min nonzero of {self.name} on "
                            f"{self.group.descriptor}")


def _perm_of_type(ctype, n):
    images = list(range(n))
    start = 0
    for length in ctype:
        for i in range(length):
            images[start + i] = start + (i + 1) % length
        start += length
    return tuple(images)


# ---------------------------------------------------------------------------
# base norms

def hamming_length(G):
    """Fraction of points moved by a permutation."""
    if G.kind != "perm":
        raise ValueError("Hamming length needs a permutation group")
    n = G.degree

    def tv(ctype):
        fixed = sum(1 for length in ctype if length == 1)
        return Fraction(n - fixed, n)

    return LengthFunction(G, lambda g: Fraction(moved_points(g), n),
                          "hamming", claimed_bound=1, type_value=tv)


def conjugacy_length(G):
    """log|g^G| / log|G| (zero exactly on the centre)."""
    if G.order < 2:
        raise ValueError("conjugacy length is undefined on the trivial group")
    log_order = math.log(G.order)

    def fn(g):
        return math.log(G.class_size(g)) / log_order

    tv = None
    if G.kind == "perm" and G.descriptor.startswith("S:"):
        n = G.degree
        tv = lambda t: math.log(_groups.sym_class_size(n, t)) / log_order
    elif G.kind == "perm" and G.descriptor.startswith("A:") and G.degree >= 4:
        n = G.degree
        tv = lambda t: math.log(_groups.alt_class_size(n, t)) / log_order

    return LengthFunction(G, fn, "conjugacy-length", claimed_bound=1,
                          type_value=tv)


def jordan_length(G):
    """n^-1 min over nonzero scalars a of rank(a*I - g), for matrix groups."""
    if G.kind != "matrix":
        raise ValueError("Jordan length needs a matrix group")
    from .classical import min_shifted_rank, transvection
    F, n = G.base_field, G.dim

    def fn(M):
        return Fraction(min_shifted_rank(M, F, n), n)

    hint = None
    family = G.descriptor.split(":")[0]
    if family in ("GL", "SL", "PGL", "PSL") and n >= 2:
        hint = (Fraction(1, n), transvection(F, n))
    return LengthFunction(G, fn, "jordan", claimed_bound=1,
                          min_nonzero_hint=hint)


def delta_length(G, delta):
    """Distance of g^G from the identity class in the conjugacy graph;
    classes outside the identity component get (component diameter) + 1."""
    from .conjugacy import build_conjugacy_graph
    graph = build_conjugacy_graph(G, delta)

    def fn(g):
        return graph.distance_value(G.class_index_of(g))

    lf = LengthFunction(G, fn, "delta", claimed_bound=graph.max_value)
    lf.graph = graph
    return lf


# ---------------------------------------------------------------------------
# corrections

def restrict_length(l, H):
    """Pointwise restriction to a subgroup (returned on H.as_group())."""
    if not isinstance(H, Subgroup) or H.parent is not l.group:
        raise ValueError("restriction needs a subgroup of the norm's group")
    sub = H.as_group()
    return LengthFunction(sub, l, f"{l.name}|{H.name}",
                          claimed_bound=l.claimed_bound)


def quotient_length(l, H):
    """Exact minimum of l over each coset, as a norm on G/H."""
    G = l.group
    if not isinstance(H, Subgroup) or H.parent is not G:
        raise ValueError("quotient needs a subgroup of the norm's group")
    Q = quotient_group(G, H)
    values = {}
    rep_map = Q.coset_rep
    for g in G.elements:
        v = l(g)
        rep = rep_map[g]
        if rep not in values or v < values[rep]:
            values[rep] = v
    return LengthFunction(Q, lambda rep: values[rep], f"{l.name}/{H.name}",
                          claimed_bound=l.claimed_bound)


def lift_length(lq):
    """Pull a quotient norm back to the parent (constant on cosets)."""
    Q = lq.group
    if Q.kind != "coset" or Q.parent is None:
        raise ValueError("lift needs a norm on a quotient group")
    parent, rep_map = Q.parent, Q.coset_rep
    return LengthFunction(parent, lambda g: lq(rep_map[g]), f"{lq.name}^",
                          claimed_bound=lq.claimed_bound)


def _root(value, s):
    if s == 1:
        return value
    if value == 0:
        return value if isinstance(value, Fraction) else 0
    return float(value) ** (1.0 / s)


def star_correction(l, H, s, k):
    """Inside H: the s-th root of l rescaled by 1/(k+1); outside H: 1.

    Needs an integer k >= sup l (and >= 1); produces a norm bounded by 1
    whose small values single out H.
    """
    G = l.group
    if not isinstance(H, Subgroup) or H.parent is not G:
        raise ValueError("star correction needs a subgroup of the norm's group")
    if not (isinstance(s, int) and s >= 1 and isinstance(k, int) and k >= 1):
        raise ValueError("s and k must be integers >= 1")
    sup = l.sup()
    if k < sup - TOL:
        raise ValueError(f"k = {k} is below sup l = {sup}")

    def fn(g):
        if g in H:
            return _root(l(g), s) / (k + 1)
        return 1

    tv = None
    if l.type_value is not None and getattr(H, "parity_rule", False):
        base_tv = l.type_value

        def tv(ctype):
            if type_parity(ctype) == 0:
                return _root(base_tv(ctype), s) / (k + 1)
            return 1

    return LengthFunction(G, fn, f"star[{s},{k},{H.name}]({l.name})",
                          claimed_bound=1, type_value=tv)


def blend_correction(l, H, s, s2, t):
    """t/(t+1) times the s-th root of the quotient norm plus 1/(t+1) times
    the s2-th root of l; needs sup l <= 1 and produces a norm bounded by 1."""
    G = l.group
    if not isinstance(H, Subgroup) or H.parent is not G:
        raise ValueError("blend correction needs a subgroup of the norm's group")
    for name, v in (("s", s), ("s'", s2), ("t", t)):
        if not (isinstance(v, int) and v >= 1):
            raise ValueError(f"{name} must be an integer >= 1")
    sup = l.sup()
    if sup > 1 + TOL:
        raise ValueError(f"blend correction needs sup l <= 1, got {sup}")

    outer = Fraction(t, t + 1)
    parity_fast = (l.type_value is not None
                   and getattr(H, "parity_rule", False)
                   and l._partition_domain() is not None)
    if parity_fast:
        # the quotient by the even permutations has two cosets; the odd
        # coset minimum is a scan over odd cycle types
        types = l._partition_domain()
        odd_min = min(l.type_value(ty) for ty in types if type_parity(ty) == 1)

        def coset_min(g):
            return 0 if perm_parity(g) == 0 else odd_min
    else:
        ql = quotient_length(l, H)
        rep_map = ql.group.coset_rep

        def coset_min(g):
            return ql(rep_map[g])

    def fn(g):
        return outer * _root(coset_min(g), s) + _root(l(g), s2) / (t + 1)

    tv = None
    if parity_fast:
        base_tv = l.type_value

        def tv(ctype):
            q = 0 if type_parity(ctype) == 0 else odd_min
            return outer * _root(q, s) + _root(base_tv(ctype), s2) / (t + 1)

    return LengthFunction(G, fn, f"blend[{s},{s2},{t},{H.name}]({l.name})",
                          claimed_bound=1, type_value=tv)


def normalize_bounded(l):
    """l / (1 + l): values in [0, 1), zero set and ordering preserved."""
    def fn(g):
        v = l(g)
        return v / (1 + v)

    tv = None
    if l.type_value is not None:
        base_tv = l.type_value
        tv = lambda ctype: base_tv(ctype) / (1 + base_tv(ctype))
    return LengthFunction(l.group, fn, f"normalize({l.name})", claimed_bound=1,
                          type_value=tv)


# ---------------------------------------------------------------------------
# axiom verification

@dataclass
class AxiomReport:
    group: str
    norm: str
    sampled: bool
    identity_ok: bool
    positivity_ok: bool
    symmetry_ok: bool
    triangle_ok: bool
    invariance_ok: bool
    bound_ok: bool | None
    center_consistent: bool | None
    counterexamples: dict = field(default_factory=dict)

    @property
    def pseudo_length_ok(self):
        return (self.identity_ok and self.symmetry_ok and self.triangle_ok
                and self.invariance_ok)

    @property
    def length_ok(self):
        return self.pseudo_length_ok and self.positivity_ok

    def to_json(self):
        out = {
            "group": self.group,
            "norm": self.norm,
            "sampled": self.sampled,
            "identity_ok": self.identity_ok,
            "positivity_ok": self.positivity_ok,
            "symmetry_ok": self.symmetry_ok,
            "triangle_ok": self.triangle_ok,
            "invariance_ok": self.invariance_ok,
            "pseudo_length_ok": self.pseudo_length_ok,
            "length_ok": self.length_ok,
        }
        if self.bound_ok is not None:
            out["bound_ok"] = self.bound_ok
        if self.center_consistent is not None:
            out["center_consistent"] = self.center_consistent
        if self.counterexamples:
            out["counterexamples"] = {k: repr(v) for k, v
                                      in self.counterexamples.items()}
        return out


def verify_axioms(l, cap=VERIFY_CAP, tol=TOL, samples=SAMPLE_TRIPLES):
    """Check the pseudo-length axioms, positivity off the identity,
    invariance, and any claimed bound.

    Exhaustive when the group is enumerated and has at most ``cap``
    elements: invariance is checked as constancy on conjugacy classes and
    the triangle inequality over (class representative, element) pairs,
    which is equivalent to the full quadratic scan for a class-constant
    norm.  Larger groups get a fixed-seed sampled check, tagged
    ``sampled``.
    """
    G = l.group
    if G.enumerable and G.order <= cap:
        return _verify_exhaustive(l, tol)
    return _verify_sampled(l, tol, samples)


def _verify_exhaustive(l, tol):
    G = l.group
    counterexamples = {}
    identity_ok = abs(l(G.identity)) <= tol

    values = {g: l(g) for g in G.elements}
    positivity_ok = True
    for g, v in values.items():
        if g != G.identity and v <= tol:
            positivity_ok = False
            counterexamples.setdefault("positivity", g)
            break
    symmetry_ok = True
    for g, v in values.items():
        if abs(v - values[G.inv(g)]) > tol:
            symmetry_ok = False
            counterexamples.setdefault("symmetry", g)
            break

    invariance_ok = True
    for cls in G.conjugacy_classes():
        it = iter(cls)
        first = values[next(it)]
        for g in it:
            if abs(values[g] - first) > tol:
                invariance_ok = False
                counterexamples.setdefault("invariance", g)
                break
        if not invariance_ok:
            break

    triangle_ok = True
    if invariance_ok:
        reps = [next(iter(cls)) for cls in G.conjugacy_classes()]
        for r in reps:
            vr = values[r]
            for h in G.elements:
                if values[G.mul(r, h)] > vr + values[h] + tol:
                    triangle_ok = False
                    counterexamples.setdefault("triangle", (r, h))
                    break
            if not triangle_ok:
                break
    else:
        elems = G.elements
        if len(elems) <= _FULL_TRIANGLE_LIMIT:
            pairs = ((g, h) for g in elems for h in elems)
        else:
            rng = random.Random(CHECK_SEED)
            pairs = ((rng.choice(elems), rng.choice(elems))
                     for _ in range(SAMPLE_TRIPLES))
        for g, h in pairs:
            if values[G.mul(g, h)] > values[g] + values[h] + tol:
                triangle_ok = False
                counterexamples.setdefault("triangle", (g, h))
                break

    bound_ok = None
    if l.claimed_bound is not None:
        worst = max(values.values())
        bound_ok = worst <= l.claimed_bound + tol
        if not bound_ok:
            counterexamples.setdefault("bound", max(values, key=values.get))

    center_consistent = _center_consistency(l, positivity_ok)
    return AxiomReport(G.descriptor, l.name, False, identity_ok, positivity_ok,
                       symmetry_ok, triangle_ok, invariance_ok, bound_ok,
                       center_consistent, counterexamples)


def _verify_sampled(l, tol, samples):
    G = l.group
    rng = random.Random(CHECK_SEED)
    counterexamples = {}
    identity_ok = abs(l(G.identity)) <= tol
    positivity_ok = symmetry_ok = triangle_ok = invariance_ok = True
    worst = 0
    for _ in range(samples):
        g = G.random_element(rng)
        h = G.random_element(rng)
        vg, vh = l(g), l(h)
        worst = max(worst, vg, vh)
        if positivity_ok and g != G.identity and vg <= tol:
            positivity_ok = False
            counterexamples.setdefault("positivity", g)
        if symmetry_ok and abs(vg - l(G.inv(g))) > tol:
            symmetry_ok = False
            counterexamples.setdefault("symmetry", g)
        if triangle_ok and l(G.mul(g, h)) > vg + vh + tol:
            triangle_ok = False
            counterexamples.setdefault("triangle", (g, h))
        if invariance_ok and abs(l(G.conj(h, g)) - vg) > tol:
            invariance_ok = False
            counterexamples.setdefault("invariance", (g, h))
    bound_ok = None
    if l.claimed_bound is not None:
        bound_ok = worst <= l.claimed_bound + tol
    center_consistent = _center_consistency(l, positivity_ok) \
        if G.enumerable else None
    return AxiomReport(G.descriptor, l.name, True, identity_ok, positivity_ok,
                       symmetry_ok, triangle_ok, invariance_ok, bound_ok,
                       center_consistent, counterexamples)


def _center_consistency(l, positivity_ok):
    # The conjugacy length is a genuine length function exactly when the
    # centre is trivial; cross-check that equivalence when applicable.
    if not l.name.startswith("conjugacy-length"):
        return None
    try:
        center = l.group.center_elements()
    except CapacityError:
        return None
    return positivity_ok == (len(center) == 1)


# ---------------------------------------------------------------------------
# asymptotic comparison

def asymptotic_bound_check(fam1, fam2, c, n0=-1, mode="linear", m=1, tol=TOL):
    """Check l1 <= c*l2 (mode "linear") or the polynomial variant
    (l1^m <= c*l2 when l1 < 1, l1 <= c*l2^m otherwise) for all elements of
    every group with index > n0.  Families are aligned lists of
    LengthFunctions on the same groups."""
    if len(fam1) != len(fam2):
        raise ValueError("families must be aligned index by index")
    if mode not in ("linear", "polynomial-with-m"):
        raise ValueError(f"unknown mode {mode!r}")
    for idx, (l1, l2) in enumerate(zip(fam1, fam2)):
        if idx <= n0:
            continue
        if l1.group is not l2.group:
            raise ValueError(f"index {idx}: norms live on different groups")
        for g in l1.group.elements:
            v1, v2 = l1(g), l2(g)
            if mode == "linear":
                ok = v1 <= c * v2 + tol
            elif v1 < 1:
                ok = v1 ** m <= c * v2 + tol
            else:
                ok = v1 <= c * (v2 ** m) + tol
            if not ok:
                return {"ok": False, "index": idx, "element": g,
                        "values": (float(v1), float(v2))}
    return {"ok": True, "index": None, "element": None, "values": None}


def compare_lemma_check(l, H, t_values=(1, 2, 3), s_pairs=None, tol=TOL):
    """Certified comparison inequalities between l and its corrections:
    l <= (t+1) * blend[1,1,t], blend[1,1,t] <= l, and
    blend[s,s',t]^max(s,s') <= l, pointwise.  Needs sup l <= 1."""
    if s_pairs is None:
        s_pairs = [(s, s2) for s in (1, 2, 3) for s2 in (1, 2, 3)]
    G = l.group
    violations = []
    for t in t_values:
        l11t = blend_correction(l, H, 1, 1, t)
        for g in G.elements:
            if l(g) > (t + 1) * l11t(g) + tol:
                violations.append(("lower", t, g))
            if l11t(g) > l(g) + tol:
                violations.append(("upper", t, g))
        for s, s2 in s_pairs:
            lst = blend_correction(l, H, s, s2, t)
            m = max(s, s2)
            for g in G.elements:
                if float(lst(g)) ** m > l(g) + tol:
                    violations.append(("poly", (s, s2, t), g))
    return {"ok": not violations, "violations": violations}


# ---------------------------------------------------------------------------
# norm spec strings (CLI interface)

def named_subgroup(G, name):
    """Resolve a subgroup name used in norm specs and family rules."""
    key = name.strip().lower()
    if key in ("a", "alternating"):
        if G.kind != "perm" or not G.descriptor.startswith("S:"):
            raise DescriptorError(f"subgroup {name!r} needs a symmetric group")
        return alternating_subgroup(G)
    if key in ("trivial", "1"):
        return _groups.trivial_subgroup(G)
    if key in ("g", "whole"):
        return _groups.whole_subgroup(G)
    if key == "derived":
        return _groups.derived_subgroup(G)
    if key == "center":
        return Subgroup(G, members=G.center_elements(), name="Z", normal=True)
    if key in ("sl", "su"):
        if G.kind != "matrix":
            raise DescriptorError(f"subgroup {name!r} needs a matrix group")
        from .fields import mat_det
        F, n = G.base_field, G.dim
        members = [M for M in G.elements if mat_det(F, M, n) == 1]
        return Subgroup(G, members=members, name=key.upper(), normal=True,
                        verify=False)
    if key == "psl":
        if G.kind != "matrix" or not G.projective:
            raise DescriptorError("subgroup 'psl' needs a projective group")
        from .fields import mat_det
        F, n = G.base_field, G.dim
        nth_powers = {F.pow(c, n) for c in F.nonzero()}
        members = [M for M in G.elements if mat_det(F, M, n) in nth_powers]
        return Subgroup(G, members=members, name="PSL", normal=True,
                        verify=False)
    raise DescriptorError(f"unknown subgroup name {name!r}")


def parse_element(G, text):
    """Parse an element literal: cycle notation for permutations, a
    row-major entry list for matrices, an index for table groups."""
    text = text.strip()
    if G.kind == "perm":
        return _groups.parse_permutation(text, G.degree)
    if G.kind == "matrix":
        if text in ("id", "e"):
            from .fields import mat_identity
            M = mat_identity(G.dim)
        else:
            try:
                data = json.loads(text)
            except json.JSONDecodeError:
                try:
                    data = [int(x) for x in text.replace(",", " ").split()]
                except ValueError as exc:
                    raise DescriptorError(f"bad matrix literal {text!r}") from exc
            if data and isinstance(data[0], list):
                data = [x for row in data for x in row]
            if len(data) != G.dim * G.dim:
                raise DescriptorError(f"matrix literal has {len(data)} entries, "
                                      f"expected {G.dim * G.dim}")
            M = tuple(int(x) for x in data)
        if G.projective:
            from .fields import projective_canonical
            M = projective_canonical(G.base_field, M)
        return M
    if G.kind in ("table", "coset"):
        if text in ("id", "e"):
            return G.identity
        try:
            idx = int(text)
        except ValueError as exc:
            raise DescriptorError(f"bad element literal {text!r}") from exc
        return G.elements[idx]
    raise DescriptorError(f"cannot parse elements of kind {G.kind}")


def _split_top_level(text, sep):
    parts = []
    depth = 0
    current = ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append(current)
            current = ""
        else:
            current += ch
    parts.append(current)
    return [p.strip() for p in parts if p.strip()]


def from_spec(G, spec, n_param=None):
    """Build a LengthFunction from a spec string.

    Atoms: ``hamming``, ``lc``, ``jordan``, ``delta:<rep>|<rep>...``,
    ``star:s:k:H``, ``blend:s:s':t:H`` (star/blend default to the
    conjugacy length as base when they start a chain; the s slot accepts
    ``n`` for the permutation degree).  Chains compose left-to-right with
    ``>`` and ``normalize(<spec>)`` wraps any spec.
    """
    spec = spec.strip()
    if spec.startswith("normalize(") and spec.endswith(")"):
        return normalize_bounded(from_spec(G, spec[len("normalize("):-1],
                                           n_param=n_param))
    steps = _split_top_level(spec, ">")
    if not steps:
        raise DescriptorError("empty norm spec")
    current = None
    for step in steps:
        current = _apply_spec_step(G, current, step, n_param)
    return current


def _spec_int(token, n_param, G):
    if token == "n":
        value = n_param if n_param is not None else G.degree
        if value is None:
            raise DescriptorError("'n' in norm spec needs a permutation degree")
        return value
    try:
        return int(token)
    except ValueError as exc:
        raise DescriptorError(f"bad integer {token!r} in norm spec") from exc


def _apply_spec_step(G, current, step, n_param):
    if step.startswith("normalize(") and step.endswith(")"):
        inner = step[len("normalize("):-1]
        base = _apply_spec_step(G, current, inner, n_param)
        return normalize_bounded(base)
    head = step.split(":")[0]
    if head == "hamming":
        return hamming_length(G)
    if head == "lc":
        return conjugacy_length(G)
    if head == "jordan":
        return jordan_length(G)
    if head == "delta":
        body = step[len("delta:"):]
        reps = [parse_element(G, r) for r in _split_top_level(body, "|")]
        return delta_length(G, reps)
    if head == "star":
        parts = step.split(":")
        if len(parts) != 4:
            raise DescriptorError(f"expected star:s:k:H, got {step!r}")
        base = current if current is not None else conjugacy_length(G)
        s = _spec_int(parts[1], n_param, G)
        k = _spec_int(parts[2], n_param, G)
        return star_correction(base, named_subgroup(G, parts[3]), s, k)
    if head == "blend":
        parts = step.split(":")
        if len(parts) != 5:
            raise DescriptorError(f"expected blend:s:s':t:H, got {step!r}")
        base = current if current is not None else conjugacy_length(G)
        s = _spec_int(parts[1], n_param, G)
        s2 = _spec_int(parts[2], n_param, G)
        t = _spec_int(parts[3], n_param, G)
        return blend_correction(base, named_subgroup(G, parts[4]), s, s2, t)
    raise DescriptorError(f"unknown norm spec step {step!r}")
