"""Finite-prefix approximation of metric ultraproducts of normed groups.

No computable non-principal ultrafilter exists, so limits are taken
through declared filter oracles: a principal filter reads one index
exactly, a tail filter declares convergence only when the oscillation
over a trailing window is below tolerance and otherwise surfaces both
window bounds.  Every verdict derived from a non-converged window is
flagged rather than silently resolved.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import classical as _classical
from . import conjugacy as _conjugacy
from . import norms as _norms
from .groups import (CapacityError, DescriptorError, FiniteGroup, Subgroup,
                     CHECK_SEED, alternating_group, symmetric_group)
from .norms import LengthFunction, verify_axioms

OSC_TOL = 1e-9
ZERO_TOL = 1e-9


# ---------------------------------------------------------------------------
# filters and limits

@dataclass(frozen=True)
class FilterSpec:
    """Filter-limit oracle: ``principal`` reads index ``index``; ``tail``
    inspects the window starting at ``window_start`` (default: last quarter)."""

    kind: str = "tail"
    index: int = 0
    window_start: int | None = None

    def __post_init__(self):
        if self.kind not in ("principal", "tail"):
            raise DescriptorError(f"unknown filter kind {self.kind!r}")

    def window(self, length):
        if self.kind == "principal":
            if not 0 <= self.index < length:
                raise ValueError(f"principal index {self.index} outside the "
                                 f"prefix of length {length}")
            return self.index, self.index + 1
        start = self.window_start
        if start is None:
            start = max(0, (3 * length) // 4)
        if not 0 <= start < length:
            raise ValueError(f"window start {start} outside the prefix")
        return start, length


@dataclass
class LimitResult:
    value: float | None
    liminf: float
    limsup: float
    converged: bool
    flag: str               # exact | converged | ultrafilter-dependent
    window: tuple

    def to_json(self):
        return {"value": self.value, "liminf": self.liminf,
                "limsup": self.limsup, "converged": self.converged,
                "flag": self.flag, "window": list(self.window)}


def filter_limit(values, fspec, osc_tol=OSC_TOL):
    """Limit of a real sequence along the declared filter oracle."""
    values = list(values)
    if not values:
        raise ValueError("empty prefix")
    start, end = fspec.window(len(values))
    window = [float(v) for v in values[start:end]]
    if fspec.kind == "principal":
        v = window[0]
        return LimitResult(v, v, v, True, "exact", (start, end))
    lo, hi = min(window), max(window)
    if hi - lo < osc_tol:
        mean = sum(window) / len(window)
        return LimitResult(mean, lo, hi, True, "converged", (start, end))
    return LimitResult(None, lo, hi, False, "ultrafilter-dependent",
                       (start, end))


# ---------------------------------------------------------------------------
# families

class NormedFamily:
    """A finite prefix of a sequence (G_i, l_i) with optional distinguished
    normal subgroups H_i."""

    def __init__(self, groups, norms, subgroups=None, descriptor="",
                 validate=True, validate_samples=2000):
        if len(groups) != len(norms):
            raise ValueError("groups and norms must align")
        if subgroups is not None and len(subgroups) != len(groups):
            raise ValueError("subgroups must align with groups")
        for G, l in zip(groups, norms):
            if l.group is not G:
                raise ValueError("norm bound to a different group")
        if subgroups is not None:
            for G, H in zip(groups, subgroups):
                if H is not None:
                    if H.parent is not G:
                        raise ValueError("subgroup bound to a different group")
                    if not H.is_normal:
                        raise ValueError(f"subgroup {H.name} not normal in "
                                         f"{G.descriptor}")
        self.groups = list(groups)
        self.norms = list(norms)
        self.subgroups = list(subgroups) if subgroups is not None else None
        self.descriptor = descriptor
        self.axiom_reports = None
        if validate:
            self.axiom_reports = []
            for l in self.norms:
                report = verify_axioms(l, samples=validate_samples)
                if not report.pseudo_length_ok:
                    raise ValueError(f"norm {l.name} on {l.group.descriptor} "
                                     f"fails the pseudo-length axioms")
                self.axiom_reports.append(report)

    def __len__(self):
        return len(self.groups)

    def check_sequence(self, xs):
        if len(xs) != len(self.groups):
            raise ValueError(f"sequence length {len(xs)} does not match the "
                             f"prefix length {len(self.groups)}")
        for i, (G, x) in enumerate(zip(self.groups, xs)):
            if x not in G:
                raise ValueError(f"index {i}: element not in {G.descriptor}")

    def norm_values(self, xs):
        self.check_sequence(xs)
        return [l(x) for l, x in zip(self.norms, xs)]

    def random_sequence(self, rng):
        return [G.random_element(rng) for G in self.groups]


_RULE_FAMILIES = {"gl": "GL", "sl": "SL", "pgl": "PGL", "psl": "PSL",
                  "sp": "Sp", "unitary": "U", "su": "SU",
                  "oplus": "Oplus", "ominus": "Ominus"}


def family_from_rule(rule, count=None, cap=None, validate=True):
    """Build a NormedFamily from a JSON-style rule:
    {"rule": "symmetric", "params": {"n_start": 3, "n_step": 1, "q": ...},
     "norm": "<norm spec>", "subgroup": "alternating" | ... | null}.
    """
    kind = rule.get("rule")
    params = rule.get("params", {})
    n_start = int(params.get("n_start", 3))
    n_step = int(params.get("n_step", 1))
    count = int(count if count is not None else rule.get("count", 12))
    if count < 1:
        raise DescriptorError("family prefix must have at least one index")
    group_list = []
    degrees = []
    for i in range(count):
        n = n_start + i * n_step
        degrees.append(n)
        if kind == "symmetric":
            group_list.append(symmetric_group(n, cap=cap))
        elif kind == "alternating":
            group_list.append(alternating_group(n, cap=cap))
        elif kind in _RULE_FAMILIES:
            q = params.get("q")
            if q is None:
                raise DescriptorError(f"rule {kind!r} needs a field parameter q")
            descriptor = f"{_RULE_FAMILIES[kind]}:{n}:{int(q)}"
            group_list.append(
                _classical.construct_from_descriptor(descriptor, cap=cap))
        else:
            raise DescriptorError(f"unknown family rule {kind!r}")
    norm_spec = rule.get("norm", "lc")
    norm_list = [_norms.from_spec(G, norm_spec, n_param=n)
                 for G, n in zip(group_list, degrees)]
    sub_name = rule.get("subgroup")
    subs = None
    if sub_name:
        subs = [_norms.named_subgroup(G, sub_name) for G in group_list]
    return NormedFamily(group_list, norm_list, subs,
                        descriptor=json.dumps(rule, sort_keys=True),
                        validate=validate)


# ---------------------------------------------------------------------------
# norms of sequences, kernel membership

def ultraproduct_norm(fam, xs, fspec, osc_tol=OSC_TOL):
    """Filter limit of the per-index norms of the sequence."""
    return filter_limit(fam.norm_values(xs), fspec, osc_tol=osc_tol)


@dataclass
class KernelVerdict:
    member: bool | None     # None: not resolved by the window
    flag: str
    limit: LimitResult

    def to_json(self):
        return {"member": self.member, "flag": self.flag,
                "limit": self.limit.to_json()}


def kernel_membership(fam, xs, fspec, zero_tol=ZERO_TOL, osc_tol=OSC_TOL):
    """Whether the sequence lies in the null set of the ultraproduct.

    Resolved exactly for principal filters and for converged tail windows;
    otherwise the verdict is None with the ultrafilter-dependent flag
    (False when even the window infimum is above tolerance)."""
    limit = ultraproduct_norm(fam, xs, fspec, osc_tol=osc_tol)
    if limit.converged:
        member = limit.value <= zero_tol
        return KernelVerdict(member, limit.flag, limit)
    if limit.liminf > zero_tol:
        return KernelVerdict(False, "window-bounded-away-from-zero", limit)
    return KernelVerdict(None, "ultrafilter-dependent", limit)


# ---------------------------------------------------------------------------
# coset correctors and the simplicity hypothesis checks

def min_norm_coset_representative(G, H, l, g):
    """(h, l(h)) with h in g^-1 H of minimal norm; g*h lands in H.

    Ties break to the earliest member in the enumeration order."""
    if not isinstance(H, Subgroup) or H.parent is not G:
        raise ValueError("need a subgroup of the same group")
    ginv = G.inv(g)
    best = None
    best_h = None
    for member in sorted(H.members, key=G.element_index):
        h = G.mul(ginv, member)
        v = l(h)
        if best is None or v < best:
            best, best_h = v, h
    if G.mul(g, best_h) not in H:
        raise RuntimeError("coset corrector escaped the subgroup")
    return best_h, best


def _subgroup_as_group(H):
    if getattr(H, "parity_rule", False):
        return alternating_group(H.parent.degree, cap=H.parent.cap)
    return H.as_group()


_DEFAULT_CONSTANT_CORPUS = ("A:5", "A:6", "PSL:2:7")
_constant_cache = {}


def default_covering_constant():
    """Empirical covering constant over the shipped simple-group corpus."""
    key = _DEFAULT_CONSTANT_CORPUS
    if key not in _constant_cache:
        from .groups import construct_group
        corpus = [construct_group(d) for d in key]
        constant, table = _conjugacy.empirical_covering_constant(corpus)
        _constant_cache[key] = (constant, table)
    return _constant_cache[key]


def simplicity_witness_check(fam, xs, fspec, eps, constant=None,
                             zero_tol=ZERO_TOL):
    """Per-index witnesses for the simplicity hypotheses.

    For each index: the minimal-norm coset corrector h_i (so g_i h_i lands
    in H_i, checked exactly), the corrector norms with their filter limit
    and a monotone-trend flag (a finite prefix can only certify the trend,
    not the limit), and the covering exponent of g_i h_i inside H_i checked
    against ceil(2c / eps) for the empirical covering constant c.
    """
    if fam.subgroups is None:
        raise ValueError("family carries no distinguished subgroups")
    fam.check_sequence(xs)
    norm_limit = ultraproduct_norm(fam, xs, fspec)
    floor = norm_limit.liminf
    if floor <= eps:
        raise ValueError(f"sequence norm window infimum {floor:.4f} is not "
                         f"above eps = {eps}; witness needs a kernel-free "
                         f"sequence")
    if constant is None:
        constant, _ = default_covering_constant()
    m_bound = math.ceil(2 * constant / eps)

    rows = []
    corrector_norms = []
    all_ok = True
    for i, (G, l, H, x) in enumerate(zip(fam.groups, fam.norms,
                                         fam.subgroups, xs)):
        h, h_norm = min_norm_coset_representative(G, H, l, x)
        product = G.mul(x, h)
        in_subgroup = product in H
        corrector_norms.append(h_norm)
        H_group = _subgroup_as_group(H)
        report = _conjugacy.covering_report(H_group, product)
        m_ok = (not report.infinite) and report.exponent <= m_bound
        row = {"index": i, "group": G.descriptor, "corrector": h,
               "corrector_norm": float(h_norm), "in_subgroup": in_subgroup,
               "covering_exponent": None if report.infinite
               else int(report.exponent), "m_bound": m_bound, "m_ok": m_ok}
        if G.base_field is not None:
            # second ratio variant for matrix families: weight both logs by
            # the field size
            q = G.base_field.q
            cls = H_group.class_size(product)
            row["field_ratio"] = (2 * constant
                                  * (math.log(q) + math.log(H_group.order))
                                  / (math.log(q) + math.log(cls)))
        rows.append(row)
        if not (in_subgroup and m_ok):
            all_ok = False

    corrector_limit = filter_limit(corrector_norms, fspec)
    nonincreasing = all(a >= b - 1e-15 for a, b in
                        zip(corrector_norms, corrector_norms[1:]))
    if corrector_limit.converged and corrector_limit.value <= zero_tol:
        trend = "converged-to-zero"
        trend_ok = True
    elif nonincreasing and (len(corrector_norms) < 2
                            or corrector_norms[-1] < corrector_norms[0]):
        trend = "decreasing-trend"
        trend_ok = True
    elif nonincreasing:
        trend = "constant"
        trend_ok = all(v <= zero_tol for v in corrector_norms)
    else:
        trend = "not-monotone"
        trend_ok = False
    return {"ok": all_ok and trend_ok, "rows": rows,
            "constant": constant, "m_bound": m_bound,
            "corrector_norms": [float(v) for v in corrector_norms],
            "corrector_trend": trend, "corrector_trend_ok": trend_ok,
            "corrector_limit": corrector_limit.to_json(),
            "sequence_norm": norm_limit.to_json()}


# ---------------------------------------------------------------------------
# small-norm subgroups and discreteness

def _identity_type(n):
    return tuple([1] * n)


def small_norm_subgroup(fam, threshold, fspec=None, sequence_samples=40,
                        element_limit=3000):
    """Check that the elements of norm below the threshold form a normal
    subgroup at every index, and spot-check closure of the sequence-level
    set under product, inverse and conjugation."""
    rows = []
    all_ok = True
    for i, (G, l) in enumerate(zip(fam.groups, fam.norms)):
        row = {"index": i, "group": G.descriptor}
        types = l._partition_domain()
        if types is not None:
            small = {t for t in types if l.type_value(t) < threshold}
            evens = {t for t in types if _norms.type_parity(t) == 0}
            below = [l.type_value(t) for t in small]
            above = [l.type_value(t) for t in types if t not in small]
            row["max_below"] = float(max(below)) if below else None
            row["min_above"] = float(min(above)) if above else None
            if small == evens and G.descriptor.startswith("S:"):
                row["verdict"] = "alternating-subgroup"
                row["normal"] = True
            elif small == set(types):
                row["verdict"] = "whole-group"
                row["normal"] = True
            elif small == {_identity_type(G.degree)}:
                row["verdict"] = "trivial-subgroup"
                row["normal"] = True
            else:
                ok, normal = _element_level_small_set(G, l, threshold,
                                                      element_limit)
                row["verdict"] = ok
                row["normal"] = normal
        else:
            verdict, normal = _element_level_small_set(G, l, threshold,
                                                       element_limit)
            row["verdict"] = verdict
            row["normal"] = normal
            values = [l(g) for g in G.elements] if G.enumerable else []
            below = [v for v in values if v < threshold]
            above = [v for v in values if v >= threshold]
            row["max_below"] = float(max(below)) if below else None
            row["min_above"] = float(min(above)) if above else None
        if row["verdict"] in ("not-a-subgroup", "not-normal", "indeterminate") \
                or row["normal"] is False:
            all_ok = False
        rows.append(row)

    sequence_report = _sequence_level_closure(fam, threshold, fspec,
                                              sequence_samples)
    return {"ok": all_ok and sequence_report["ok"], "threshold": threshold,
            "rows": rows, "sequence_check": sequence_report}


def _element_level_small_set(G, l, threshold, element_limit):
    if not G.enumerable:
        return "indeterminate", None
    small = [g for g in G.elements if l(g) < threshold]
    if len(small) > element_limit:
        return "indeterminate", None
    small_set = set(small)
    if G.identity not in small_set:
        return "not-a-subgroup", None
    for a in small:
        if G.inv(a) not in small_set:
            return "not-a-subgroup", None
        for b in small:
            if G.mul(a, b) not in small_set:
                return "not-a-subgroup", None
    conjugators = G.gens if G.gens else G.elements
    for c in conjugators:
        for a in small:
            if G.conj(c, a) not in small_set:
                return "not-normal", False
    return "normal-subgroup", True


def _sequence_level_closure(fam, threshold, fspec, samples):
    if fspec is None:
        fspec = FilterSpec("tail")
    rng = random.Random(CHECK_SEED)
    pool = [fam.random_sequence(rng) for _ in range(samples)]
    # bias the pool with sequences inside the candidate subgroup
    if fam.subgroups is not None:
        for _ in range(samples):
            seq = []
            for G, H in zip(fam.groups, fam.subgroups):
                g = G.random_element(rng)
                guard = 0
                while g not in H and guard < 200:
                    g = G.random_element(rng)
                    guard += 1
                seq.append(g if g in H else G.identity)
            pool.append(seq)

    def below(xs):
        limit = ultraproduct_norm(fam, xs, fspec)
        if not limit.converged:
            return None
        return limit.value < threshold

    small = [xs for xs in pool if below(xs)]
    violations = []
    for x in small:
        inv_seq = [G.inv(g) for G, g in zip(fam.groups, x)]
        if below(inv_seq) is False:
            violations.append({"kind": "inverse"})
        for y in small:
            prod = [G.mul(a, b) for G, a, b in zip(fam.groups, x, y)]
            if below(prod) is False:
                violations.append({"kind": "product"})
        for z in pool[:10]:
            conj = [G.conj(c, a) for G, c, a in zip(fam.groups, z, x)]
            if below(conj) is False:
                violations.append({"kind": "conjugation"})
    return {"ok": not violations, "sample_count": len(pool),
            "resolved_below": len(small), "violations": violations}


def discreteness_check(fam):
    """Minimal nonzero norm per index and the trend across the prefix."""
    rows = []
    minima = []
    for i, (G, l) in enumerate(zip(fam.groups, fam.norms)):
        value, witness = l.min_nonzero()
        minima.append(value)
        rows.append({"index": i, "group": G.descriptor,
                     "min_nonzero": float(value),
                     "min_nonzero_exact": str(value)})
    if all(v == minima[0] for v in minima):
        verdict = "constant"
        bounded_away = True
    elif all(a >= b for a, b in zip(minima, minima[1:])) \
            and minima[-1] < minima[0]:
        verdict = "decreasing"
        bounded_away = False
    else:
        verdict = "mixed"
        bounded_away = None
    return {"rows": rows, "verdict": verdict,
            "bounded_away_from_zero": bounded_away,
            "minima": [float(v) for v in minima]}


# ---------------------------------------------------------------------------
# the gamma correction

class GammaCorrection:
    """Continuous, monotone, subadditive correction: the s-th root above
    9/10 and the linear continuation p*x below, p = (9/10)^(1/s - 1)."""

    BREAK = 0.9

    def __init__(self, s, m0):
        if not isinstance(s, int) or s <= 1:
            raise ValueError("s must be an integer > 1")
        if m0 < 0:
            raise ValueError("m0 must be nonnegative")
        if m0 > 0 and m0 ** (1.0 / s) >= 2:
            raise ValueError(f"s = {s} violates m0^(1/s) < 2 for m0 = {m0}")
        self.s = s
        self.m0 = m0
        self.p = self.BREAK ** (1.0 / s - 1.0)
        if not (1 - 1e-12 <= self.p <= 10 / 9 + 1e-12):
            raise RuntimeError(f"slope p = {self.p} escaped [1, 10/9]")

    def __call__(self, x):
        x = float(x)
        if x < 0:
            raise ValueError("gamma is defined on nonnegative reals")
        if x > self.BREAK:
            return x ** (1.0 / self.s)
        return self.p * x

    def continuity_gap(self):
        return abs(self.p * self.BREAK - self.BREAK ** (1.0 / self.s))

    def subadditivity_report(self, step=0.01, tol=1e-12):
        """Worst violation of gamma(x+y) <= gamma(x) + gamma(y) on the grid
        {0, step, ...} up to m0 in each coordinate."""
        top = max(self.m0, self.BREAK)
        count = int(top / step) + 1
        grid = [i * step for i in range(count + 1)]
        worst = 0.0
        for x in grid:
            gx = self(x)
            for y in grid:
                gap = self(x + y) - gx - self(y)
                if gap > worst:
                    worst = gap
        return {"worst_gap": worst, "ok": worst <= tol,
                "grid_step": step, "grid_max": top}


def gamma_function(s, x, m0=1.0):
    """One-shot evaluation of the gamma correction."""
    return GammaCorrection(s, m0)(x)


# ---------------------------------------------------------------------------
# the weakly sofic embedding norm

class ThresholdViolation(RuntimeError):
    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(x).limit_denominator(10 ** 6)


def build_ws_norm(G, gen_images, d_words, n_words, H, eps, s, strict=True):
    """Build the corrected embedding norm on a finite target group.

    Inputs: generator images of a free-group homomorphism into G, the word
    set D (the empty word must be present), the set of all relator-side
    words of length at most r = 3 * max |D-word|, the distinguished normal
    subgroup H (the image of the larger relator subgroup), eps < 1/4, and
    the root exponent s.

    Construction: the scaled class-graph norm eps * l_delta, with delta
    the classes of the images of the provided relator words, composed with
    the gamma correction; off H the coset infimum is added with weight 1/3.
    The four threshold classes from the construction are verified and a
    violation raises (or is reported when strict=False).
    """
    eps = _as_fraction(eps)
    if not 0 < eps < Fraction(1, 4):
        raise ValueError("eps must satisfy 0 < eps < 1/4")
    if not isinstance(H, Subgroup) or H.parent is not G:
        raise ValueError("H must be a subgroup of the target group")
    if not H.is_normal:
        raise ValueError("H must be normal")
    d_words = [_conjugacy.free_reduce(w) for w in d_words]
    if () not in d_words:
        raise ValueError("the empty word must belong to D")
    r = 3 * max((len(w) for w in d_words), default=0)
    n_set = {_conjugacy.free_reduce(w) for w in n_words}
    for w in n_set:
        if len(w) > r:
            raise ValueError(f"relator word {w} exceeds length r = {r}")

    images = {w: _conjugacy.evaluate_word(G, gen_images, w) for w in d_words}
    n_images = {w: _conjugacy.evaluate_word(G, gen_images, w) for w in n_set}
    for w, g in n_images.items():
        if g not in H:
            raise ValueError(f"relator word {list(w)} maps outside H; "
                             f"the instance violates the construction's "
                             f"hypotheses")

    delta_reps = sorted({g for g in n_images.values()},
                        key=G.element_index)
    base = _norms.delta_length(G, delta_reps)
    graph = base.graph

    def scaled(g):
        return eps * base(g)

    l = LengthFunction(G, scaled, f"eps-delta[{eps}]",
                       claimed_bound=float(eps * graph.max_value))
    m0 = float(eps * graph.max_value)
    gamma = GammaCorrection(s, m0)

    coset_min = _coset_minima(G, H, l)

    def tilde_fn(g):
        value = 0.25 * gamma(l(g))
        if g not in H:
            value += gamma(coset_min[g]) / 3.0
        return value

    tilde = LengthFunction(G, tilde_fn, f"ws-tilde[s={s},eps={eps}]",
                           claimed_bound=None)

    report = _ws_threshold_report(G, H, tilde, l, gen_images, d_words, n_set,
                                  images, eps, gamma, graph, r)
    if strict and not report["ok"]:
        raise ThresholdViolation("threshold classes violated; see report",
                                 report)
    return tilde, report


def _coset_minima(G, H, l):
    seen = {}
    members = H.members
    for g in G.elements:
        if g in seen:
            continue
        coset = [G.mul(g, h) for h in members]
        best = min(l(x) for x in coset)
        for x in coset:
            seen[x] = best
    return seen


def _ws_threshold_report(G, H, tilde, l, gen_images, d_words, n_set, images,
                         eps, gamma, graph, r):
    t1 = Fraction(10, 9) * eps
    t2 = Fraction(9, 40)
    t3 = Fraction(1, 2)
    t4 = Fraction(21, 40)

    def in_n(word):
        return word in n_set

    rows = {"d3_in_n": [], "d_not_in_n": [], "d_in_n1": [], "off_h_union_n": []}
    ok = True

    d3 = set()
    for u in d_words:
        for v in d_words:
            for w in d_words:
                d3.add(_conjugacy.word_concat(u, v, w))

    small_side_max = None
    for w in sorted(d3, key=lambda x: (len(x), x)):
        if in_n(w):
            g = _conjugacy.evaluate_word(G, gen_images, w)
            value = tilde(g)
            passed = value < float(t1)
            rows["d3_in_n"].append({"word": list(w), "value": value,
                                    "threshold": float(t1), "ok": passed})
            ok = ok and passed
            lv = float(l(g))
            small_side_max = lv if small_side_max is None else max(small_side_max, lv)

    for w in d_words:
        g = images[w]
        if not in_n(w):
            value = tilde(g)
            passed = value >= float(t2)
            rows["d_not_in_n"].append({"word": list(w), "value": value,
                                       "threshold": float(t2), "ok": passed})
            ok = ok and passed
        if g in H:
            value = tilde(g)
            passed = value < float(t3)
            rows["d_in_n1"].append({"word": list(w), "value": value,
                                    "threshold": float(t3), "ok": passed})
            ok = ok and passed
        if not in_n(w) and g not in H:
            value = tilde(g)
            passed = value > float(t4)
            rows["off_h_union_n"].append({"word": list(w), "value": value,
                                          "threshold": float(t4), "ok": passed})
            ok = ok and passed

    return {"ok": ok, "r": r, "eps": float(eps), "s": gamma.s,
            "p": gamma.p, "m0": gamma.m0,
            "delta_class_count": len(graph.delta_ids),
            "identity_component_diameter": graph.diameter,
            "disconnected_value": graph.disconnected_value,
            "small_side_max_base_norm": small_side_max,
            "small_side_ok": small_side_max is None
            or small_side_max <= float(eps) + 1e-12,
            "classes": rows}


# ---------------------------------------------------------------------------
# approximation and LEF witnesses

@dataclass
class ApproxWitness:
    """A finite approximation witness: a window D inside a source group,
    a map into a finite normed target, the required norm floors, and the
    multiplicativity defect bound."""

    domain: list
    source_op: object       # callable (a, b) -> ab in the source group
    source_identity: object
    target: FiniteGroup
    norm: LengthFunction
    phi: dict
    eps: float
    deltas: dict


def verify_approximation_witness(witness):
    """Check the three defining conditions: the identity maps to the
    identity, norms on D stay at or above their floors, and every defect
    element phi(gh) phi(h)^-1 phi(g)^-1 has norm strictly below eps."""
    C = witness.target
    l = witness.norm
    failures = []
    phi_e = witness.phi.get(witness.source_identity)
    identity_ok = phi_e == C.identity
    if not identity_ok:
        failures.append({"condition": "identity", "value": repr(phi_e)})
    floors_ok = True
    for g in witness.domain:
        delta = witness.deltas.get(g, 0)
        value = l(witness.phi[g])
        if value < delta:
            floors_ok = False
            failures.append({"condition": "floor", "element": repr(g),
                             "norm": float(value), "delta": float(delta)})
    defect_ok = True
    domain_set = set(witness.domain)
    for g in witness.domain:
        for h in witness.domain:
            gh = witness.source_op(g, h)
            if gh not in domain_set:
                continue
            defect = C.mul(C.mul(witness.phi[gh],
                                 C.inv(witness.phi[h])),
                           C.inv(witness.phi[g]))
            value = l(defect)
            if not value < witness.eps:
                defect_ok = False
                failures.append({"condition": "defect", "pair": (repr(g), repr(h)),
                                 "norm": float(value), "eps": witness.eps})
    return {"ok": identity_ok and floors_ok and defect_ok,
            "identity_ok": identity_ok, "floors_ok": floors_ok,
            "defect_ok": defect_ok, "failures": failures}


def verify_lef_witness(domain, products, phi, C):
    """LEF window check: phi injective on the domain and multiplicative on
    every triple (h, g, hg) recorded in the partial product table."""
    failures = []
    values = list(phi.values())
    injective = len(set(values)) == len(values)
    if not injective:
        failures.append({"condition": "injective"})
    triples_ok = True
    domain_set = set(domain)
    for (a, b), c in products.items():
        if a not in domain_set or b not in domain_set or c not in domain_set:
            raise ValueError("partial table mentions elements outside D")
        if C.mul(phi[a], phi[b]) != phi[c]:
            triples_ok = False
            failures.append({"condition": "triple",
                             "triple": (repr(a), repr(b), repr(c))})
    return {"ok": injective and triples_ok, "injective": injective,
            "triples_ok": triples_ok, "failures": failures}


def lef_witness_from_group(source_mul, domain):
    """Partial product table {(a, b): ab} for pairs whose product stays in D."""
    domain_set = set(domain)
    products = {}
    for a in domain:
        for b in domain:
            c = source_mul(a, b)
            if c in domain_set:
                products[(a, b)] = c
    return products


def verify_lef_separation(C, gen_images, d1_words, d2_words, d2_in_n1,
                          n1_gen_words):
    """Separation witness: the D1 words map to the identity, the map is
    injective on D2, and the images of D2 outside the distinguished
    subgroup avoid the subgroup generated by the distinguished generators."""
    from .groups import subgroup_generated
    d1 = [_conjugacy.free_reduce(w) for w in d1_words]
    d2 = [_conjugacy.free_reduce(w) for w in d2_words]
    in_n1 = {_conjugacy.free_reduce(w) for w in d2_in_n1}
    failures = []
    cond1 = True
    for w in d1:
        if _conjugacy.evaluate_word(C, gen_images, w) != C.identity:
            cond1 = False
            failures.append({"condition": "kernel", "word": list(w)})
    images = {w: _conjugacy.evaluate_word(C, gen_images, w) for w in d2}
    distinct_words = list(dict.fromkeys(d2))
    cond2 = len({images[w] for w in distinct_words}) == len(distinct_words)
    if not cond2:
        failures.append({"condition": "injective"})
    H = subgroup_generated(
        C, [_conjugacy.evaluate_word(C, gen_images, w) for w in n1_gen_words],
        name="N1-image")
    cond3 = True
    for w in distinct_words:
        if w in in_n1:
            continue
        if images[w] in H.members:
            cond3 = False
            failures.append({"condition": "separation", "word": list(w)})
    return {"ok": cond1 and cond2 and cond3, "kernel_ok": cond1,
            "injective_ok": cond2, "separation_ok": cond3,
            "subgroup_order": len(H.members), "failures": failures}


# ---------------------------------------------------------------------------
# choosing star exponents

def choose_star_exponent(G, H, elements, quarter=Fraction(1, 4),
                         half=Fraction(1, 2), max_s=64):
    """Minimal s with the star-corrected conjugacy length above 1/4 on the
    given nontrivial elements (elements off H sit at 1 and are above both
    targets for free).  Exists because x^(1/s) increases to 1."""
    lc = _norms.conjugacy_length(G)
    needed = 1
    for g in elements:
        if g == G.identity:
            continue
        if g not in H:
            continue  # star value is 1 off H
        value = lc(g)
        if value <= 0:
            raise ValueError(f"central element {g!r} has conjugacy length 0; "
                             f"no exponent works")
        s = 1
        while value ** (1.0 / s) / 2 <= quarter and s <= max_s:
            s += 1
        if s > max_s:
            raise RuntimeError("exponent search exceeded the bound")
        needed = max(needed, s)
    return needed
