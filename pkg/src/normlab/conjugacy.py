"""Conjugacy-class products, covering exponents, the class graph, and the
cancelation norm on words over a symmetric generating set.

Class products are computed through the class partition: for a single
class X with representative x0, X*Y is the union of the classes of x0*y
over y in Y, which keeps the covering iteration linear in |G| per step.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .groups import CapacityError, FiniteGroup, Subgroup, subgroup_generated

INFINITE = math.inf


# ---------------------------------------------------------------------------
# free-group words: tuples of signed 1-based generator indices

def free_reduce(word):
    out = []
    for letter in word:
        if letter == 0:
            raise ValueError("0 is not a valid letter")
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def word_inverse(word):
    return tuple(-letter for letter in reversed(word))


def word_concat(*words):
    out = []
    for w in words:
        out.extend(w)
    return free_reduce(out)


def evaluate_word(G, gen_images, word):
    value = G.identity
    for letter in word:
        idx = abs(letter) - 1
        if idx >= len(gen_images):
            raise ValueError(f"letter {letter} exceeds the alphabet")
        g = gen_images[idx]
        value = G.mul(value, g if letter > 0 else G.inv(g))
    return value


def all_words(rank, max_length, reduced=True):
    """All freely reduced words of length <= max_length over ``rank`` letters."""
    letters = [i for i in range(1, rank + 1)] + [-i for i in range(1, rank + 1)]
    seen = {()}
    frontier = [()]
    for _ in range(max_length):
        new_frontier = []
        for w in frontier:
            for letter in letters:
                if reduced and w and w[-1] == -letter:
                    continue
                nw = w + (letter,)
                if nw not in seen:
                    seen.add(nw)
                    new_frontier.append(nw)
        frontier = new_frontier
    return sorted(seen, key=lambda w: (len(w), w))


# ---------------------------------------------------------------------------
# class products

def class_product(G, X, Y):
    """{x*y : x in X, y in Y}; conjugation-invariant when X and Y are.

    When X is a full conjugacy class the product is assembled from the
    classes of x0*y for a fixed representative x0.
    """
    X = frozenset(X)
    Y = frozenset(Y)
    if not X or not Y:
        return frozenset()
    x0 = next(iter(X))
    try:
        is_class = X == G.class_of(x0)
    except (ValueError, CapacityError):
        is_class = False
    if is_class:
        class_ids = {G.class_index_of(G.mul(x0, y)) for y in Y}
        classes = G.conjugacy_classes()
        out = set()
        for idx in class_ids:
            out.update(classes[idx])
        return frozenset(out)
    return frozenset(G.mul(x, y) for x in X for y in Y)


def _product_ids_with_class(G, ids, g0):
    """Class ids of (union of classes ``ids``) * class(g0)."""
    classes = G.conjugacy_classes()
    out = set()
    for idx in ids:
        for s in classes[idx]:
            out.add(G.class_index_of(G.mul(s, g0)))
    return frozenset(out)


# ---------------------------------------------------------------------------
# covering exponents

@dataclass
class CoveringReport:
    group: str
    exponent: float  # positive int, or math.inf
    infinite: bool
    reason: str
    class_size: int
    closure_order: int      # order of <<g>>
    kernel_order: int | None  # order of <<g^-1 g^G>> when computed
    target_size: int | None
    iterations: int
    ratio: float | None     # exponent * log|g^G| / log|G| when finite

    def to_json(self):
        return {
            "group": self.group,
            "exponent": None if self.infinite else int(self.exponent),
            "infinite": self.infinite,
            "reason": self.reason,
            "class_size": self.class_size,
            "closure_order": self.closure_order,
            "kernel_order": self.kernel_order,
            "target_size": self.target_size,
            "iterations": self.iterations,
            "ratio": self.ratio,
        }


def covering_report(G, g, max_iterations=None):
    """Minimal m with (g^G)^m equal to the full coset of <<g^-1 g^G>>
    containing it, provided the conjugates of g generate the whole group.

    Products of class elements always stay inside the coset g^m * K,
    K = <<g^-1 g^G>>, which makes the target exact even under parity-type
    obstructions.  The marker is infinite when g^G sits inside a proper
    normal subgroup (products can never exhaust G), or when the iteration
    cycles without reaching the coset.
    """
    if g not in G:
        raise ValueError(f"element not in {G.descriptor}")
    cls = G.class_of(g)
    if g == G.identity:
        return CoveringReport(G.descriptor, INFINITE, True,
                              "identity element: products stay trivial",
                              1, 1, None, None, 0, None)
    closure = subgroup_generated(G, cls, name="ncl")
    if len(closure.members) < G.order:
        return CoveringReport(
            G.descriptor, INFINITE, True,
            "conjugacy class lies in a proper normal subgroup",
            len(cls), len(closure.members), None, None, 0, None)
    ginv = G.inv(g)
    kernel = subgroup_generated(
        G, [G.mul(ginv, x) for x in cls], name="kernel")
    # absorb conjugates so the kernel is the full normal closure
    while True:
        extra = [x for x in
                 (G.conj(c, h) for c in (G.gens or G.elements)
                  for h in kernel.members)
                 if x not in kernel.members]
        if not extra:
            break
        kernel = subgroup_generated(G, set(kernel.members) | set(extra),
                                    name="kernel")
    kernel_members = kernel.members
    limit = max_iterations if max_iterations is not None else G.order + 1
    current_ids = frozenset({G.class_index_of(g)})
    classes = G.conjugacy_classes()
    g_power = g
    seen_states = set()
    for m in range(1, limit + 1):
        coset_ids = frozenset(G.class_index_of(G.mul(g_power, k))
                              for k in kernel_members)
        if current_ids == coset_ids:
            size = sum(len(classes[i]) for i in current_ids)
            ratio = m * math.log(len(cls)) / math.log(G.order)
            return CoveringReport(G.descriptor, m, False, "covered",
                                  len(cls), G.order, len(kernel_members),
                                  size, m, ratio)
        state = (current_ids, g_power)
        if state in seen_states:
            return CoveringReport(
                G.descriptor, INFINITE, True,
                "class-product iteration cycled below the coset target",
                len(cls), G.order, len(kernel_members), None, m, None)
        seen_states.add(state)
        current_ids = _product_ids_with_class(G, current_ids, g)
        g_power = G.mul(g_power, g)
    raise RuntimeError("covering iteration exceeded the safety limit")


def covering_exponent(G, g):
    """Positive integer, or math.inf as the infinite marker."""
    return covering_report(G, g).exponent


def is_simple(G):
    """No proper nontrivial normal subgroup (every class generates G)."""
    if G.order <= 1:
        return False
    for cls in G.conjugacy_classes():
        rep = next(iter(cls))
        if rep == G.identity:
            continue
        if len(subgroup_generated(G, cls).members) != G.order:
            return False
    return True


def is_abelian(G):
    return all(len(c) == 1 for c in G.conjugacy_classes())


def empirical_covering_constant(corpus):
    """Smallest c with covering_exponent <= c * log|H| / log|g^H| across all
    nontrivial classes of the corpus; every group must be non-abelian simple."""
    if not corpus:
        raise ValueError("empty corpus")
    best = 0.0
    table = []
    for H in corpus:
        if is_abelian(H):
            raise ValueError(f"{H.descriptor} is abelian")
        if not is_simple(H):
            raise ValueError(f"{H.descriptor} is not simple")
        log_order = math.log(H.order)
        for cls in H.conjugacy_classes():
            rep = next(iter(cls))
            if rep == H.identity:
                continue
            m = covering_exponent(H, rep)
            if m == INFINITE:
                raise RuntimeError(f"unexpected infinite covering in "
                                   f"{H.descriptor}")
            ratio = m * math.log(len(cls)) / log_order
            table.append({"group": H.descriptor, "class_size": len(cls),
                          "exponent": int(m), "ratio": ratio})
            best = max(best, ratio)
    return best, table


# ---------------------------------------------------------------------------
# the conjugacy graph

@dataclass
class ConjugacyGraph:
    """Graph on conjugacy classes: (x, y) is an edge when x is contained in
    c*y for some distinguished class c.  Distances are measured from the
    identity class; classes outside its component all receive
    (component diameter) + 1."""

    group: FiniteGroup
    delta_ids: tuple
    successors: dict            # y -> frozenset of x with x subset of c*y
    dist: dict                  # class id -> distance from the identity class
    component: frozenset        # ids reachable from the identity class
    diameter: int
    disconnected_value: int

    @property
    def vertex_count(self):
        return len(self.group.conjugacy_classes())

    @property
    def has_disconnected(self):
        return len(self.component) < self.vertex_count

    @property
    def max_value(self):
        values = [self.disconnected_value] if self.has_disconnected else [0]
        values.extend(self.dist.values())
        return max(values)

    def distance_value(self, class_id):
        return self.dist.get(class_id, self.disconnected_value)

    def edges(self):
        return sorted((x, y) for y, xs in self.successors.items() for x in xs)

    def to_json(self):
        classes = self.group.conjugacy_classes()
        return {
            "group": self.group.descriptor,
            "vertices": [{"id": i, "size": len(c),
                          "distance": self.distance_value(i),
                          "in_identity_component": i in self.component}
                         for i, c in enumerate(classes)],
            "delta": sorted(self.delta_ids),
            "edges": [[x, y] for x, y in self.edges()],
            "identity_component_diameter": self.diameter,
            "disconnected_value": self.disconnected_value,
        }


def build_conjugacy_graph(G, delta):
    """Build the class graph for a distinguished set of classes.

    ``delta`` may contain representative elements or whole classes.
    """
    classes = G.conjugacy_classes()
    delta_ids = set()
    for item in delta:
        # sets are classes, anything else is a representative element
        rep = next(iter(item)) if isinstance(item, (frozenset, set)) else item
        delta_ids.add(G.class_index_of(rep))
    delta_ids = frozenset(delta_ids)

    successors = {}
    for y in range(len(classes)):
        succ = set()
        for c_id in delta_ids:
            c0 = next(iter(classes[c_id]))
            for u in classes[y]:
                succ.add(G.class_index_of(G.mul(c0, u)))
        successors[y] = frozenset(succ)

    id_class = G.class_index_of(G.identity)
    dist = _bfs(successors, id_class)
    component = frozenset(dist)
    diameter = 0
    for start in component:
        reach = _bfs(successors, start, restrict=component)
        for v, d in reach.items():
            if d > diameter:
                diameter = d
    return ConjugacyGraph(G, tuple(sorted(delta_ids)), successors, dist,
                          component, diameter, diameter + 1)


def _bfs(successors, start, restrict=None):
    dist = {start: 0}
    queue = deque([start])
    while queue:
        y = queue.popleft()
        for x in successors[y]:
            if restrict is not None and x not in restrict:
                continue
            if x not in dist:
                dist[x] = dist[y] + 1
                queue.append(x)
    return dist


# ---------------------------------------------------------------------------
# cancelation norm

@dataclass(frozen=True)
class WordProblemInstance:
    """A word over a symmetric generator alphabet with its evaluation group.

    Letters are signed 1-based indices into ``generators``; negative
    letters denote formal inverses, so the alphabet is symmetric by
    construction.
    """

    group: FiniteGroup
    generators: tuple
    word: tuple

    def __post_init__(self):
        for g in self.generators:
            if g not in self.group:
                raise ValueError("generator outside the group")
        for letter in self.word:
            if letter == 0 or abs(letter) > len(self.generators):
                raise ValueError(f"letter {letter} outside the alphabet")

    def letter_element(self, letter):
        g = self.generators[abs(letter) - 1]
        return g if letter > 0 else self.group.inv(g)

    def evaluate(self):
        return evaluate_word(self.group, list(self.generators), self.word)


MAX_WORD_LENGTH = 1_000_000


def cancelation_norm(inst):
    """Least number of letters to delete from the word so the remainder is
    trivial in the group; dynamic program over (position, partial product)."""
    if len(inst.word) > MAX_WORD_LENGTH:
        raise CapacityError(f"word longer than {MAX_WORD_LENGTH}")
    G = inst.group
    best = {G.identity: 0}
    for letter in inst.word:
        elem = inst.letter_element(letter)
        new = dict()
        for state, cost in best.items():
            # delete the letter
            prev = new.get(state)
            if prev is None or cost + 1 < prev:
                new[state] = cost + 1
            # keep the letter
            consumed = G.mul(state, elem)
            prev = new.get(consumed)
            if prev is None or cost < prev:
                new[consumed] = cost
        best = new
    return best[G.identity]


def element_cancelation_norms(G, generators):
    """For every group element, the minimum cancelation norm over all words
    representing it.

    0/1-BFS over states (value reached, value the kept subword must still
    reach): appending a kept letter moves both coordinates at cost 0,
    appending a deleted letter moves only the first at cost 1.  This
    minimizes over all finite words at once.
    """
    letters = []
    for g in generators:
        letters.append(g)
        inv = G.inv(g)
        if inv != g:
            letters.append(inv)
    start = (G.identity, G.identity)
    dist = {start: 0}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        g, h = state
        d = dist[state]
        for s in letters:
            gs = G.mul(g, s)
            kept = (gs, G.mul(h, s))
            if kept not in dist or d < dist[kept]:
                dist[kept] = d
                queue.appendleft(kept)
            deleted = (gs, h)
            if deleted not in dist or d + 1 < dist[deleted]:
                dist[deleted] = d + 1
                queue.append(deleted)
    out = {}
    for g in G.elements:
        value = dist.get((g, G.identity))
        if value is not None:
            out[g] = value
    return out


def cancelation_equals_delta(G, delta, generators, sample_words=None):
    """Compare the per-element cancelation norm against the class-graph
    distance; exact equality is asserted on the identity component when the
    generators are symmetric, generate G, and represent every class of
    delta.  Elements in other components are reported without asserting."""
    gen_set = set(generators) | {G.inv(g) for g in generators}
    generated = subgroup_generated(G, gen_set)
    if len(generated.members) != G.order:
        raise ValueError("generators do not generate the group")
    graph = build_conjugacy_graph(G, delta)
    delta_ids = set(graph.delta_ids)
    covered = {G.class_index_of(s) for s in gen_set}
    if not delta_ids <= covered:
        raise ValueError("generators do not represent every class of delta")

    norms = element_cancelation_norms(G, sorted(gen_set, key=G.element_index))
    comparisons = []
    mismatches = []
    skipped = []
    for g in G.elements:
        cid = G.class_index_of(g)
        cancel = norms.get(g)
        if cid in graph.component:
            dist = graph.dist[cid]
            equal = cancel == dist
            comparisons.append({"element": g, "cancelation": cancel,
                                "delta": dist, "equal": equal})
            if not equal:
                mismatches.append(g)
        else:
            skipped.append({"element": g, "cancelation": cancel,
                            "delta": graph.disconnected_value})
    word_rows = []
    if sample_words:
        for word in sample_words:
            inst = WordProblemInstance(G, tuple(generators), tuple(word))
            value = cancelation_norm(inst)
            element = inst.evaluate()
            floor = norms.get(element)
            word_rows.append({"word": list(word), "cancelation": value,
                              "element_norm": floor,
                              "consistent": floor is not None and value >= floor})
    return {"ok": not mismatches, "comparisons": comparisons,
            "mismatches": mismatches, "skipped_disconnected": skipped,
            "sample_words": word_rows}
