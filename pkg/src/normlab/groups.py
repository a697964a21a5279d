"""Finite group construction, enumeration and structural queries.

Groups are immutable after construction and safe to share between
workers.  Elements are plain hashable values:

* permutations: tuples of images on ``{0, ..., n-1}``
* matrices: flat row-major tuples of field elements (ints), with an
  optional projective canonical form
* table groups: integers indexing the multiplication table

Enumeration order is fixed per construction (lexicographic for
permutations and matrix entries, index order for tables), so two
constructions from the same descriptor enumerate identically.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from fractions import Fraction

DEFAULT_CAP = 10_000_000

# Seed for all fixed-seed spot checks (associativity, sampled verification).
CHECK_SEED = 0x5EED

# Brute-force conjugacy partitions are quadratic-ish; refuse above this.
_CLASS_BRUTE_LIMIT = 60_000


class DescriptorError(ValueError):
    """Malformed group / element / norm descriptor."""


class CapacityError(RuntimeError):
    """Requested enumeration exceeds the configured cap."""


# ---------------------------------------------------------------------------
# permutation helpers

def perm_mul(p, q):
    """Compose permutations: apply q first, then p."""
    return tuple(p[i] for i in q)


def perm_inverse(p):
    out = [0] * len(p)
    for i, image in enumerate(p):
        out[image] = i
    return tuple(out)


def perm_identity(n):
    return tuple(range(n))


def cycle_type(p):
    """Cycle type of a permutation as a descending tuple (fixed points included)."""
    seen = [False] * len(p)
    lengths = []
    for i in range(len(p)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        lengths.append(length)
    lengths.sort(reverse=True)
    return tuple(lengths)


def perm_parity(p):
    """0 for even permutations, 1 for odd."""
    return sum(length - 1 for length in cycle_type(p)) % 2


def moved_points(p):
    return sum(1 for i, image in enumerate(p) if image != i)


def parse_permutation(text, degree):
    """Parse cycle notation like ``(0 1)(2 3)`` (or ``id``) into an image tuple."""
    text = text.strip()
    if text in ("id", "e", "()", ""):
        return perm_identity(degree)
    if text.startswith("[") or "," in text and not text.startswith("("):
        try:
            images = [int(x) for x in text.strip("[]").replace(",", " ").split()]
        except ValueError as exc:
            raise DescriptorError(f"bad permutation literal: {text!r}") from exc
        if sorted(images) != list(range(degree)):
            raise DescriptorError(f"not a permutation of 0..{degree - 1}: {text!r}")
        return tuple(images)
    images = list(range(degree))
    depth = 0
    cycles = []
    current = []
    token = ""
    for ch in text:
        if ch == "(":
            if depth:
                raise DescriptorError(f"nested parens in {text!r}")
            depth = 1
            current = []
            token = ""
        elif ch == ")":
            if token.strip():
                current.append(int(token))
            if depth != 1:
                raise DescriptorError(f"unbalanced parens in {text!r}")
            depth = 0
            cycles.append(current)
            token = ""
        elif ch in " ,":
            if token.strip():
                current.append(int(token))
            token = ""
        else:
            if not depth:
                raise DescriptorError(f"stray character {ch!r} in {text!r}")
            token += ch
    if depth:
        raise DescriptorError(f"unbalanced parens in {text!r}")
    for cyc in cycles:
        if len(cyc) != len(set(cyc)):
            raise DescriptorError(f"repeated point in cycle: {cyc}")
        for a in cyc:
            if not 0 <= a < degree:
                raise DescriptorError(f"point {a} out of range for degree {degree}")
        for idx, a in enumerate(cyc):
            images[a] = cyc[(idx + 1) % len(cyc)]
    return tuple(images)


def format_permutation(p):
    """Cycle-notation string for a permutation (``id`` for the identity)."""
    parts = []
    seen = [False] * len(p)
    for i in range(len(p)):
        if seen[i] or p[i] == i:
            seen[i] = True
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = p[j]
        parts.append("(" + " ".join(str(x) for x in cyc) + ")")
    return "".join(parts) if parts else "id"


# ---------------------------------------------------------------------------
# conjugacy class sizes of S_n / A_n from the cycle type (no enumeration)

def sym_class_size(n, ctype):
    """Size of the S_n conjugacy class with the given cycle type (exact)."""
    size = math.factorial(n)
    counts = {}
    for length in ctype:
        counts[length] = counts.get(length, 0) + 1
    for length, mult in counts.items():
        size //= length ** mult * math.factorial(mult)
    return size


def splits_in_alternating(ctype):
    """True when the S_n class of this type splits into two A_n classes."""
    return all(length % 2 == 1 for length in ctype) and len(set(ctype)) == len(ctype)


def alt_class_size(n, ctype):
    """Size of the A_n class of an even permutation with the given type."""
    if sum(length - 1 for length in ctype) % 2 == 1:
        raise ValueError("odd cycle type has no class in the alternating group")
    size = sym_class_size(n, ctype)
    return size // 2 if splits_in_alternating(ctype) else size


# ---------------------------------------------------------------------------
# the group object

class FiniteGroup:
    """An enumerable finite group with a fixed deterministic element order.

    ``elements`` may be materialized lazily: structured groups (symmetric,
    alternating) expose op/inv/identity and membership without forcing the
    enumeration, which is capped at ``cap`` elements.
    """

    def __init__(self, descriptor, order, op, inv, identity, kind, *,
                 elements=None, enumerator=None, gens=None, cap=None,
                 degree=None, base_field=None, dim=None, projective=False,
                 member_test=None, coset_rep=None, parent=None,
                 random_fn=None):
        self.descriptor = descriptor
        self.order = order
        self._op = op
        self._inv = inv
        self.identity = identity
        self.kind = kind  # "perm" | "matrix" | "table" | "coset"
        self.cap = DEFAULT_CAP if cap is None else cap
        self.gens = list(gens) if gens else None
        self.degree = degree
        self.base_field = base_field
        self.dim = dim
        self.projective = projective
        self.coset_rep = coset_rep
        self.parent = parent
        self._member_test = member_test
        self._random_fn = random_fn
        self._elements = list(elements) if elements is not None else None
        self._enumerator = enumerator
        self._index = None
        self._class_list = None
        self._class_id = None

    # -- core operations

    def mul(self, a, b):
        return self._op(a, b)

    def inv(self, a):
        return self._inv(a)

    def conj(self, h, g):
        """h * g * h^-1."""
        return self._op(self._op(h, g), self._inv(h))

    def commutator(self, a, b):
        return self._op(self._op(a, b), self._op(self._inv(a), self._inv(b)))

    # -- enumeration

    @property
    def elements(self):
        if self._elements is None:
            if self.order > self.cap:
                raise CapacityError(
                    f"{self.descriptor}: order {self.order} exceeds enumeration "
                    f"cap {self.cap}")
            if self._enumerator is None:
                raise CapacityError(f"{self.descriptor}: no enumerator available")
            self._elements = list(self._enumerator())
            if len(self._elements) != self.order:
                raise RuntimeError(
                    f"{self.descriptor}: enumerated {len(self._elements)} elements, "
                    f"expected {self.order}")
        return self._elements

    @property
    def enumerable(self):
        return self._elements is not None or (
            self._enumerator is not None and self.order <= self.cap)

    def element_index(self, g):
        if self._index is None:
            self._index = {e: i for i, e in enumerate(self.elements)}
        try:
            return self._index[g]
        except KeyError:
            raise ValueError(f"element {g!r} not in {self.descriptor}") from None

    def __contains__(self, g):
        if self._member_test is not None:
            return self._member_test(g)
        if self._index is None:
            self._index = {e: i for i, e in enumerate(self.elements)}
        return g in self._index

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"FiniteGroup({self.descriptor!r}, order={self.order})"

    def random_element(self, rng):
        if self._random_fn is not None:
            return self._random_fn(rng)
        return rng.choice(self.elements)

    # -- conjugacy structure

    def conjugacy_classes(self):
        """All conjugacy classes as frozensets, ordered by first appearance."""
        if self._class_list is None:
            self._build_classes()
        return self._class_list

    def class_index_of(self, g):
        if self._class_id is None:
            self._build_classes()
        try:
            return self._class_id[g]
        except KeyError:
            raise ValueError(f"element {g!r} not in {self.descriptor}") from None

    def class_of(self, g):
        return self.conjugacy_classes()[self.class_index_of(g)]

    def class_size(self, g):
        """|g^G|; uses the cycle-type formula for S_n / A_n, else the partition."""
        if self.kind == "perm" and self.descriptor.startswith("S:"):
            return sym_class_size(self.degree, cycle_type(g))
        if self.kind == "perm" and self.descriptor.startswith("A:"):
            return alt_class_size(self.degree, cycle_type(g))
        return len(self.class_of(g))

    def center_elements(self):
        """Elements commuting with everything (the singleton classes)."""
        if self.kind == "perm" and self.descriptor.startswith("S:"):
            return frozenset({self.identity}) if self.degree >= 3 \
                else frozenset(self.elements)
        if self.kind == "perm" and self.descriptor.startswith("A:"):
            return frozenset({self.identity}) if self.degree >= 4 \
                else frozenset(self.elements)
        return frozenset(g for c in self.conjugacy_classes() if len(c) == 1
                         for g in c)

    def _build_classes(self):
        if self.kind == "perm" and self.descriptor.startswith(("S:", "A:")):
            self._build_classes_perm()
            return
        elems = self.elements
        if len(elems) > _CLASS_BRUTE_LIMIT:
            raise CapacityError(
                f"{self.descriptor}: conjugacy partition of {len(elems)} elements "
                f"exceeds the brute-force limit {_CLASS_BRUTE_LIMIT}")
        class_id = {}
        classes = []
        op, inv = self._op, self._inv
        for g in elems:
            if g in class_id:
                continue
            orbit = frozenset(op(op(h, g), inv(h)) for h in elems)
            idx = len(classes)
            classes.append(orbit)
            for x in orbit:
                class_id[x] = idx
        self._class_list = classes
        self._class_id = class_id

    def _build_classes_perm(self):
        alternating = self.descriptor.startswith("A:")
        buckets = {}
        order_of_bucket = []
        for g in self.elements:
            t = cycle_type(g)
            if t not in buckets:
                buckets[t] = []
                order_of_bucket.append(t)
            buckets[t].append(g)
        classes = []
        class_id = {}
        for t in order_of_bucket:
            members = buckets[t]
            if alternating and splits_in_alternating(t):
                parts = self._split_orbits(members)
            else:
                parts = [members]
            for part in parts:
                orbit = frozenset(part)
                idx = len(classes)
                classes.append(orbit)
                for x in orbit:
                    class_id[x] = idx
        self._class_list = classes
        self._class_id = class_id

    def _split_orbits(self, members):
        # Conjugation orbits inside one cycle-type bucket of A_n.
        remaining = set(members)
        parts = []
        gens = self.gens or self.elements
        gen_pairs = [(h, self._inv(h)) for h in gens]
        while remaining:
            seed = next(m for m in members if m in remaining)
            orbit = {seed}
            frontier = [seed]
            while frontier:
                g = frontier.pop()
                for h, hinv in gen_pairs:
                    x = self._op(self._op(h, g), hinv)
                    if x not in orbit:
                        orbit.add(x)
                        frontier.append(x)
            remaining -= orbit
            parts.append(sorted(orbit, key=members.index)
                         if len(members) < 4000 else list(orbit))
        return parts


# ---------------------------------------------------------------------------
# factories

def symmetric_group(n, cap=None):
    if n < 1:
        raise DescriptorError("symmetric group degree must be >= 1")
    order = math.factorial(n)

    def random_perm(rng):
        images = list(range(n))
        rng.shuffle(images)
        return tuple(images)

    gens = None
    if n >= 2:
        t = list(range(n)); t[0], t[1] = t[1], t[0]
        c = tuple(list(range(1, n)) + [0])
        gens = [tuple(t), c]
    return FiniteGroup(
        f"S:{n}", order, perm_mul, perm_inverse, perm_identity(n), "perm",
        enumerator=lambda: itertools.permutations(range(n)),
        gens=gens, cap=cap, degree=n,
        member_test=lambda g: isinstance(g, tuple) and len(g) == n
        and sorted(g) == list(range(n)),
        random_fn=random_perm)


def alternating_group(n, cap=None):
    if n < 1:
        raise DescriptorError("alternating group degree must be >= 1")
    order = max(math.factorial(n) // 2, 1)

    def random_even(rng):
        images = list(range(n))
        rng.shuffle(images)
        p = tuple(images)
        if perm_parity(p):
            images[0], images[1] = images[1], images[0]
            p = tuple(images)
        return p

    gens = None
    if n >= 3:
        t3 = list(range(n)); t3[0], t3[1], t3[2] = t3[1], t3[2], t3[0]
        if n % 2 == 1:
            c = tuple(list(range(1, n)) + [0])
        else:
            c = tuple([0] + list(range(2, n)) + [1])
        gens = [tuple(t3), c]
    return FiniteGroup(
        f"A:{n}", order, perm_mul, perm_inverse, perm_identity(n), "perm",
        enumerator=lambda: (p for p in itertools.permutations(range(n))
                            if perm_parity(p) == 0),
        gens=gens, cap=cap, degree=n,
        member_test=lambda g: isinstance(g, tuple) and len(g) == n
        and sorted(g) == list(range(n)) and perm_parity(g) == 0,
        random_fn=random_even if n >= 2 else None)


def table_group(order, mul_flat, descriptor="table", cap=None):
    """Group from a row-major multiplication table on {0, ..., order-1}.

    Identity and inverses are checked exhaustively; associativity is
    spot-checked on 1000 fixed-seed random triples.
    """
    if order <= 0 or len(mul_flat) != order * order:
        raise DescriptorError("table length must equal order^2")
    if any(not 0 <= x < order for x in mul_flat):
        raise DescriptorError("table entries must be in 0..order-1")
    table = [mul_flat[i * order:(i + 1) * order] for i in range(order)]
    identity = None
    for e in range(order):
        if all(table[e][x] == x and table[x][e] == x for x in range(order)):
            identity = e
            break
    if identity is None:
        raise DescriptorError("table has no two-sided identity")
    inv_table = [None] * order
    for a in range(order):
        for b in range(order):
            if table[a][b] == identity and table[b][a] == identity:
                inv_table[a] = b
                break
        if inv_table[a] is None:
            raise DescriptorError(f"table element {a} has no inverse")
    rng = random.Random(CHECK_SEED)
    for _ in range(min(1000, order ** 3)):
        a, b, c = (rng.randrange(order) for _ in range(3))
        if table[table[a][b]][c] != table[a][table[b][c]]:
            raise DescriptorError(f"table is not associative at ({a},{b},{c})")
    return FiniteGroup(
        descriptor, order, lambda a, b: table[a][b], lambda a: inv_table[a],
        identity, "table", elements=range(order), cap=cap)


def table_group_from_file(path, cap=None):
    with open(path) as fh:
        data = json.load(fh)
    try:
        order = int(data["order"])
        mul = list(data["mul"])
    except (KeyError, TypeError) as exc:
        raise DescriptorError(f"bad table file {path}: {exc}") from exc
    return table_group(order, mul, descriptor=f"table:{path}", cap=cap)


def construct_group(descriptor, cap=None):
    """Build a group from a descriptor string.

    Supported: ``S:n`` / ``A:n`` (n <= 9), ``table:<path>``, and the matrix
    families ``GL:n:q``, ``SL:n:q``, ``PGL:n:q``, ``PSL:n:q``, ``Sp:n:q``,
    ``U:n:q``, ``SU:n:q``, ``Oplus:n:q``, ``Ominus:n:q``.
    """
    descriptor = descriptor.strip()
    if descriptor.startswith("table:"):
        return table_group_from_file(descriptor[len("table:"):], cap=cap)
    parts = descriptor.split(":")
    head = parts[0]
    if head in ("S", "A"):
        if len(parts) != 2:
            raise DescriptorError(f"expected {head}:n, got {descriptor!r}")
        try:
            n = int(parts[1])
        except ValueError as exc:
            raise DescriptorError(f"bad degree in {descriptor!r}") from exc
        if not 1 <= n <= 9:
            raise DescriptorError(f"{head}:n supports 1 <= n <= 9, got {n}")
        group = symmetric_group(n, cap=cap) if head == "S" else alternating_group(n, cap=cap)
        if group.order > group.cap:
            raise CapacityError(f"{descriptor}: order {group.order} exceeds cap {group.cap}")
        return group
    matrix_families = {"GL", "SL", "PGL", "PSL", "Sp", "U", "SU",
                       "Oplus", "Ominus", "OmegaPlus", "OmegaMinus"}
    if head in matrix_families:
        from . import classical
        return classical.construct_from_descriptor(descriptor, cap=cap)
    raise DescriptorError(f"unknown group descriptor {descriptor!r}")


# ---------------------------------------------------------------------------
# subgroups

class Subgroup:
    """A verified subgroup: closed under the parent operation and inverses.

    ``rule``-based subgroups (e.g. the even permutations of a lazily
    enumerated symmetric group) avoid materializing members.
    """

    def __init__(self, parent, members=None, name="H", rule=None, order=None,
                 normal=None, verify=True):
        if members is None and rule is None:
            raise ValueError("need members or a membership rule")
        self.parent = parent
        self.name = name
        self.rule = rule
        self._members = frozenset(members) if members is not None else None
        self._order = order if order is not None else (
            len(self._members) if self._members is not None else None)
        self._normal = normal
        if verify and self._members is not None:
            self._verify_closed()

    def _verify_closed(self):
        mem = self._members
        G = self.parent
        if G.identity not in mem:
            raise ValueError(f"subgroup {self.name} misses the identity")
        for a in mem:
            if G.inv(a) not in mem:
                raise ValueError(f"subgroup {self.name} not closed under inverse")
            for b in mem:
                if G.mul(a, b) not in mem:
                    raise ValueError(f"subgroup {self.name} not closed under product")

    @property
    def order(self):
        if self._order is None:
            self._order = len(self.members)
        return self._order

    @property
    def members(self):
        if self._members is None:
            self._members = frozenset(
                g for g in self.parent.elements if self.rule(g))
            if self._order is not None and len(self._members) != self._order:
                raise RuntimeError(f"subgroup {self.name}: rule produced "
                                   f"{len(self._members)} members, expected {self._order}")
        return self._members

    def __contains__(self, g):
        if self.rule is not None:
            return self.rule(g)
        return g in self.members

    def __len__(self):
        return self.order

    @property
    def is_normal(self):
        if self._normal is None:
            self._normal = self._check_normal()
        return self._normal

    def _check_normal(self):
        G = self.parent
        conjugators = G.gens if G.gens else G.elements
        if self.rule is not None and not G.enumerable:
            # Lazy parent: fixed-seed sampled verification.
            rng = random.Random(CHECK_SEED)
            for _ in range(200):
                g = G.random_element(rng)
                h = G.random_element(rng)
                while not self.rule(h):
                    h = G.random_element(rng)
                if not self.rule(G.conj(g, h)):
                    return False
            return True
        mem = self.members
        for g in conjugators:
            for h in mem:
                if G.conj(g, h) not in mem:
                    return False
        return True

    def as_group(self):
        """The subgroup as a standalone FiniteGroup (parent element order)."""
        G = self.parent
        elems = sorted(self.members, key=G.element_index)
        return FiniteGroup(
            f"{G.descriptor}|{self.name}", len(elems), G._op, G._inv,
            G.identity, G.kind, elements=elems, cap=G.cap, degree=G.degree,
            base_field=G.base_field, dim=G.dim, projective=G.projective)

    def __repr__(self):
        size = self._order if self._order is not None else "?"
        return f"Subgroup({self.name!r} of {self.parent.descriptor}, order={size})"


def alternating_subgroup(sym_group):
    """The even permutations inside a symmetric group (rule-based)."""
    if sym_group.kind != "perm":
        raise ValueError("alternating_subgroup needs a permutation group")
    n = sym_group.degree
    sub = Subgroup(sym_group, rule=lambda g: perm_parity(g) == 0,
                   name="A", order=max(math.factorial(n) // 2, 1), normal=True)
    sub.parity_rule = True
    return sub


def trivial_subgroup(G):
    return Subgroup(G, members={G.identity}, name="1", normal=True)


def whole_subgroup(G):
    return Subgroup(G, members=G.elements, name="G", normal=True, verify=False)


def _bfs_closure(G, gens):
    """Subgroup generated by ``gens``: Cayley-graph BFS over gens and inverses."""
    sym = []
    for g in gens:
        sym.append(g)
        inv = G.inv(g)
        if inv != g:
            sym.append(inv)
    members = {G.identity}
    frontier = [G.identity]
    while frontier:
        x = frontier.pop()
        for s in sym:
            y = G.mul(x, s)
            if y not in members:
                members.add(y)
                frontier.append(y)
    return members


def subgroup_generated(G, gens, name="gen"):
    """Closure of ``gens`` under products and inverses.

    Generators already inside the running closure are skipped, so large
    redundant generating sets (e.g. whole conjugacy classes) stay cheap.
    """
    essential = []
    members = {G.identity}
    for g in gens:
        if g not in members:
            essential.append(g)
            members = _bfs_closure(G, essential)
    return Subgroup(G, members=members, name=name, verify=False)


def normal_closure(G, seed_elements, name="ncl"):
    """Smallest normal subgroup of G containing the seed elements.

    Alternates subgroup closure with absorption of generator conjugates
    until the subgroup is stable under conjugation.
    """
    conjugators = G.gens if G.gens else G.elements
    gens = set(seed_elements)
    while True:
        sub = subgroup_generated(G, gens, name=name)
        new = set()
        for c in conjugators:
            for h in gens:
                x = G.conj(c, h)
                if x not in sub.members:
                    new.add(x)
        if not new:
            sub._normal = None
            if sub.is_normal:
                sub._normal = True
                return sub
            for c in conjugators:
                for h in sub.members:
                    x = G.conj(c, h)
                    if x not in sub.members:
                        new.add(x)
                        break
                if new:
                    break
        gens |= new


# ---------------------------------------------------------------------------
# structural operations

def derived_subgroup(G, name="derived"):
    """Commutator subgroup, computed as the closure of all commutators."""
    commutators = {G.commutator(a, b) for a in G.elements for b in G.elements}
    sub = subgroup_generated(G, commutators, name=name)
    sub._normal = True  # characteristic, hence normal
    return sub


def conjugacy_class(G, g):
    """The set {h g h^-1 : h in G} (exhaustive)."""
    if g not in G:
        raise ValueError(f"element {g!r} not in {G.descriptor}")
    return G.class_of(g)


def centralizer(G, g):
    """Brute-force centralizer of g."""
    return frozenset(h for h in G.elements if G.mul(h, g) == G.mul(g, h))


def center(G):
    return G.center_elements()


def quotient_group(G, H):
    """G/H for a verified normal subgroup H.

    Coset representatives are minimal in the parent enumeration order; the
    quotient group carries a ``coset_rep`` map from parent elements to
    representatives.
    """
    if not isinstance(H, Subgroup):
        raise TypeError("quotient_group expects a Subgroup")
    if H.parent is not G:
        raise ValueError("subgroup does not belong to this group")
    if not H.is_normal:
        raise ValueError(f"subgroup {H.name} is not normal in {G.descriptor}")
    rep_map = {}
    reps = []
    members = H.members
    for g in G.elements:
        if g in rep_map:
            continue
        reps.append(g)
        for h in members:
            rep_map[G.mul(g, h)] = g
    if len(reps) * len(members) != G.order:
        raise RuntimeError("coset decomposition does not tile the group")

    def q_op(a, b):
        return rep_map[G.mul(a, b)]

    def q_inv(a):
        return rep_map[G.inv(a)]

    return FiniteGroup(
        f"{G.descriptor}/{H.name}", len(reps), q_op, q_inv,
        rep_map[G.identity], "coset", elements=reps, cap=G.cap,
        coset_rep=rep_map, parent=G)
