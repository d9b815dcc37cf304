"""Binary relations as subalgebras of products, stored extensionally as pair sets.

For two-sorted objects a relation holds one pair set per sort.  Composition is
the set-theoretic composite, which is the regular image of the pullback span
because regular epimorphisms are exactly the per-sort surjections in every
shipped instance.
"""
from __future__ import annotations

import enum
import itertools
from functools import cached_property

from .errors import CapExceeded, DomainMismatch, LawViolation
from .finstruct.core import FinObject, Morphism
from .finstruct.limits import (
    enumerate_subalgebras,
    induced_object,
    labels_to_pairs,
    congruence_labels,
    kernel_pair_pairs,
    product,
)


class RelOrder(enum.Enum):
    LE = "LE"
    GE = "GE"
    EQ = "EQ"
    INCOMPARABLE = "INCOMPARABLE"


def _pairs_closed(dom: FinObject, cod: FinObject, pairs) -> bool:
    if dom.pointed and any((0, 0) not in p for p in pairs):
        return False
    for op in dom.signature.ops:
        pools = [sorted(pairs[s]) for s in op.args]
        out = pairs[op.out]
        for args in itertools.product(*pools):
            a = dom.apply(op, [x for x, _ in args])
            b = cod.apply(op, [y for _, y in args])
            if (a, b) not in out:
                return False
    return True


class Relation:
    """A relation ``dom -> cod``: per-sort sets of pairs closed under the operations."""

    def __init__(self, dom: FinObject, cod: FinObject, pairs, check=True):
        if dom.category is not cod.category:
            raise DomainMismatch(f"{dom.category} vs {cod.category}")
        self.dom = dom
        self.cod = cod
        self.pairs = tuple(frozenset(p) for p in pairs)
        if len(self.pairs) != dom.nsorts:
            raise DomainMismatch("one pair set per sort is required")
        if check:
            for s, p in enumerate(self.pairs):
                for x, y in p:
                    if not (0 <= x < dom.sorts[s] and 0 <= y < cod.sorts[s]):
                        raise LawViolation(f"pair {(x, y)} out of range in sort {s}")
            if not _pairs_closed(dom, cod, self.pairs):
                raise LawViolation("pair set is not a subalgebra of the product")
        self._hash = hash(self.pairs)

    @classmethod
    def diagonal(cls, obj: FinObject) -> "Relation":
        return cls(obj, obj, [{(x, x) for x in range(n)} for n in obj.sorts], check=False)

    @classmethod
    def total(cls, dom: FinObject, cod: FinObject) -> "Relation":
        return cls(dom, cod, [set(itertools.product(range(n), range(m)))
                              for n, m in zip(dom.sorts, cod.sorts)], check=False)

    @property
    def is_endo(self) -> bool:
        return self.dom == self.cod

    def size(self) -> int:
        return sum(len(p) for p in self.pairs)

    def sorted_pairs(self):
        return tuple(tuple(sorted(p)) for p in self.pairs)

    def sort_key(self):
        """Canonical order: total size first, then the sorted pair lists."""
        return (self.size(), self.sorted_pairs())

    def __eq__(self, other):
        if not isinstance(other, Relation):
            return NotImplemented
        return self.pairs == other.pairs and self.dom == other.dom and self.cod == other.cod

    def __hash__(self):
        return self._hash

    def __repr__(self):
        body = "; ".join(str(sorted(p)) for p in self.pairs)
        return f"Relation({body})"

    def to_data(self) -> dict:
        sp = [[list(q) for q in p] for p in self.sorted_pairs()]
        return {"dom": self.dom.canonical_key, "cod": self.cod.canonical_key,
                "pairs": sp[0] if len(sp) == 1 else sp}

    @cached_property
    def _span(self):
        elems = self.sorted_pairs()
        prod, _, _ = product(self.dom, self.cod)
        labels = [[x * m + y for x, y in e] for e, m in zip(elems, self.cod.sorts)]
        obj = induced_object(prod, labels)
        d = Morphism(obj, self.dom, [[x for x, _ in e] for e in elems], check=False)
        c = Morphism(obj, self.cod, [[y for _, y in e] for e in elems], check=False)
        return obj, d, c

    @property
    def obj(self) -> FinObject:
        """The relation as an object of its category."""
        return self._span[0]

    @property
    def d(self) -> Morphism:
        return self._span[1]

    @property
    def c(self) -> Morphism:
        return self._span[2]


def graph(f: Morphism) -> Relation:
    return Relation(f.dom, f.cod, [{(x, y) for x, y in enumerate(m)} for m in f.maps], check=False)


def opposite(r: Relation) -> Relation:
    return Relation(r.cod, r.dom, [{(y, x) for x, y in p} for p in r.pairs], check=False)


def compose_pairs(s_pairs, r_pairs):
    out = []
    for sp, rp in zip(s_pairs, r_pairs):
        succ = {}
        for y, z in sp:
            succ.setdefault(y, []).append(z)
        out.append({(x, z) for x, y in rp for z in succ.get(y, ())})
    return out


def compose(s: Relation, r: Relation, verify=True) -> Relation:
    """The composite ``SR``: first ``R``, then ``S``.

    With ``verify`` the result is re-checked to be a subalgebra; that always
    holds, so sweeps that compose millions of times pass ``verify=False``.
    """
    if r.cod != s.dom:
        raise DomainMismatch("cod(R) must equal dom(S)")
    return Relation(r.dom, s.cod, compose_pairs(s.pairs, r.pairs), check=verify)


def _same_ends(r: Relation, s: Relation):
    if r.dom != s.dom or r.cod != s.cod:
        raise DomainMismatch("relations must share domain and codomain")


def leq(r: Relation, s: Relation) -> RelOrder:
    _same_ends(r, s)
    le = all(a <= b for a, b in zip(r.pairs, s.pairs))
    ge = all(b <= a for a, b in zip(r.pairs, s.pairs))
    if le and ge:
        return RelOrder.EQ
    if le:
        return RelOrder.LE
    if ge:
        return RelOrder.GE
    return RelOrder.INCOMPARABLE


def is_le(r: Relation, s: Relation) -> bool:
    return leq(r, s) in (RelOrder.LE, RelOrder.EQ)


def meet(r: Relation, s: Relation) -> Relation:
    _same_ends(r, s)
    return Relation(r.dom, r.cod, [a & b for a, b in zip(r.pairs, s.pairs)], check=False)


def is_map(r: Relation):
    """The morphism whose graph is ``r``, or ``None``."""
    maps = []
    for p, n in zip(r.pairs, r.dom.sorts):
        if len(p) != n:
            return None
        m = [None] * n
        for x, y in p:
            if m[x] is not None:
                return None
            m[x] = y
        if any(v is None for v in m):
            return None
        maps.append(m)
    # a total single-valued subalgebra of the product is a homomorphism
    return Morphism(r.dom, r.cod, maps, check=False)


def kernel_pair(p: Morphism) -> Relation:
    return Relation(p.dom, p.dom, kernel_pair_pairs(p), check=False)


def check_relation_lemma(p: Morphism) -> dict:
    """``p°p`` is the kernel pair of ``p``; ``pp° = 1`` iff ``p`` is surjective."""
    g = graph(p)
    kp = compose(opposite(g), g, verify=False)
    pp = compose(g, opposite(g), verify=False)
    kernel_pair_ok = kp.pairs == kernel_pair_pairs(p)
    regular_epi_iff = (pp == Relation.diagonal(p.cod)) == p.is_surjective()
    return {"kernel_pair_ok": kernel_pair_ok, "regular_epi_iff": regular_epi_iff}


# -- enumeration ------------------------------------------------------------------

FILTERS = ("any", "reflexive", "equivalence")


def _raise_cap(found, cap):
    if cap is not None and len(found) > cap:
        raise CapExceeded(f"more than {cap} relations", partial=found[:cap])


def _bare_relations(x: FinObject, flt: str, cap):
    """Relations on a set or pointed set: plain subsets of ``X x X``."""
    n = x.sorts[0]
    allp = list(itertools.product(range(n), repeat=2))
    fixed = set()
    if flt == "reflexive":
        fixed = {(i, i) for i in range(n)}
    elif x.pointed:
        fixed = {(0, 0)}
    free = [p for p in allp if p not in fixed]
    out = []
    for k in range(len(free) + 1):
        for combo in itertools.combinations(free, k):
            out.append(Relation(x, x, [fixed.union(combo)], check=False))
            if cap is not None and len(out) > cap:
                _raise_cap(out, cap)
    return out


def _partition_labels(n):
    """Restricted growth strings of length ``n``."""
    def rec(prefix, top):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for c in range(top + 2):
            prefix.append(c)
            yield from rec(prefix, max(top, c))
            prefix.pop()

    if n == 0:
        yield ()
        return
    yield from rec([0], 0)


def congruence_enumerate(x: FinObject):
    """All congruences of ``x`` as per-sort class labellings.

    Every congruence is a join of principal ones, so a breadth-first search
    over joins with principal congruences reaches all of them.
    """
    if not x.signature.ops:
        return [(lab,) for lab in _partition_labels(x.sorts[0])]
    principal = []
    for s, n in enumerate(x.sorts):
        for a, b in itertools.combinations(range(n), 2):
            pairs = [[] for _ in x.sorts]
            pairs[s].append((a, b))
            principal.append(congruence_labels(x, pairs))
    principal = sorted(set(principal))
    bottom = tuple(tuple(range(n)) for n in x.sorts)
    found = {bottom}
    queue = [bottom]
    while queue:
        cur = queue.pop()
        for pc in principal:
            pairs = [[(i, j) for i, j in enumerate(l1) if i != j] for l1 in _reps_pairs(cur)]
            for s, lab in enumerate(pc):
                pairs[s].extend(_class_pairs(lab))
            joined = congruence_labels(x, pairs)
            if joined not in found:
                found.add(joined)
                queue.append(joined)
    return sorted(found)


def _class_pairs(lab):
    first = {}
    out = []
    for i, c in enumerate(lab):
        if c in first:
            out.append((first[c], i))
        else:
            first[c] = i
    return out


def _reps_pairs(labels):
    # per sort, map each element to the least element of its class
    out = []
    for lab in labels:
        first = {}
        out.append([first.setdefault(c, i) for i, c in enumerate(lab)])
    return out


def relation_enumerate(x: FinObject, flt: str = "any", cap=None):
    """All relations on ``x`` passing ``flt``, in canonical order.

    Canonical order is by total number of pairs, then lexicographic on the
    sorted pair lists.  Raises :class:`CapExceeded` (with the partial list)
    past ``cap``.
    """
    if flt not in FILTERS:
        raise ValueError(f"unknown filter {flt!r}")
    if flt == "equivalence":
        rels = [Relation(x, x, labels_to_pairs(lab), check=False) for lab in congruence_enumerate(x)]
    elif not x.signature.ops:
        rels = _bare_relations(x, flt, cap)
    else:
        prod, _, _ = product(x, x)
        base = None
        if flt == "reflexive":
            base = [[i * n + i for i in range(n)] for n in x.sorts]
        try:
            subs = enumerate_subalgebras(prod, base=base, cap=cap)
        except CapExceeded as exc:
            raise CapExceeded(str(exc), partial=[_decode(x, s) for s in exc.partial]) from None
        rels = [_decode(x, s) for s in subs]
    rels.sort(key=Relation.sort_key)
    _raise_cap(rels, cap)
    return rels


def _decode(x: FinObject, subsets):
    return Relation(x, x, [{divmod(e, n) for e in sub} for sub, n in zip(subsets, x.sorts)],
                    check=False)


def lemma_counts_for_set_maps(n: int, m: int, pointed=False, chunk=1 << 20):
    """Run the relation lemma over every map ``n -> m`` of (pointed) sets at once.

    Relations are boolean matrices with bitset rows, so ``p°p`` and ``pp°``
    are boolean matrix products evaluated bit-parallel.  Returns
    ``(maps, kernel_pair_failures, regular_epi_failures)``; maps run in
    lexicographic order and, when pointed, fix ``0``.
    """
    import numpy as np

    free = n - 1 if pointed else n
    if n == 0:
        # the empty map: p°p and pp° are empty, which is the diagonal iff m == 0
        return 1, 0, 0
    if m == 0 or free < 0:
        return 0, 0, 0
    total = m ** free
    kp_fail = re_fail = 0
    full = (1 << m) - 1
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        maps = np.zeros((len(idx), n), dtype=np.int64)
        rest = idx.copy()
        for col in range(n - 1, n - 1 - free, -1):
            maps[:, col] = rest % m
            rest //= m
        rows = np.left_shift(1, maps).astype(np.uint16)  # graph of p, row x = {p(x)}
        cols = np.zeros((len(idx), m), dtype=np.uint16)  # graph of p°, row y = p^-1(y)
        for x in range(n):
            cols |= ((maps[:, x, None] == np.arange(m)).astype(np.uint16) << x)
        # p°p: x ~ z iff some y has x p y and z p y
        kp = (rows[:, :, None] & rows[:, None, :]) != 0
        pullback = maps[:, :, None] == maps[:, None, :]
        kp_fail += int((kp != pullback).reshape(len(idx), -1).any(axis=1).sum())
        # pp°: y ~ y' iff some x has x p y and x p y'
        pp = (cols[:, :, None] & cols[:, None, :]) != 0
        is_diag = (pp == np.eye(m, dtype=bool)).reshape(len(idx), -1).all(axis=1)
        surjective = np.bitwise_or.reduce(rows, axis=1) == full
        re_fail += int((is_diag != surjective).sum())
    return total, kp_fail, re_fail


def congruence(x: FinObject, generating_pairs) -> Relation:
    """The smallest congruence on ``x`` containing the given per-sort pairs."""
    return Relation(x, x, labels_to_pairs(congruence_labels(x, generating_pairs)), check=False)
