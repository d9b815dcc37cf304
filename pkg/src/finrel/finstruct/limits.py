"""Finite limits, images, quotients and enumeration inside one category instance."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from ..errors import CapExceeded, CategoryMismatch, DomainMismatch, NotEquivalence, NotExactInstance
from .closure import generate, hom_candidates
from .core import NORM_TO_XMOD, XMOD_TO_NORM, CategoryId, FinObject, Morphism


class Enumeration(list):
    """A list that remembers whether it was cut off at a cap."""

    def __init__(self, items=(), truncated=False):
        super().__init__(items)
        self.truncated = truncated


@dataclass(frozen=True, eq=False)
class SubobjectHandle:
    ambient: FinObject
    subsets: tuple
    obj: FinObject
    inclusion: Morphism

    def __eq__(self, other):
        return (isinstance(other, SubobjectHandle) and self.ambient == other.ambient
                and self.subsets == other.subsets)

    def __hash__(self):
        return hash(self.subsets)

    def is_whole(self):
        return all(len(s) == n for s, n in zip(self.subsets, self.ambient.sorts))

    def is_trivial(self):
        return all(len(s) <= 1 for s in self.subsets)

    def sort_key(self):
        return (sum(len(s) for s in self.subsets), tuple(tuple(sorted(s)) for s in self.subsets))

    def __repr__(self):
        return f"Subobject({[sorted(s) for s in self.subsets]} of {self.ambient!r})"


def _same_category(*objs):
    cats = {o.category for o in objs}
    if len(cats) != 1:
        raise CategoryMismatch(", ".join(sorted(c.value for c in cats)))


def induced_object(obj: FinObject, elems, category=None, name=None) -> FinObject:
    """The algebra on per-sort element lists ``elems`` (assumed closed).

    New labels follow the order of ``elems``.
    """
    pos = [{e: i for i, e in enumerate(es)} for es in elems]
    tables = {}
    for op in obj.signature.ops:
        if len(op.args) == 1:
            tables[op.name] = tuple(pos[op.out][obj.apply(op, (a,))] for a in elems[op.args[0]])
        else:
            s, t = op.args
            tables[op.name] = tuple(pos[op.out][obj.apply(op, (a, b))]
                                    for a in elems[s] for b in elems[t])
    return FinObject(category or obj.category, [len(e) for e in elems], tables, name=name)


def subobject(obj: FinObject, subsets) -> SubobjectHandle:
    """Wrap per-sort closed subsets as a subobject (labels in increasing order)."""
    subsets = tuple(frozenset(s) for s in subsets)
    elems = [sorted(s) for s in subsets]
    sub = induced_object(obj, elems)
    inc = Morphism(sub, obj, elems, check=False)
    return SubobjectHandle(obj, subsets, sub, inc)


def _pair_object(a: FinObject, b: FinObject, pairs):
    """Algebra on per-sort sorted lists of pairs with componentwise operations."""
    pos = [{p: i for i, p in enumerate(ps)} for ps in pairs]
    tables = {}
    for op in a.signature.ops:
        if len(op.args) == 1:
            (s,) = op.args
            tables[op.name] = tuple(pos[op.out][(a.apply(op, (x,)), b.apply(op, (y,)))]
                                    for x, y in pairs[s])
        else:
            s, t = op.args
            tables[op.name] = tuple(
                pos[op.out][(a.apply(op, (x1, x2)), b.apply(op, (y1, y2)))]
                for x1, y1 in pairs[s] for x2, y2 in pairs[t])
    obj = FinObject(a.category, [len(p) for p in pairs], tables)
    p1 = Morphism(obj, a, [[x for x, _ in ps] for ps in pairs], check=False)
    p2 = Morphism(obj, b, [[y for _, y in ps] for ps in pairs], check=False)
    return obj, p1, p2


@lru_cache(maxsize=512)
def product(a: FinObject, b: FinObject):
    """Binary product with its projections; pair ``(x, y)`` gets label ``x*|b|+y``."""
    _same_category(a, b)
    pairs = [[(x, y) for x in range(n) for y in range(m)] for n, m in zip(a.sorts, b.sorts)]
    return _pair_object(a, b, pairs)


def pullback_pairs(f: Morphism, g: Morphism):
    if f.cod != g.cod:
        raise DomainMismatch("pullback needs a common codomain")
    return [[(x, y) for x in range(len(fm)) for y in range(len(gm)) if fm[x] == gm[y]]
            for fm, gm in zip(f.maps, g.maps)]


def pullback(f: Morphism, g: Morphism):
    """Pullback of ``f: A -> C`` and ``g: B -> C`` with its two projections."""
    _same_category(f.dom, g.dom)
    return _pair_object(f.dom, g.dom, pullback_pairs(f, g))


def equalizer(f: Morphism, g: Morphism) -> SubobjectHandle:
    if f.dom != g.dom or f.cod != g.cod:
        raise DomainMismatch("equalizer needs parallel morphisms")
    subsets = [frozenset(x for x in range(len(fm)) if fm[x] == gm[x])
               for fm, gm in zip(f.maps, g.maps)]
    return subobject(f.dom, subsets)


def kernel(f: Morphism) -> SubobjectHandle:
    if not f.dom.pointed:
        raise CategoryMismatch(f"{f.dom.category} has no zero object")
    return subobject(f.dom, [frozenset(x for x, v in enumerate(m) if v == 0) for m in f.maps])


def image_factorize(f: Morphism):
    """``f = m @ e`` with ``e`` surjective and ``m`` injective."""
    handle = subobject(f.cod, f.image())
    pos = [{y: i for i, y in enumerate(sorted(s))} for s in handle.subsets]
    e = Morphism(f.dom, handle.obj, [[p[v] for v in m] for p, m in zip(pos, f.maps)], check=False)
    return e, handle.inclusion


# -- congruences and quotients ------------------------------------------------

def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def congruence_labels(obj: FinObject, pairs):
    """Smallest congruence containing the given per-sort pairs.

    Returns, per sort, a tuple sending each element to its class index; classes
    are numbered by their least element, so the class of ``0`` is ``0``.
    """
    sig = obj.signature
    parent = [list(range(n)) for n in obj.sorts]
    work = []

    def union(s, x, y):
        rx, ry = _find(parent[s], x), _find(parent[s], y)
        if rx != ry:
            if ry < rx:
                rx, ry = ry, rx
            parent[s][ry] = rx
            work.append((s, x, y))

    for s, ps in enumerate(pairs):
        for x, y in ps:
            union(s, x, y)
    # closing the generated equivalence under basic translations yields a congruence
    while work:
        s, x, y = work.pop()
        for op in sig.ops:
            for i, srt in enumerate(op.args):
                if srt != s:
                    continue
                if len(op.args) == 1:
                    union(op.out, obj.apply(op, (x,)), obj.apply(op, (y,)))
                    continue
                other = op.args[1 - i]
                for z in range(obj.sorts[other]):
                    ax = (x, z) if i == 0 else (z, x)
                    ay = (y, z) if i == 0 else (z, y)
                    union(op.out, obj.apply(op, ax), obj.apply(op, ay))
    labels = []
    for s, n in enumerate(obj.sorts):
        roots, lab = {}, []
        for x in range(n):
            r = _find(parent[s], x)
            lab.append(roots.setdefault(r, len(roots)))
        labels.append(tuple(lab))
    return tuple(labels)


def labels_to_pairs(labels):
    out = []
    for lab in labels:
        classes = {}
        for x, c in enumerate(lab):
            classes.setdefault(c, []).append(x)
        out.append(frozenset((x, y) for cls in classes.values() for x in cls for y in cls))
    return tuple(out)


def pairs_to_labels(obj: FinObject, pairs):
    """Class labels of per-sort equivalence pair-sets; raises if not an equivalence."""
    labels = []
    for s, (ps, n) in enumerate(zip(pairs, obj.sorts)):
        ps = frozenset(ps)
        lab = [-1] * n
        count = 0
        for x in range(n):
            if (x, x) not in ps:
                raise NotEquivalence(f"not reflexive at {x} (sort {s})")
            if lab[x] < 0:
                cls = [y for y in range(n) if (x, y) in ps]
                for y in cls:
                    if lab[y] >= 0:
                        raise NotEquivalence(f"not transitive at {(x, y)} (sort {s})")
                    lab[y] = count
                count += 1
        if labels_to_pairs([lab])[0] != ps:
            raise NotEquivalence(f"not symmetric/transitive (sort {s})")
        labels.append(tuple(lab))
    return tuple(labels)


def raw_quotient(obj: FinObject, labels, category=None):
    """Quotient tables induced on class labels (labels must be a congruence)."""
    reps = []
    for lab in labels:
        r = {}
        for x, c in enumerate(lab):
            r.setdefault(c, x)
        reps.append([r[c] for c in range(len(r))])
    tables = {}
    for op in obj.signature.ops:
        lab_out = labels[op.out]
        if len(op.args) == 1:
            tables[op.name] = tuple(lab_out[obj.apply(op, (a,))] for a in reps[op.args[0]])
        else:
            s, t = op.args
            tables[op.name] = tuple(lab_out[obj.apply(op, (a, b))] for a in reps[s] for b in reps[t])
    return FinObject(category or obj.category, [len(r) for r in reps], tables)


def as_xmod(obj: FinObject) -> FinObject:
    """View a Norm object (or Norm-shaped tables) as a crossed module."""
    if obj.category is CategoryId.XMod:
        return obj
    tables = {NORM_TO_XMOD[k]: v for k, v in obj.tables.items()}
    return FinObject(CategoryId.XMod, obj.sorts, tables, name=obj.name)


def as_norm(obj: FinObject) -> FinObject:
    """View a crossed module with injective boundary as a Norm object."""
    if obj.category is CategoryId.Norm:
        return obj
    bd = obj.tables["bd"]
    if len(set(bd)) != len(bd):
        raise NotExactInstance("boundary is not injective; not an object of Norm")
    tables = {XMOD_TO_NORM[k]: v for k, v in obj.tables.items()}
    return FinObject(CategoryId.Norm, obj.sorts, tables, name=obj.name)


def norm_reflection(x: FinObject):
    """Reflect a crossed module into Norm: divide T by the kernel of the boundary.

    Returns ``(norm_object, maps)`` where ``maps`` is the per-sort quotient map.
    """
    x = as_xmod(x)
    bd = x.tables["bd"]
    ker = [t for t, g in enumerate(bd) if g == 0]
    labels = congruence_labels(x, [[(t, 0) for t in ker], []])
    q = raw_quotient(x, labels)
    return as_norm(q), labels


def _check_congruence(obj, pairs):
    labels = pairs_to_labels(obj, pairs)
    if congruence_labels(obj, [sorted(p) for p in pairs]) != labels:
        raise NotEquivalence("relation is not compatible with the operations")
    return labels


def _pairs_of(rel):
    return tuple(frozenset(p) for p in getattr(rel, "pairs", rel))


def quotient_by_congruence(obj: FinObject, rel):
    """Coequalizer of the projections of an effective equivalence relation.

    ``rel`` is a relation (anything with per-sort ``pairs``) or raw per-sort pair
    sets.  In Norm only effective relations have their quotient inside Norm;
    other ones raise :class:`NotExactInstance`.
    """
    labels = _check_congruence(obj, _pairs_of(rel))
    if obj.category is CategoryId.Norm:
        q = raw_quotient(as_xmod(obj), labels)
        q = as_norm(q)  # raises NotExactInstance when the boundary is not injective
    else:
        q = raw_quotient(obj, labels)
    return q, Morphism(obj, q, labels, check=False)


def cokernel(f: Morphism):
    """Cokernel ``(Q, q)``; in Norm it is the crossed-module cokernel reflected into Norm."""
    b = f.cod
    if not b.pointed:
        raise CategoryMismatch(f"{b.category} has no zero object")
    pairs = [[(v, 0) for v in set(m)] for m in f.maps]
    labels = congruence_labels(b, pairs)
    if b.category is CategoryId.Norm:
        raw = raw_quotient(as_xmod(b), labels)
        q, refl = norm_reflection(raw)
        maps = [[r[l] for l in lab] for r, lab in zip(refl, labels)]
        return q, Morphism(b, q, maps, check=False)
    q = raw_quotient(b, labels)
    return q, Morphism(b, q, labels, check=False)


def kernel_pair_pairs(f: Morphism):
    return tuple(frozenset((x, y) for x in range(len(m)) for y in range(len(m)) if m[x] == m[y])
                 for m in f.maps)


# -- enumeration ----------------------------------------------------------------

def _subset_key(subsets):
    return (sum(len(s) for s in subsets), tuple(tuple(sorted(s)) for s in subsets))


def enumerate_subalgebras(obj: FinObject, base=None, cap=None):
    """All subalgebras containing ``base`` (per-sort seeds), canonically ordered.

    Order is by total size, then lexicographically on the sorted per-sort
    element lists.  Raises :class:`CapExceeded` carrying the sorted partial
    list if more than ``cap`` are found.
    """
    nsorts = obj.nsorts
    base = [list(b) for b in (base or [[] for _ in range(nsorts)])]
    start = generate(obj, base)
    start_key = tuple(frozenset(e) for e in start)
    found = {start_key: base}
    queue = [start_key]
    truncated = False
    i = 0
    while i < len(queue):
        cur = queue[i]
        i += 1
        gens = found[cur]
        for s in range(nsorts):
            for x in range(obj.sorts[s]):
                if x in cur[s]:
                    continue
                new_gens = [list(g) for g in gens]
                new_gens[s].append(x)
                key = tuple(frozenset(e) for e in generate(obj, new_gens))
                if key not in found:
                    found[key] = new_gens
                    queue.append(key)
                    if cap is not None and len(found) > cap:
                        truncated = True
                        break
            if truncated:
                break
        if truncated:
            break
    result = sorted(found, key=_subset_key)
    if truncated:
        raise CapExceeded(f"more than {cap} subalgebras", partial=result[:cap])
    return result


def subobject_enumerate(obj: FinObject, cap=None):
    """All subobjects of ``obj`` as handles, canonically ordered."""
    if not obj.signature.ops:
        n = obj.sorts[0]
        free = range(1, n) if obj.pointed else range(n)
        fixed = (0,) if obj.pointed else ()
        subsets = [frozenset(fixed + c) for k in range(len(free) + 1)
                   for c in itertools.combinations(free, k)]
        subsets.sort(key=lambda s: _subset_key((s,)))
        if cap is not None and len(subsets) > cap:
            raise CapExceeded(f"more than {cap} subobjects",
                              partial=[subobject(obj, (s,)) for s in subsets[:cap]])
        return [subobject(obj, (s,)) for s in subsets]
    try:
        subs = enumerate_subalgebras(obj, cap=cap)
    except CapExceeded as exc:
        raise CapExceeded(str(exc), partial=[subobject(obj, s) for s in exc.partial]) from None
    return [subobject(obj, s) for s in subs]


@lru_cache(maxsize=4096)
def _all_hom_maps(dom: FinObject, cod: FinObject):
    return tuple(sorted(hom_candidates(dom, cod)))


def hom_enumerate(dom: FinObject, cod: FinObject, cap=None) -> Enumeration:
    """All homomorphisms ``dom -> cod`` in lexicographic order of their maps."""
    _same_category(dom, cod)
    if not dom.signature.ops:
        n, m = dom.sorts[0], cod.sorts[0]
        if dom.pointed:
            tails = itertools.product(range(m), repeat=n - 1)
            maps_iter = (((0,) + t,) for t in tails)
        else:
            maps_iter = ((t,) for t in itertools.product(range(m), repeat=n))
        items = list(itertools.islice(maps_iter, None if cap is None else cap + 1))
        truncated = cap is not None and len(items) > cap
        items = items[:cap] if truncated else items
        return Enumeration([Morphism(dom, cod, mp, check=False) for mp in items], truncated)
    maps = _all_hom_maps(dom, cod)
    truncated = cap is not None and len(maps) > cap
    if truncated:
        maps = maps[:cap]
    return Enumeration([Morphism(dom, cod, mp, check=False) for mp in maps], truncated)


@lru_cache(maxsize=None)
def zero_object(category) -> FinObject:
    """The one-element object of a pointed instance."""
    category = CategoryId(category)
    if not category.pointed:
        raise CategoryMismatch(f"{category} has no zero object")
    sig = category.signature
    return FinObject(category, [1] * sig.nsorts, {op.name: (0,) for op in sig.ops})
