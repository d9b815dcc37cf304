"""Generation of subalgebras and of homomorphisms from generators.

The engine exploits the shape of the shipped signatures: every sort with
operations is a finite group (so closing under the group operation by right
multiplication with generators suffices, inverses come for free), products are
bilinear, ``hom`` operations are homomorphisms and ``act`` operations act by
automorphisms.  Under those facts it is enough to apply the non-group
operations to generators only, adding any result that falls outside the
current span as a new generator.
"""
from __future__ import annotations

import itertools

from .core import FinObject, Morphism


class _Conflict(Exception):
    pass


def _span(sig, pointed, apply, zero, gens, key):
    """Close ``gens`` (one list per sort) under the signature.

    Elements are opaque; ``key`` maps an element to its identity for
    membership.  Two distinct elements sharing a key signal a conflict (used to
    detect non-functional candidate homomorphisms).  Returns one list per sort
    in discovery order, or ``None`` on conflict.
    """
    nsorts = sig.nsorts
    gens = [list(g) for g in gens]
    group_ops = [sig.group_op(s) for s in range(nsorts)]
    extra = [op for op in sig.ops if op.kind in ("ringmul", "hom", "act")]

    def span_sort(s):
        seen = {}
        elems = []

        def add(e):
            k = key(e)
            old = seen.get(k)
            if old is None:
                seen[k] = e
                elems.append(e)
            elif old != e:
                raise _Conflict

        if pointed:
            add(zero(s))
        mul = group_ops[s]
        if mul is None:
            for g in gens[s]:
                add(g)
            return elems, seen
        if not elems:
            add(zero(s))
        i = 0
        while i < len(elems):
            e = elems[i]
            for g in gens[s]:
                add(apply(mul, (e, g)))
            i += 1
        return elems, seen

    try:
        while True:
            spans = [span_sort(s) for s in range(nsorts)]
            grew = False
            for op in extra:
                seen = spans[op.out][1]
                if op.kind == "ringmul":
                    pool = itertools.product(list(gens[op.args[0]]), repeat=2)
                elif op.kind == "hom":
                    pool = ((x,) for x in list(gens[op.args[0]]))
                else:
                    pool = itertools.product(list(gens[op.args[0]]), list(gens[op.args[1]]))
                for args in pool:
                    r = apply(op, args)
                    old = seen.get(key(r))
                    if old is None:
                        gens[op.out].append(r)
                        seen[key(r)] = r
                        grew = True
                    elif old != r:
                        raise _Conflict
            if not grew:
                return [elems for elems, _ in spans]
    except _Conflict:
        return None


def _ident(x):
    return x


def generate(obj: FinObject, gens):
    """Per-sort element lists of the subalgebra generated by ``gens``.

    ``gens`` is one iterable per sort.  Elements appear in discovery order,
    which depends only on the structure and the order of ``gens``.
    """
    sig = obj.signature
    return _span(sig, obj.pointed, obj.apply, lambda s: 0, gens, _ident)


def subalgebra(obj: FinObject, gens):
    """Like :func:`generate` but returns per-sort frozensets."""
    return tuple(frozenset(e) for e in generate(obj, gens))


def _pair_apply(dom, cod):
    def apply(op, args):
        return (dom.apply(op, [a[0] for a in args]), cod.apply(op, [a[1] for a in args]))

    return apply


def extend_to_hom(dom: FinObject, cod: FinObject, gen_pairs):
    """Extend images of generators to a homomorphism, if one exists.

    ``gen_pairs`` holds, per sort, a list of ``(x, image)`` pairs.  The graph
    of the extension is the subalgebra of ``dom x cod`` generated by the pairs;
    it is a homomorphism exactly when it is single valued and total.  Returns
    the per-sort maps or ``None``.
    """
    sig = dom.signature
    spans = _span(sig, dom.pointed, _pair_apply(dom, cod), lambda s: (0, 0), gen_pairs,
                  lambda e: e[0])
    if spans is None:
        return None
    maps = []
    for s, elems in enumerate(spans):
        if len(elems) != dom.sorts[s]:
            return None
        m = [0] * dom.sorts[s]
        for a, b in elems:
            m[a] = b
        maps.append(tuple(m))
    return tuple(maps)


def generating_tuple(obj: FinObject):
    """A short generating list of ``(sort, element)`` pairs (greedy)."""
    gens = [[] for _ in obj.sorts]
    current = generate(obj, gens)
    chosen = []
    while any(len(c) < n for c, n in zip(current, obj.sorts)):
        for s, n in enumerate(obj.sorts):
            have = set(current[s])
            missing = [x for x in range(n) if x not in have]
            if missing:
                gens[s].append(missing[0])
                chosen.append((s, missing[0]))
                break
        current = generate(obj, gens)
    return chosen


def is_closed(obj: FinObject, subsets) -> bool:
    """Direct check that per-sort subsets are closed under every operation."""
    if obj.pointed and any(0 not in sub for sub in subsets):
        return False
    for op in obj.signature.ops:
        pools = [sorted(subsets[s]) for s in op.args]
        for args in itertools.product(*pools):
            if obj.apply(op, args) not in subsets[op.out]:
                return False
    return True


def hom_candidates(dom: FinObject, cod: FinObject):
    """All homomorphisms ``dom -> cod`` as map tuples, by backtracking over generators."""
    gens = generating_tuple(dom)
    out = []

    def rec(i, pairs):
        if i == len(gens):
            maps = extend_to_hom(dom, cod, pairs)
            if maps is not None:
                out.append(maps)
            return
        s, x = gens[i]
        for y in range(cod.sorts[s]):
            trial = [list(p) for p in pairs]
            trial[s].append((x, y))
            # prune: the partial assignment must already be consistent
            if i + 1 < len(gens) and _span(dom.signature, dom.pointed, _pair_apply(dom, cod),
                                           lambda s_: (0, 0), trial, lambda e: e[0]) is None:
                continue
            rec(i + 1, trial)

    if any(n == 0 for n in cod.sorts) and any(n > 0 for n in dom.sorts):
        return out
    rec(0, [[] for _ in dom.sorts])
    return out


def morphisms_from_maps(dom, cod, maps_list):
    return [Morphism(dom, cod, m, check=False) for m in maps_list]
