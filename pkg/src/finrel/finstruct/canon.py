"""Canonical forms: an isomorphism-invariant relabelling of an algebra.

Candidate labellings come from minimal generating tuples.  Each ordered tuple
of generators determines a labelling (point first, then discovery order of the
closure), and isomorphisms carry generating tuples to generating tuples, so the
lexicographically least table over all minimal tuples is an isomorphism
invariant.  Only tuples whose every entry lies outside the span of the earlier
ones can be minimal, which prunes the search hard.
"""
from __future__ import annotations

import hashlib
import json

from .closure import generate
from .core import FinObject, Morphism


def _encode(obj: FinObject, labelling):
    pos = []
    for order in labelling:
        p = [0] * len(order)
        for new, old in enumerate(order):
            p[old] = new
        pos.append(p)
    out = []
    for op in obj.signature.ops:
        if len(op.args) == 1:
            (s,) = op.args
            out.extend(pos[op.out][obj.apply(op, (old,))] for old in labelling[s])
        else:
            s, t = op.args
            for a in labelling[s]:
                out.extend(pos[op.out][obj.apply(op, (a, b))] for b in labelling[t])
    return tuple(out)


def minimal_generating_tuples(obj: FinObject):
    """All ordered generating tuples of minimum length, as lists of (sort, elem)."""
    sorts = obj.sorts
    cands = [(s, x) for s, n in enumerate(sorts) for x in range(n)
             if not (obj.pointed and x == 0)]

    def span_of(tup):
        gens = [[] for _ in sorts]
        for s, x in tup:
            gens[s].append(x)
        return generate(obj, gens)

    def full(spans):
        return all(len(e) == n for e, n in zip(spans, sorts))

    k = 0
    while True:
        found = []

        def rec(prefix, spans):
            if len(prefix) == k:
                if full(spans):
                    found.append((list(prefix), spans))
                return
            have = [set(e) for e in spans]
            for s, x in cands:
                if x in have[s]:
                    continue
                prefix.append((s, x))
                rec(prefix, span_of(prefix))
                prefix.pop()

        rec([], span_of([]))
        if found:
            return found
        k += 1


def canonical_labelling(obj: FinObject):
    """Return (encoding, labelling) with the least encoding."""
    if not obj.signature.ops:
        return (), [list(range(n)) for n in obj.sorts]
    best = None
    for _, spans in minimal_generating_tuples(obj):
        enc = _encode(obj, spans)
        if best is None or enc < best[0]:
            best = (enc, spans)
    return best


def canonical_form(obj: FinObject):
    enc, _ = canonical_labelling(obj)
    return (obj.category.value, obj.sorts, enc)


def key_of_form(form) -> str:
    payload = json.dumps([form[0], list(form[1]), list(form[2])], separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()[:20]


def _decode(obj: FinObject, enc):
    tables, i = {}, 0
    for op in obj.signature.ops:
        size = 1
        for s in op.args:
            size *= obj.sorts[s]
        tables[op.name] = enc[i:i + size]
        i += size
    return tables


def canonical_object(obj: FinObject) -> FinObject:
    enc, _ = canonical_labelling(obj)
    return FinObject(obj.category, obj.sorts, _decode(obj, enc), name=obj.name)


def canonical_iso(obj: FinObject) -> Morphism:
    """The isomorphism from ``obj`` onto its canonical object."""
    enc, labelling = canonical_labelling(obj)
    target = FinObject(obj.category, obj.sorts, _decode(obj, enc), name=obj.name)
    maps = []
    for order in labelling:
        m = [0] * len(order)
        for new, old in enumerate(order):
            m[old] = new
        maps.append(m)
    return Morphism(obj, target, maps, check=False)


def is_isomorphic(a: FinObject, b: FinObject) -> bool:
    return a.category is b.category and a.sorts == b.sorts and a.canonical_form == b.canonical_form


def relabel(obj: FinObject, perms) -> FinObject:
    """Transport ``obj`` along per-sort permutations (``perms[s][old] = new``)."""
    inv = []
    for p in perms:
        q = [0] * len(p)
        for old, new in enumerate(p):
            q[new] = old
        inv.append(q)
    tables = {}
    for op in obj.signature.ops:
        if len(op.args) == 1:
            (s,) = op.args
            tables[op.name] = tuple(perms[op.out][obj.apply(op, (inv[s][x],))]
                                    for x in range(obj.sorts[s]))
        else:
            s, t = op.args
            tables[op.name] = tuple(perms[op.out][obj.apply(op, (inv[s][x], inv[t][y]))]
                                    for x in range(obj.sorts[s]) for y in range(obj.sorts[t]))
    return FinObject(obj.category, obj.sorts, tables, name=obj.name)
