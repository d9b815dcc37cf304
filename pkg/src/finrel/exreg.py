"""The exact completion of a regular instance, as data.

An object is a pair ``(X, E)`` with ``E`` an equivalence relation on ``X``; a
morphism ``(X, E) -> (Y, F)`` is a relation ``r: X -> Y`` with ``F r E = r``,
``E <= r° r`` and ``r r° <= F``.  Relations inside the completion are the
relations ``rho`` on the base with ``F rho E = rho`` (saturated relations);
:func:`tabulate` turns one into a jointly monic span of ex-morphisms.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import LawViolation, NotEquivalence
from .finstruct.core import CategoryId, FinObject, Morphism
from .finstruct.limits import (
    as_xmod,
    enumerate_subalgebras,
    hom_enumerate,
    norm_reflection,
    pairs_to_labels,
    product,
    quotient_by_congruence,
    raw_quotient,
    subobject,
    zero_object,
)
from .finstruct.validate import check_axioms, make_object
from .propcheck import PropertyVerdict, Verdict, is_equivalence, is_symmetric
from .relcalc import Relation, compose, graph, is_le, meet, opposite, relation_enumerate


@dataclass(frozen=True)
class ExObject:
    base: FinObject
    eq: Relation

    def __post_init__(self):
        if self.eq.dom != self.base or self.eq.cod != self.base:
            raise NotEquivalence("eq must be a relation on base")
        if not is_equivalence(self.eq):
            raise NotEquivalence("eq is not an equivalence relation")

    def to_data(self) -> dict:
        sp = [[list(q) for q in p] for p in self.eq.sorted_pairs()]
        return {"base": self.base.canonical_key, "eq": sp[0] if len(sp) == 1 else sp}

    def __repr__(self):
        return f"ExObject({self.base!r}, {self.eq!r})"


def _laws(dom: ExObject, cod: ExObject, rel: Relation):
    """Names of the ex-morphism laws that ``rel`` fails."""
    failed = []
    if compose(cod.eq, compose(rel, dom.eq, verify=False), verify=False) != rel:
        failed.append("bimodule")
    if not is_le(dom.eq, compose(opposite(rel), rel, verify=False)):
        failed.append("entire")
    if not is_le(compose(rel, opposite(rel), verify=False), cod.eq):
        failed.append("deterministic")
    return failed


@dataclass(frozen=True)
class ExMorphism:
    dom: ExObject
    cod: ExObject
    rel: Relation

    def __post_init__(self):
        if self.rel.dom != self.dom.base or self.rel.cod != self.cod.base:
            raise LawViolation("relation does not run between the bases")
        failed = _laws(self.dom, self.cod, self.rel)
        if failed:
            raise LawViolation(f"ex-morphism laws fail: {', '.join(failed)}")


def embed(x: FinObject) -> ExObject:
    return ExObject(x, Relation.diagonal(x))


def embed_mor(f: Morphism) -> ExMorphism:
    return ExMorphism(embed(f.dom), embed(f.cod), graph(f))


def ex_identity(a: ExObject) -> ExMorphism:
    return ExMorphism(a, a, a.eq)


def ex_compose(g: ExMorphism, f: ExMorphism) -> ExMorphism:
    """``g`` after ``f``; the result is re-validated on construction."""
    if f.cod != g.dom:
        raise LawViolation("ex-morphisms are not composable")
    return ExMorphism(f.dom, g.cod, compose(g.rel, f.rel, verify=False))


def ex_is_iso(f: ExMorphism) -> bool:
    return not _laws(f.cod, f.dom, opposite(f.rel))


def ex_is_mono(f: ExMorphism) -> bool:
    """Monic in the completion: ``r° r <= E``."""
    return is_le(compose(opposite(f.rel), f.rel, verify=False), f.dom.eq)


def ex_is_regular_epi(f: ExMorphism) -> bool:
    return compose(f.rel, opposite(f.rel), verify=False) == f.cod.eq


def _relations_between(x: FinObject, y: FinObject):
    prod, _, _ = product(x, y)
    out = []
    for sub in enumerate_subalgebras(prod):
        out.append(Relation(x, y, [{divmod(e, m) for e in s} for s, m in zip(sub, y.sorts)],
                            check=False))
    out.sort(key=Relation.sort_key)
    return out


def ex_hom_enumerate(a: ExObject, b: ExObject) -> list:
    """All ex-morphisms ``a -> b`` in canonical relation order."""
    return [ExMorphism(a, b, r) for r in _relations_between(a.base, b.base)
            if not _laws(a, b, r)]


def ex_objects(x: FinObject) -> list:
    """Every object of the completion with base ``x``."""
    return [ExObject(x, e) for e in relation_enumerate(x, "equivalence")]


# -- reflection and comparison ----------------------------------------------------------

def _labels(a: ExObject):
    return pairs_to_labels(a.base, a.eq.pairs)


def reflect(a: ExObject):
    """Coequalizer of ``a.eq`` in the base, with the unit ``a -> embed(LQ)``.

    In Norm the two-sorted quotient is a crossed module, which is then
    reflected back into Norm by dividing out the kernel of its boundary.
    """
    if a.base.category is CategoryId.Norm:
        labels = _labels(a)
        raw = raw_quotient(as_xmod(a.base), labels)
        lq, refl = norm_reflection(raw)
        maps = [[r[v] for v in lab] for r, lab in zip(refl, labels)]
        q = Morphism(a.base, lq, maps, check=False)
    else:
        lq, q = quotient_by_congruence(a.base, a.eq)
    return lq, ExMorphism(a, embed(lq), graph(q))


def norm_to_xmod(a: ExObject) -> FinObject:
    """The crossed module ``N/E_N -> G/E_G`` with induced boundary and action."""
    if a.base.category is not CategoryId.Norm:
        raise LawViolation("norm_to_xmod needs an object over Norm")
    x = raw_quotient(as_xmod(a.base), _labels(a))
    check_axioms(x)
    return x


def norm_to_xmod_mor(f: ExMorphism) -> Morphism:
    """The crossed-module morphism induced by an ex-morphism over Norm."""
    src, dst = norm_to_xmod(f.dom), norm_to_xmod(f.cod)
    dl, cl = _labels(f.dom), _labels(f.cod)
    maps = []
    for s, pairs in enumerate(f.rel.pairs):
        m = [None] * src.sorts[s]
        for x, y in sorted(pairs):
            if m[dl[s][x]] is None:
                m[dl[s][x]] = cl[s][y]
        maps.append(m)
    return Morphism(src, dst, maps)


def semidirect_witness(x: FinObject) -> ExObject:
    """An object over Norm sent to (a copy of) the crossed module ``x``.

    The base is ``T x 1 <| T ⋊ G``; on ``T`` the relation is the diagonal and
    on ``T ⋊ G`` it is the kernel pair of ``(t, g) -> bd(t) g``.
    """
    x = as_xmod(x)
    nt, ng = x.sorts
    mt, mg = x.tables["mul_T"], x.tables["mul_G"]
    it, ig = x.tables["inv_T"], x.tables["inv_G"]
    act, bd = x.tables["act"], x.tables["bd"]
    elems = [(t, g) for t in range(nt) for g in range(ng)]
    idx = {e: i for i, e in enumerate(elems)}

    def mul(a, b):
        (t, g), (s, h) = a, b
        return (mt[t * nt + act[g * nt + s]], mg[g * ng + h])

    def inv(a):
        t, g = a
        gi = ig[g]
        return (act[gi * nt + it[t]], gi)

    n = len(elems)
    tables = {
        "mul_N": [[mt[a * nt + b] for b in range(nt)] for a in range(nt)],
        "inv_N": list(it),
        "mul_G": [[idx[mul(a, b)] for b in elems] for a in elems],
        "inv_G": [idx[inv(a)] for a in elems],
        "incl": [idx[(t, 0)] for t in range(nt)],
        "conj": [[mul(mul(g, (t, 0)), inv(g))[0] for t in range(nt)] for g in elems],
    }
    base = make_object(CategoryId.Norm, tables)
    image = [mg[bd[t] * ng + g] for t, g in elems]
    eg = {(i, j) for i in range(n) for j in range(n) if image[i] == image[j]}
    en = {(t, t) for t in range(nt)}
    return ExObject(base, Relation(base, base, [en, eg]))


# -- audits ------------------------------------------------------------------------------

def full_faithfulness(x: FinObject, y: FinObject) -> bool:
    """Ex-morphisms between embedded objects are exactly graphs of morphisms."""
    ex = {f.rel for f in ex_hom_enumerate(embed(x), embed(y))}
    return ex == {graph(f) for f in hom_enumerate(x, y)}


def _restrict_to_image(f: ExMorphism):
    image = [frozenset(y for _, y in p) for p in f.rel.pairs]
    handle = subobject(f.cod.base, image)
    pos = [{v: i for i, v in enumerate(sorted(s))} for s in image]
    rel = Relation(f.dom.base, handle.obj,
                   [{(x, q[y]) for x, y in p} for p, q in zip(f.rel.pairs, pos)], check=False)
    return ExMorphism(f.dom, embed(handle.obj), rel)


def subobject_closure(a: ExObject, x: FinObject) -> bool:
    """Every mono ``a -> embed(x)`` exhibits ``a`` as an embedded subobject."""
    for f in ex_hom_enumerate(a, embed(x)):
        if ex_is_mono(f) and not ex_is_iso(_restrict_to_image(f)):
            return False
    return True


def covering(a: ExObject) -> ExMorphism:
    """The regular epi ``embed(a.base) -> a`` splitting the idempotent ``a.eq``."""
    return ExMorphism(embed(a.base), a, a.eq)


def verify_exreg_characterization(sample, bases) -> dict:
    """Audit full faithfulness, subobject closure and covering on a sample."""
    bases = list(bases)
    ff = all(full_faithfulness(x, y) for x in bases for y in bases)
    closure = all(subobject_closure(a, x) for a in sample for x in bases
                  if a.base.category is x.category)
    cover = all(ex_is_regular_epi(covering(a)) for a in sample)
    return {"full_faithfulness": ff, "subobject_closure": closure, "covering": cover,
            "sample": len(sample), "bases": len(bases)}


def isomorphic_in_completion(a: ExObject, b: ExObject) -> bool:
    return any(ex_is_iso(f) for f in ex_hom_enumerate(a, b))


# -- relations inside the completion ---------------------------------------------------

def is_saturated(a: ExObject, rho: Relation) -> bool:
    return compose(a.eq, compose(rho, a.eq, verify=False), verify=False) == rho


def completion_relations(a: ExObject, reflexive=False) -> list:
    """Relations on ``a`` in the completion, as saturated relations on the base."""
    flt = "reflexive" if reflexive else "any"
    out = []
    for rho in relation_enumerate(a.base, flt):
        if is_saturated(a, rho) and (not reflexive or is_le(a.eq, rho)):
            out.append(rho)
    return out


def tabulate(a: ExObject, rho: Relation):
    """The span ``a <- R -> a`` of ex-morphisms tabulating ``rho``."""
    r = rho.obj
    d_pairs, c_pairs = [], []
    eq_pairs = []
    for s, elems in enumerate(rho.sorted_pairs()):
        ep = a.eq.pairs[s]
        d_pairs.append({(i, x2) for i, (x, _) in enumerate(elems)
                        for x2 in range(a.base.sorts[s]) if (x, x2) in ep})
        c_pairs.append({(i, y2) for i, (_, y) in enumerate(elems)
                        for y2 in range(a.base.sorts[s]) if (y, y2) in ep})
        eq_pairs.append({(i, j) for i, (x, y) in enumerate(elems) for j, (x2, y2) in enumerate(elems)
                         if (x, x2) in ep and (y, y2) in ep})
    top = ExObject(r, Relation(r, r, eq_pairs))
    d = ExMorphism(top, a, Relation(r, a.base, d_pairs))
    c = ExMorphism(top, a, Relation(r, a.base, c_pairs))
    return top, d, c


def jointly_monic(d: ExMorphism, c: ExMorphism) -> bool:
    both = meet(compose(opposite(d.rel), d.rel, verify=False),
                compose(opposite(c.rel), c.rel, verify=False))
    return is_le(both, d.dom.eq)


def ex_left_pseudoreflexive(a: ExObject, rho: Relation) -> bool:
    return is_le(meet(a.eq, compose(opposite(rho), rho, verify=False)), rho)


def ex_right_pseudoreflexive(a: ExObject, rho: Relation) -> bool:
    ro = opposite(rho)
    return is_le(meet(a.eq, compose(rho, ro, verify=False)), ro)


def ex_left_pseudosymmetric_by(a: ExObject, rho: Relation, f: ExMorphism) -> bool:
    """``rho f <= rho° f``."""
    return is_le(compose(rho, f.rel, verify=False), compose(opposite(rho), f.rel, verify=False))


def ex_probe_maps(a: ExObject, probes=None) -> list:
    """Maps into ``a`` used to test pseudosymmetry (the zero map when pointed)."""
    if a.base.pointed:
        z = zero_object(a.base.category)
        rel = Relation(z, a.base, [{(0, y) for x, y in p if x == 0} for p in a.eq.pairs])
        return [ExMorphism(embed(z), a, rel)]
    from .propcheck import default_probes

    out = []
    for p in probes if probes is not None else default_probes(a.base.category):
        out.extend(ex_hom_enumerate(embed(p), a))
    return out


def completion_maltsev(objects) -> PropertyVerdict:
    """Reflexive relations of the completion must be equivalences."""
    swept = []
    for a in objects:
        rels = completion_relations(a, reflexive=True)
        swept.append({"object": a.to_data(), "relations": len(rels)})
        for rho in rels:
            if not (is_symmetric(rho) and is_le(compose(rho, rho, verify=False), rho)):
                return PropertyVerdict(Verdict.REFUTED, {"object": a.to_data(), "relation": rho},
                                       {"objects": len(swept)}, swept)
    return PropertyVerdict(Verdict.CONFIRMED, None, {"objects": len(swept)}, swept)


def completion_protomodularity(objects, probes=None) -> PropertyVerdict:
    """Conditions (b) and (c) inside the completion, plus the pulled-back check.

    For each relation ``rho`` on ``a`` and the covering ``p: embed(X) -> a``,
    the relation ``S = p° rho p`` on ``X`` must be left pseudoreflexive
    whenever ``rho`` is.
    """
    swept = []
    first = None
    b_fail = c_fail = pullback_fail = 0
    for a in objects:
        maps = ex_probe_maps(a, probes)
        rels = completion_relations(a)
        swept.append({"object": a.to_data(), "relations": len(rels)})
        p = covering(a)
        base = embed(a.base)
        for rho in rels:
            lpr = ex_left_pseudoreflexive(a, rho)
            s = compose(opposite(p.rel), compose(rho, p.rel, verify=False), verify=False)
            if lpr and not ex_left_pseudoreflexive(base, s):
                pullback_fail += 1
            if not lpr:
                continue
            lps = any(ex_left_pseudosymmetric_by(a, rho, f) for f in maps)
            if not lps:
                continue
            fb = not is_symmetric(rho)
            fc = not ex_right_pseudoreflexive(a, rho)
            b_fail += fb
            c_fail += fc
            if (fb or fc) and first is None:
                first = (a, rho)
    details = {"b_refutations": b_fail, "c_refutations": c_fail,
               "bc_agree": (b_fail == 0) == (c_fail == 0), "pulled_back_failures": pullback_fail}
    bounds = {"objects": len(swept)}
    if first is not None:
        a, rho = first
        return PropertyVerdict(Verdict.REFUTED, {"object": a.to_data(), "relation": rho},
                               bounds, swept, details)
    return PropertyVerdict(Verdict.CONFIRMED, None, bounds, swept, details)


def completion_objects(bases) -> list:
    return [a for x in bases for a in ex_objects(x)]


def category_law_audit(objects) -> dict:
    """Associativity and identity laws of ex-composition over all composable data."""
    homs = {(i, j): ex_hom_enumerate(a, b)
            for (i, a), (j, b) in itertools.product(enumerate(objects), repeat=2)}
    n = len(objects)
    identity_ok = assoc_ok = True
    checked = 0
    for (i, j), fs in homs.items():
        for f in fs:
            if ex_compose(ex_identity(objects[j]), f).rel != f.rel:
                identity_ok = False
            if ex_compose(f, ex_identity(objects[i])).rel != f.rel:
                identity_ok = False
    for i, j, k, l in itertools.product(range(n), repeat=4):
        fs, gs, hs = homs[(i, j)], homs[(j, k)], homs[(k, l)]
        if not (fs and gs and hs):
            continue
        for g in gs:
            gf = [ex_compose(g, f) for f in fs]
            for h in hs:
                hg = ex_compose(h, g)
                for f, gf_ in zip(fs, gf):
                    checked += 1
                    if ex_compose(h, gf_).rel != ex_compose(hg, f).rel:
                        assoc_ok = False
    return {"identity": identity_ok, "associativity": assoc_ok, "triples": checked,
            "objects": n}


__all__ = [
    "ExObject", "ExMorphism", "embed", "embed_mor", "ex_identity", "ex_compose", "ex_is_iso",
    "ex_is_mono", "ex_is_regular_epi", "ex_hom_enumerate", "ex_objects", "reflect",
    "norm_to_xmod", "norm_to_xmod_mor", "semidirect_witness", "verify_exreg_characterization",
    "isomorphic_in_completion", "completion_relations", "tabulate", "jointly_monic",
    "completion_maltsev", "completion_protomodularity", "completion_objects",
    "category_law_audit",
]
