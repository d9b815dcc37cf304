"""Torsion theories on finite instances: radicals, reflectors and their checks.

Each instance is determined by its radical ``T``; the reflector is the
cokernel of the radical inclusion, so ``0 -> TC -> C -> LC -> 0`` is exact by
construction and the checks below audit that claim rather than assume it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .errors import CategoryMismatch, NotBournNormal, NotMono, PreconditionFailed
from .finstruct.core import CategoryId, FinObject, Morphism
from .finstruct.limits import (
    SubobjectHandle,
    cokernel,
    hom_enumerate,
    image_factorize,
    kernel,
    pullback,
    quotient_by_congruence,
    subobject,
    subobject_enumerate,
)
from .propcheck import PropertyVerdict, Verdict, is_bourn_normal
from .relcalc import Relation


@dataclass(frozen=True)
class TorsionInstance:
    """A torsion theory given by its radical; ``name`` is e.g. ``PPrimaryAb(2)``."""

    name: str
    ambient: CategoryId
    radical_subsets: object  # FinObject -> per-sort subsets

    def __repr__(self):
        return self.name

    def radical(self, c: FinObject) -> SubobjectHandle:
        self.check(c)
        return _radical(self, c)

    def reflector(self, c: FinObject):
        self.check(c)
        return _reflector(self, c)

    def check(self, c: FinObject):
        if c.category is not self.ambient:
            raise CategoryMismatch(f"{self.name} lives in {self.ambient}, not {c.category}")

    def is_torsion(self, c: FinObject) -> bool:
        return self.radical(c).is_whole()

    def is_torsion_free(self, c: FinObject) -> bool:
        return self.radical(c).is_trivial()


@lru_cache(maxsize=4096)
def _radical(inst, c):
    return subobject(c, inst.radical_subsets(c))


@lru_cache(maxsize=4096)
def _reflector(inst, c):
    return cokernel(_radical(inst, c).inclusion)


def _p_power(n, p):
    while n % p == 0:
        n //= p
    return n == 1


def _p_primary(p):
    def radical(c):
        return [frozenset(x for x in range(c.sorts[0]) if _p_power(c.elem_order(x), p))]

    return radical


def nilradical_subset(c: FinObject) -> frozenset:
    """Elements some power of which vanishes, by iterated squaring with period detection."""
    out = set()
    for x in range(c.sorts[0]):
        seen = set()
        y = x
        while y != 0 and y not in seen:
            seen.add(y)
            y = c.mul(y, y)
        if y == 0:
            out.add(x)
    return frozenset(out)


def _nil(c):
    return [nilradical_subset(c)]


def _boundary_kernel(c):
    bd = c.tables["bd"]
    return [frozenset(t for t, g in enumerate(bd) if g == 0), frozenset({0})]


@lru_cache(maxsize=None)
def p_primary_ab(p: int) -> TorsionInstance:
    return TorsionInstance(f"PPrimaryAb({p})", CategoryId.FinAb, _p_primary(p))


NIL_RED = TorsionInstance("NilRedCRng", CategoryId.FinCRng, _nil)
AB_NORM_XMOD = TorsionInstance("AbNormXMod", CategoryId.XMod, _boundary_kernel)


def instance(name: str) -> TorsionInstance:
    """Look an instance up by name: ``PPrimaryAb(p)``, ``NilRedCRng`` or ``AbNormXMod``."""
    if name == NIL_RED.name:
        return NIL_RED
    if name == AB_NORM_XMOD.name:
        return AB_NORM_XMOD
    if name.startswith("PPrimaryAb(") and name.endswith(")"):
        p = int(name[len("PPrimaryAb("):-1])
        if p < 2 or any(p % q == 0 for q in range(2, p)):
            raise ValueError(f"{p} is not prime")
        return p_primary_ab(p)
    raise ValueError(f"unknown torsion instance {name!r}")


def torsion_part(inst: TorsionInstance, c: FinObject) -> SubobjectHandle:
    return inst.radical(c)


def reflect(inst: TorsionInstance, c: FinObject):
    """``(LC, unit)`` with ``unit: C -> LC`` the quotient by the torsion part."""
    return inst.reflector(c)


def factor_through(q: Morphism, h: Morphism):
    """The map ``u`` with ``u q = h`` for surjective ``q``, or ``None`` if ``h`` is not constant on fibres."""
    maps = []
    for qm, hm, n in zip(q.maps, h.maps, q.cod.sorts):
        m = [None] * n
        for x, c in enumerate(qm):
            if m[c] is None:
                m[c] = hm[x]
            elif m[c] != hm[x]:
                return None
        if any(v is None for v in m):
            return None
        maps.append(m)
    return Morphism(q.cod, h.cod, maps, check=False)


def reflect_mor(inst: TorsionInstance, h: Morphism) -> Morphism:
    """``L(h): LC -> LC'``, the unique map commuting with the units."""
    _, u = reflect(inst, h.dom)
    _, u2 = reflect(inst, h.cod)
    lh = factor_through(u, u2 @ h)
    if lh is None:
        raise PreconditionFailed("morphism does not descend to the reflections")
    return lh


def verify_ses(inst: TorsionInstance, c: FinObject, torsion_sample=()) -> bool:
    """Exactness of ``TC -> C -> LC`` plus orthogonality against torsion probes."""
    tc = torsion_part(inst, c)
    lc, unit = reflect(inst, c)
    if kernel(unit).subsets != tc.subsets or not unit.is_surjective():
        return False
    if not inst.is_torsion_free(lc):
        return False
    probes = [tc.obj, *torsion_sample]
    return all(f.is_zero() for t in probes for f in hom_enumerate(t, lc))


def check_semi_left_exact(inst: TorsionInstance, q: FinObject, f: Morphism) -> bool:
    """``L`` inverts the comparison from the pullback of the unit along ``f``.

    With ``P = Q x_{LQ} Y`` and ``p2: P -> Y``, the induced ``LP -> Y`` must be an
    isomorphism commuting with the projections.
    """
    lq, unit = reflect(inst, q)
    if f.cod != lq:
        raise PreconditionFailed("f must land in the reflection of Q")
    if not inst.is_torsion_free(f.dom):
        raise PreconditionFailed("domain of f has torsion")
    _, _, p2 = pullback(unit, f)
    _, up = reflect(inst, p2.dom)
    induced = factor_through(up, p2)
    return induced is not None and induced.is_iso()


def _hereditary_sweeps(inst, sample):
    sub_fail = mono_fail = None
    subs_checked = monos_checked = 0
    for c in sample:
        handles = subobject_enumerate(c)
        torsion = inst.is_torsion(c)
        for h in handles:
            if torsion:
                subs_checked += 1
                if sub_fail is None and not inst.is_torsion(h.obj):
                    sub_fail = (c, h)
            monos_checked += 1
            if mono_fail is None and not reflect_mor(inst, h.inclusion).is_injective():
                mono_fail = (c, h)
    return sub_fail, mono_fail, subs_checked, monos_checked


def is_hereditary(inst: TorsionInstance, sample) -> PropertyVerdict:
    """Subobjects of torsion objects are torsion, and ``L`` preserves monos.

    Monos are swept up to isomorphism as subobject inclusions.  Both verdicts
    are recorded in ``details`` and must agree.
    """
    sample = list(sample)
    sub_fail, mono_fail, ns, nm = _hereditary_sweeps(inst, sample)
    details = {
        "subobject_closure": Verdict.REFUTED.value if sub_fail else Verdict.CONFIRMED.value,
        "preserves_monos": Verdict.REFUTED.value if mono_fail else Verdict.CONFIRMED.value,
        "agree": (sub_fail is None) == (mono_fail is None),
    }
    bounds = {"objects": len(sample), "subobjects": ns, "monos": nm}
    fail = sub_fail or mono_fail
    swept = [c.canonical_key for c in sample]
    if fail:
        c, h = fail
        witness = {"object": c.canonical_key, "subobject": [sorted(s) for s in h.subsets]}
        return PropertyVerdict(Verdict.REFUTED, witness, bounds, swept, details)
    return PropertyVerdict(Verdict.CONFIRMED, None, bounds, swept, details)


def subcategory_coequalizer(inst: TorsionInstance, x: FinObject, e: Relation):
    """Coequalizer in the torsion-free part: the ambient one followed by ``L``."""
    q0, c0 = quotient_by_congruence(x, e)
    lq, unit = reflect(inst, q0)
    return lq, unit @ c0


def _pulled_back_relation(e: Relation, p1: Morphism, p2: Morphism):
    """``E`` pulled back to ``X x_{LQ} Y``: pairs over ``E`` with equal ``Y`` part."""
    pairs = []
    for s, n in enumerate(p1.dom.sorts):
        a, b, es = p1.maps[s], p2.maps[s], e.pairs[s]
        pairs.append({(i, j) for i in range(n) for j in range(n)
                      if b[i] == b[j] and (a[i], a[j]) in es})
    return Relation(p1.dom, p1.dom, pairs, check=False)


def check_stable_coequalizer(inst: TorsionInstance, x: FinObject, e: Relation, f: Morphism) -> bool:
    """The fork ``E => X -> LQ`` pulled back along ``f`` is again a coequalizer."""
    if not inst.is_torsion_free(x):
        raise PreconditionFailed("X has torsion")
    if not inst.is_torsion_free(e.obj):
        raise PreconditionFailed("the relation object has torsion")
    lq, q = subcategory_coequalizer(inst, x, e)
    if f.cod != lq:
        raise PreconditionFailed("f must land in the coequalizer of E")
    _, p1, p2 = pullback(q, f)
    e2 = _pulled_back_relation(e, p1, p2)
    _, q2 = subcategory_coequalizer(inst, p1.dom, e2)
    induced = factor_through(q2, p2)
    return induced is not None and induced.is_iso()


def _cokernel_in(inst, m):
    q_obj, q = cokernel(m)
    if inst is None:
        return q_obj, q
    lq, unit = reflect(inst, q_obj)
    return lq, unit @ q


def _require_bourn_normal(m):
    try:
        witness = is_bourn_normal(m)
    except NotMono as exc:
        raise NotBournNormal(str(exc)) from None
    if witness is None:
        raise NotBournNormal("no equivalence relation exhibits m as normal")


def check_stable_cokernel(m: Morphism, f: Morphism, inst: TorsionInstance | None = None) -> bool:
    """Pulling the cokernel ``q`` of ``m`` back along ``f`` gives a cokernel again.

    ``v: P -> D`` must be the cokernel of the induced ``x': dom(m) -> P``.  With
    ``inst`` the cokernels are taken in its torsion-free part.
    """
    _require_bourn_normal(m)
    q_obj, q = _cokernel_in(inst, m)
    if f.cod != q_obj:
        raise PreconditionFailed("f must land in the cokernel of m")
    p, p1, v = pullback(q, f)
    pos = [{(a, b): i for i, (a, b) in enumerate(zip(pa, pb))} for pa, pb in zip(p1.maps, v.maps)]
    x_maps = [[pos[s][(y, 0)] for y in mm] for s, mm in enumerate(m.maps)]
    x_prime = Morphism(m.dom, p, x_maps, check=False)
    _, c2 = _cokernel_in(inst, x_prime)
    induced = factor_through(c2, v)
    return v.is_surjective() and induced is not None and induced.is_iso()


def factor_trivial_cokernel_normal(m: Morphism):
    """``m = k n`` with ``k`` the kernel of the cokernel of ``m``."""
    _require_bourn_normal(m)
    _, q = cokernel(m)
    k_handle = kernel(q)
    k = k_handle.inclusion
    pos = [{y: i for i, y in enumerate(sorted(s))} for s in k_handle.subsets]
    n = Morphism(m.dom, k_handle.obj, [[p[y] for y in mm] for p, mm in zip(pos, m.maps)],
                 check=False)
    return n, k


def verify_trivial_cokernel_normal(m: Morphism) -> bool:
    n, k = factor_trivial_cokernel_normal(m)
    if (k @ n) != m or not n.is_injective():
        return False
    cn, _ = cokernel(n)
    if not cn.is_zero():
        return False
    _, qk = cokernel(k)
    return kernel(qk).subsets == k.image()


def check_effective_descent(inst: TorsionInstance, p: Morphism, f: Morphism) -> bool:
    """Torsion-free ``E x_B A`` (with ``E``, ``B`` torsion-free) forces torsion-free ``A``."""
    if not p.is_surjective():
        raise PreconditionFailed("p must be a regular epimorphism")
    if not (inst.is_torsion_free(p.dom) and inst.is_torsion_free(p.cod)):
        raise PreconditionFailed("p must lie in the torsion-free part")
    pb, _, _ = pullback(p, f)
    antecedent = inst.is_torsion_free(pb)
    return not antecedent or inst.is_torsion_free(f.dom)


def factor_rqk(f: Morphism):
    """``f = k g q`` with ``q`` the image epi, ``k`` the kernel of the cokernel of ``f``."""
    if f.dom.category is not CategoryId.FinAb:
        raise CategoryMismatch("factor_rqk works in FinAb")
    q, m = image_factorize(f)
    _, c = cokernel(f)
    k_handle = kernel(c)
    pos = [{y: i for i, y in enumerate(sorted(s))} for s in k_handle.subsets]
    g = Morphism(q.cod, k_handle.obj, [[p[y] for y in mm] for p, mm in zip(pos, m.maps)],
                 check=False)
    return q, g, k_handle.inclusion


# -- suites -----------------------------------------------------------------------------

def torsion_suite(inst: TorsionInstance, objects, hom_cap=256) -> dict:
    """SES exactness, orthogonality, idempotence and unit naturality on ``objects``.

    Naturality is checked on at most ``hom_cap`` morphisms per ordered pair.
    """
    objects = list(objects)
    torsion = [c for c in objects if inst.is_torsion(c)]
    free = [c for c in objects if inst.is_torsion_free(c)]
    out = {"objects": len(objects), "torsion": len(torsion), "torsion_free": len(free)}
    out["ses"] = all(verify_ses(inst, c, torsion) for c in objects)
    out["orthogonality"] = all(f.is_zero() for t in torsion for x in free
                               for f in hom_enumerate(t, x))
    out["radical_idempotent"] = all(inst.is_torsion(inst.radical(c).obj) for c in objects)
    out["reflector_idempotent"] = all(reflect(inst, reflect(inst, c)[0])[1].is_iso()
                                      for c in objects)
    natural = True
    truncated = False
    checked = 0
    for a, b in itertools.product(objects, repeat=2):
        homs = hom_enumerate(a, b, cap=hom_cap)
        truncated |= homs.truncated
        for h in homs:
            checked += 1
            _, ua = reflect(inst, a)
            _, ub = reflect(inst, b)
            lh = factor_through(ua, ub @ h)
            if lh is None:
                natural = False
    out["naturality"] = natural
    out["naturality_morphisms"] = checked
    out["naturality_truncated"] = truncated
    return out


def semi_left_exact_sweep(inst: TorsionInstance, objects) -> dict:
    """``check_semi_left_exact`` on every ``Q`` and every ``f: Y -> LQ`` with ``Y`` torsion-free."""
    objects = list(objects)
    free = [c for c in objects if inst.is_torsion_free(c)]
    total = passed = 0
    for q in objects:
        lq, _ = reflect(inst, q)
        for y in free:
            for f in hom_enumerate(y, lq):
                total += 1
                passed += check_semi_left_exact(inst, q, f)
    return {"configurations": total, "passed": passed, "ok": total == passed}


def stability_sweep(inst: TorsionInstance, objects) -> dict:
    """Stable coequalizers, stable cokernels and the normal factorization on the torsion-free part."""
    from .relcalc import relation_enumerate

    free = [c for c in objects if inst.is_torsion_free(c)]
    coeq = [0, 0]
    for x in free:
        for e in relation_enumerate(x, "equivalence"):
            if not inst.is_torsion_free(e.obj):
                continue
            lq, _ = subcategory_coequalizer(inst, x, e)
            for y in free:
                for f in hom_enumerate(y, lq):
                    coeq[0] += 1
                    coeq[1] += check_stable_coequalizer(inst, x, e, f)
    coker = [0, 0]
    fact = [0, 0]
    for b in free:
        for h in subobject_enumerate(b):
            m = h.inclusion
            if is_bourn_normal(m) is None:
                continue
            fact[0] += 1
            fact[1] += verify_trivial_cokernel_normal(m)
            q_obj, _ = _cokernel_in(inst, m)
            for d in free:
                for f in hom_enumerate(d, q_obj):
                    coker[0] += 1
                    coker[1] += check_stable_cokernel(m, f, inst)
    return {
        "stable_coequalizers": {"checked": coeq[0], "passed": coeq[1], "ok": coeq[0] == coeq[1]},
        "stable_cokernels": {"checked": coker[0], "passed": coker[1], "ok": coker[0] == coker[1]},
        "normal_factorization": {"checked": fact[0], "passed": fact[1], "ok": fact[0] == fact[1]},
    }


def descent_sweep(inst: TorsionInstance, objects) -> dict:
    objects = list(objects)
    free = [c for c in objects if inst.is_torsion_free(c)]
    total = passed = 0
    for e, b in itertools.product(free, repeat=2):
        for p in hom_enumerate(e, b):
            if not p.is_surjective():
                continue
            for a in objects:
                for f in hom_enumerate(a, b):
                    total += 1
                    passed += check_effective_descent(inst, p, f)
    return {"checked": total, "passed": passed, "ok": total == passed}


def rqk_sweep(objects) -> dict:
    total = passed = 0
    for a, b in itertools.product(list(objects), repeat=2):
        for f in hom_enumerate(a, b):
            total += 1
            q, g, k = factor_rqk(f)
            passed += (k @ g @ q) == f and g.is_iso() and q.is_surjective() and k.is_injective()
    return {"checked": total, "passed": passed, "ok": total == passed}
