"""Property checkers for relations: Mal'tsev, pseudoreflexivity, pseudosymmetry,
the relational characterization of protomodularity, and Bourn-normal monos.

Universally quantified properties can only be refuted or confirmed on a finite
sample, so sweeps return a :class:`PropertyVerdict` that records its bounds.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import DomainMismatch, NotEndorelation, NotEquivalence, NotMono
from .finstruct.core import CategoryId, FinObject, Morphism
from .finstruct.limits import hom_enumerate, subobject, zero_object
from .relcalc import (
    Relation,
    compose,
    compose_pairs,
    is_le,
    meet,
    opposite,
    relation_enumerate,
)


class Verdict(str, enum.Enum):
    CONFIRMED = "ConfirmedOnSample"
    REFUTED = "RefutedWithWitness"
    UNKNOWN = "Unknown"


@dataclass
class PropertyVerdict:
    holds: Verdict
    witness: dict | None = None
    search_bounds: dict = field(default_factory=dict)
    swept: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def refuted(self) -> bool:
        return self.holds is Verdict.REFUTED

    @property
    def confirmed(self) -> bool:
        return self.holds is Verdict.CONFIRMED

    def to_data(self) -> dict:
        out = {"verdict": self.holds.value, "bounds": self.search_bounds, "swept": self.swept}
        if self.witness is not None:
            out["witness"] = {k: (v.to_data() if hasattr(v, "to_data") else v)
                              for k, v in self.witness.items()}
        if self.details:
            out["details"] = self.details
        return out


def _endo(r: Relation):
    if r.dom != r.cod:
        raise NotEndorelation("relation must have equal domain and codomain")


def is_reflexive(r: Relation) -> bool:
    _endo(r)
    return all((x, x) in p for p, n in zip(r.pairs, r.dom.sorts) for x in range(n))


def is_symmetric(r: Relation) -> bool:
    _endo(r)
    return all((y, x) in p for p in r.pairs for x, y in p)


def is_transitive(r: Relation) -> bool:
    _endo(r)
    return all(a <= p for a, p in zip(compose_pairs(r.pairs, r.pairs), r.pairs))


def is_equivalence(r: Relation) -> bool:
    return is_reflexive(r) and is_symmetric(r) and is_transitive(r)


def is_left_pseudoreflexive(r: Relation) -> bool:
    """``x R y`` implies ``x R x``."""
    _endo(r)
    return all((x, x) in p for p in r.pairs for x, _ in p)


def is_right_pseudoreflexive(r: Relation) -> bool:
    """``x R y`` implies ``y R y``."""
    _endo(r)
    return all((y, y) in p for p in r.pairs for _, y in p)


def is_pseudoreflexive(r: Relation) -> bool:
    return is_left_pseudoreflexive(r) and is_right_pseudoreflexive(r)


def left_pseudoreflexive_relational(r: Relation) -> bool:
    """The same condition as ``1 ∩ R°R <= R``, computed in the relation calculus."""
    _endo(r)
    return is_le(meet(Relation.diagonal(r.dom), compose(opposite(r), r, verify=False)), r)


def right_pseudoreflexive_relational(r: Relation) -> bool:
    """``1 ∩ RR° <= R°``."""
    _endo(r)
    ro = opposite(r)
    return is_le(meet(Relation.diagonal(r.dom), compose(r, ro, verify=False)), ro)


def is_left_pseudosymmetric(r: Relation, f: Morphism) -> bool:
    """Whether ``f`` exhibits ``r`` as left pseudosymmetric: ``(fz) R y`` implies ``y R (fz)``."""
    _endo(r)
    if f.cod != r.dom:
        raise DomainMismatch("cod(f) must be the object the relation lives on")
    for p, m in zip(r.pairs, f.maps):
        image = set(m)
        for x, y in p:
            if x in image and (y, x) not in p:
                return False
    return True


def default_probes(category) -> list:
    """Probe objects for the pseudosymmetry search in non-pointed instances."""
    category = CategoryId(category)
    if category.pointed:
        return [zero_object(category)]
    return [FinObject(category, [n], {}) for n in (1, 2, 3)]


def left_pseudosymmetric_witness(r: Relation, probes=None, cap=None):
    """A morphism exhibiting ``r`` as left pseudosymmetric, or ``None``.

    In pointed instances the zero map from the zero object decides the
    question.  Otherwise every map out of every probe is tried, up to ``cap``
    maps per probe.
    """
    _endo(r)
    x = r.dom
    if x.pointed:
        z = zero_object(x.category)
        f = Morphism.zero(z, x)
        return f if is_left_pseudosymmetric(r, f) else None
    for probe in probes if probes is not None else default_probes(x.category):
        for f in hom_enumerate(probe, x, cap=cap):
            if is_left_pseudosymmetric(r, f):
                return f
    return None


# -- sweeps -------------------------------------------------------------------------

def _check_category(category, objects):
    category = CategoryId(category)
    for obj in objects:
        if obj.category is not category:
            raise DomainMismatch(f"{obj!r} is not an object of {category}")
    return category


def maltsev_witness(category, objects, cap=None) -> PropertyVerdict:
    """Sweep reflexive relations; the first one that is not an equivalence refutes."""
    _check_category(category, objects)
    swept = []
    for obj in objects:
        rels = relation_enumerate(obj, "reflexive", cap=cap)
        swept.append({"object": obj.canonical_key, "order": list(obj.sorts), "relations": len(rels)})
        for r in rels:
            if not (is_symmetric(r) and is_transitive(r)):
                return PropertyVerdict(Verdict.REFUTED, {"object": obj.canonical_key, "relation": r},
                                       {"cap": cap, "objects": len(swept)}, swept)
    return PropertyVerdict(Verdict.CONFIRMED, None, {"cap": cap, "objects": len(swept)}, swept)


@dataclass
class _Classified:
    lpr: bool
    lps: bool | None  # None: no witness within the probe bounds
    symmetric: bool
    rpr: bool

    @property
    def fails_b(self):
        return self.lpr and self.lps is True and not self.symmetric

    @property
    def fails_c(self):
        return self.lpr and self.lps is True and not self.rpr

    @property
    def undecided(self):
        return self.lpr and self.lps is None and not (self.symmetric and self.rpr)


def classify(r: Relation, probes=None, cap=None) -> _Classified:
    lpr = is_left_pseudoreflexive(r)
    sym = is_symmetric(r)
    rpr = is_right_pseudoreflexive(r)
    lps = None
    if lpr and not (sym and rpr):
        lps = left_pseudosymmetric_witness(r, probes, cap) is not None or None
        if lps is None and r.dom.pointed:
            lps = False
    return _Classified(lpr, lps, sym, rpr)


def protomodularity_sweep(relations, probes=None, cap=None):
    """Classify relations against conditions (b) and (c).

    Returns ``(first_b, first_c, undecided, disagreements, count)`` where the
    first two are the earliest refuting relations, ``undecided`` counts
    relations whose pseudosymmetry stayed open, and ``disagreements`` counts
    relations refuting exactly one of the two conditions.
    """
    first_b = first_c = None
    undecided = disagreements = count = 0
    for r in relations:
        count += 1
        k = classify(r, probes, cap)
        if k.fails_b and first_b is None:
            first_b = r
        if k.fails_c and first_c is None:
            first_c = r
        if k.fails_b != k.fails_c:
            disagreements += 1
        if k.undecided:
            undecided += 1
    return first_b, first_c, undecided, disagreements, count


def protomodularity_witness(category, objects, probes=None, cap=None) -> PropertyVerdict:
    """Sweep all relations on ``objects`` against the relational protomodularity conditions.

    (b): left pseudoreflexive and left pseudosymmetric implies symmetric.
    (c): the same hypotheses imply pseudoreflexive.
    A relation refuting (c) also refutes (b); the witness is the first
    (c)-refuter if any, else the first (b)-refuter.  ``details`` records both
    verdicts and the number of relations on which they differ.
    """
    category = _check_category(category, objects)
    swept = []
    found_b = found_c = None
    undecided = disagreements = 0
    for obj in objects:
        rels = relation_enumerate(obj, "any", cap=cap)
        b, c, u, d, n = protomodularity_sweep(rels, probes, cap)
        swept.append({"object": obj.canonical_key, "order": list(obj.sorts), "relations": n})
        undecided += u
        disagreements += d
        if found_b is None and b is not None:
            found_b = (obj, b)
        if found_c is None and c is not None:
            found_c = (obj, c)
        if found_b is not None and found_c is not None:
            break
    details = {
        "b": Verdict.REFUTED.value if found_b else Verdict.CONFIRMED.value,
        "c": Verdict.REFUTED.value if found_c else Verdict.CONFIRMED.value,
        "bc_agree": (found_b is None) == (found_c is None),
        "bc_disagreements": disagreements,
        "undecided": undecided,
    }
    bounds = {"cap": cap, "objects": len(swept)}
    if not category.pointed:
        bounds["probes"] = [list(p.sorts) for p in (probes or default_probes(category))]
    hit = found_c or found_b
    if hit is not None:
        obj, r = hit
        return PropertyVerdict(Verdict.REFUTED, {"object": obj.canonical_key, "relation": r},
                               bounds, swept, details)
    verdict = Verdict.UNKNOWN if undecided else Verdict.CONFIRMED
    return PropertyVerdict(verdict, None, bounds, swept, details)


# -- Bourn-normal monomorphisms ---------------------------------------------------------

def is_bourn_normal(m: Morphism):
    """The first equivalence relation witnessing ``m`` as Bourn-normal, or ``None``.

    Concretely, the class of every ``m(x)`` must be exactly the image of ``m``.
    """
    if not m.is_injective():
        raise NotMono("morphism is not injective")
    image = m.image()
    y = m.cod
    for e in relation_enumerate(y, "equivalence"):
        if all({b for a, b in p if a == x} == img
               for p, img, mp in zip(e.pairs, image, m.maps) for x in set(mp)):
            return e
    return None


def bourn_normal_from_equiv(e: Relation) -> Morphism:
    """The inclusion of the class of ``0``."""
    _endo(e)
    if not is_equivalence(e):
        raise NotEquivalence("relation is not an equivalence")
    subsets = [frozenset(b for a, b in p if a == 0) for p in e.pairs]
    return subobject(e.dom, subsets).inclusion
