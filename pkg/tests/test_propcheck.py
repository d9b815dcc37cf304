import itertools

import pytest

from conftest import ab, grp, objs
from finrel.errors import DomainMismatch, NotEndorelation, NotEquivalence, NotMono
from finrel.finstruct import FinObject, Morphism, hom_enumerate, subobject_enumerate, zero_object
from finrel.propcheck import (
    Verdict,
    bourn_normal_from_equiv,
    classify,
    is_bourn_normal,
    is_equivalence,
    is_left_pseudoreflexive,
    is_left_pseudosymmetric,
    is_pseudoreflexive,
    is_reflexive,
    is_right_pseudoreflexive,
    is_symmetric,
    is_transitive,
    left_pseudoreflexive_relational,
    left_pseudosymmetric_witness,
    maltsev_witness,
    protomodularity_witness,
    right_pseudoreflexive_relational,
)
from finrel.relcalc import Relation, graph, kernel_pair, relation_enumerate

SET2 = FinObject("FinSet", [2], {})
PT2 = FinObject("FinPtSet", [2], {})
PT3 = FinObject("FinPtSet", [3], {})


def rel(x, pairs):
    return Relation(x, x, [set(pairs)])


def test_basic_predicates():
    d = Relation.diagonal(SET2)
    assert is_reflexive(d) and is_symmetric(d) and is_transitive(d) and is_equivalence(d)
    r = rel(SET2, [(0, 0), (1, 1), (0, 1)])
    assert is_reflexive(r) and is_transitive(r) and not is_symmetric(r)


def test_kernel_pairs_are_equivalences():
    for a, b in itertools.product(objs("FinGrp", 6), repeat=2):
        for f in hom_enumerate(a, b):
            assert is_equivalence(kernel_pair(f))


def test_endorelation_required():
    g = graph(hom_enumerate(ab("Z/4"), ab("Z/2"))[1])
    with pytest.raises(NotEndorelation):
        is_reflexive(g)
    with pytest.raises(NotEndorelation):
        is_left_pseudoreflexive(g)


def test_pseudoreflexive_examples():
    assert is_left_pseudoreflexive(rel(SET2, [(0, 0), (1, 1), (0, 1)]))
    assert not is_left_pseudoreflexive(rel(SET2, [(0, 1)]))
    r = rel(PT3, [(0, 0), (1, 1), (1, 2)])
    assert is_left_pseudoreflexive(r) and not is_right_pseudoreflexive(r)


def test_pseudosymmetry_examples():
    z = zero_object("FinPtSet")
    zero3 = Morphism.zero(z, PT3)
    assert is_left_pseudosymmetric(rel(PT3, [(0, 0), (1, 1), (1, 2)]), zero3)
    assert not is_left_pseudosymmetric(rel(PT2, [(0, 0), (0, 1)]), Morphism.zero(z, PT2))
    sym = rel(PT3, [(0, 0), (1, 2), (2, 1)])
    for f in hom_enumerate(PT2, PT3):
        assert is_left_pseudosymmetric(sym, f)
    with pytest.raises(DomainMismatch):
        is_left_pseudosymmetric(sym, Morphism.zero(z, PT2))


def test_pseudosymmetry_witness_in_sets():
    r = rel(SET2, [(0, 0), (0, 1)])
    f = left_pseudosymmetric_witness(r)
    assert f is not None and is_left_pseudosymmetric(r, f)
    # every map out of a nonempty probe hits 0 or 1; only maps avoiding 0 work
    assert set(f.maps[0]) == {1}


# -- cross-checks over every small relation -------------------------------------------------

SMALL = [SET2, FinObject("FinSet", [3], {}), PT2, PT3, ab("Z/4"), ab("Z/2^2"), grp("Z/3")]


@pytest.mark.parametrize("x", SMALL, ids=repr)
def test_elementwise_and_relational_forms_agree(x):
    for r in relation_enumerate(x):
        assert is_left_pseudoreflexive(r) == left_pseudoreflexive_relational(r)
        assert is_right_pseudoreflexive(r) == right_pseudoreflexive_relational(r)


@pytest.mark.parametrize("x", SMALL, ids=repr)
def test_dual_pair(x):
    from finrel.relcalc import opposite

    for r in relation_enumerate(x):
        assert is_left_pseudoreflexive(r) == is_right_pseudoreflexive(opposite(r))


@pytest.mark.parametrize("x", SMALL, ids=repr)
def test_symmetric_relations_collapse_pseudoreflexivity(x):
    for r in relation_enumerate(x):
        if is_symmetric(r):
            assert is_left_pseudoreflexive(r) == is_right_pseudoreflexive(r) == is_pseudoreflexive(r)


# -- sweeps ------------------------------------------------------------------------------

def test_maltsev_examples():
    v = maltsev_witness("FinSet", [SET2])
    assert v.holds is Verdict.REFUTED
    assert v.witness["relation"].pairs[0] == {(0, 0), (1, 1), (0, 1)}
    v = maltsev_witness("FinAb", objs("FinAb", 8))
    assert v.confirmed and v.search_bounds["objects"] == len(objs("FinAb", 8))
    assert maltsev_witness("FinGrp", [zero_object("FinGrp")]).confirmed


def test_maltsev_refutation_is_smallest():
    v = maltsev_witness("FinSet", objs("FinSet", 3))
    r = v.witness["relation"]
    assert r.dom.sorts == (2,)
    assert is_reflexive(r) and not is_equivalence(r)
    # no reflexive non-equivalence comes earlier in canonical order
    for s in relation_enumerate(r.dom, "reflexive"):
        if s == r:
            break
        assert is_equivalence(s)


def test_protomodularity_examples():
    v = protomodularity_witness("FinPtSet", [PT3])
    assert v.refuted
    assert v.witness["relation"].pairs[0] == {(0, 0), (1, 1), (1, 2)}
    assert protomodularity_witness("FinGrp", objs("FinGrp", 6)).confirmed
    assert protomodularity_witness("FinAb", [ab("Z/4")]).confirmed


def test_protomodularity_witness_rechecks():
    v = protomodularity_witness("FinPtSet", objs("FinPtSet", 3))
    r = v.witness["relation"]
    k = classify(r)
    assert k.lpr and k.lps and not k.symmetric


@pytest.mark.parametrize("category, bound", [("FinGrp", 8), ("FinAb", 8), ("FinCRng", 4),
                                             ("Norm", (2, 4)), ("XMod", (2, 4))])
def test_conditions_b_and_c_agree_per_relation_in_algebraic_instances(category, bound):
    for x in objs(category, bound):
        for r in relation_enumerate(x):
            k = classify(r)
            assert k.fails_b == k.fails_c == False  # noqa: E712


def test_conditions_b_and_c_in_pointed_sets():
    v = protomodularity_witness("FinPtSet", objs("FinPtSet", 3))
    assert v.details["b"] == v.details["c"] == "RefutedWithWitness"
    assert v.details["bc_agree"]
    # relation by relation the two conditions can differ; (c) failing always implies (b) failing
    for x in objs("FinPtSet", 3):
        for r in relation_enumerate(x):
            k = classify(r)
            assert not k.fails_c or k.fails_b


def test_empty_sample_confirms_vacuously():
    v = maltsev_witness("FinGrp", [])
    assert v.confirmed and v.search_bounds["objects"] == 0
    v = protomodularity_witness("FinSet", [])
    assert v.confirmed and v.search_bounds["probes"] == [[1], [2], [3]]


def test_unknown_when_probes_find_nothing():
    # on the empty probe list no pseudosymmetry witness can be found
    v = protomodularity_witness("FinSet", [SET2], probes=[])
    assert v.holds is Verdict.UNKNOWN and v.details["undecided"] > 0


# -- Bourn-normal monos ---------------------------------------------------------------------

def test_bourn_examples():
    z4 = ab("Z/4")
    # every class must equal the whole image, so the identity is normal to the total relation
    assert is_bourn_normal(Morphism.identity(z4)) == Relation.total(z4, z4)
    assert is_bourn_normal(Morphism.zero(zero_object("FinAb"), z4)) == Relation.diagonal(z4)
    inc = subobject_enumerate(z4)[1].inclusion
    q = hom_enumerate(z4, ab("Z/2"))[1]
    assert is_bourn_normal(inc) == kernel_pair(q)
    s3 = grp("S3")
    order2 = [h for h in subobject_enumerate(s3) if h.obj.order == 2]
    assert order2 and all(is_bourn_normal(h.inclusion) is None for h in order2)
    with pytest.raises(NotMono):
        is_bourn_normal(q)


def test_bourn_from_equiv_examples():
    z4 = ab("Z/4")
    assert bourn_normal_from_equiv(Relation.diagonal(z4)).dom.is_zero
    assert bourn_normal_from_equiv(Relation.total(z4, z4)).is_iso()
    e = kernel_pair(hom_enumerate(z4, ab("Z/2"))[1])
    assert bourn_normal_from_equiv(e).image() == (frozenset({0, 2}),)
    with pytest.raises(NotEquivalence):
        bourn_normal_from_equiv(rel(z4, [(0, 0)]))


@pytest.mark.parametrize("category", ["FinAb", "FinGrp"])
def test_equivalences_and_bourn_normal_subobjects_are_isomorphic_posets(category):
    for y in objs(category, 8):
        eqs = relation_enumerate(y, "equivalence")
        normal = {h.subsets for h in subobject_enumerate(y) if is_bourn_normal(h.inclusion) is not None}
        image = {e: bourn_normal_from_equiv(e).image() for e in eqs}
        assert set(image.values()) == normal
        assert len(set(image.values())) == len(eqs)
        for e, f in itertools.product(eqs, repeat=2):
            assert (e.pairs[0] <= f.pairs[0]) == (image[e][0] <= image[f][0])
        for e in eqs:
            assert is_bourn_normal(bourn_normal_from_equiv(e)) == e
