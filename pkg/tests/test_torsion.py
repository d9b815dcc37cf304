import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ab, grp, objs, rng
from finrel import catalog
from finrel.errors import CategoryMismatch, NotBournNormal, PreconditionFailed
from finrel.finstruct import CategoryId, Morphism, hom_enumerate, subobject_enumerate, zero_object
from finrel.propcheck import is_bourn_normal
from finrel.relcalc import congruence, relation_enumerate
from finrel.torsion import (
    AB_NORM_XMOD,
    NIL_RED,
    TorsionInstance,
    check_effective_descent,
    check_semi_left_exact,
    check_stable_coequalizer,
    check_stable_cokernel,
    descent_sweep,
    factor_rqk,
    factor_trivial_cokernel_normal,
    instance,
    is_hereditary,
    p_primary_ab,
    reflect,
    reflect_mor,
    rqk_sweep,
    semi_left_exact_sweep,
    stability_sweep,
    subcategory_coequalizer,
    torsion_part,
    torsion_suite,
    verify_ses,
    verify_trivial_cokernel_normal,
)

P2 = p_primary_ab(2)


def xmod(name):
    return catalog.builtin(CategoryId.XMod, name)


def additive_order(c, x):
    n, y = 1, x
    while y != 0:
        y, n = c.add(y, x), n + 1
    return n


def nilpotent_oracle(c):
    """Elements with ``x^k = 0`` for some ``k <= |C|``, by plain repeated multiplication."""
    out = set()
    for x in range(c.order):
        y = x
        for _ in range(c.order):
            if y == 0:
                out.add(x)
                break
            y = c.mul(y, x)
    return frozenset(out)


# -- examples ----------------------------------------------------------------------------

def test_torsion_part_examples():
    assert torsion_part(P2, ab("Z/12")).subsets == (frozenset({0, 3, 6, 9}),)
    assert torsion_part(NIL_RED, rng("Z/4")).subsets == (frozenset({0, 2}),)
    t = torsion_part(AB_NORM_XMOD, xmod("Z/2-0->Z/2"))
    assert t.subsets == (frozenset({0, 1}), frozenset({0}))
    assert t.obj.canonical_key == xmod("Z/2->0").canonical_key


def test_reflect_examples():
    lc, unit = reflect(P2, ab("Z/12"))
    assert lc.canonical_key == ab("Z/3").canonical_key and unit.is_surjective()
    lc, _ = reflect(NIL_RED, rng("Z/4"))
    assert lc.canonical_key == rng("Z/2").canonical_key
    assert all(lc.mul(x, x) != 0 for x in range(1, lc.order))
    z3 = ab("Z/3")
    lc, unit = reflect(P2, z3)
    assert lc.canonical_key == z3.canonical_key and unit.is_iso()
    lc, _ = reflect(AB_NORM_XMOD, xmod("Z/2-0->Z/2"))
    assert lc.canonical_key == xmod("0->Z/2").canonical_key


def test_instance_lookup():
    assert instance("PPrimaryAb(3)") is p_primary_ab(3)
    assert instance("NilRedCRng") is NIL_RED and instance("AbNormXMod") is AB_NORM_XMOD
    for bad in ("PPrimaryAb(4)", "PPrimaryAb(1)", "Torsion"):
        with pytest.raises(ValueError):
            instance(bad)
    with pytest.raises(CategoryMismatch):
        torsion_part(P2, grp("S3"))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_p_primary_radical_matches_element_orders(p):
    for c in objs("FinAb", 16):
        expect = frozenset(x for x in range(c.order)
                           if additive_order(c, x) in {p ** k for k in range(5)})
        assert torsion_part(p_primary_ab(p), c).subsets == (expect,)


def test_nilradical_matches_repeated_multiplication():
    for c in objs("FinCRng", 8):
        assert torsion_part(NIL_RED, c).subsets == (nilpotent_oracle(c),)


def test_boundary_kernel_torsion_part():
    for c in objs("XMod", (4, 4)):
        t = torsion_part(AB_NORM_XMOD, c)
        bd = c.tables["bd"]
        assert t.subsets[0] == frozenset(i for i in range(c.sorts[0]) if bd[i] == 0)
        assert t.obj.sorts[1] == 1


@pytest.mark.parametrize("inst, category, bound", [(P2, "FinAb", 16), (p_primary_ab(3), "FinAb", 12),
                                                   (NIL_RED, "FinCRng", 8),
                                                   (AB_NORM_XMOD, "XMod", (4, 4))])
def test_short_exact_sequence_and_idempotence(inst, category, bound):
    os = objs(category, bound)
    torsion = [c for c in os if inst.is_torsion(c)]
    for c in os:
        assert verify_ses(inst, c, torsion)
        assert inst.is_torsion(torsion_part(inst, c).obj)
        lc, _ = reflect(inst, c)
        assert reflect(inst, lc)[1].is_iso()


@pytest.mark.parametrize("inst, category, bound", [(P2, "FinAb", 8), (NIL_RED, "FinCRng", 4),
                                                   (AB_NORM_XMOD, "XMod", (2, 4))])
def test_torsion_suite(inst, category, bound):
    out = torsion_suite(inst, objs(category, bound), hom_cap=None)
    for k in ("ses", "orthogonality", "radical_idempotent", "reflector_idempotent", "naturality"):
        assert out[k] is True, k
    assert out["torsion"] and out["torsion_free"] and not out["naturality_truncated"]


@st.composite
def composable_ab_homs(draw):
    os = objs("FinAb", 8)
    a, b, c = (draw(st.sampled_from(os)) for _ in range(3))
    return draw(st.sampled_from(hom_enumerate(a, b))), draw(st.sampled_from(hom_enumerate(b, c)))


@settings(max_examples=80, deadline=None)
@given(composable_ab_homs())
def test_reflector_is_a_functor(fg):
    f, g = fg
    assert reflect_mor(P2, g @ f) == reflect_mor(P2, g) @ reflect_mor(P2, f)
    assert reflect_mor(P2, Morphism.identity(f.dom)).is_iso()
    _, ua = reflect(P2, f.dom)
    _, ub = reflect(P2, f.cod)
    assert reflect_mor(P2, f) @ ua == ub @ f


# -- semi-left-exactness and heredity --------------------------------------------------------

def test_semi_left_exact_examples():
    z12 = ab("Z/12")
    lc, _ = reflect(P2, z12)
    assert check_semi_left_exact(P2, z12, Morphism.identity(lc))
    z4 = rng("Z/4")
    lq, _ = reflect(NIL_RED, z4)
    assert check_semi_left_exact(NIL_RED, z4, Morphism.zero(zero_object("FinCRng"), lq))
    with pytest.raises(PreconditionFailed):
        check_semi_left_exact(P2, z12, Morphism.zero(ab("Z/2"), lc))


@pytest.mark.parametrize("inst, category, bound", [(P2, "FinAb", 8), (NIL_RED, "FinCRng", 4),
                                                   (AB_NORM_XMOD, "XMod", (2, 4))])
def test_semi_left_exact_sweep(inst, category, bound):
    out = semi_left_exact_sweep(inst, objs(category, bound))
    assert out["ok"] and out["configurations"] > 0


def test_hereditary_examples():
    v = is_hereditary(P2, objs("FinAb", 16))
    assert v.confirmed and v.details["agree"]
    assert is_hereditary(NIL_RED, objs("FinCRng", 8)).confirmed
    v = is_hereditary(AB_NORM_XMOD, [xmod("Z/2->0"), xmod("0")])
    assert v.confirmed and v.search_bounds["subobjects"] > 0


def _only_z4_is_torsion(c):
    whole = c.order == 4 and any(c.elem_order(x) == 4 for x in range(4))
    return [frozenset(range(c.order)) if whole else frozenset({0})]


def test_hereditary_refutes_a_radical_not_closed_under_subobjects():
    fake = TorsionInstance("Z4Only", CategoryId.FinAb, _only_z4_is_torsion)
    v = is_hereditary(fake, [ab("Z/4")])
    assert v.refuted and v.details["agree"]
    assert v.witness["subobject"] == [[0, 2]]


# -- stability and factorizations ------------------------------------------------------------

def test_stable_coequalizer_examples():
    z9 = ab("Z/9")
    e = congruence(z9, [[(0, 3)]])
    lq, q = subcategory_coequalizer(P2, z9, e)
    assert lq.order == 3 and q.is_surjective()
    assert check_stable_coequalizer(P2, z9, e, Morphism.identity(lq))
    assert check_stable_coequalizer(P2, z9, e, Morphism.zero(ab("Z/3"), lq))
    d = relation_enumerate(z9, "equivalence")[0]
    lq, q = subcategory_coequalizer(P2, z9, d)
    assert q.is_iso() and check_stable_coequalizer(P2, z9, d, Morphism.identity(lq))
    with pytest.raises(PreconditionFailed):
        check_stable_coequalizer(P2, ab("Z/12"), relation_enumerate(ab("Z/12"), "equivalence")[0],
                                 Morphism.identity(ab("Z/12")))


def test_stable_cokernel_examples():
    z4 = ab("Z/4")
    m = subobject_enumerate(z4)[1].inclusion
    assert check_stable_cokernel(m, Morphism.identity(ab("Z/2")))
    s3 = grp("S3")
    a3 = next(h for h in subobject_enumerate(s3) if h.obj.order == 3).inclusion
    from finrel.finstruct import cokernel

    q_obj, _ = cokernel(a3)
    assert check_stable_cokernel(a3, Morphism.identity(q_obj))
    order2 = next(h for h in subobject_enumerate(s3) if h.obj.order == 2).inclusion
    with pytest.raises(NotBournNormal):
        check_stable_cokernel(order2, Morphism.identity(q_obj))


def test_trivial_cokernel_normal_factorization_examples():
    z4 = ab("Z/4")
    m = subobject_enumerate(z4)[1].inclusion
    n, k = factor_trivial_cokernel_normal(m)
    assert n.is_iso() and k == m
    zero = Morphism.zero(zero_object("FinAb"), z4)
    n, k = factor_trivial_cokernel_normal(zero)
    assert n.dom.is_zero() and n.cod.is_zero() and k.image() == (frozenset({0}),)


@pytest.mark.parametrize("category", ["FinAb", "FinGrp"])
def test_normal_factorization_on_every_normal_subobject(category):
    for b in objs(category, 8):
        for h in subobject_enumerate(b):
            if is_bourn_normal(h.inclusion) is not None:
                assert verify_trivial_cokernel_normal(h.inclusion)
                n, _ = factor_trivial_cokernel_normal(h.inclusion)
                assert n.is_iso()


def test_stability_sweep_on_torsion_free_part():
    out = stability_sweep(P2, objs("FinAb", 9))
    for k in ("stable_coequalizers", "stable_cokernels", "normal_factorization"):
        assert out[k]["ok"] and out[k]["checked"] > 0, k


def test_effective_descent_examples():
    z9, z3, z6 = ab("Z/9"), ab("Z/3"), ab("Z/6")
    p = next(h for h in hom_enumerate(z9, z3) if h.is_surjective())
    f = next(h for h in hom_enumerate(z6, z3) if h.is_surjective())
    from finrel.finstruct import pullback

    pb, _, _ = pullback(p, f)
    assert not P2.is_torsion_free(pb)
    assert check_effective_descent(P2, p, f)
    assert check_effective_descent(P2, p, Morphism.identity(z3))
    assert descent_sweep(P2, objs("FinAb", 9))["ok"]


def test_rqk_examples():
    z4, z2 = ab("Z/4"), ab("Z/2")
    q, g, k = factor_rqk(Morphism.identity(z4))
    assert q.is_iso() and g.is_iso() and k.is_iso()
    f = hom_enumerate(z4, z2)[1]
    q, g, k = factor_rqk(f)
    assert q.is_surjective() and g.is_iso() and k.is_iso() and k @ g @ q == f
    q, g, k = factor_rqk(Morphism.zero(z4, z2))
    assert q.cod.is_zero() and k.dom.is_zero()
    assert rqk_sweep(objs("FinAb", 8))["ok"]
    with pytest.raises(CategoryMismatch):
        factor_rqk(Morphism.identity(grp("S3")))


def test_sweeps_cover_every_pair():
    os = objs("FinAb", 4)
    expect = sum(len(hom_enumerate(a, b)) for a, b in itertools.product(os, repeat=2))
    assert rqk_sweep(os)["checked"] == expect
