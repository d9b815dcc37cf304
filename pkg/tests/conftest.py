"""Brute-force oracles shared by the test modules.

The oracles deliberately avoid the closure engine: they enumerate raw
carrier maps or subsets and filter them with the plain axiom checkers.
"""
import itertools

import pytest

from finrel import catalog
from finrel.errors import AxiomViolation
from finrel.finstruct import CategoryId, Morphism, check_homomorphism


def brute_homs(a, b):
    """Every homomorphism ``a -> b`` found by trying all carrier maps, in lexicographic order."""
    per_sort = [list(itertools.product(range(m), repeat=n)) for n, m in zip(a.sorts, b.sorts)]
    out = []
    for maps in itertools.product(*per_sort):
        f = Morphism(a, b, maps, check=False)
        try:
            check_homomorphism(f)
        except AxiomViolation:
            continue
        out.append(f)
    return out


def closed(obj, subsets):
    """Whether per-sort ``subsets`` are closed under every operation (and hold the point)."""
    if obj.pointed and any(0 not in s for s in subsets):
        return False
    for op in obj.signature.ops:
        for args in itertools.product(*(sorted(subsets[s]) for s in op.args)):
            if obj.apply(op, args) not in subsets[op.out]:
                return False
    return True


def brute_subalgebras(obj):
    """All operation-closed per-sort subsets, as tuples of frozensets."""
    choices = []
    for n in obj.sorts:
        elems = range(n)
        choices.append([frozenset(c) for k in range(n + 1) for c in itertools.combinations(elems, k)])
    return {t for t in itertools.product(*choices) if closed(obj, t)}


def ab(name):
    return catalog.builtin(CategoryId.FinAb, name)


def grp(name):
    return catalog.builtin(CategoryId.FinGrp, name)


def rng(name):
    return catalog.builtin(CategoryId.FinCRng, name)


def objs(category, bound):
    return [e.object for e in catalog.generate_all(category, bound)]


@pytest.fixture(scope="session")
def small_ab():
    return objs(CategoryId.FinAb, 4)


@pytest.fixture(scope="session")
def small_grp():
    return objs(CategoryId.FinGrp, 6)
