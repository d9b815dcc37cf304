"""Named structures, generation up to isomorphism, and corpus persistence."""
from __future__ import annotations

import hashlib
import itertools
import json
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import AxiomViolation, CacheCorruption, CapExceeded, ParseError, UnknownName
from .finstruct.core import CategoryId, FinObject
from .finstruct.io import from_data, to_data
from .finstruct.limits import enumerate_subalgebras, hom_enumerate, product
from .finstruct.validate import make_object

SCHEMA = 1

# generation bounds; each is the largest order (per sort) generate_all accepts
HARD_LIMITS = {
    CategoryId.FinSet: 8,
    CategoryId.FinPtSet: 8,
    CategoryId.FinGrp: 8,
    CategoryId.FinAb: 16,
    CategoryId.FinCRng: 8,
    CategoryId.Norm: 8,
    CategoryId.XMod: 8,
}


# -- constructions ----------------------------------------------------------------

def cyclic(n, category=CategoryId.FinAb, name=None) -> FinObject:
    category = CategoryId(category)
    add = [[(i + j) % n for j in range(n)] for i in range(n)]
    neg = [(-i) % n for i in range(n)]
    if category is CategoryId.FinGrp:
        tables = {"mul": add, "inv": neg}
    elif category is CategoryId.FinAb:
        tables = {"add": add, "neg": neg}
    else:
        raise UnknownName(f"no cyclic group in {category}")
    return make_object(category, tables, name=name or f"Z/{n}")


def ring_mod(n, zero_mul=False) -> FinObject:
    """``Z/n`` as a rng, with its own multiplication or the zero one."""
    tables = {
        "add": [[(i + j) % n for j in range(n)] for i in range(n)],
        "neg": [(-i) % n for i in range(n)],
        "mul": [[0 if zero_mul else (i * j) % n for j in range(n)] for i in range(n)],
    }
    return make_object(CategoryId.FinCRng, tables, name=f"Z/{n}(0)" if zero_mul else f"Z/{n}")


def direct_product(parts, name=None) -> FinObject:
    obj = parts[0]
    for other in parts[1:]:
        obj = product(obj, other)[0]
    return FinObject(obj.category, obj.sorts, obj.tables, name=name)


def from_elements(elements, mul, category=CategoryId.FinGrp, name=None) -> FinObject:
    """Group on an explicit element list (identity first) with a multiplication."""
    index = {e: i for i, e in enumerate(elements)}
    table = [[index[mul(a, b)] for b in elements] for a in elements]
    inv = [row.index(0) for row in table]
    key = "mul" if CategoryId(category) is CategoryId.FinGrp else "add"
    other = "inv" if key == "mul" else "neg"
    return make_object(category, {key: table, other: inv}, name=name)


def permutation_group(generators, name=None) -> FinObject:
    n = len(generators[0])
    ident = tuple(range(n))

    def compose(p, q):  # p after q
        return tuple(p[i] for i in q)

    elements = [ident]
    seen = {ident}
    i = 0
    while i < len(elements):
        for g in generators:
            h = compose(elements[i], tuple(g))
            if h not in seen:
                seen.add(h)
                elements.append(h)
        i += 1
    return from_elements(elements, compose, name=name)


def _quaternion_group():
    # elements as (sign, unit) with unit in 1, i, j, k
    unit_mul = {
        ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
        ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
        ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
        ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
    }
    elements = [(s, u) for s in (1, -1) for u in "1ijk"]

    def mul(a, b):
        s, u = unit_mul[(a[1], b[1])]
        return (a[0] * b[0] * s, u)

    return from_elements(elements, mul, name="Q8")


def norm_from_subgroup(g: FinObject, subset, name=None) -> FinObject:
    """The Norm object ``N <| G`` for a normal subgroup given as a set of elements."""
    elems = sorted(subset)
    pos = {x: i for i, x in enumerate(elems)}
    n = g.sorts[0]
    m, inv = g.tables["mul"], g.tables["inv"]
    for a in elems:
        for b in elems:
            if m[a * n + b] not in pos:
                raise AxiomViolation("closure of the subgroup", (a, b))
        for x in range(n):
            if m[m[x * n + a] * n + inv[x]] not in pos:
                raise AxiomViolation("normality of the subgroup", (x, a))
    tables = {
        "mul_N": [[pos[m[a * n + b]] for b in elems] for a in elems],
        "inv_N": [pos[inv[a]] for a in elems],
        "mul_G": [list(m[a * n:(a + 1) * n]) for a in range(n)],
        "inv_G": list(inv),
        "incl": elems,
        "conj": [[pos[m[m[x * n + a] * n + inv[x]]] for a in elems] for x in range(n)],
    }
    return make_object(CategoryId.Norm, tables, name=name)


def xmod_trivial_action(t: FinObject, g: FinObject, bd, name=None) -> FinObject:
    """Crossed module with trivial action (``T`` abelian, ``bd`` central)."""
    nt, ng = t.sorts[0], g.sorts[0]
    tm, ti = _group_tables(t)
    gm, gi = _group_tables(g)
    tables = {
        "mul_T": [list(tm[a * nt:(a + 1) * nt]) for a in range(nt)],
        "inv_T": list(ti),
        "mul_G": [list(gm[a * ng:(a + 1) * ng]) for a in range(ng)],
        "inv_G": list(gi),
        "bd": list(bd),
        "act": [list(range(nt)) for _ in range(ng)],
    }
    return make_object(CategoryId.XMod, tables, name=name)


def _group_tables(obj):
    if "mul" in obj.tables and obj.category is CategoryId.FinGrp:
        return obj.tables["mul"], obj.tables["inv"]
    return obj.tables["add"], obj.tables["neg"]


def as_group(obj: FinObject) -> FinObject:
    """A FinAb object viewed in FinGrp."""
    if obj.category is CategoryId.FinGrp:
        return obj
    return FinObject(CategoryId.FinGrp, obj.sorts,
                     {"mul": obj.tables["add"], "inv": obj.tables["neg"]}, name=obj.name)


def trivial_group():
    return cyclic(1, CategoryId.FinGrp, name="0")


# -- builtins ---------------------------------------------------------------------------

_CYCLIC_PRODUCT = re.compile(r"^Z/\d+(\^\d+)?(xZ/\d+(\^\d+)?)*$")


def _parse_cyclic_product(name, category):
    factors = []
    for part in name.split("x"):
        base, _, power = part.partition("^")
        factors.extend([int(base[2:])] * (int(power) if power else 1))
    if any(n < 1 for n in factors):
        raise UnknownName(name)
    if category is CategoryId.FinCRng:
        return direct_product([ring_mod(n) for n in factors], name=name)
    return direct_product([cyclic(n, category) for n in factors], name=name)


def _group_builtins():
    return {
        "S3": lambda: permutation_group([(1, 0, 2), (1, 2, 0)], name="S3"),
        "D4": lambda: permutation_group([(1, 2, 3, 0), (0, 3, 2, 1)], name="D4"),
        "Q8": _quaternion_group,
        "A4": lambda: permutation_group([(1, 2, 0, 3), (1, 0, 3, 2)], name="A4"),
        "0": trivial_group,
    }


def _named_norm():
    z4 = lambda: cyclic(4, CategoryId.FinGrp)  # noqa: E731
    z2 = lambda: cyclic(2, CategoryId.FinGrp)  # noqa: E731
    s3 = _group_builtins()["S3"]
    return {
        "Z/2<|Z/4": lambda: norm_from_subgroup(z4(), {0, 2}, name="Z/2<|Z/4"),
        "Z/4<|Z/4": lambda: norm_from_subgroup(z4(), range(4), name="Z/4<|Z/4"),
        "0<|Z/4": lambda: norm_from_subgroup(z4(), {0}, name="0<|Z/4"),
        "Z/2<|Z/2": lambda: norm_from_subgroup(z2(), {0, 1}, name="Z/2<|Z/2"),
        "0<|Z/2": lambda: norm_from_subgroup(z2(), {0}, name="0<|Z/2"),
        "A3<|S3": lambda: norm_from_subgroup(s3(), _a3_of(s3()), name="A3<|S3"),
        "0": lambda: norm_from_subgroup(trivial_group(), {0}, name="0"),
    }


def _a3_of(s3):
    return {x for x in range(6) if s3.elem_order(x) in (1, 3)}


def _named_xmod():
    z2a = lambda: cyclic(2)  # noqa: E731
    z2 = lambda: cyclic(2, CategoryId.FinGrp)  # noqa: E731
    zero = trivial_group
    return {
        "Z/2-0->Z/2": lambda: xmod_trivial_action(z2a(), z2(), [0, 0], name="Z/2-0->Z/2"),
        "Z/2->Z/2": lambda: xmod_trivial_action(z2a(), z2(), [0, 1], name="Z/2->Z/2"),
        "Z/2->0": lambda: xmod_trivial_action(z2a(), zero(), [0, 0], name="Z/2->0"),
        "0->Z/2": lambda: xmod_trivial_action(cyclic(1), z2(), [0], name="0->Z/2"),
        "0": lambda: xmod_trivial_action(cyclic(1), zero(), [0], name="0"),
    }


ALIASES = {
    (CategoryId.Norm, "{0,2}<|Z/4"): "Z/2<|Z/4",
    (CategoryId.XMod, "zero-boundary Z/2 over Z/2"): "Z/2-0->Z/2",
}


def builtin_names(category) -> list:
    category = CategoryId(category)
    if category is CategoryId.FinGrp:
        return sorted(_group_builtins())
    if category is CategoryId.Norm:
        return sorted(_named_norm())
    if category is CategoryId.XMod:
        return sorted(_named_xmod())
    return []


def builtin(category, name: str) -> FinObject:
    """A named structure.

    ``Z/n`` and products such as ``Z/2xZ/4`` or ``Z/2^3`` exist in FinAb,
    FinGrp and FinCRng (ring multiplication mod ``n``, componentwise on
    products); ``Z/n(0)`` is the zero-multiplication rng.  FinGrp adds S3, D4,
    Q8 and A4.  In FinSet and FinPtSet a name is the carrier size.  Norm and
    XMod examples are listed by :func:`builtin_names`.
    """
    category = CategoryId(category)
    name = ALIASES.get((category, name), name)
    if category in (CategoryId.FinSet, CategoryId.FinPtSet):
        if name.isdigit() and (int(name) > 0 or category is CategoryId.FinSet):
            return FinObject(category, [int(name)], {}, name=name)
        raise UnknownName(name)
    if category is CategoryId.FinCRng:
        m = re.fullmatch(r"Z/(\d+)\(0\)", name)
        if m:
            return ring_mod(int(m.group(1)), zero_mul=True)
    if category in (CategoryId.FinAb, CategoryId.FinGrp, CategoryId.FinCRng):
        if _CYCLIC_PRODUCT.match(name):
            return _parse_cyclic_product(name, category)
        if category is CategoryId.FinAb and name == "0":
            return cyclic(1, name="0")
        if category is CategoryId.FinCRng and name == "0":
            return ring_mod(1)
    table = {CategoryId.FinGrp: _group_builtins, CategoryId.Norm: _named_norm,
             CategoryId.XMod: _named_xmod}.get(category)
    if table is not None and name in table():
        return table()[name]()
    raise UnknownName(name)


# -- generation ---------------------------------------------------------------------

@dataclass
class CatalogEntry:
    key: str
    object: FinObject
    provenance: str = "generated"
    cache: dict = field(default_factory=dict)

    def subobjects(self):
        if "subobjects" not in self.cache:
            self.cache["subobjects"] = _subobject_lattice(self.object)
        return self.cache["subobjects"]

    def congruences(self):
        if "congruences" not in self.cache:
            self.cache["congruences"] = _congruence_lattice(self.object)
        return self.cache["congruences"]

    def validate_cache(self):
        """Recompute every cached lattice; any difference is corruption."""
        if self.object.canonical_key != self.key:
            raise CacheCorruption(f"key mismatch for {self.key}")
        fresh = {"subobjects": _subobject_lattice, "congruences": _congruence_lattice}
        for name, value in self.cache.items():
            if name in fresh and fresh[name](self.object) != value:
                raise CacheCorruption(f"cached {name} of {self.key} differ from recomputation")

    def to_data(self) -> dict:
        data = to_data(self.object)
        data["key"] = self.key
        data["provenance"] = self.provenance
        if self.object.name:
            data["name"] = self.object.name
        if self.cache:
            data["cache"] = {k: [[_cache_cell(s) for s in item] for item in v]
                             for k, v in sorted(self.cache.items())}
        return data


def _cache_cell(s):
    """A subset as a sorted list, or a partition as a sorted list of sorted classes."""
    return sorted(sorted(c) if isinstance(c, frozenset) else c for c in s)


def _subobject_lattice(obj):
    return [tuple(frozenset(s) for s in sub) for sub in enumerate_subalgebras(obj)] \
        if obj.signature.ops else _subsets_lattice(obj)


def _subsets_lattice(obj):
    n = obj.sorts[0]
    free = range(1, n) if obj.pointed else range(n)
    fixed = (0,) if obj.pointed else ()
    out = [(frozenset(fixed + c),) for k in range(len(free) + 1)
           for c in itertools.combinations(free, k)]
    return sorted(out, key=lambda s: (len(s[0]), sorted(s[0])))


def _congruence_lattice(obj):
    from .relcalc import congruence_enumerate

    out = []
    for labels in congruence_enumerate(obj):
        classes = []
        for lab in labels:
            groups = {}
            for x, c in enumerate(lab):
                groups.setdefault(c, []).append(x)
            classes.append(frozenset(frozenset(g) for g in groups.values()))
        out.append(tuple(classes))
    return out


def _entry(obj, provenance="generated"):
    return CatalogEntry(obj.canonical_key, obj, provenance)


def _dedupe(objects, provenance="generated"):
    seen = {}
    for obj in objects:
        seen.setdefault(obj.canonical_key, obj)
    entries = [CatalogEntry(k, o, provenance) for k, o in seen.items()]
    entries.sort(key=lambda e: (e.object.sorts, e.key))
    return entries


def invariant_factor_lists(n):
    """All lists ``d1 | d2 | ... | dk`` with product ``n`` and every ``di > 1``."""
    if n == 1:
        return [[]]
    out = []

    def rec(rest, prev, acc):
        if rest == 1:
            out.append(list(acc))
            return
        for d in range(2, rest + 1):
            if rest % d == 0 and (prev is None or d % prev == 0):
                # the remaining factors must be multiples of d
                tail = rest // d
                if tail == 1 or tail % d == 0:
                    acc.append(d)
                    rec(tail, d, acc)
                    acc.pop()

    rec(n, None, [])
    return out


def abelian_groups(max_order, category=CategoryId.FinAb):
    out = []
    for n in range(1, max_order + 1):
        for factors in invariant_factor_lists(n):
            name = "x".join(f"Z/{d}" for d in factors) or "0"
            parts = [cyclic(d, category) for d in factors] or [cyclic(1, category)]
            out.append(direct_product(parts, name=name))
    return out


def _automorphisms(g: FinObject):
    return [h for h in hom_enumerate(g, g) if h.is_surjective()]


def _cyclic_extensions(base: FinObject, p: int):
    """Groups with ``base`` as a normal subgroup of prime index ``p``.

    Each extension is described by an automorphism ``phi`` (conjugation by a
    coset representative ``t``) and ``a = t^p``, which must satisfy
    ``phi(a) = a`` and ``phi^p = conjugation by a``.  Elements ``t^i x`` get
    label ``i*|N| + x``.
    """
    n = base.sorts[0]
    m, inv = base.tables["mul"], base.tables["inv"]
    out = []
    for phi in _automorphisms(base):
        f = phi.maps[0]
        powers = [tuple(range(n))]
        for _ in range(p):
            powers.append(tuple(f[x] for x in powers[-1]))
        inverse_powers = [tuple(sorted(range(n), key=lambda x: q[x])) for q in powers]
        for a in range(n):
            if f[a] != a:
                continue
            conj = tuple(m[m[a * n + x] * n + inv[a]] for x in range(n))
            if powers[p] != conj:
                continue
            table = []
            for i, x in itertools.product(range(p), range(n)):
                row = []
                for j, y in itertools.product(range(p), range(n)):
                    z = m[inverse_powers[j][x] * n + y]
                    k = i + j
                    if k >= p:
                        k -= p
                        z = m[a * n + z]
                    row.append(k * n + z)
                table.append(row)
            inv_t = [row.index(0) for row in table]
            out.append(make_object(CategoryId.FinGrp, {"mul": table, "inv": inv_t}))
    return out


def _primes_dividing(n):
    return [p for p in range(2, n + 1) if n % p == 0 and all(p % q for q in range(2, p))]


@lru_cache(maxsize=None)
def _groups_by_order(max_order):
    """Isomorphism classes of solvable groups up to ``max_order`` (all groups below 60)."""
    classes = {1: {trivial_group().canonical_key: trivial_group()}}
    for order in range(2, max_order + 1):
        found = {}
        for p in _primes_dividing(order):
            for base in classes.get(order // p, {}).values():
                for g in _cyclic_extensions(base, p):
                    found.setdefault(g.canonical_key, g)
        classes[order] = found
    return classes


def _extension_field_bits(ns):
    """Per (i<=j, k): the allowed structure constants for additive invariants ``ns``."""
    slots = []
    k = len(ns)
    for i in range(k):
        for j in range(i, k):
            g = math.gcd(ns[i], ns[j])
            for out in range(k):
                allowed = [c for c in range(ns[out]) if (g * c) % ns[out] == 0]
                slots.append(((i, j, out), allowed))
    return slots


def _rng_structures(ns, chunk=1 << 15):
    """Associative commutative structure constants on ``Z/n1 x ... x Z/nk``."""
    k = len(ns)
    slots = _extension_field_bits(ns)
    choices = [np.array(a, dtype=np.int64) for _, a in slots]
    total = math.prod(len(c) for c in choices)
    mods = np.array(ns, dtype=np.int64)
    radices = [len(c) for c in choices]
    good = []
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        consts = np.zeros((len(idx), k, k, k), dtype=np.int64)
        rest = idx.copy()
        for (i, j, out), ch, r in zip(reversed([s for s, _ in slots]), reversed(choices),
                                      reversed(radices)):
            val = ch[rest % r]
            rest //= r
            consts[:, i, j, out] = val
            consts[:, j, i, out] = val
        left = np.einsum("mijk,mklo->mijlo", consts, consts) % mods
        right = np.einsum("mjlk,miko->mijlo", consts, consts) % mods
        ok = (left == right).reshape(len(idx), -1).all(axis=1)
        good.extend(consts[ok].tolist())
    return good


def _rngs_with_additive_group(ns):
    if not ns:
        return [ring_mod(1)]
    add_obj = direct_product([cyclic(d) for d in ns])
    size = add_obj.sorts[0]
    # labels are mixed radix, last factor fastest (matches direct_product)
    coords = list(itertools.product(*[range(d) for d in ns]))
    index = {c: i for i, c in enumerate(coords)}
    autos = [h.maps[0] for h in _automorphisms(add_obj)]
    seen = set()
    reps = []
    for consts in _rng_structures(ns):
        basis_products = [[tuple(consts[i][j][o] for o in range(len(ns))) for j in range(len(ns))]
                          for i in range(len(ns))]
        table = []
        for a in coords:
            row = []
            for b in coords:
                acc = [0] * len(ns)
                for i, ai in enumerate(a):
                    if not ai:
                        continue
                    for j, bj in enumerate(b):
                        if not bj:
                            continue
                        for o, c in enumerate(basis_products[i][j]):
                            acc[o] += ai * bj * c
                row.append(index[tuple(v % d for v, d in zip(acc, ns))])
            table.append(tuple(row))
        flat = tuple(itertools.chain.from_iterable(table))
        if flat in seen:
            continue
        reps.append(flat)
        for s in autos:
            moved = [0] * (size * size)
            for x in range(size):
                for y in range(size):
                    moved[s[x] * size + s[y]] = s[flat[x * size + y]]
            seen.add(tuple(moved))
    out = []
    for flat in reps:
        tables = {
            "add": [list(add_obj.tables["add"][r * size:(r + 1) * size]) for r in range(size)],
            "neg": list(add_obj.tables["neg"]),
            "mul": [list(flat[r * size:(r + 1) * size]) for r in range(size)],
        }
        out.append(make_object(CategoryId.FinCRng, tables))
    return out


def _normal_subgroups(g: FinObject):
    n = g.sorts[0]
    m, inv = g.tables["mul"], g.tables["inv"]
    out = []
    for sub in enumerate_subalgebras(g):
        s = sub[0]
        if all(m[m[x * n + a] * n + inv[x]] in s for x in range(n) for a in s):
            out.append(s)
    return out


def _groups_up_to(max_order):
    classes = _groups_by_order(max_order)
    return [g for order in sorted(classes) for g in classes[order].values()]


def _xmods(max_t, max_g):
    """All crossed modules with ``|T| <= max_t`` and ``|G| <= max_g``."""
    out = []
    for t in _groups_up_to(max_t):
        nt = t.sorts[0]
        autos = _automorphisms(t)
        aut_maps = [h.maps[0] for h in autos]
        aut_index = {a: i for i, a in enumerate(aut_maps)}
        ident = tuple(range(nt))
        order = [aut_index[ident]] + [i for i in range(len(aut_maps)) if aut_maps[i] != ident]
        aut_maps = [aut_maps[i] for i in order]
        aut_index = {a: i for i, a in enumerate(aut_maps)}
        aut_mul = [[aut_index[tuple(f[x] for x in g_)] for g_ in aut_maps] for f in aut_maps]
        aut_grp = make_object(CategoryId.FinGrp, {
            "mul": aut_mul, "inv": [row.index(0) for row in aut_mul]})
        for g in _groups_up_to(max_g):
            ng = g.sorts[0]
            for bd in hom_enumerate(t, g):
                for rho in hom_enumerate(g, aut_grp):
                    act = [list(aut_maps[rho.maps[0][x]]) for x in range(ng)]
                    tables = {
                        "mul_T": [list(t.tables["mul"][r * nt:(r + 1) * nt]) for r in range(nt)],
                        "inv_T": list(t.tables["inv"]),
                        "mul_G": [list(g.tables["mul"][r * ng:(r + 1) * ng]) for r in range(ng)],
                        "inv_G": list(g.tables["inv"]),
                        "bd": list(bd.maps[0]),
                        "act": act,
                    }
                    try:
                        out.append(make_object(CategoryId.XMod, tables))
                    except Exception:  # noqa: BLE001  Peiffer identities fail
                        continue
    return out


def _order_bound(category, max_order):
    if isinstance(max_order, (tuple, list)):
        bound = tuple(int(v) for v in max_order)
    else:
        bound = (int(max_order),) * CategoryId(category).signature.nsorts
    limit = HARD_LIMITS[CategoryId(category)]
    if any(b > limit for b in bound):
        raise CapExceeded(f"max_order {max_order} exceeds the hard limit {limit} for {category}")
    return bound


@lru_cache(maxsize=None)
def _generate(category, bound):
    if category is CategoryId.FinSet:
        return [FinObject(category, [n], {}, name=str(n)) for n in range(bound[0] + 1)]
    if category is CategoryId.FinPtSet:
        return [FinObject(category, [n], {}, name=str(n)) for n in range(1, bound[0] + 1)]
    if category is CategoryId.FinAb:
        return abelian_groups(bound[0])
    if category is CategoryId.FinGrp:
        return _groups_up_to(bound[0])
    if category is CategoryId.FinCRng:
        out = []
        for n in range(1, bound[0] + 1):
            for ns in invariant_factor_lists(n):
                out.extend(_rngs_with_additive_group(ns))
        return out
    if category is CategoryId.Norm:
        out = []
        for g in _groups_up_to(bound[1]):
            for s in _normal_subgroups(g):
                if len(s) <= bound[0]:
                    out.append(norm_from_subgroup(g, s))
        return out
    return _xmods(bound[0], bound[1])


def generate_all(category, max_order, cap=None) -> list:
    """Isomorphism-class representatives up to ``max_order``, ordered by size then key.

    ``max_order`` bounds every sort; for Norm and XMod a pair bounds the two
    sorts separately.
    """
    category = CategoryId(category)
    bound = _order_bound(category, max_order)
    entries = _dedupe(_generate(category, bound))
    if cap is not None and len(entries) > cap:
        raise CapExceeded(f"more than {cap} objects", partial=entries[:cap])
    return entries


# -- persistence --------------------------------------------------------------------------

def _content_hash(entries_data) -> str:
    payload = json.dumps(entries_data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


def dump_corpus(entries) -> str:
    data = [e.to_data() for e in entries]
    counts = {}
    for e in entries:
        counts[e.object.category.value] = counts.get(e.object.category.value, 0) + 1
    doc = {"manifest": {"schema": SCHEMA, "counts": dict(sorted(counts.items())),
                        "hash": _content_hash(data)},
           "entries": data}
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def save(entries, path) -> None:
    Path(path).write_text(dump_corpus(entries))


def _load_cache(raw, location):
    cache = {}
    for name, items in raw.items():
        try:
            cache[name] = [tuple(frozenset(s) for s in item) if name == "subobjects"
                           else tuple(frozenset(frozenset(c) for c in sort) for sort in item)
                           for item in items]
        except TypeError:
            raise ParseError(f"malformed cache {name!r}", location) from None
    return cache


def parse_corpus(text: str) -> list:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    if not isinstance(doc, dict) or "entries" not in doc or "manifest" not in doc:
        raise ParseError("corpus must hold 'manifest' and 'entries'", "top level")
    if not isinstance(doc["entries"], list):
        raise ParseError("'entries' must be an array", "entries")
    entries = []
    for i, raw in enumerate(doc["entries"]):
        location = f"entries[{i}]"
        obj = from_data(raw, location)
        provenance = raw.get("provenance", "loaded")
        entry = CatalogEntry(obj.canonical_key, obj, provenance,
                             _load_cache(raw.get("cache", {}), location))
        if "key" in raw and raw["key"] != entry.key:
            raise CacheCorruption(f"{location}: stored key {raw['key']} does not match")
        entries.append(entry)
    manifest = doc["manifest"]
    if manifest.get("schema") != SCHEMA:
        raise ParseError(f"unsupported schema {manifest.get('schema')!r}", "manifest")
    if manifest.get("hash") != _content_hash(doc["entries"]):
        raise CacheCorruption("corpus content hash does not match its manifest")
    return entries


def load(path) -> list:
    return parse_corpus(Path(path).read_text())


def find(entries, key_or_name, category=None):
    """Look an object up by canonical key or name among ``entries``, then among builtins."""
    for e in entries:
        if category is not None and e.object.category is not CategoryId(category):
            continue
        if key_or_name in (e.key, e.object.name):
            return e.object
    if category is None:
        raise UnknownName(key_or_name)
    return builtin(category, key_or_name)


def morphisms_between(objects, cap=None):
    """Every homomorphism between every ordered pair of ``objects``."""
    out = []
    for a in objects:
        for b in objects:
            out.extend(hom_enumerate(a, b, cap=cap))
    return out


__all__ = [
    "CatalogEntry", "builtin", "builtin_names", "generate_all", "save", "load",
    "dump_corpus", "parse_corpus", "find", "cyclic", "ring_mod", "direct_product",
    "permutation_group", "norm_from_subgroup", "xmod_trivial_action", "as_group",
    "abelian_groups", "invariant_factor_lists", "morphisms_between",
]
