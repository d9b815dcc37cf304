"""Finite algebras, their signatures, and homomorphisms.

Every category instance is a (possibly two-sorted) variety or quasivariety of
finite algebras.  Carriers are dense ranges ``0..n-1`` per sort and, in pointed
instances, ``0`` is the distinguished point of every sort.  Operation tables are
stored flat: a binary table on sorts of sizes ``(a, b)`` has length ``a * b`` and
entry ``x * b + y``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property


class CategoryId(str, enum.Enum):
    FinSet = "FinSet"
    FinPtSet = "FinPtSet"
    FinGrp = "FinGrp"
    FinAb = "FinAb"
    FinCRng = "FinCRng"
    Norm = "Norm"
    XMod = "XMod"

    def __str__(self):
        return self.value

    @property
    def pointed(self) -> bool:
        return self is not CategoryId.FinSet

    @property
    def exact(self) -> bool:
        # Norm is the only shipped instance with non-effective equivalence relations.
        return self is not CategoryId.Norm

    @property
    def signature(self) -> "Signature":
        return SIGNATURES[self]


@dataclass(frozen=True)
class Op:
    """One operation symbol.

    ``kind`` tells the closure engine how the operation interacts with the rest:
    ``mul`` is the group operation of its sort, ``inv`` its inverse, ``ringmul``
    a bilinear product, ``hom`` a homomorphism between sorts and ``act`` an
    action by automorphisms of sort ``args[0]`` on sort ``args[1]``.
    """

    name: str
    kind: str
    args: tuple
    out: int


@dataclass(frozen=True)
class Signature:
    sort_names: tuple
    ops: tuple

    @property
    def nsorts(self) -> int:
        return len(self.sort_names)

    def op(self, name) -> Op:
        for op in self.ops:
            if op.name == name:
                return op
        raise KeyError(name)

    def group_op(self, sort):
        for op in self.ops:
            if op.kind == "mul" and op.out == sort:
                return op
        return None


def _group_ops(suffix, sort, add=False):
    if add:
        return (Op("add", "mul", (sort, sort), sort), Op("neg", "inv", (sort,), sort))
    return (
        Op(f"mul{suffix}", "mul", (sort, sort), sort),
        Op(f"inv{suffix}", "inv", (sort,), sort),
    )


SIGNATURES = {
    CategoryId.FinSet: Signature(("X",), ()),
    CategoryId.FinPtSet: Signature(("X",), ()),
    CategoryId.FinGrp: Signature(("G",), _group_ops("", 0)),
    CategoryId.FinAb: Signature(("A",), _group_ops("", 0, add=True)),
    CategoryId.FinCRng: Signature(
        ("R",), _group_ops("", 0, add=True) + (Op("mul", "ringmul", (0, 0), 0),)
    ),
    # Norm carries the conjugation action explicitly so that subalgebras are
    # exactly the pairs N' <| G' and homomorphisms need no extra condition.
    CategoryId.Norm: Signature(
        ("N", "G"),
        _group_ops("_N", 0)
        + _group_ops("_G", 1)
        + (Op("incl", "hom", (0,), 1), Op("conj", "act", (1, 0), 0)),
    ),
    CategoryId.XMod: Signature(
        ("T", "G"),
        _group_ops("_T", 0)
        + _group_ops("_G", 1)
        + (Op("bd", "hom", (0,), 1), Op("act", "act", (1, 0), 0)),
    ),
}

# Norm and XMod share a layout; these renamings translate one into the other.
NORM_TO_XMOD = {"mul_N": "mul_T", "inv_N": "inv_T", "mul_G": "mul_G", "inv_G": "inv_G",
                "incl": "bd", "conj": "act"}
XMOD_TO_NORM = {v: k for k, v in NORM_TO_XMOD.items()}


class FinObject:
    """A finite algebra of one of the shipped categories.

    The constructor trusts its input; use :func:`finrel.finstruct.make_object`
    to validate raw tables.
    """

    def __init__(self, category, sorts, tables, name=None):
        self.category = CategoryId(category)
        sig = self.category.signature
        self.sorts = tuple(int(n) for n in sorts)
        if len(self.sorts) != sig.nsorts:
            raise ValueError(f"{self.category} expects {sig.nsorts} sort(s)")
        self.tables = {op.name: tuple(tables[op.name]) for op in sig.ops}
        self.name = name
        self._hash = hash((self.category, self.sorts, tuple(self.tables.values())))

    @property
    def signature(self) -> Signature:
        return self.category.signature

    @property
    def nsorts(self) -> int:
        return len(self.sorts)

    @property
    def order(self):
        """Carrier size (an int for one sort, a tuple for two)."""
        return self.sorts[0] if len(self.sorts) == 1 else self.sorts

    @property
    def pointed(self) -> bool:
        return self.category.pointed

    def is_zero(self) -> bool:
        return self.pointed and all(n == 1 for n in self.sorts)

    def is_empty(self) -> bool:
        return any(n == 0 for n in self.sorts)

    def table(self, name):
        return self.tables[name]

    def apply(self, op: Op, args):
        t = self.tables[op.name]
        if len(args) == 1:
            return t[args[0]]
        return t[args[0] * self.sorts[op.args[1]] + args[1]]

    def key_tuple(self):
        return (self.category.value, self.sorts, tuple(self.tables.values()))

    def __eq__(self, other):
        if not isinstance(other, FinObject):
            return NotImplemented
        return self._hash == other._hash and self.key_tuple() == other.key_tuple()

    def __hash__(self):
        return self._hash

    def __repr__(self):
        label = self.name or f"{self.category}{list(self.sorts)}"
        return f"FinObject({label})"

    @cached_property
    def canonical_form(self):
        from .canon import canonical_form

        return canonical_form(self)

    @cached_property
    def canonical_key(self) -> str:
        from .canon import key_of_form

        return key_of_form(self.canonical_form)

    # single-sort conveniences used by the abelian/ring instances

    def add(self, x, y):
        return self.tables["add"][x * self.sorts[0] + y]

    def mul(self, x, y):
        return self.tables["mul"][x * self.sorts[0] + y]

    def elem_order(self, x, sort=0):
        """Order of ``x`` in the group structure of ``sort``."""
        op = self.signature.group_op(sort)
        t = self.tables[op.name]
        n = self.sorts[sort]
        k, y = 1, x
        while y != 0:
            y = t[y * n + x]
            k += 1
        return k


class Morphism:
    """A homomorphism, stored as one carrier map per sort."""

    def __init__(self, dom: FinObject, cod: FinObject, maps, check=True):
        if dom.category is not cod.category:
            from ..errors import CategoryMismatch

            raise CategoryMismatch(f"{dom.category} vs {cod.category}")
        self.dom = dom
        self.cod = cod
        self.maps = tuple(tuple(m) for m in maps)
        if check:
            from .validate import check_homomorphism

            check_homomorphism(self)

    @classmethod
    def identity(cls, obj):
        return cls(obj, obj, [range(n) for n in obj.sorts], check=False)

    @classmethod
    def zero(cls, dom, cod):
        return cls(dom, cod, [[0] * n for n in dom.sorts], check=False)

    def __call__(self, x, sort=0):
        return self.maps[sort][x]

    def __matmul__(self, other: "Morphism") -> "Morphism":
        """``g @ f`` is the composite "first f, then g"."""
        if other.cod != self.dom:
            from ..errors import DomainMismatch

            raise DomainMismatch("composite of non-composable morphisms")
        maps = [tuple(g[x] for x in f) for g, f in zip(self.maps, other.maps)]
        return Morphism(other.dom, self.cod, maps, check=False)

    def is_injective(self) -> bool:
        return all(len(set(m)) == len(m) for m in self.maps)

    def is_surjective(self) -> bool:
        return all(set(m) == set(range(n)) for m, n in zip(self.maps, self.cod.sorts))

    def is_iso(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def is_zero(self) -> bool:
        return all(all(v == 0 for v in m) for m in self.maps)

    def image(self):
        return tuple(frozenset(m) for m in self.maps)

    def __eq__(self, other):
        if not isinstance(other, Morphism):
            return NotImplemented
        return self.maps == other.maps and self.dom == other.dom and self.cod == other.cod

    def __hash__(self):
        return hash(self.maps)

    def __repr__(self):
        return f"Morphism({self.dom!r} -> {self.cod!r}, {list(map(list, self.maps))})"
