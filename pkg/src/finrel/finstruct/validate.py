"""Axiom checks for raw tables and homomorphism checks for carrier maps."""
from __future__ import annotations

import itertools

from ..errors import AxiomViolation
from .core import CategoryId, FinObject, Morphism


def _flatten(op, raw, sizes):
    if len(op.args) == 1:
        flat = list(raw)
        if len(flat) != sizes[op.args[0]]:
            raise AxiomViolation(f"dimension of {op.name}", (len(flat), sizes[op.args[0]]))
        return flat
    rows = list(raw)
    if len(rows) != sizes[op.args[0]]:
        raise AxiomViolation(f"dimension of {op.name}", (len(rows), sizes[op.args[0]]))
    flat = []
    for i, row in enumerate(rows):
        row = list(row)
        if len(row) != sizes[op.args[1]]:
            raise AxiomViolation(f"dimension of {op.name}", (i, len(row)))
        flat.extend(row)
    return flat


def _infer_sorts(category, tables):
    sig = category.signature
    sizes = []
    for s in range(sig.nsorts):
        op = sig.group_op(s)
        if op is None or op.name not in tables:
            raise AxiomViolation("carrier sizes must be given", category.value)
        sizes.append(len(tables[op.name]))
    return sizes


def make_object(category, tables=None, sorts=None, name=None) -> FinObject:
    """Validate raw (nested) tables and build a :class:`FinObject`.

    Binary tables are lists of rows, unary tables flat lists.  ``sorts`` may be
    omitted whenever every sort carries a group operation.
    """
    category = CategoryId(category)
    sig = category.signature
    tables = dict(tables or {})
    if sorts is None:
        sorts = _infer_sorts(category, tables)
    sorts = [int(n) for n in sorts]
    if len(sorts) != sig.nsorts:
        raise AxiomViolation("number of sorts", (len(sorts), sig.nsorts))
    if any(n < 0 for n in sorts):
        raise AxiomViolation("negative carrier size", tuple(sorts))
    if category.pointed and any(n < 1 for n in sorts):
        raise AxiomViolation("pointed carrier must be nonempty", tuple(sorts))
    missing = [op.name for op in sig.ops if op.name not in tables]
    if missing:
        raise AxiomViolation("missing tables", tuple(missing))
    extra = sorted(set(tables) - {op.name for op in sig.ops})
    if extra:
        raise AxiomViolation("unexpected tables", tuple(extra))
    flat = {}
    for op in sig.ops:
        values = _flatten(op, tables[op.name], sorts)
        for i, v in enumerate(values):
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < sorts[op.out]:
                raise AxiomViolation(f"closure of {op.name}", (i, v))
        flat[op.name] = values
    obj = FinObject(category, sorts, flat, name=name)
    check_axioms(obj)
    return obj


def _check_group(obj, sort, mul_name, inv_name, commutative):
    n = obj.sorts[sort]
    m = obj.tables[mul_name]
    inv = obj.tables[inv_name]
    for x in range(n):
        if m[x] != x or m[x * n] != x:
            raise AxiomViolation(f"identity of {mul_name}", (x,))
        if m[x * n + inv[x]] != 0 or m[inv[x] * n + x] != 0:
            raise AxiomViolation(f"inverse of {mul_name}", (x,))
    for x, y in itertools.product(range(n), repeat=2):
        if commutative and m[x * n + y] != m[y * n + x]:
            raise AxiomViolation(f"commutativity of {mul_name}", (x, y))
        xy = m[x * n + y]
        for z in range(n):
            if m[xy * n + z] != m[x * n + m[y * n + z]]:
                raise AxiomViolation(f"associativity of {mul_name}", (x, y, z))


def _check_ring(obj):
    n = obj.sorts[0]
    a, m = obj.tables["add"], obj.tables["mul"]
    for x, y in itertools.product(range(n), repeat=2):
        xy = m[x * n + y]
        if xy != m[y * n + x]:
            raise AxiomViolation("commutativity of mul", (x, y))
        for z in range(n):
            if m[xy * n + z] != m[x * n + m[y * n + z]]:
                raise AxiomViolation("associativity of mul", (x, y, z))
            if m[x * n + a[y * n + z]] != a[xy * n + m[x * n + z]]:
                raise AxiomViolation("distributivity", (x, y, z))


def _check_hom_op(obj, name, src_mul, dst_mul):
    src, dst = obj.signature.op(name).args[0], obj.signature.op(name).out
    ns, nd = obj.sorts[src], obj.sorts[dst]
    f = obj.tables[name]
    ms, md = obj.tables[src_mul], obj.tables[dst_mul]
    for x, y in itertools.product(range(ns), repeat=2):
        if f[ms[x * ns + y]] != md[f[x] * nd + f[y]]:
            raise AxiomViolation(f"{name} is a homomorphism", (x, y))


def _check_action(obj, name, g_mul, t_mul):
    nt, ng = obj.sorts[0], obj.sorts[1]
    act = obj.tables[name]
    mg, mt = obj.tables[g_mul], obj.tables[t_mul]
    for t in range(nt):
        if act[t] != t:
            raise AxiomViolation(f"{name}: identity acts trivially", (0, t))
    for g in range(ng):
        for s, t in itertools.product(range(nt), repeat=2):
            if act[g * nt + mt[s * nt + t]] != mt[act[g * nt + s] * nt + act[g * nt + t]]:
                raise AxiomViolation(f"{name}: action by automorphisms", (g, s, t))
        for h in range(ng):
            gh = mg[g * ng + h]
            for t in range(nt):
                if act[gh * nt + t] != act[g * nt + act[h * nt + t]]:
                    raise AxiomViolation(f"{name}: action law", (g, h, t))


def _check_peiffer(obj, bd_name, act_name, t_mul, t_inv, g_mul, g_inv, full):
    nt, ng = obj.sorts[0], obj.sorts[1]
    bd, act = obj.tables[bd_name], obj.tables[act_name]
    mt, it = obj.tables[t_mul], obj.tables[t_inv]
    mg, ig = obj.tables[g_mul], obj.tables[g_inv]
    for g in range(ng):
        for t in range(nt):
            conj = mg[mg[g * ng + bd[t]] * ng + ig[g]]
            if bd[act[g * nt + t]] != conj:
                raise AxiomViolation(f"{bd_name}(g.t) = g {bd_name}(t) g^-1", (g, t))
    if not full:
        return
    for s, t in itertools.product(range(nt), repeat=2):
        if act[bd[s] * nt + t] != mt[mt[s * nt + t] * nt + it[s]]:
            raise AxiomViolation(f"{bd_name}(s).t = s t s^-1", (s, t))


def check_axioms(obj: FinObject) -> None:
    cat = obj.category
    if cat in (CategoryId.FinSet, CategoryId.FinPtSet):
        return
    if cat is CategoryId.FinGrp:
        _check_group(obj, 0, "mul", "inv", False)
    elif cat is CategoryId.FinAb:
        _check_group(obj, 0, "add", "neg", True)
    elif cat is CategoryId.FinCRng:
        _check_group(obj, 0, "add", "neg", True)
        _check_ring(obj)
    elif cat is CategoryId.Norm:
        _check_group(obj, 0, "mul_N", "inv_N", False)
        _check_group(obj, 1, "mul_G", "inv_G", False)
        _check_hom_op(obj, "incl", "mul_N", "mul_G")
        incl = obj.tables["incl"]
        if len(set(incl)) != len(incl):
            raise AxiomViolation("incl is injective", tuple(incl))
        _check_action(obj, "conj", "mul_G", "mul_N")
        _check_peiffer(obj, "incl", "conj", "mul_N", "inv_N", "mul_G", "inv_G", full=False)
    elif cat is CategoryId.XMod:
        _check_group(obj, 0, "mul_T", "inv_T", False)
        _check_group(obj, 1, "mul_G", "inv_G", False)
        _check_hom_op(obj, "bd", "mul_T", "mul_G")
        _check_action(obj, "act", "mul_G", "mul_T")
        _check_peiffer(obj, "bd", "act", "mul_T", "inv_T", "mul_G", "inv_G", full=True)


def check_homomorphism(f: Morphism) -> None:
    dom, cod = f.dom, f.cod
    if len(f.maps) != dom.nsorts:
        raise AxiomViolation("homomorphism: number of sorts", len(f.maps))
    for s, (m, n, k) in enumerate(zip(f.maps, dom.sorts, cod.sorts)):
        if len(m) != n or any(not 0 <= v < k for v in m):
            raise AxiomViolation("homomorphism: carrier map", (s, m))
        if dom.pointed and m[0] != 0:
            raise AxiomViolation("homomorphism: preserves the point", (s,))
    for op in dom.signature.ops:
        ranges = [range(dom.sorts[s]) for s in op.args]
        for args in itertools.product(*ranges):
            image = tuple(f.maps[s][a] for s, a in zip(op.args, args))
            if f.maps[op.out][dom.apply(op, args)] != cod.apply(op, image):
                raise AxiomViolation(f"homomorphism: {op.name}", args)
