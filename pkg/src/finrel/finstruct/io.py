"""JSON structure files: ``{"category", "sorts", "tables"}`` with nested tables."""
from __future__ import annotations

import json

from ..errors import ParseError
from .core import CategoryId, FinObject
from .validate import make_object


def to_data(obj: FinObject) -> dict:
    tables = {}
    for op in obj.signature.ops:
        flat = obj.tables[op.name]
        if len(op.args) == 1:
            tables[op.name] = list(flat)
        else:
            w = obj.sorts[op.args[1]]
            tables[op.name] = [list(flat[i:i + w]) for i in range(0, len(flat), w)]
    return {"category": obj.category.value, "sorts": list(obj.sorts), "tables": tables}


def from_data(data, location=None) -> FinObject:
    """Parse and validate one structure; shape errors raise :class:`ParseError`."""
    if not isinstance(data, dict):
        raise ParseError("structure must be a JSON object", location)
    for field in ("category", "sorts", "tables"):
        if field not in data:
            raise ParseError(f"missing field {field!r}", location)
    try:
        category = CategoryId(data["category"])
    except ValueError:
        raise ParseError(f"unknown category {data['category']!r}", location) from None
    sorts, tables = data["sorts"], data["tables"]
    if not isinstance(sorts, list) or not all(isinstance(n, int) for n in sorts):
        raise ParseError("sorts must be a list of integers", location)
    if not isinstance(tables, dict):
        raise ParseError("tables must be an object", location)
    for name, t in tables.items():
        if not isinstance(t, list):
            raise ParseError(f"table {name!r} must be an array", location)
        for row in t:
            if isinstance(row, list):
                if not all(isinstance(v, int) for v in row):
                    raise ParseError(f"table {name!r} has a non-integer entry", location)
            elif not isinstance(row, int):
                raise ParseError(f"table {name!r} has a non-integer entry", location)
    return make_object(category, tables, sorts=sorts, name=data.get("name"))


def dumps(obj: FinObject) -> str:
    return json.dumps(to_data(obj), separators=(",", ":"), sort_keys=True)


def loads(text: str) -> FinObject:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return from_data(data)
