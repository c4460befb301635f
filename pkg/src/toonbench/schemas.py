"""Structural schemas, the built-in benchmark cases, validation, gold writers."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .toon import encode_toon
from .values import Value, emit_canonical_json, format_path


@dataclass(frozen=True)
class IntType:
    kind: str = "int"


@dataclass(frozen=True)
class FloatType:
    kind: str = "float"


@dataclass(frozen=True)
class StrType:
    kind: str = "str"


@dataclass(frozen=True)
class BoolType:
    kind: str = "bool"


@dataclass(frozen=True)
class ObjectType:
    fields: tuple = ()  # tuple of (name, Schema); all required
    kind: str = "object"

    def field_map(self) -> dict:
        return dict(self.fields)


@dataclass(frozen=True)
class ArrayType:
    element: "Schema" = None
    kind: str = "array"


Schema = Union[IntType, FloatType, StrType, BoolType, ObjectType, ArrayType]

SCALAR_KINDS = ("int", "float", "str", "bool")


@dataclass(frozen=True)
class ValidationError:
    path: tuple
    expected: str
    found: str

    def __str__(self) -> str:
        return f"{format_path(self.path)}: expected {self.expected}, found {self.found}"


_INT_STR_RE = re.compile(r"-?\d+\Z")
_FLOAT_STR_RE = re.compile(r"-?\d+(\.\d+)?([eE][+-]?\d+)?\Z")


def _found_kind(v: Value) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, int):
        return "int"
    if isinstance(v, float):
        return "float"
    if isinstance(v, str):
        return "str"
    if isinstance(v, dict):
        return "object"
    return "array"


def validate(v: Value, s: Schema, _path=()) -> list:
    """Structural validation with lenient numeric coercion.

    Numeric strings satisfy Int/FloatType, ints satisfy FloatType, and
    zero-fraction floats satisfy IntType.  All object fields are required
    and unknown extras are errors.  Returns a list of ValidationError
    (empty means valid).
    """
    errors: list = []
    kind = s.kind
    found = _found_kind(v)
    if kind == "int":
        ok = (found == "int"
              or (found == "float" and v.is_integer())
              or (found == "str" and _INT_STR_RE.match(v)))
        if not ok:
            errors.append(ValidationError(_path, "int", found))
    elif kind == "float":
        ok = (found in ("int", "float")
              or (found == "str" and _FLOAT_STR_RE.match(v)))
        if not ok:
            errors.append(ValidationError(_path, "float", found))
    elif kind == "str":
        if found != "str":
            errors.append(ValidationError(_path, "str", found))
    elif kind == "bool":
        if found != "bool":
            errors.append(ValidationError(_path, "bool", found))
    elif kind == "object":
        if found != "object":
            errors.append(ValidationError(_path, "object", found))
        else:
            fmap = s.field_map()
            for name, fs in s.fields:
                if name not in v:
                    errors.append(ValidationError(_path + (name,), fs.kind, "missing"))
                else:
                    errors.extend(validate(v[name], fs, _path + (name,)))
            for name in v:
                if name not in fmap:
                    errors.append(ValidationError(_path + (name,), "absent", "extra field"))
    elif kind == "array":
        if found != "array":
            errors.append(ValidationError(_path, "array", found))
        else:
            for i, item in enumerate(v):
                errors.extend(validate(item, s.element, _path + (i,)))
    else:  # pragma: no cover
        raise ValueError(f"unknown schema kind {kind!r}")
    return errors


@dataclass(frozen=True)
class CaseSpec:
    name: str
    task_body: str  # J/JSO prompt text, verbatim
    toon_task_body: str  # task section of the T prompt
    schema: Schema
    gold: Value = field(hash=False)


def _obj(*fields) -> ObjectType:
    return ObjectType(tuple(fields))


_ORDER_TASK = """Create an order record:
- Order ID: 101
- Customer: Ada (ID: 9)
- Items:
  * Product A1: quantity 2, price $9.99 each
  * Product B2: quantity 1, price $14.50 each

Return as JSON with fields for id, customer (with id and name),
and items array (with sku, qty, price).
"""

_ORDER_TOON_TASK = """Create an order record with fields: id, customer (with id and name),
and items array (with sku, qty, price).
- Order ID: 101
- Customer: Ada (ID: 9)
- Items:
  * Product A1: quantity 2, price $9.99 each
  * Product B2: quantity 1, price $14.50 each
"""

_ORDER_SCHEMA = _obj(
    ("id", IntType()),
    ("customer", _obj(("id", IntType()), ("name", StrType()))),
    ("items", ArrayType(_obj(("sku", StrType()), ("qty", IntType()), ("price", FloatType())))),
)

_ORDER_GOLD = {
    "id": 101,
    "customer": {"id": 9, "name": "Ada"},
    "items": [
        {"sku": "A1", "qty": 2, "price": 9.99},
        {"sku": "B2", "qty": 1, "price": 14.50},
    ],
}

_USERS_TASK = """Create a user directory record:
- Users:
  * User 1: Ada Lovelace, ada@example.com, admin
  * User 2: Grace Hopper, grace@example.com, editor
  * User 3: Alan Turing, alan@example.com, viewer
  * User 4: Edsger Dijkstra, edsger@example.com, viewer

Return as JSON with a users array (with id, name, email, role).
"""

_USERS_TOON_TASK = """Create a user directory record with a users array (with id, name, email, role).
- Users:
  * User 1: Ada Lovelace, ada@example.com, admin
  * User 2: Grace Hopper, grace@example.com, editor
  * User 3: Alan Turing, alan@example.com, viewer
  * User 4: Edsger Dijkstra, edsger@example.com, viewer
"""

_USERS_SCHEMA = _obj(
    ("users", ArrayType(_obj(
        ("id", IntType()),
        ("name", StrType()),
        ("email", StrType()),
        ("role", StrType()),
    ))),
)

_USERS_GOLD = {
    "users": [
        {"id": 1, "name": "Ada Lovelace", "email": "ada@example.com", "role": "admin"},
        {"id": 2, "name": "Grace Hopper", "email": "grace@example.com", "role": "editor"},
        {"id": 3, "name": "Alan Turing", "email": "alan@example.com", "role": "viewer"},
        {"id": 4, "name": "Edsger Dijkstra", "email": "edsger@example.com", "role": "viewer"},
    ],
}

_COMPANY_TASK = """Create a company record:
- Company: Initech
- Departments:
  * Engineering
    - Team Platform: employees Ada (ID 1, title Principal), Grace (ID 2, title Staff)
    - Team Product: employees Alan (ID 3, title Senior)
  * Sales
    - Team EMEA: employees Edsger (ID 4, title Lead), Barbara (ID 5, title Account), Donald (ID 6, title Account)

Return as JSON with fields for name and departments array (each with name
and teams array, each team with name and employees array with id, name, title).
"""

_COMPANY_TOON_TASK = """Create a company record with fields: name and departments array (each with name
and teams array, each team with name and employees array with id, name, title).
- Company: Initech
- Departments:
  * Engineering
    - Team Platform: employees Ada (ID 1, title Principal), Grace (ID 2, title Staff)
    - Team Product: employees Alan (ID 3, title Senior)
  * Sales
    - Team EMEA: employees Edsger (ID 4, title Lead), Barbara (ID 5, title Account), Donald (ID 6, title Account)
"""

_COMPANY_SCHEMA = _obj(
    ("name", StrType()),
    ("departments", ArrayType(_obj(
        ("name", StrType()),
        ("teams", ArrayType(_obj(
            ("name", StrType()),
            ("employees", ArrayType(_obj(
                ("id", IntType()),
                ("name", StrType()),
                ("title", StrType()),
            ))),
        ))),
    ))),
)

_COMPANY_GOLD = {
    "name": "Initech",
    "departments": [
        {
            "name": "Engineering",
            "teams": [
                {"name": "Platform", "employees": [
                    {"id": 1, "name": "Ada", "title": "Principal"},
                    {"id": 2, "name": "Grace", "title": "Staff"},
                ]},
                {"name": "Product", "employees": [
                    {"id": 3, "name": "Alan", "title": "Senior"},
                ]},
            ],
        },
        {
            "name": "Sales",
            "teams": [
                {"name": "EMEA", "employees": [
                    {"id": 4, "name": "Edsger", "title": "Lead"},
                    {"id": 5, "name": "Barbara", "title": "Account"},
                    {"id": 6, "name": "Donald", "title": "Account"},
                ]},
            ],
        },
    ],
}

_INVOICE_TASK = """Create an invoice record:
- Invoice ID: 2024
- Customer: Bob (ID 7)
- Items:
  * Widget: quantity 2, price $3.50 each
  * Gadget: quantity 1, price $10.25 each
  * Gizmo: quantity 3, price $1.50 each
- Totals: subtotal is the sum of quantity times price per item; no tax is
  applied, so total equals subtotal.

Return as JSON with fields for id, customer (with id and name), items array
(with desc, qty, price), and totals (with subtotal, total).
"""

_INVOICE_TOON_TASK = """Create an invoice record with fields: id, customer (with id and name), items array
(with desc, qty, price), and totals (with subtotal, total).
- Invoice ID: 2024
- Customer: Bob (ID 7)
- Items:
  * Widget: quantity 2, price $3.50 each
  * Gadget: quantity 1, price $10.25 each
  * Gizmo: quantity 3, price $1.50 each
- Totals: subtotal is the sum of quantity times price per item; no tax is
  applied, so total equals subtotal.
"""

_INVOICE_SCHEMA = _obj(
    ("id", IntType()),
    ("customer", _obj(("id", IntType()), ("name", StrType()))),
    ("items", ArrayType(_obj(("desc", StrType()), ("qty", IntType()), ("price", FloatType())))),
    ("totals", _obj(("subtotal", FloatType()), ("total", FloatType()))),
)

# subtotal = 2*3.50 + 1*10.25 + 3*1.50 = 21.75; all terms binary-exact
_INVOICE_GOLD = {
    "id": 2024,
    "customer": {"id": 7, "name": "Bob"},
    "items": [
        {"desc": "Widget", "qty": 2, "price": 3.50},
        {"desc": "Gadget", "qty": 1, "price": 10.25},
        {"desc": "Gizmo", "qty": 3, "price": 1.50},
    ],
    "totals": {"subtotal": 21.75, "total": 21.75},
}

CASE_NAMES = ("users", "order", "company", "invoice")

_CASES = (
    CaseSpec("users", _USERS_TASK, _USERS_TOON_TASK, _USERS_SCHEMA, _USERS_GOLD),
    CaseSpec("order", _ORDER_TASK, _ORDER_TOON_TASK, _ORDER_SCHEMA, _ORDER_GOLD),
    CaseSpec("company", _COMPANY_TASK, _COMPANY_TOON_TASK, _COMPANY_SCHEMA, _COMPANY_GOLD),
    CaseSpec("invoice", _INVOICE_TASK, _INVOICE_TOON_TASK, _INVOICE_SCHEMA, _INVOICE_GOLD),
)


def builtin_cases() -> list:
    """The four benchmark cases, in canonical order."""
    return list(_CASES)


def get_case(name: str) -> CaseSpec:
    for case in _CASES:
        if case.name == name:
            return case
    raise KeyError(f"unknown case {name!r} (expected one of {CASE_NAMES})")


def write_gold(case: CaseSpec, directory) -> list:
    """Write <name>.gold.json and <name>.gold.toon; returns the paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    json_path = directory / f"{case.name}.gold.json"
    toon_path = directory / f"{case.name}.gold.toon"
    try:
        json_path.write_text(emit_canonical_json(case.gold) + "\n", encoding="utf-8")
        toon_text = encode_toon(case.gold)
        if not toon_text.endswith("\n"):
            toon_text += "\n"
        toon_path.write_text(toon_text, encoding="utf-8")
    except OSError as e:
        raise OSError(f"writing gold files under {directory}: {e}") from e
    return [json_path, toon_path]
