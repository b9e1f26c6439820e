"""JSON documents for structure equations.

A document looks like::

    {"name": "N3", "n": 3,
     "terms": [{"k": 3, "type": "pm", "i": 1, "j": 1, "re": 1, "im": 0}, ...]}

Indices are 1-based.  ``pp`` and ``mm`` terms require ``i < j``; repeated
``(k, type, i, j)`` keys are summed.
"""

from __future__ import annotations

import json
from typing import Any

from .errors import ParseError, SchemaError
from .forms import StructureEquations
from .tensor_core import MAX_DIM

TERM_TYPES = ("pp", "pm", "mm")
_TYPE_ORDER = {t: m for m, t in enumerate(TERM_TYPES)}


def _field(obj: dict, key: str, where: str, kinds) -> Any:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    if key not in obj:
        raise ParseError(f"{where}: missing field {key!r}")
    v = obj[key]
    # bool is a subclass of int; reject it explicitly
    if isinstance(v, bool) or not isinstance(v, kinds):
        raise ParseError(f"{where}.{key}: expected {getattr(kinds, '__name__', 'number')}, got {type(v).__name__}")
    return v


def parse_document(doc: Any) -> StructureEquations:
    if not isinstance(doc, dict):
        raise ParseError("top level: expected an object")
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise ParseError("name: expected a string")
    n = _field(doc, "n", "top level", int)
    if not 2 <= n <= MAX_DIM:
        raise SchemaError(f"n: must be in 2..{MAX_DIM}, got {n}")
    terms = doc.get("terms", [])
    if not isinstance(terms, list):
        raise ParseError("terms: expected an array")
    acc: dict[tuple, complex] = {}
    for m, t in enumerate(terms):
        where = f"terms[{m}]"
        k = _field(t, "k", where, int)
        typ = _field(t, "type", where, str)
        i = _field(t, "i", where, int)
        j = _field(t, "j", where, int)
        re = _field(t, "re", where, (int, float))
        im = _field(t, "im", where, (int, float))
        if typ not in TERM_TYPES:
            raise SchemaError(f"{where}.type: must be one of {', '.join(TERM_TYPES)}, got {typ!r}")
        for label, v in (("k", k), ("i", i), ("j", j)):
            if not 1 <= v <= n:
                raise SchemaError(f"{where}.{label}: index {v} outside 1..{n}")
        if typ in ("pp", "mm") and not i < j:
            raise SchemaError(f"{where}: {typ} terms need i < j, got i={i}, j={j}")
        key = (k - 1, typ, i - 1, j - 1)
        acc[key] = acc.get(key, 0j) + complex(float(re), float(im))
    return StructureEquations.from_terms(n, [key + (c,) for key, c in acc.items()], name=name)


def parse(text: str | bytes) -> StructureEquations:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_document(doc)


def to_document(S: StructureEquations) -> dict:
    terms = [
        {"k": k + 1, "type": typ, "i": i + 1, "j": j + 1, "re": c.real, "im": c.imag}
        for k, typ, i, j, c in sorted(S.terms(), key=lambda t: (t[0], _TYPE_ORDER[t[1]], t[2], t[3]))
    ]
    return {"name": S.name, "n": S.n, "terms": terms}


def emit(S: StructureEquations) -> bytes:
    # json uses repr() for floats, which is the shortest round-trip form
    return (json.dumps(to_document(S), indent=1) + "\n").encode("utf-8")


def load(path: str) -> StructureEquations:
    with open(path, "rb") as fh:
        return parse(fh.read())
