"""JSON system files.

A system file is a JSON object whose ``type`` selects the record:

``linear``       A, B, H, optional time, disturbances, x0, feedback, basis
``singular``     E, Falg, A, B, optional D
``poly_affine``  f, g, h as polynomial strings, optional alpha, candidate
``so``           M, N and an observation y0 of any dimension
``dk``           a single (possibly non-square) matrix A, optional B and y0

Matrix entries are JSON numbers or rational strings such as ``"-3/4"`` or
``"0.225"``. Any file may carry ``name``, ``printed`` (reference values)
and ``or_system`` (metadata written by ``orkit build``).
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import jsonschema
import numpy as np

from . import orsys
from .errors import SchemaError, ShapeError
from .nonlin import PolyAffineSystem
from .poly import Poly

RATIONAL = r"^\s*[-+]?(\d+(/\d+)?|\d*\.\d+([eE][-+]?\d+)?|\d+\.\d*([eE][-+]?\d+)?)\s*$"

_scalar = {"oneOf": [{"type": "number"}, {"type": "string", "pattern": RATIONAL}]}
_vector = {"type": "array", "items": _scalar, "minItems": 1}
_matrix = {"oneOf": [{"type": "array", "items": _vector, "minItems": 1}, _vector]}
_polys = {"type": "array", "items": {"type": "string"}, "minItems": 1}
_time = {"enum": list(orsys.TIMES)}

_common = {
    "name": {"type": "string"},
    "description": {"type": "string"},
    "printed": {"type": "object"},
    "or_system": {"type": "object"},
    "time": _time,
}


def _variant(kind, required, props):
    return {
        "type": "object",
        "properties": {"type": {"const": kind}, **_common, **props},
        "required": ["type"] + required,
        "additionalProperties": False,
    }


SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["type"],
    "properties": {"type": {"enum": ["linear", "singular", "poly_affine", "so", "dk"]}},
    "allOf": [
        {"if": {"properties": {"type": {"const": "linear"}}},
         "then": _variant("linear", ["A", "B", "H"], {
             "A": _matrix, "B": _matrix, "H": _matrix, "x0": _vector,
             "disturbances": {"type": "array", "items": _vector},
             "feedback": _matrix, "basis": _matrix})},
        {"if": {"properties": {"type": {"const": "singular"}}},
         "then": _variant("singular", ["E", "Falg", "A", "B"], {
             "E": _matrix, "Falg": _matrix, "A": _matrix, "B": _matrix, "D": _matrix,
             "x0": _vector})},
        {"if": {"properties": {"type": {"const": "poly_affine"}}},
         "then": _variant("poly_affine", ["f", "h"], {
             "f": _polys, "g": {"type": "array", "items": _polys}, "h": _polys,
             "alpha": _polys, "candidate": _polys, "x0": _vector})},
        {"if": {"properties": {"type": {"const": "so"}}},
         "then": _variant("so", ["M", "N"], {"M": _matrix, "N": _matrix, "y0": _vector})},
        {"if": {"properties": {"type": {"const": "dk"}}},
         "then": _variant("dk", ["A"], {"A": _matrix, "B": _matrix, "y0": _vector})},
    ],
}

_VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


def _where(err) -> str:
    path = "/".join(str(p) for p in err.absolute_path)
    return path or "(root)"


def validate(doc: dict) -> None:
    errors = sorted(_VALIDATOR.iter_errors(doc), key=lambda e: (len(e.absolute_path), e.message))
    if errors:
        deepest = max(errors, key=lambda e: len(e.absolute_path))
        raise SchemaError(deepest.message, _where(deepest))


def _parse_scalar(v):
    if isinstance(v, str):
        return Fraction(v.strip())
    return v


def parse_matrix(M, column: bool = False):
    """Nested lists of numbers or rational strings as an ``orsys.coerce`` matrix."""
    a = np.asarray(M, dtype=object)
    if a.ndim == 2:
        lens = {len(r) for r in M}
        if len(lens) != 1:
            raise ShapeError("ragged matrix rows")
    conv = np.vectorize(_parse_scalar, otypes=[object])(a) if a.size else a
    return orsys.coerce(conv, column=column)


def parse_vector(v) -> np.ndarray:
    return parse_matrix(v, column=True)[:, 0]


def _polys_of(items, n):
    return tuple(Poly.parse(s, n) for s in items)


class Loaded:
    """A parsed system file: ``record`` plus the raw document."""

    def __init__(self, kind: str, record, doc: dict):
        self.kind = kind
        self.record = record
        self.doc = doc

    def get(self, key, default=None):
        return self.doc.get(key, default)

    def matrix(self, key, column=False):
        return None if key not in self.doc else parse_matrix(self.doc[key], column=column)

    def vector(self, key):
        return None if key not in self.doc else parse_vector(self.doc[key])


def from_dict(doc: dict) -> Loaded:
    validate(doc)
    kind = doc["type"]
    time = doc.get("time", "continuous")
    try:
        if kind == "linear":
            rec = orsys.LinearSystem(
                parse_matrix(doc["A"]), parse_matrix(doc["B"], column=True),
                parse_matrix(doc["H"]), time,
                tuple(parse_matrix(d, column=True) for d in doc.get("disturbances", [])))
        elif kind == "singular":
            rec = orsys.SingularSystem(
                parse_matrix(doc["E"]), parse_matrix(doc["Falg"]), parse_matrix(doc["A"]),
                parse_matrix(doc["B"], column=True),
                parse_matrix(doc["D"], column=True) if "D" in doc else None, time)
        elif kind == "poly_affine":
            n = len(doc["f"])
            rec = PolyAffineSystem(_polys_of(doc["f"], n),
                                   tuple(_polys_of(gi, n) for gi in doc.get("g", [])),
                                   _polys_of(doc["h"], n))
        elif kind == "so":
            rec = orsys.SOSystem(parse_matrix(doc["M"]), parse_matrix(doc["N"], column=True))
        else:
            rec = parse_matrix(doc["A"])
    except (ShapeError, ValueError) as err:
        where = getattr(err, "where", "") or kind
        raise SchemaError(str(err), where) from None
    return Loaded(kind, rec, doc)


def load(path) -> Loaded:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise SchemaError(f"invalid JSON: {err.msg}", f"line {err.lineno}, column {err.colno}") from None
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object", "(root)")
    return from_dict(doc)


# --------------------------------------------------------------------------
# writing


def scalar_json(v):
    """Integers stay numbers, other rationals become ``"p/q"`` strings."""
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


def matrix_json(M):
    if M is None:
        return None
    a = np.asarray(M, dtype=object)
    if a.ndim == 1:
        return [scalar_json(v) for v in a]
    return [[scalar_json(v) for v in row] for row in a]


def linear_to_dict(sys: orsys.LinearSystem, **extra) -> dict:
    doc = {"type": "linear", "time": sys.time, "A": matrix_json(sys.A),
           "B": matrix_json(sys.B), "H": matrix_json(sys.H)}
    if sys.disturbances:
        doc["disturbances"] = [matrix_json(d[:, 0]) for d in sys.disturbances]
    doc.update({k: v for k, v in extra.items() if v is not None})
    return doc


def singular_to_dict(sys: orsys.SingularSystem) -> dict:
    doc = {"type": "singular", "time": sys.time, "E": matrix_json(sys.E),
           "Falg": matrix_json(sys.Falg), "A": matrix_json(sys.A), "B": matrix_json(sys.B)}
    if sys.D is not None:
        doc["D"] = matrix_json(sys.D)
    return doc


def poly_to_dict(sys: PolyAffineSystem) -> dict:
    return {"type": "poly_affine", "f": [str(p) for p in sys.f],
            "g": [[str(p) for p in gi] for gi in sys.g], "h": [str(p) for p in sys.h]}


def to_dict(rec) -> dict:
    if isinstance(rec, orsys.LinearSystem):
        return linear_to_dict(rec)
    if isinstance(rec, orsys.SingularSystem):
        return singular_to_dict(rec)
    if isinstance(rec, PolyAffineSystem):
        return poly_to_dict(rec)
    if isinstance(rec, orsys.SOSystem):
        return {"type": "so", "M": matrix_json(rec.M), "N": matrix_json(rec.N)}
    raise TypeError(f"cannot serialize {type(rec).__name__}")


def or_to_dict(o: orsys.ORSystem) -> dict:
    """An OR-system as a linear file ``(L, N, selector)`` plus its metadata."""
    meta = {"kind": o.kind, "exactness": o.exactness, "dim": o.dim, "init": o.init,
            "residual": o.residual,
            "observer_map": matrix_json(o.observer_map),
            "feedback_F": matrix_json(o.feedback_F)}
    return {"type": "linear", "time": o.time, "A": matrix_json(o.L), "B": matrix_json(o.N),
            "H": matrix_json(o.selector), "or_system": meta}


def nl_or_to_dict(o) -> dict:
    """A polynomial OR-system as a poly_affine file in the OR state z."""
    k = o.dim
    cert = o.certificate
    m = len(cert.input[0]) if cert.input else 0
    g = [[str(cert.input[j][i]) for j in range(k)] for i in range(m)]
    h = [str(Poly.linear(row, k)) for row in o.selector]
    meta = {"kind": "extended_nl", "exactness": "exact", "dim": k,
            "state_functions": [str(p) for p in o.funcs],
            "feedback_alpha": None if o.feedback_alpha is None else [str(a) for a in o.feedback_alpha],
            "L": matrix_json(o.L), "N": matrix_json(o.N)}
    return {"type": "poly_affine", "f": [str(p) for p in cert.drift], "g": g, "h": h,
            "or_system": meta}


def dump(doc: dict, path=None) -> str:
    text = json.dumps(doc, indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
