"""JSON and CSV persistence with schema validation and deterministic output."""

from __future__ import annotations

import hashlib
import json
import math
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .curves import CurveComponent, HoloChain, HoloPiece, ParamCurve
from .errors import ValidationError
from .fs_core import HomogeneousSection, ProjPoint

SCHEMAS = ("curve", "section", "chain", "points", "record", "error")


def load_schema(name: str) -> dict:
    if name not in SCHEMAS:
        raise KeyError(name)
    text = resources.files("projlink").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(doc, name: str) -> None:
    """Raise ValidationError naming the offending JSON path."""
    validator = jsonschema.Draft202012Validator(load_schema(name))
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        path = "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in e.absolute_path)
        err = ValidationError(f"{name} file invalid at {path}: {e.message}")
        err.path = path
        raise err


def _cvec(obj) -> np.ndarray:
    re, im = np.asarray(obj["re"], dtype=float), np.asarray(obj["im"], dtype=float)
    if re.shape != im.shape:
        raise ValidationError("re and im arrays differ in length")
    return re + 1j * im


def _cobj(v) -> dict:
    v = np.asarray(v, dtype=complex)
    return {"re": [float(x) for x in v.real], "im": [float(x) for x in v.imag]}


# -------------------------------------------------------------------- curves


def curve_from_dict(doc: dict) -> ParamCurve:
    validate(doc, "curve")
    n = doc["dimension"]
    comps = []
    for c in doc["components"]:
        modes = np.array([f["k"] for f in c["fourier"]])
        coeffs = np.array([_cvec(f) for f in c["fourier"]])
        if coeffs.shape[1] != n + 1:
            raise ValidationError(f"Fourier vectors must have {n + 1} entries")
        if len(set(modes.tolist())) != modes.size:
            raise ValidationError("repeated Fourier mode")
        comps.append(CurveComponent(modes, coeffs, int(c.get("multiplicity", 1))))
    return ParamCurve(tuple(comps), n)


def curve_to_dict(gamma: ParamCurve) -> dict:
    return {
        "dimension": gamma.n,
        "components": [
            {
                "multiplicity": int(c.multiplicity),
                "fourier": [{"k": int(k), **_cobj(a)} for k, a in zip(c.modes, c.coefficients)],
            }
            for c in gamma.components
        ],
    }


# ------------------------------------------------------------------ sections


def section_from_dict(doc: dict) -> HomogeneousSection:
    validate(doc, "section")
    coeffs = np.array([c["re"] + 1j * c["im"] for c in doc["coefficients"]])
    return HomogeneousSection(doc["dimension"], doc["degree"], coeffs)


def section_to_dict(sigma: HomogeneousSection) -> dict:
    return {
        "dimension": sigma.n,
        "degree": sigma.degree,
        "coefficients": [{"re": float(c.real), "im": float(c.imag)} for c in sigma.coefficients],
    }


# -------------------------------------------------------------------- chains


def chain_from_dict(doc: dict) -> HoloChain:
    validate(doc, "chain")
    n = doc["dimension"]
    pieces = []
    for p in doc["pieces"]:
        coeffs = np.array([_cvec(a) for a in p["coefficients"]])
        if coeffs.shape[1] != n + 1:
            raise ValidationError(f"chain coefficient vectors must have {n + 1} entries")
        pieces.append(
            HoloPiece(
                coeffs,
                int(p.get("multiplicity", 1)),
                outer_radius=float(p.get("outer_radius", 1.0)),
                inner_radius=float(p.get("inner_radius", 0.0)),
            )
        )
    return HoloChain(pieces, n)


def chain_to_dict(T: HoloChain) -> dict:
    return {
        "dimension": T.n,
        "pieces": [
            {
                "multiplicity": int(p.multiplicity),
                "outer_radius": float(p.outer_radius),
                "inner_radius": float(p.inner_radius),
                "coefficients": [_cobj(a) for a in p.coefficients],
            }
            for p in T.pieces
        ],
    }


# -------------------------------------------------------------------- points


def points_from_dict(doc: dict) -> list:
    validate(doc, "points")
    pts = [_cvec(p) for p in doc["points"]]
    if any(p.size != doc["dimension"] + 1 for p in pts):
        raise ValidationError(f"points must have {doc['dimension'] + 1} homogeneous coordinates")
    try:
        return [ProjPoint(p) for p in pts]
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def points_to_dict(points) -> dict:
    pts = [p.homogeneous if isinstance(p, ProjPoint) else np.asarray(p, dtype=complex) for p in points]
    return {"dimension": int(pts[0].size - 1), "points": [_cobj(p) for p in pts]}


def parse_point(text: str) -> ProjPoint:
    """'1, 0.5+0.2j, 0' -> ProjPoint."""
    try:
        z = np.array([complex(s.strip().replace(" ", "")) for s in text.split(",")])
        return ProjPoint(z)
    except ValueError as exc:
        raise ValidationError(f"bad point {text!r}: {exc}") from exc


# ---------------------------------------------------------------- file access


def read_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ValidationError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc


def load_curve(path) -> ParamCurve:
    return curve_from_dict(read_json(path))


def load_section(path) -> HomogeneousSection:
    return section_from_dict(read_json(path))


def load_chain(path) -> HoloChain:
    return chain_from_dict(read_json(path))


def load_points(path) -> list:
    return points_from_dict(read_json(path))


def to_jsonable(obj):
    """Plain JSON types; non-finite floats become the strings 'inf', '-inf', 'nan'."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else ("nan" if math.isnan(x) else ("inf" if x > 0 else "-inf"))
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    return str(obj)


def dumps(doc) -> str:
    return json.dumps(to_jsonable(doc), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, doc) -> None:
    Path(path).write_text(dumps(doc))


def inputs_digest(*docs) -> str:
    """sha256 of the canonical JSON of the input documents."""
    canon = json.dumps(to_jsonable(list(docs)), sort_keys=True, separators=(",", ":"), allow_nan=False)
    return hashlib.sha256(canon.encode()).hexdigest()


def make_record(invariant: str, value, error, inputs, diagnostics: dict | None = None) -> dict:
    rec = {
        "invariant": invariant,
        "value": to_jsonable(value),
        "error": to_jsonable(error),
        "inputs_digest": inputs_digest(*inputs),
        "diagnostics": to_jsonable(diagnostics or {}),
    }
    validate(rec, "record")
    return rec
