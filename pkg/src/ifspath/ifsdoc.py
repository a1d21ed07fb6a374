"""The external IFS document format (JSON) and its loader/serializer.

Top level: {"dimension": n, "maps": [...]}.  Each planar map carries
"ratio" (either {"num", "den"} or a decimal), "rotation" (one of
{"turns": {"num", "den"}}, {"radians": value, "irrational": optional bool},
{"acos": {"num", "den"}, "sign": +-1, "irrational": bool}), "reflect"
(bool) and "translation" (list of exact-or-decimal coordinates).  Maps in
dimension >= 3 replace rotation/reflect by "matrix" (rows of scalars).
Exact values are preserved exactly; loading does not validate the chaining
conditions (that is an explicit command).
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Union

from .geometry import MatrixOrthogonal, PlanarOrthogonal, Similarity
from .model import IfsPath
from .scalars import Rotation2, acos_token, as_fraction, is_exact, radians_token


class DocumentError(ValueError):
    """Schema violation with the offending field path."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def _scalar_from(obj, where: str):
    if isinstance(obj, dict):
        if set(obj) != {"num", "den"}:
            raise DocumentError(where, "exact scalar needs exactly the fields num, den")
        if not isinstance(obj["num"], int) or not isinstance(obj["den"], int):
            raise DocumentError(where, "num and den must be integers")
        if obj["den"] <= 0:
            raise DocumentError(where, "den must be positive")
        return Fraction(obj["num"], obj["den"])
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise DocumentError(where, f"expected a number or {{num, den}}, got {obj!r}")
    return float(obj)


def _scalar_to(value):
    if is_exact(value):
        f = as_fraction(value)
        return {"num": f.numerator, "den": f.denominator}
    return float(value)


def _rotation_from(obj, where: str) -> Rotation2:
    if not isinstance(obj, dict):
        raise DocumentError(where, "rotation must be an object")
    keys = set(obj)
    if "turns" in keys:
        if keys != {"turns"}:
            raise DocumentError(where, "turns rotation takes no other fields")
        t = _scalar_from(obj["turns"], where + ".turns")
        if not is_exact(t):
            raise DocumentError(where + ".turns", "turns must be exact {num, den}")
        return Rotation2.from_turns(as_fraction(t))
    if "radians" in keys:
        if not keys <= {"radians", "irrational"}:
            raise DocumentError(where, "radians rotation takes only an irrational flag")
        val = obj["radians"]
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise DocumentError(where + ".radians", "radians must be a number")
        return radians_token(float(val), bool(obj.get("irrational", False)))
    if "acos" in keys:
        if not keys <= {"acos", "sign", "irrational"}:
            raise DocumentError(where, "acos rotation takes sign and irrational only")
        arg = _scalar_from(obj["acos"], where + ".acos")
        if not is_exact(arg):
            raise DocumentError(where + ".acos", "acos argument must be exact {num, den}")
        f = as_fraction(arg)
        sign = obj.get("sign", 1)
        if sign not in (1, -1):
            raise DocumentError(where + ".sign", "sign must be 1 or -1")
        return acos_token(f.numerator, f.denominator, sign, bool(obj.get("irrational", False)))
    raise DocumentError(where, "rotation needs one of: turns, radians, acos")


def _rotation_to(rot: Rotation2):
    if rot.is_exact_turns:
        return {"turns": {"num": rot.turns.numerator, "den": rot.turns.denominator}}
    if len(rot.tokens) == 1 and rot.turns == 0:
        tok, coeff = rot.tokens[0]
        if tok.kind == "acos" and coeff in (1, -1):
            num, den = tok.args
            out = {"acos": {"num": num, "den": den}, "sign": coeff}
            if tok.irrational:
                out["irrational"] = True
            return out
        if tok.kind == "radians" and coeff == 1:
            out = {"radians": tok.radians}
            if tok.irrational:
                out["irrational"] = True
            return out
    return {"radians": rot.radians}


def _map_from(obj, where: str, dim: int) -> Similarity:
    if not isinstance(obj, dict):
        raise DocumentError(where, "map must be an object")
    for key in ("ratio", "translation"):
        if key not in obj:
            raise DocumentError(where, f"missing field {key}")
    ratio = _scalar_from(obj["ratio"], where + ".ratio")
    tr = obj["translation"]
    if not isinstance(tr, list) or len(tr) != dim:
        raise DocumentError(where + ".translation", f"needs a list of {dim} coordinates")
    translation = tuple(
        _scalar_from(c, f"{where}.translation[{i}]") for i, c in enumerate(tr)
    )
    if dim == 2 and "matrix" not in obj:
        if "rotation" not in obj:
            raise DocumentError(where, "missing field rotation")
        rotation = _rotation_from(obj["rotation"], where + ".rotation")
        reflect = obj.get("reflect", False)
        if not isinstance(reflect, bool):
            raise DocumentError(where + ".reflect", "reflect must be a boolean")
        orth = PlanarOrthogonal(rotation, reflect)
    else:
        if "matrix" not in obj:
            raise DocumentError(where, "maps in dimension != 2 need a matrix")
        rows = obj["matrix"]
        if not isinstance(rows, list) or len(rows) != dim:
            raise DocumentError(where + ".matrix", f"needs {dim} rows")
        entries = tuple(
            tuple(_scalar_from(x, f"{where}.matrix[{i}][{j}]") for j, x in enumerate(row))
            for i, row in enumerate(rows)
        )
        try:
            orth = MatrixOrthogonal(entries)
        except ValueError as exc:
            raise DocumentError(where + ".matrix", str(exc)) from None
    try:
        return Similarity(ratio, orth, translation)
    except ValueError as exc:
        raise DocumentError(where, str(exc)) from None


def _map_to(sim: Similarity):
    out = {"ratio": _scalar_to(sim.ratio)}
    if isinstance(sim.orth, PlanarOrthogonal):
        out["rotation"] = _rotation_to(sim.orth.rotation)
        out["reflect"] = sim.orth.reflect
    else:
        out["matrix"] = [[_scalar_to(x) for x in row] for row in sim.orth.entries]
    out["translation"] = [_scalar_to(c) for c in sim.translation]
    return out


def load_ifs(text: str) -> IfsPath:
    """Parse an IFS document; exactness is preserved, chaining unchecked."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"line {exc.lineno}", exc.msg) from None
    if not isinstance(obj, dict):
        raise DocumentError("document", "top level must be an object")
    if "dimension" not in obj or "maps" not in obj:
        raise DocumentError("document", "needs fields: dimension, maps")
    dim = obj["dimension"]
    if not isinstance(dim, int) or dim < 1:
        raise DocumentError("dimension", "must be a positive integer")
    maps = obj["maps"]
    if not isinstance(maps, list) or len(maps) < 2:
        raise DocumentError("maps", "needs an ordered list of at least 2 maps")
    sims = tuple(_map_from(m, f"maps[{i}]", dim) for i, m in enumerate(maps))
    return IfsPath(sims)


def serialize_ifs(path: IfsPath) -> str:
    obj = {"dimension": path.dim, "maps": [_map_to(s) for s in path.maps]}
    return json.dumps(obj, indent=1)
