"""JSON model files describing instances.

Grammar (see README for examples):

  {"type": "sponge", "d": <int>, "digits": [<digit>, ...]}
  {"type": "similar", "d": <int>, "digits": [<digit>, ...],
   "osc_open_set": [[lo, hi], ...]?}
  {"type": "symbolic", "n": <int>, "m": <int>, "flavor": "full"|"half",
   "digits": [[x, y], ...]}

A <digit> is a list of d per-coordinate maps {"ratio": <num>, "offset":
<num>, "orientation": 1|-1?}, or {"id": ..., "maps": [...]} to name it.
A <num> is either a float or an exact rational written as [p, q]; rationals
enable exact disjointness validation.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .errors import ValidationError
from .ifs import DiagonalMap, IntervalMap, SimilarIFS, SpongeSystem
from .symbolic import SymbolicSystem


def _number(value, where: str):
    if isinstance(value, bool):
        raise ValidationError(f"{where}: expected a number, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return value
    if isinstance(value, list) and len(value) == 2 and all(isinstance(v, int) for v in value):
        p, q = value
        if q == 0:
            raise ValidationError(f"{where}: rational with zero denominator")
        return Fraction(p, q)
    raise ValidationError(f"{where}: expected float, int, or [p, q] rational, got {value!r}")


def _interval_map(obj, where: str) -> IntervalMap:
    if not isinstance(obj, dict) or "ratio" not in obj:
        raise ValidationError(f"{where}: expected a map object with a 'ratio' field")
    ratio = _number(obj["ratio"], f"{where}.ratio")
    offset = _number(obj.get("offset", 0), f"{where}.offset")
    orientation = obj.get("orientation", 1)
    if orientation not in (1, -1):
        raise ValidationError(f"{where}.orientation: expected 1 or -1, got {orientation!r}")
    return IntervalMap(ratio=ratio, offset=offset, orientation=orientation)


def _digit(entry, index: int, d: int) -> DiagonalMap:
    where = f"digits[{index}]"
    if isinstance(entry, dict):
        digit_id = entry.get("id", index)
        maps = entry.get("maps")
    else:
        digit_id = index
        maps = entry
    if not isinstance(maps, list) or len(maps) != d:
        raise ValidationError(f"{where}: expected {d} per-coordinate maps")
    components = tuple(_interval_map(m, f"{where}[{i}]") for i, m in enumerate(maps))
    return DiagonalMap(digit=digit_id, components=components)


def load_model(source):
    """Build a system from a model file path, JSON string, or parsed dict."""
    if isinstance(source, dict):
        doc = source
    else:
        path = Path(source)
        try:
            doc = json.loads(path.read_text())
        except FileNotFoundError:
            raise ValidationError(f"model file not found: {source}") from None
        except json.JSONDecodeError as exc:
            raise ValidationError(f"model file is not valid JSON: {exc}") from None
    kind = doc.get("type")
    if kind == "symbolic":
        for key in ("n", "m", "digits"):
            if key not in doc:
                raise ValidationError(f"symbolic model missing field {key!r}")
        digits = doc["digits"]
        if not isinstance(digits, list):
            raise ValidationError("symbolic digits must be a list of [x, y] pairs")
        return SymbolicSystem(
            n=int(doc["n"]),
            m=int(doc["m"]),
            digits=tuple(tuple(pair) for pair in digits),
            flavor=doc.get("flavor", "full"),
        )
    if kind in ("sponge", "similar"):
        if "digits" not in doc:
            raise ValidationError(f"{kind} model missing field 'digits'")
        digits_doc = doc["digits"]
        if not isinstance(digits_doc, list) or not digits_doc:
            raise ValidationError("'digits' must be a nonempty list")
        d = int(doc.get("d", 0)) or _infer_dimension(digits_doc)
        digits = tuple(_digit(entry, i, d) for i, entry in enumerate(digits_doc))
        if kind == "sponge":
            return SpongeSystem(dimension=d, digits=digits)
        open_set = doc.get("osc_open_set")
        if open_set is not None:
            open_set = tuple(tuple(pair) for pair in open_set)
        return SimilarIFS(dimension=d, digits=digits, osc_open_set=open_set)
    raise ValidationError(
        f"model type must be 'sponge', 'similar', or 'symbolic', got {kind!r}"
    )


def _infer_dimension(digits_doc) -> int:
    first = digits_doc[0]
    maps = first.get("maps") if isinstance(first, dict) else first
    if not isinstance(maps, list) or not maps:
        raise ValidationError("cannot infer dimension: first digit has no map list")
    return len(maps)
