"""JSON instance files.

Every file carries ``version``, ``kind`` and ``parameters``. Geometry is
stored with exact rationals written as ``{"num": "1", "den": "3"}``. A
precomputed range space may ride along under ``range_space``.

    pat, pat-blowup  rectangles: [{"box": [x_lo, x_hi, y_lo, y_hi], "closed": [...], "tag": [...]}]
    dual4            points: [[4 rationals]], boxes: [[4 rationals]]
    halfspace        points: [[4 rationals]], halfspaces: [{"coefficients": [...], "rhs": q}]
    random           digits: ["0110...", ...] (one row per point)
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .construction import Family, Rect, build_family, chain_blowup, dual_space
from .duality import CornerBox, HalfSpace, box_incidence_space, halfspace_space, theorem2_instance, theorem3_instance
from .randomconstruction import StagedPointSet, dyadic_canonical_ranges
from .rangespace import RangeSpace, RangeSpaceError

VERSION = 1
KINDS = ("pat", "pat-blowup", "dual4", "halfspace", "random")


class InstanceError(ValueError):
    """Malformed instance file; the message starts with the offending field."""

    def __init__(self, path: str, problem: str):
        super().__init__(f"{path}: {problem}")
        self.path = path


@dataclass
class Instance:
    kind: str
    parameters: dict[str, Any]
    family: Family | None = None
    points: list[tuple[Fraction, ...]] | None = None
    boxes: list[CornerBox] | None = None
    halfspaces: list[HalfSpace] | None = None
    staged: StagedPointSet | None = None
    range_space: RangeSpace | None = field(default=None, repr=False)

    def space(self) -> RangeSpace:
        """The range space the instance stands for (computed if not stored)."""
        if self.range_space is not None:
            return self.range_space
        if self.kind in ("pat", "pat-blowup"):
            return dual_space(self.family)
        if self.kind == "dual4":
            return box_incidence_space(self.points, self.boxes)
        if self.kind == "halfspace":
            return halfspace_space(self.points, self.halfspaces)
        return dyadic_canonical_ranges(self.staged, int(self.parameters["r"]))

    def default_eps(self) -> Fraction | None:
        eps = self.parameters.get("eps")
        return None if eps is None else Fraction(eps)


def fraction_to_json(q: Fraction) -> dict[str, str]:
    q = Fraction(q)
    return {"num": str(q.numerator), "den": str(q.denominator)}


def fraction_from_json(obj, path: str) -> Fraction:
    if not isinstance(obj, dict) or set(obj) != {"num", "den"}:
        raise InstanceError(path, 'expected {"num": ..., "den": ...}')
    try:
        num, den = int(obj["num"]), int(obj["den"])
    except (TypeError, ValueError):
        raise InstanceError(path, "num and den must be integer strings") from None
    if den == 0:
        raise InstanceError(f"{path}.den", "zero denominator")
    return Fraction(num, den)


def _tag_to_json(tag):
    if isinstance(tag, tuple):
        return [_tag_to_json(x) for x in tag]
    return tag


def _tag_from_json(tag):
    if isinstance(tag, list):
        return tuple(_tag_from_json(x) for x in tag)
    return tag


def _rect_to_json(r: Rect) -> dict:
    return {
        "box": [fraction_to_json(v) for v in (r.x_lo, r.x_hi, r.y_lo, r.y_hi)],
        "closed": list(r.closed),
        "tag": _tag_to_json(r.tag),
    }


def _rect_from_json(obj, path: str) -> Rect:
    if not isinstance(obj, dict):
        raise InstanceError(path, "expected an object")
    box = _field(obj, "box", path)
    if not isinstance(box, list) or len(box) != 4:
        raise InstanceError(f"{path}.box", "expected 4 rationals")
    coords = [fraction_from_json(v, f"{path}.box[{i}]") for i, v in enumerate(box)]
    closed = obj.get("closed", [False] * 4)
    if not isinstance(closed, list) or len(closed) != 4 or not all(isinstance(b, bool) for b in closed):
        raise InstanceError(f"{path}.closed", "expected 4 booleans")
    try:
        return Rect(*coords, closed=tuple(closed), tag=_tag_from_json(obj.get("tag")))
    except ValueError as exc:
        raise InstanceError(f"{path}.box", str(exc)) from None


def _field(obj: dict, name: str, path: str):
    if name not in obj:
        raise InstanceError(f"{path}.{name}" if path else name, "missing field")
    return obj[name]


def _vector(obj, path: str) -> tuple[Fraction, ...]:
    if not isinstance(obj, list):
        raise InstanceError(path, "expected a list of rationals")
    return tuple(fraction_from_json(v, f"{path}[{i}]") for i, v in enumerate(obj))


def _list(obj, path: str) -> list:
    if not isinstance(obj, list):
        raise InstanceError(path, "expected a list")
    return obj


def to_dict(inst: Instance) -> dict:
    out: dict[str, Any] = {"version": VERSION, "kind": inst.kind, "parameters": dict(inst.parameters)}
    if inst.kind in ("pat", "pat-blowup"):
        out["rectangles"] = [_rect_to_json(r) for r in inst.family.rects]
    elif inst.kind in ("dual4", "halfspace"):
        out["points"] = [[fraction_to_json(v) for v in p] for p in inst.points]
        if inst.kind == "dual4":
            out["boxes"] = [[fraction_to_json(v) for v in b.uppers] for b in inst.boxes]
        else:
            out["halfspaces"] = [
                {"coefficients": [fraction_to_json(a) for a in h.coefficients], "rhs": fraction_to_json(h.rhs)}
                for h in inst.halfspaces
            ]
    else:
        out["digits"] = inst.staged.to_dict()["digits"]
    if inst.range_space is not None:
        out["range_space"] = inst.range_space.to_dict()
    return out


def from_dict(data) -> Instance:
    if not isinstance(data, dict):
        raise InstanceError("<root>", "expected a JSON object")
    version = _field(data, "version", "")
    if version != VERSION:
        raise InstanceError("version", f"unsupported version {version!r} (expected {VERSION})")
    kind = _field(data, "kind", "")
    if kind not in KINDS:
        raise InstanceError("kind", f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    params = _field(data, "parameters", "")
    if not isinstance(params, dict):
        raise InstanceError("parameters", "expected an object")
    inst = Instance(kind, dict(params))

    def param(name: str) -> int:
        value = _field(params, name, "parameters")
        if not isinstance(value, int) or isinstance(value, bool):
            raise InstanceError(f"parameters.{name}", f"expected an integer, got {value!r}")
        return value

    if kind in ("pat", "pat-blowup"):
        rects = tuple(_rect_from_json(r, f"rectangles[{i}]")
                      for i, r in enumerate(_list(_field(data, "rectangles", ""), "rectangles")))
        blowup = param("blowup") if kind == "pat-blowup" else 1
        inst.family = Family(param("c"), param("d"), rects, blowup)
    elif kind in ("dual4", "halfspace"):
        inst.points = [_vector(p, f"points[{i}]") for i, p in enumerate(_list(_field(data, "points", ""), "points"))]
        if kind == "dual4":
            boxes = _list(_field(data, "boxes", ""), "boxes")
            inst.boxes = []
            for i, b in enumerate(boxes):
                try:
                    inst.boxes.append(CornerBox(_vector(b, f"boxes[{i}]")))
                except ValueError as exc:
                    if isinstance(exc, InstanceError):
                        raise
                    raise InstanceError(f"boxes[{i}]", str(exc)) from None
        else:
            inst.halfspaces = []
            for i, h in enumerate(_list(_field(data, "halfspaces", ""), "halfspaces")):
                path = f"halfspaces[{i}]"
                if not isinstance(h, dict):
                    raise InstanceError(path, "expected an object")
                coeffs = _vector(_field(h, "coefficients", path), f"{path}.coefficients")
                rhs = fraction_from_json(_field(h, "rhs", path), f"{path}.rhs")
                try:
                    inst.halfspaces.append(HalfSpace(coeffs, rhs))
                except ValueError as exc:
                    raise InstanceError(f"{path}.rhs", str(exc)) from None
    else:
        digits = _list(_field(data, "digits", ""), "digits")
        n, T = param("n"), param("T")
        if len(digits) != n:
            raise InstanceError("digits", f"expected {n} rows, got {len(digits)}")
        for i, row in enumerate(digits):
            if not isinstance(row, str) or len(row) != T or set(row) - {"0", "1"}:
                raise InstanceError(f"digits[{i}]", f"expected a binary string of length {T}")
        inst.staged = StagedPointSet.from_dict({"n": n, "T": T, "digits": digits})
    if "range_space" in data:
        try:
            inst.range_space = RangeSpace.from_dict(data["range_space"])
        except (RangeSpaceError, TypeError) as exc:
            raise InstanceError("range_space", str(exc)) from None
    return inst


def dumps(inst: Instance) -> str:
    return json.dumps(to_dict(inst), indent=1)


def loads(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError("<root>", f"invalid JSON: {exc}") from None
    return from_dict(data)


def load(path: str | Path) -> Instance:
    return loads(Path(path).read_text())


def save(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(dumps(inst) + "\n")


def pat_instance(c: int, d: int, blowup: int = 1, eps=None) -> Instance:
    fam = build_family(c, d)
    if blowup > 1:
        fam = chain_blowup(fam, blowup)
    params: dict[str, Any] = {"c": c, "d": d}
    if blowup > 1:
        params["blowup"] = blowup
    if eps is not None:
        params["eps"] = str(Fraction(eps))
    return Instance("pat-blowup" if blowup > 1 else "pat", params, family=fam)


def dual4_instance(src: Instance) -> Instance:
    if src.family is None:
        raise InstanceError("kind", f"dual4 needs a pat instance, got {src.kind!r}")
    points, boxes = theorem2_instance(src.family)
    return Instance("dual4", {**src.parameters, "source": src.kind}, points=points, boxes=boxes)


def halfspace_instance(src: Instance) -> Instance:
    if src.family is None:
        raise InstanceError("kind", f"halfspace needs a pat instance, got {src.kind!r}")
    points, halfspaces = theorem3_instance(src.family)
    return Instance("halfspace", {**src.parameters, "source": src.kind}, points=points, halfspaces=halfspaces)


def random_instance(n: int, r: int, seed: int) -> Instance:
    from .randomconstruction import theorem4_instance

    P, rs = theorem4_instance(n, r, seed)
    params = {"n": n, "r": r, "T": P.T, "seed": seed, "eps": str(Fraction(r, n))}
    return Instance("random", params, staged=P, range_space=rs)
