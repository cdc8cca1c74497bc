"""
Reads the JSON descriptors of the command line: spaces, sets, rectangles,
rectangle families and whole instance files. Every malformed input becomes a
ParseError naming the offending field.
"""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path

from src.errors import ParseError
from src.exact_arith import ExtReal, parse_ext, parse_rational
from src.product import DyadicTail, ProductSet, Rect, RectFamily
from src.spaces import (
    ExplicitSemiring,
    FiniteSet,
    FiniteUniverse,
    IntervalSemiring,
    IntervalUnion,
    IntervalUniverse,
    Length,
    MeasureSpace,
    PointMass,
    PowerSetSemiring,
    SemiringDesc,
    SetExpr,
    Tabulated,
    Universe,
)

# --- CONFIGURATION ---
# A source of "-" means standard input.
STDIN_SOURCE = "-"


def read_document(source: str | Path):
    """
    Loads one JSON document from a file or from stdin.

    Raises:
        FileNotFoundError: the file does not exist.
        ParseError: the text is not JSON.
    """
    if str(source) == STDIN_SOURCE:
        text = sys.stdin.read()
    else:
        path = Path(source)
        if not path.exists():
            raise FileNotFoundError(f"❌ Input {path} not found.")
        text = path.read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"❌ {source} is not valid JSON: {exc}") from exc


def _field(doc, key: str, where: str):
    if not isinstance(doc, dict) or key not in doc:
        raise ParseError(f"❌ {where} needs a {key!r} field.")
    return doc[key]


def parse_value(text) -> ExtReal:
    return parse_ext(text)


def parse_universe(doc) -> Universe:
    """{"finite": n} or "interval"."""
    if doc == "interval":
        return IntervalUniverse()
    size = _field(doc, "finite", "universe")
    if isinstance(size, bool) or not isinstance(size, int):
        raise ParseError(f"❌ Universe size must be an integer, got {size!r}.")
    return FiniteUniverse(size)


def parse_set(doc, universe: Universe) -> SetExpr:
    """A list of point ids on a finite universe, {"intervals": [[a, b], ...]} on the line."""
    if isinstance(universe, FiniteUniverse):
        if not isinstance(doc, list) or any(isinstance(p, bool) or not isinstance(p, int) for p in doc):
            raise ParseError(f"❌ Finite sets are lists of point ids, got {doc!r}.")
        result = FiniteSet(tuple(doc))
        if not universe.owns(result):
            raise ParseError(f"❌ {result} has points outside the {universe.size}-point universe.")
        return result
    pairs = _field(doc, "intervals", "interval set")
    if not isinstance(pairs, list) or any(not isinstance(p, list) or len(p) != 2 for p in pairs):
        raise ParseError(f"❌ Intervals are [a, b] pairs, got {pairs!r}.")
    return IntervalUnion(tuple((parse_rational(a), parse_rational(b)) for a, b in pairs))


def parse_semiring(doc, universe: Universe) -> SemiringDesc:
    if doc == "power_set":
        if not isinstance(universe, FiniteUniverse):
            raise ParseError("❌ The power-set semiring needs a finite universe.")
        return PowerSetSemiring(universe)
    if doc == "interval":
        return IntervalSemiring()
    members = _field(doc, "explicit", "semiring")
    if not isinstance(universe, FiniteUniverse) or not isinstance(members, list):
        raise ParseError("❌ Explicit families are lists of sets on a finite universe.")
    return ExplicitSemiring(universe, tuple(parse_set(m, universe) for m in members))


def _parse_point_mass(weights, universe: Universe) -> PointMass:
    if not isinstance(universe, FiniteUniverse):
        raise ParseError("❌ Point masses need a finite universe.")
    if isinstance(weights, dict):
        values = [ExtReal(0)] * universe.size
        for key, text in weights.items():
            if not key.isdigit() or int(key) >= universe.size:
                raise ParseError(f"❌ {key!r} is not a point of the {universe.size}-point universe.")
            values[int(key)] = parse_value(text)
        return PointMass(universe, tuple(values))
    if not isinstance(weights, list):
        raise ParseError("❌ 'point_mass' is a list of weights or a point → weight map.")
    return PointMass(universe, tuple(parse_value(w) for w in weights))


def _parse_tabulated(entries, universe: Universe, semiring: SemiringDesc | None) -> Tabulated:
    if not isinstance(universe, FiniteUniverse) or not isinstance(entries, list):
        raise ParseError("❌ 'tabulated' is a list of {set, value} entries on a finite universe.")
    mapping: dict[FiniteSet, ExtReal] = {}
    for entry in entries:
        member = parse_set(_field(entry, "set", "tabulated entry"), universe)
        mapping[member] = parse_value(_field(entry, "value", "tabulated entry"))
    if semiring is None:
        family = tuple(mapping) if FiniteSet() in mapping else (FiniteSet(),) + tuple(mapping)
        semiring = ExplicitSemiring(universe, family)
    if not isinstance(semiring, ExplicitSemiring):
        raise ParseError("❌ Tabulated values need an explicit family.")
    strays = [m for m in mapping if not semiring.contains(m)]
    if strays:
        raise ParseError(f"❌ {strays[0]} has a value but is not in the family.")
    return Tabulated.from_mapping(semiring, mapping)


def parse_space(doc) -> MeasureSpace:
    """
    {"universe": ..., "semiring": ..., "measure": ..., "sigma_finite": [...]}.

    "measure" is "length", {"point_mass": [...] | {point: weight}} or
    {"tabulated": [{"set": ..., "value": ...}]}. The semiring may be omitted
    when the measure determines it.
    """
    universe = parse_universe(_field(doc, "universe", "space"))
    measure_doc = _field(doc, "measure", "space")
    semiring = parse_semiring(doc["semiring"], universe) if "semiring" in doc else None

    if measure_doc == "length":
        measure = Length()
    elif isinstance(measure_doc, dict) and "point_mass" in measure_doc:
        measure = _parse_point_mass(measure_doc["point_mass"], universe)
    elif isinstance(measure_doc, dict) and "tabulated" in measure_doc:
        measure = _parse_tabulated(measure_doc["tabulated"], universe, semiring)
    else:
        raise ParseError(f"❌ Unknown measure descriptor {measure_doc!r}.")

    if semiring is not None and semiring != measure.semiring:
        raise ParseError("❌ The declared semiring is not the measure's semiring.")
    witness = None
    if "sigma_finite" in doc:
        witness = tuple(parse_set(piece, universe) for piece in doc["sigma_finite"])
    return MeasureSpace(universe, measure.semiring, measure, witness)


def parse_rect(doc, universe_x: Universe, universe_y: Universe) -> Rect:
    return Rect(
        parse_set(_field(doc, "base", "rectangle"), universe_x),
        parse_set(_field(doc, "side", "rectangle"), universe_y),
    )


def parse_tail(doc, universe_x: Universe, universe_y: Universe) -> DyadicTail:
    if _field(doc, "kind", "tail") != "dyadic":
        raise ParseError(f"❌ Only dyadic tails are supported, got {doc['kind']!r}.")
    axis = _field(doc, "axis", "tail")
    fixed = parse_set(_field(doc, "fixed", "tail"), universe_y if axis == "base" else universe_x)
    return DyadicTail(axis, fixed, parse_rational(doc.get("lo", "0")), parse_rational(doc.get("hi", "1")))


def parse_family(doc, universe_x: Universe, universe_y: Universe) -> RectFamily:
    """A list of rectangles, or {"rects": [...], "tail": {...}}."""
    if isinstance(doc, list):
        return RectFamily(tuple(parse_rect(r, universe_x, universe_y) for r in doc))
    if not isinstance(doc, dict):
        raise ParseError(f"❌ A rectangle family is a list or an object, got {doc!r}.")
    rects = tuple(parse_rect(r, universe_x, universe_y) for r in doc.get("rects", []))
    tail = parse_tail(doc["tail"], universe_x, universe_y) if "tail" in doc else None
    return RectFamily(rects, tail)


@dataclass
class Instance:
    """A product instance file: two spaces and whichever of D, cover, whole, parts, t, r, s it gives."""

    space_x: MeasureSpace
    space_y: MeasureSpace
    d: ProductSet | None = None
    cover: RectFamily | None = None
    whole: Rect | None = None
    parts: RectFamily | None = None
    t: ExtReal | None = None
    r: ExtReal | None = None
    s: ExtReal | None = None

    def require(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise ParseError(f"❌ The instance file has no {', '.join(repr(m) for m in missing)}.")


def parse_instance(doc) -> Instance:
    space_x = parse_space(_field(doc, "x", "instance"))
    space_y = parse_space(_field(doc, "y", "instance"))
    ux, uy = space_x.universe, space_y.universe
    instance = Instance(space_x, space_y)
    if "d" in doc:
        instance.d = ProductSet(parse_family(doc["d"], ux, uy), ux, uy)
    if "cover" in doc:
        instance.cover = parse_family(doc["cover"], ux, uy)
    if "whole" in doc:
        instance.whole = parse_rect(doc["whole"], ux, uy)
    if "parts" in doc:
        instance.parts = parse_family(doc["parts"], ux, uy)
    for name in ("t", "r", "s"):
        if name in doc:
            setattr(instance, name, parse_value(doc[name]))
    return instance


def load_space(source: str | Path) -> MeasureSpace:
    return parse_space(read_document(source))


def load_instance(source: str | Path) -> Instance:
    return parse_instance(read_document(source))


def load_semiring(source: str | Path) -> SemiringDesc:
    """A document with "universe" and "semiring" (any measure is ignored)."""
    doc = read_document(source)
    universe = parse_universe(_field(doc, "universe", "semiring document"))
    return parse_semiring(_field(doc, "semiring", "semiring document"), universe)
