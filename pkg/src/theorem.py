"""
Finite witnesses for product measures.

If a disjoint rectangle family covers D and mu*_X(D^{>r}) > s, then some finite
set of indices already carries more than r * s of product measure. The
extractor below builds that index set constructively, and the certifier and
the null-section checks are built on top of it. Every returned object carries
the exact numbers needed to redo its inequalities without this code.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

from src.errors import (
    BudgetExceeded,
    CertificationFailed,
    MeasureError,
    NotInDomain,
    PreconditionFailed,
)
from src.exact_arith import ExtReal, mul, parse_ext, sub, total
from src.outer import attainable_values, caratheodory_measurable, outer_measure
from src.product import (
    Point,
    ProductSet,
    Rect,
    RectFamily,
    covers,
    partition_cells,
    product_measure,
    product_outer_measure,
    product_space,
    rect_disjointify,
    section,
    section_values,
    superlevel,
)
from src.reports import CheckReport
from src.spaces import (
    ExplicitSemiring,
    FiniteSet,
    FiniteUniverse,
    IntervalUnion,
    MeasureSpace,
    PointMass,
    SetExpr,
    is_sigma_finite,
    set_intersect,
    set_union,
)
from src.utils import format_point, to_jsonable

logger = logging.getLogger(__name__)

# --- CONFIGURATION ---
# Deepest dyadic tail truncation tried before giving up.
MAX_TAIL_DEPTH = 64


@dataclass(frozen=True)
class Witness:
    """
    A finite index set whose rectangles carry more than r * s.

    selections: for each chosen point x (in construction order), the indices
        picked among the rectangles whose base contains x.
    indices: the union of all selections.
    terms: (index, mu_X(base), mu_Y(side)) for every index.
    """

    indices: tuple[int, ...]
    selections: tuple[tuple[Point, tuple[int, ...]], ...]
    terms: tuple[tuple[int, ExtReal, ExtReal], ...]
    r: ExtReal
    s: ExtReal
    lhs: ExtReal
    rhs: ExtReal
    union_outer: ExtReal
    depth: int | None = None

    @property
    def points(self) -> tuple[Point, ...]:
        return tuple(x for x, _ in self.selections)

    def to_json(self) -> dict:
        return {
            "indices": list(self.indices),
            "selections": [{"point": format_point(x), "indices": list(picked)} for x, picked in self.selections],
            "terms": [{"index": n, "mu_x": str(a), "mu_y": str(b)} for n, a, b in self.terms],
            "r": str(self.r),
            "s": str(self.s),
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
            "union_outer": str(self.union_outer),
            "depth": self.depth,
        }


def _require_level(value: ExtReal, name: str) -> None:
    if value.is_infinite or value.is_zero:
        raise PreconditionFailed(f"❌ {name} must be finite and positive, got {value}.")


def _check_members(family: RectFamily, space_x: MeasureSpace, space_y: MeasureSpace) -> None:
    try:
        family.check_in(space_x.semiring, space_y.semiring)
    except NotInDomain as exc:
        raise PreconditionFailed(f"❌ Cover rectangle outside the product semiring: {exc}") from exc


def _greedy_selection(x: Point, members: tuple[Rect, ...], space_y: MeasureSpace, r: ExtReal) -> tuple[int, ...] | None:
    """Ascending indices n with x in base_n until the side measures add past r."""
    picked: list[int] = []
    running = ExtReal(0)
    for n, rect in enumerate(members):
        if x not in rect.base:
            continue
        picked.append(n)
        running = running + space_y.measure.evaluate(rect.side)
        if running > r:
            return tuple(picked)
    return None


def _candidate_points(space_x: MeasureSpace, d: ProductSet, members: tuple[Rect, ...], level: SetExpr) -> list[Point]:
    """Points of D^{>r} in canonical order: point ids, or left ends of endpoint cells."""
    if isinstance(space_x.universe, FiniteUniverse):
        return list(level)
    bases = [m.base for m in d.family.symbolic_members()] + [m.base for m in members]
    marks = sorted({e for base in bases for e in base.endpoints} | set(level.endpoints))
    return [a for a in marks if a in level]


def _attempt(
    space_x: MeasureSpace,
    space_y: MeasureSpace,
    d: ProductSet,
    members: tuple[Rect, ...],
    level: SetExpr,
    r: ExtReal,
    s: ExtReal,
) -> tuple[list[tuple[Point, tuple[int, ...]]], ExtReal] | None:
    selections: list[tuple[Point, tuple[int, ...]]] = []
    union = space_x.empty()
    for x in _candidate_points(space_x, d, members, level):
        picked = _greedy_selection(x, members, space_y, r)
        if picked is None:
            return None
        selections.append((x, picked))
        meet = members[picked[0]].base
        for n in picked[1:]:
            meet = set_intersect(meet, members[n].base)
        union = set_union(union, meet)
        reached = outer_measure(space_x, union).value
        if reached > s:
            return selections, reached
    return None


def extract_witness(
    space_x: MeasureSpace,
    space_y: MeasureSpace,
    d: ProductSet,
    cover: RectFamily,
    r: ExtReal,
    s: ExtReal,
    max_depth: int = MAX_TAIL_DEPTH,
) -> Witness:
    """
    Builds a finite index set F with r * s < sum over F of mu_X(B_n) mu_Y(C_n).

    For each x in D^{>r} (canonical order) the rectangles over x are taken in
    ascending index until their sides add past r; points are added until the
    union of the intersected bases has outer measure above s. Tails are
    truncated at increasing depth until the construction closes.

    Raises:
        PreconditionFailed: the cover overlaps, leaves D uncovered, or
            mu*_X(D^{>r}) <= s.
        BudgetExceeded: no truncation up to `max_depth` suffices.
        CertificationFailed: the final inequality is false (the set functions
            are not measures).
    """
    # 1. Preconditions on the levels and the cover
    _require_level(r, "r")
    _require_level(s, "s")
    clashes = cover.overlapping_pairs()
    if clashes:
        raise PreconditionFailed(f"❌ Cover rectangles {clashes[0]} overlap.", {"overlaps": clashes})
    _check_members(cover, space_x, space_y)
    if not covers(cover.symbolic_members(), d.family.symbolic_members()):
        raise PreconditionFailed("❌ The cover does not contain D.")

    # 2. The superlevel set must be heavy enough
    level = superlevel(d, space_y, r)
    level_outer = outer_measure(space_x, level).value
    if not level_outer > s:
        raise PreconditionFailed(
            f"❌ μ*_X(D^>r) = {level_outer} is not above s = {s}.",
            {"level_set": level, "level_outer": level_outer},
        )

    # 3. Truncate the tail deeper until the selection closes
    depths = range(max_depth + 1) if cover.tail is not None else (None,)
    for depth in depths:
        members = cover.truncated(depth or 0)
        found = _attempt(space_x, space_y, d, members, level, r, s)
        if found is None:
            continue
        selections, reached = found
        indices = tuple(sorted({n for _, picked in selections for n in picked}))
        terms = tuple(
            (n, space_x.measure.evaluate(members[n].base), space_y.measure.evaluate(members[n].side))
            for n in indices
        )
        lhs = mul(r, s)
        rhs = total(mul(a, b) for _, a, b in terms)
        witness = Witness(indices, tuple(selections), terms, r, s, lhs, rhs, reached, depth)
        if not lhs < rhs:
            raise CertificationFailed(
                f"❌ r·s = {lhs} is not below the selected sum {rhs}.", half="witness", report=witness.to_json()
            )
        logger.debug("Witness with %d indices at depth %s", len(indices), depth)
        return witness

    if cover.tail is None:
        raise CertificationFailed("❌ The selection never passed the thresholds.", half="witness")
    raise BudgetExceeded(f"❌ Tail truncation depth {max_depth} was not enough.", depth=max_depth)


def recheck_witness(payload: dict) -> CheckReport:
    """
    Re-verifies a serialized witness from its strings alone: the indices are
    the union of the selections, the terms list exactly those indices, and
    r * s is strictly below the sum of the term products.
    """
    r, s = parse_ext(payload["r"]), parse_ext(payload["s"])
    indices = sorted(payload["indices"])
    selected = sorted({n for entry in payload["selections"] for n in entry["indices"]})
    term_indices = sorted(t["index"] for t in payload["terms"])
    lhs = mul(r, s)
    rhs = total(mul(parse_ext(t["mu_x"]), parse_ext(t["mu_y"])) for t in payload["terms"])
    problems = []
    if indices != selected:
        problems.append({"problem": "indices differ from the union of selections"})
    if indices != term_indices:
        problems.append({"problem": "terms do not match the indices"})
    if not lhs < rhs:
        problems.append({"problem": "r·s is not below the sum", "lhs": lhs, "rhs": rhs})
    if str(lhs) != payload.get("lhs", str(lhs)) or str(rhs) != payload.get("rhs", str(rhs)):
        problems.append({"problem": "reported sides disagree with the recomputation"})
    return CheckReport(check="witness_recheck", passed=not problems, lhs=lhs, rhs=rhs, violations=problems)


# ==========================================
# COUNTABLE ADDITIVITY ON RECTANGLES
# ==========================================

def choose_levels(t: ExtReal, mu_b: ExtReal, mu_c: ExtReal) -> tuple[ExtReal, ExtReal]:
    """
    Rational r < mu_b and s < mu_c with t < r * s.

    Finite case: r is the midpoint of (t / mu_c, mu_b) and s the midpoint of
    (t / r, mu_c). An infinite factor is replaced by a value just large enough.
    """
    q = t.fraction
    if mu_b.is_infinite and mu_c.is_infinite:
        return ExtReal(q + 1), ExtReal(q + 1)
    if mu_b.is_infinite:
        s = mu_c.fraction / 2
        return ExtReal(q / s + 1), ExtReal(s)
    if mu_c.is_infinite:
        r = mu_b.fraction / 2
        return ExtReal(r), ExtReal(q / r + 1)
    r = (q / mu_c.fraction + mu_b.fraction) / 2
    s = (q / r + mu_c.fraction) / 2
    return ExtReal(r), ExtReal(s)


@dataclass
class CertReport:
    whole_value: ExtReal
    t: ExtReal
    r: ExtReal
    s: ExtReal
    partial_sums: list[tuple[int, ExtReal]]
    exact: bool | None
    witness: Witness
    depth_used: int | None = None
    required_depth: int | None = None
    certified: bool = True

    def to_json(self) -> dict:
        return {
            "certified": self.certified,
            "whole_value": str(self.whole_value),
            "t": str(self.t),
            "r": str(self.r),
            "s": str(self.s),
            "partial_sums": [{"truncation": k, "sum": str(v)} for k, v in self.partial_sums],
            "exact": self.exact,
            "witness": self.witness.to_json(),
            "depth_used": self.depth_used,
            "required_depth": self.required_depth,
        }


def _union_matches(whole: Rect, parts: RectFamily) -> bool:
    members = parts.symbolic_members()
    return covers([whole], members) and covers(members, [whole])


def certify_sigma_additivity(
    space_x: MeasureSpace,
    space_y: MeasureSpace,
    whole: Rect,
    parts: RectFamily,
    t: ExtReal,
    max_depth: int = MAX_TAIL_DEPTH,
) -> CertReport:
    """
    Certifies sum_n mu_X(B_n) mu_Y(C_n) = mu_X(B) mu_Y(C) for a disjoint
    decomposition of B × C, in the supremum sense at level t:

    upper: every finite truncation sums to at most the product;
    exact: a finite family sums to exactly the product;
    lower: a witness index set sums above t.

    Raises:
        PreconditionFailed: parts overlap, do not union to `whole`, leave the
            product semiring, or t is not below the product.
        CertificationFailed: one of the halves is false; carries the failing
            truncation.
    """
    # 1. Structural checks; overlap and cover tests are memoized
    if t.is_infinite:
        raise PreconditionFailed("❌ t must be finite.")
    try:
        whole.check_in(space_x.semiring, space_y.semiring)
    except NotInDomain as exc:
        raise PreconditionFailed(f"❌ {exc}") from exc
    _check_members(parts, space_x, space_y)
    clashes = parts.overlapping_pairs()
    if clashes:
        raise PreconditionFailed(f"❌ Parts {clashes[0]} overlap.", {"overlaps": clashes})
    if not _union_matches(whole, parts):
        raise PreconditionFailed("❌ The parts do not union to the whole rectangle.")

    mu_b = space_x.measure.evaluate(whole.base)
    mu_c = space_y.measure.evaluate(whole.side)
    whole_value = mul(mu_b, mu_c)
    if not t < whole_value:
        raise PreconditionFailed(f"❌ t = {t} is not below μ_X(B)·μ_Y(C) = {whole_value}.")
    r, s = choose_levels(t, mu_b, mu_c)

    # 2. Upper half over the finite rectangles
    partial_sums: list[tuple[int, ExtReal]] = []
    running = ExtReal(0)
    for k, rect in enumerate(parts.rects, start=1):
        running = running + product_measure(space_x.measure, space_y.measure, rect)
        partial_sums.append((k, running))
        if running > whole_value:
            raise CertificationFailed(
                f"❌ The first {k} parts already sum to {running} > {whole_value}.",
                half="upper",
                truncation=k,
                report={"partial_sum": running, "whole_value": whole_value},
            )
    finite_sum = running

    # 3. Exactness, for finite families only
    exact = None
    if parts.tail is None:
        exact = finite_sum == whole_value
        if not exact:
            raise CertificationFailed(
                f"❌ The parts sum to {finite_sum}, not {whole_value}.",
                half="exact",
                truncation=len(parts.rects),
                report={"sum": finite_sum, "whole_value": whole_value},
            )

    # 4. Lower half. The section threshold is the Y-side level, so D^{>s} is the whole base.
    d = ProductSet(RectFamily((whole,)), space_x.universe, space_y.universe)
    try:
        witness = extract_witness(space_x, space_y, d, parts, r=s, s=r, max_depth=max_depth)
    except (PreconditionFailed, CertificationFailed) as exc:
        raise CertificationFailed(
            f"❌ No finite subfamily passes t = {t}: {exc}", half="lower", report={"t": t, "r": r, "s": s}
        ) from exc

    # 5. Tail partial sums against the closed form
    depth_used = required_depth = None
    if parts.tail is not None:
        depth_used = witness.depth
        tail = parts.tail
        fixed_value = (space_y if tail.axis == "base" else space_x).measure.evaluate(tail.fixed)
        running = finite_sum
        for n in range(depth_used + 1):
            running = running + product_measure(space_x.measure, space_y.measure, tail.piece(n))
            closed = finite_sum + tail.partial_measure(n, fixed_value)
            truncation = len(parts.rects) + n + 1
            partial_sums.append((truncation, running))
            if running != closed or running > whole_value:
                raise CertificationFailed(
                    f"❌ Tail truncation {n} sums to {running} (closed form {closed}, bound {whole_value}).",
                    half="upper",
                    truncation=n,
                    report={"partial_sum": running, "closed_form": closed, "whole_value": whole_value},
                )
        required_depth = next(
            (n for n in range(max_depth + 1) if finite_sum + tail.partial_measure(n, fixed_value) > t), None
        )
        if required_depth is None or depth_used < required_depth:
            raise CertificationFailed(
                f"❌ Depth {depth_used} contradicts the closed-form requirement {required_depth}.",
                half="lower",
                truncation=depth_used,
            )

    logger.info("✅ Certified at t = %s with %d indices", t, len(witness.indices))
    return CertReport(whole_value, t, r, s, partial_sums, exact, witness, depth_used, required_depth)


# ==========================================
# NULL SECTIONS
# ==========================================

class Direction(Enum):
    FORWARD = "forward"
    CONVERSE = "converse"


@dataclass
class NullSectionVerdict:
    direction: Direction
    holds: bool
    exceptional_set: SetExpr
    exceptional_outer: ExtReal
    steps: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "direction": self.direction.value,
            "holds": self.holds,
            "exceptional_set": self.exceptional_set.to_json(),
            "exceptional_outer": str(self.exceptional_outer),
            "steps": to_jsonable(self.steps),
        }


def _positive_sections(space_x: MeasureSpace, space_y: MeasureSpace, d: ProductSet) -> SetExpr:
    """{x : mu*_Y(D^x) > 0}, computed directly."""
    if isinstance(space_x.universe, FiniteUniverse):
        return FiniteSet(tuple(x for x in space_x.universe.points() if not outer_measure(space_y, section(d, x)).value.is_zero))
    cells = partition_cells(m.base for m in d.family.symbolic_members())
    return IntervalUnion(tuple((a, b) for a, b in cells if not outer_measure(space_y, section(d, a)).value.is_zero))


def stabilization_depth(space_y: MeasureSpace, d: ProductSet) -> int:
    """
    Smallest k with 1/k below every positive finite value mu*_Y can take on a
    section, so the union of D^{>1/n} over n <= k is already the full union.
    """
    if isinstance(space_y.universe, FiniteUniverse):
        values = attainable_values(space_y)
    else:
        values = section_values(d, space_y)
    positive = [v for v in values if v.is_finite and not v.is_zero]
    if not positive:
        return 1
    smallest = min(positive).fraction
    return int(1 / smallest) + 1


def null_section_forward(space_x: MeasureSpace, space_y: MeasureSpace, d: ProductSet) -> NullSectionVerdict:
    """
    If (mu_X × mu_Y)*(D) = 0 then mu*_Y(D^x) = 0 for mu_X-almost every x.

    The exceptional set {x : mu*_Y(D^x) > 0} is assembled as the union of the
    superlevel sets D^{>1/k} up to the stabilization depth.

    Raises:
        PreconditionFailed: (mu_X × mu_Y)*(D) is not 0.
    """
    joint = product_outer_measure(space_x, space_y, d).value
    if not joint.is_zero:
        raise PreconditionFailed(f"❌ (μ_X × μ_Y)*(D) = {joint}, not 0.", {"product_outer": joint})

    depth = stabilization_depth(space_y, d)
    exceptional = space_x.empty()
    levels = []
    for k in range(1, depth + 1):
        level = superlevel(d, space_y, ExtReal(1, k))
        levels.append({"k": k, "level_outer": outer_measure(space_x, level).value})
        exceptional = set_union(exceptional, level)
    direct = _positive_sections(space_x, space_y, d)
    exceptional_outer = outer_measure(space_x, exceptional).value
    steps = {
        "product_outer": joint,
        "stabilization_depth": depth,
        "levels": levels,
        "matches_direct": exceptional == direct,
    }
    return NullSectionVerdict(Direction.FORWARD, exceptional_outer.is_zero, exceptional, exceptional_outer, steps)


def _complement_cover(space_x: MeasureSpace, space_y: MeasureSpace, dc: ProductSet) -> RectFamily | None:
    """A disjoint cover of D^c by product-semiring rectangles, or None if none can be formed."""
    if isinstance(space_x.measure, PointMass) and isinstance(space_y.measure, PointMass):
        return dc.family
    structure = product_space(space_x, space_y)
    found = product_outer_measure(space_x, space_y, dc)
    if found.witness_cover is None:
        return None
    rects = [structure.rect_of[piece] for piece in found.witness_cover.pieces]
    semiring_x = space_x.semiring if isinstance(space_x.semiring, ExplicitSemiring) else None
    semiring_y = space_y.semiring if isinstance(space_y.semiring, ExplicitSemiring) else None
    try:
        return rect_disjointify(rects, semiring_x, semiring_y)
    except MeasureError:
        return None


def null_section_converse(space_x: MeasureSpace, space_y: MeasureSpace, d: ProductSet) -> NullSectionVerdict:
    """
    If D is (mu_X × mu_Y)*-measurable, both measures are σ-finite and
    mu*_Y(D^x) = 0 for mu_X-almost every x, then (mu_X × mu_Y)*(D) = 0.

    Follows the complement argument: almost every section of D^c is all of Y,
    so D^c carries mu_X(X) mu_Y(Y), and splitting X × Y by D leaves nothing
    for D. A σ-finiteness witness on a finite universe forces finite totals,
    so one pair of pieces covers the whole reduction.

    Raises:
        PreconditionFailed: infinite universes, no σ-finiteness, D not
            measurable (the failing test set is attached), or the sections are
            not almost everywhere null.
    """
    # 1. Finite universes and the σ-finite reduction
    ux, uy = space_x.universe, space_y.universe
    if not isinstance(ux, FiniteUniverse) or not isinstance(uy, FiniteUniverse):
        raise PreconditionFailed("❌ The converse is decided on finite universes only.")
    for name, space in (("μ_X", space_x), ("μ_Y", space_y)):
        if not is_sigma_finite(space):
            raise PreconditionFailed(f"❌ {name} has no σ-finiteness witness.")
    total_x = outer_measure(space_x, ux.full()).value
    total_y = outer_measure(space_y, uy.full()).value
    if total_x.is_infinite or total_y.is_infinite:
        raise PreconditionFailed("❌ Total masses must be finite after the σ-finite reduction.")

    # 2. Measurability of D in the product
    structure = product_space(space_x, space_y)
    measurability = caratheodory_measurable(structure.space, structure.encode_set(d))
    if not measurability.passed:
        failing = measurability.violations[0]["test_set"]
        decoded = structure.decode_set(failing, ux, uy)
        raise PreconditionFailed(
            "❌ D is not (μ_X × μ_Y)*-measurable.",
            {"test_set": decoded, "lhs": measurability.lhs, "rhs": measurability.rhs},
        )

    # 3. Sections null almost everywhere
    exceptional, exceptional_outer = section_exceptional_set(space_x, space_y, d)
    if not exceptional_outer.is_zero:
        raise PreconditionFailed(
            f"❌ Sections are positive on a set of outer measure {exceptional_outer}.",
            {"exceptional_set": exceptional, "exceptional_outer": exceptional_outer},
        )

    # 4. Complement argument
    dc = d.complement()
    full_rows = FiniteSet(tuple(x for x in ux.points() if outer_measure(space_y, section(dc, x)).value == total_y))
    full_rows_outer = outer_measure(space_x, full_rows).value
    complement_outer = product_outer_measure(space_x, space_y, dc).value
    product_total = mul(total_x, total_y)
    square = ProductSet(RectFamily((Rect(ux.full(), uy.full()),)), ux, uy)
    square_outer = product_outer_measure(space_x, space_y, square).value
    derived = sub(square_outer, complement_outer) if square_outer >= complement_outer else None
    direct = product_outer_measure(space_x, space_y, d).value

    # An error while extracting the D^c witness fails the verdict.
    certificate = witness_error = None
    if not product_total.is_zero:
        cover = _complement_cover(space_x, space_y, dc)
        if cover is not None:
            half_x = ExtReal(total_x.fraction / 2)
            half_y = ExtReal(total_y.fraction / 2)
            try:
                certificate = extract_witness(space_x, space_y, dc, cover, r=half_y, s=half_x)
            except MeasureError as exc:
                logger.warning("⚠️ No witness for the complement of D: %s", exc)
                witness_error = {"error": type(exc).__name__, "message": str(exc)}

    holds = (
        full_rows_outer == total_x
        and complement_outer == product_total
        and derived is not None
        and derived.is_zero
        and direct.is_zero
        and witness_error is None
    )
    steps = {
        "total_x": total_x,
        "total_y": total_y,
        "caratheodory": measurability.details.get("method"),
        "full_rows": full_rows,
        "full_rows_outer": full_rows_outer,
        "complement_outer": complement_outer,
        "product_total": product_total,
        "square_outer": square_outer,
        "derived_outer": derived,
        "direct_outer": direct,
        "complement_witness": certificate,
        "complement_witness_error": witness_error,
    }
    return NullSectionVerdict(Direction.CONVERSE, holds, exceptional, exceptional_outer, steps)


def section_exceptional_set(space_x: MeasureSpace, space_y: MeasureSpace, d: ProductSet) -> tuple[SetExpr, ExtReal]:
    """{x : mu*_Y(D^x) > 0} and its mu*_X outer measure; the sections are null almost everywhere when it is 0."""
    exceptional = _positive_sections(space_x, space_y, d)
    return exceptional, outer_measure(space_x, exceptional).value


def check_null_section_equivalence(space_x: MeasureSpace, space_y: MeasureSpace, d: ProductSet) -> CheckReport:
    """
    For (mu_X × mu_Y)*(D) = 0, the forward verdict must hold exactly when the
    converse's section hypothesis does. The forward verdict comes from the
    superlevel sets, the hypothesis from scanning every section directly.
    A D of positive product outer measure has no forward verdict; the report
    records that and passes.
    """
    joint = product_outer_measure(space_x, space_y, d).value
    _, exceptional_outer = section_exceptional_set(space_x, space_y, d)
    sections_null = exceptional_outer.is_zero
    details = {"product_outer": joint, "sections_null": sections_null, "forward": None}
    if not joint.is_zero:
        return CheckReport(check="null_section_equivalence", passed=True, details=details)

    forward = null_section_forward(space_x, space_y, d)
    details["forward"] = forward
    violations = []
    if forward.holds != sections_null:
        violations.append({"forward_holds": forward.holds, "sections_null": sections_null, "exceptional_outer": exceptional_outer})
    return CheckReport(check="null_section_equivalence", passed=not violations, violations=violations, details=details)
