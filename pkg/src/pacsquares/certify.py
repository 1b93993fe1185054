"""Numerical certificates for the ratio-4 theorem on axis-aligned squares.

Three independent arguments are checked on concrete input:

* strip averaging over the whole boundary (`strip_certificate`),
* the incremental bump-out argument for adding one square (`bump_step`),
* the incremental boundary-strip argument (`classify_boundary_strips`).

Every check compares the argument's inequalities against the perimeter and
area computed by the geometry kernel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geometry import (
    EPS,
    BoundarySegment,
    Configuration,
    DomainError,
    Point,
    UnitSquare,
    area,
    chord_length,
    contains,
    measure,
    perimeter,
    square_polygon,
    union,
)

CARDINAL = (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)
TOL = 1e-9


def _require_axis_aligned(c: Configuration, what: str = "configuration") -> None:
    if not c.axis_aligned:
        raise DomainError(f"{what} must consist of axis-aligned squares")


@dataclass
class StripCertificate:
    sums: dict
    averaged: float
    area: float
    perimeter: float

    @property
    def checks(self) -> dict:
        return {
            "averaged_is_quarter_perimeter": abs(self.averaged - 0.25 * self.perimeter) <= TOL,
            "each_direction_below_area": all(s <= self.area + TOL for s in self.sums.values()),
            "averaged_below_area": self.averaged <= self.area + TOL,
        }

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def strip_certificate(c: Configuration) -> StripCertificate:
    """Strip sums S(theta) = sum |s_j| * l(M_j, theta) for the four cardinal
    directions, where l is the chord through the owning square from the
    midpoint of boundary piece s_j."""
    _require_axis_aligned(c)
    region = union(c)
    polys = [square_polygon(s) for s in c.squares]
    sums = {theta: 0.0 for theta in CARDINAL}
    for seg in region.boundary_segments:
        poly = polys[seg.owner]
        mid = seg.midpoint
        for theta in CARDINAL:
            sums[theta] += seg.length * chord_length(poly, mid, theta)
    averaged = 0.25 * sum(sums.values())
    return StripCertificate(sums, averaged, area(region), perimeter(region))


def rectangle_ratio_check(w: float, h: float) -> float:
    """Perimeter/area of a w-by-h rectangle inside the unit square (always >= 4)."""
    if not (0.0 < w <= 1.0 and 0.0 < h <= 1.0):
        raise DomainError(f"rectangle sides must lie in (0, 1], got ({w}, {h})")
    r = 2.0 * (w + h) / (w * h)
    if r < 4.0 - 1e-12:
        raise ArithmeticError(f"rectangle ratio {r} below 4")
    return r


def strip_bound(h: float, v: float) -> float:
    """Upper bound 2(h + v) / (h + v - hv) on dp/da from boundary strips."""
    den = h + v - h * v
    if not (0.0 <= h <= 1.0 and 0.0 <= v <= 1.0) or den <= 0.0:
        raise DomainError(f"strip bound undefined for h={h}, v={v}")
    return 2.0 * (h + v) / den


@dataclass(frozen=True)
class Rect:
    """Closed axis-aligned rectangle; may be degenerate."""

    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def perimeter(self) -> float:
        return 2.0 * (self.width + self.height)

    @property
    def solid(self) -> bool:
        return self.width > EPS and self.height > EPS

    def contains(self, x: float, y: float, eps: float = EPS) -> bool:
        return self.x0 - eps <= x <= self.x1 + eps and self.y0 - eps <= y <= self.y1 + eps

    def abuts(self, other: "Rect") -> bool:
        """Closed rectangles share more than a single point."""
        w = min(self.x1, other.x1) - max(self.x0, other.x0)
        h = min(self.y1, other.y1) - max(self.y0, other.y0)
        return w >= -EPS and h >= -EPS and max(w, h) > EPS

    def hull(self, other: "Rect") -> "Rect":
        return Rect(min(self.x0, other.x0), min(self.y0, other.y0),
                    max(self.x1, other.x1), max(self.y1, other.y1))


def _footprint(s: UnitSquare) -> Rect:
    return Rect(s.cx - 0.5, s.cy - 0.5, s.cx + 0.5, s.cy + 0.5)


def _meets(base: Configuration, s: UnitSquare) -> list:
    """Closed intersections of each base square with s (degenerate kept)."""
    f = _footprint(s)
    out = []
    for h in base.squares:
        g = _footprint(h)
        r = Rect(max(f.x0, g.x0), max(f.y0, g.y0), min(f.x1, g.x1), min(f.y1, g.y1))
        if r.width >= -EPS and r.height >= -EPS:
            out.append(Rect(r.x0, r.y0, max(r.x1, r.x0), max(r.y1, r.y0)))
    return out


def _bbox(rects) -> Rect:
    it = iter(rects)
    box = next(it)
    for r in it:
        box = box.hull(r)
    return box


def _corners(s: UnitSquare) -> list:
    # bottom-left, bottom-right, top-right, top-left
    x0, y0 = s.cx - 0.5, s.cy - 0.5
    return [(x0, y0), (x0 + 1.0, y0), (x0 + 1.0, y0 + 1.0), (x0, y0 + 1.0)]


@dataclass
class BumpStep:
    base: Configuration
    new_square: UnitSquare
    case_id: int
    delta_p: float
    delta_a: float
    bump_rectangles: list
    chain_bound: float | None = None
    checks: dict = field(default_factory=dict)

    @property
    def noop(self) -> bool:
        return abs(self.delta_a) <= 1e-12

    @property
    def ratio(self) -> float | None:
        return None if self.noop else self.delta_p / self.delta_a

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def bump_step(base: Configuration, s: UnitSquare) -> BumpStep:
    """Add axis-aligned `s` to `base` and check dp/da <= 4 along the bump-out
    argument: the overlap is replaced by enclosing rectangles, whose own
    ratio is at least 4."""
    _require_axis_aligned(base, "base")
    if not s.axis_aligned:
        raise DomainError("new square must be axis-aligned")
    p0, a0 = measure(base)
    p1, a1 = measure(base.with_square(s))
    dp, da = p1 - p0, a1 - a0

    corners = _corners(s)
    inside = contains(base, corners, closed=True).tolist()
    case_id = int(sum(inside))
    solid = [r for r in _meets(base, s) if r.solid]

    step = BumpStep(base, s, case_id, dp, da, [])
    if step.noop:
        step.checks["covered_step_no_perimeter_gain"] = dp <= TOL
        return step
    step.checks["ratio_at_most_4"] = dp / da <= 4.0 + TOL
    if not solid:
        return step

    rects = []
    if case_id == 1:
        rects = [_bbox(solid)]
    elif case_id == 2:
        v1, v2 = [k for k in range(4) if inside[k]]
        groups = [[r for r in solid if r.contains(*corners[v])] for v in (v1, v2)]
        groups = [g for g in groups if g]
        rb = [_bbox(g) for g in groups]
        # bumps sharing a side cannot be counted separately: their common
        # edge is not boundary
        if len(rb) == 2 and rb[0].abuts(rb[1]):
            if (v2 - v1) % 2 == 1:
                rects = [rb[0].hull(rb[1])]
            else:
                # diagonal corners with overlapping bumps: nothing is gained
                step.checks["diagonal_overlap_no_perimeter_gain"] = dp <= TOL
                step.bump_rectangles = rb
                return step
        else:
            rects = rb
    step.bump_rectangles = rects
    if rects:
        num = 4.0 - sum(r.perimeter for r in rects)
        den = 1.0 - sum(r.area for r in rects)
        if den > 1e-12:
            chain = num / den
            step.chain_bound = chain
            step.checks["bump_chain_at_most_4"] = chain <= 4.0 + TOL
            if num >= 0.0:
                step.checks["ratio_below_bump_chain"] = dp / da <= chain + TOL
            else:
                # two bumps with more than 4 of perimeter between them: the
                # true overlap may be smaller than the boxes, so dp/da can
                # exceed the (negative) chain value, but dp itself is <= 0
                step.checks["negative_chain_no_perimeter_gain"] = dp <= TOL
    return step


# --- boundary strips -------------------------------------------------------

def _merge(ivs) -> list:
    out = []
    for lo, hi in sorted(ivs):
        if out and lo <= out[-1][1] + EPS:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return [(lo, hi) for lo, hi in out if hi - lo > EPS]


def _subtract(ivs, cut) -> list:
    """Parts of merged `ivs` outside merged `cut`."""
    out = []
    for lo, hi in ivs:
        pos = lo
        for clo, chi in cut:
            if chi <= pos or clo >= hi:
                continue
            if clo > pos:
                out.append((pos, clo))
            pos = max(pos, chi)
        if pos < hi:
            out.append((pos, hi))
    return [(lo, hi) for lo, hi in out if hi - lo > EPS]


def _intersect(ivs, cut) -> list:
    out = []
    for lo, hi in ivs:
        for clo, chi in cut:
            a, b = max(lo, clo), min(hi, chi)
            if b - a > EPS:
                out.append((a, b))
    return out


def _total(ivs) -> float:
    return sum(hi - lo for lo, hi in ivs)


_SIDES = ("bottom", "right", "top", "left")


@dataclass
class StripClassification:
    """P0/P1/P2 partition of the new square's boundary.

    P0 pieces lie in the existing union; P1 pieces are uncovered but every
    orthogonal line through them meets the overlap; P2 pieces are uncovered
    and orthogonal lines through them miss the overlap.
    """

    segments: list
    intervals: dict
    h: float
    v: float
    delta_p: float
    delta_a: float

    def pieces(self, side: str, cls: str) -> list:
        return self.intervals[side][cls]

    @property
    def mirror_ok(self) -> bool:
        def same(a, b):
            return len(a) == len(b) and all(abs(p - q) <= 1e-9 and abs(r - s) <= 1e-9
                                            for (p, r), (q, s) in zip(a, b))
        return (same(self.pieces("bottom", "P2"), self.pieces("top", "P2"))
                and same(self.pieces("left", "P2"), self.pieces("right", "P2")))

    @property
    def checks(self) -> dict:
        cover = sum(_total(self.intervals[side][c]) for side in _SIDES for c in ("P0", "P1", "P2"))
        return {
            "classes_cover_boundary": abs(cover - 4.0) <= 1e-6,
            "p2_mirror_is_p2": self.mirror_ok,
            "dp_at_most_2(h+v)": self.delta_p <= 2.0 * (self.h + self.v) + TOL,
            "da_at_least_h+v-hv": self.delta_a >= self.h + self.v - self.h * self.v - TOL,
        }

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def classify_boundary_strips(base: Configuration, s: UnitSquare) -> StripClassification:
    _require_axis_aligned(base, "base")
    if not s.axis_aligned:
        raise DomainError("new square must be axis-aligned")
    ox, oy = s.cx - 0.5, s.cy - 0.5
    local = [Rect(r.x0 - ox, r.y0 - oy, r.x1 - ox, r.y1 - oy) for r in _meets(base, s)]
    if not any(r.solid for r in local):
        raise DomainError("new square does not overlap the interior of the base union")

    proj_x = _merge((r.x0, r.x1) for r in local if r.width > EPS)
    proj_y = _merge((r.y0, r.y1) for r in local if r.height > EPS)
    touching = {
        "bottom": [(r.x0, r.x1) for r in local if r.y0 <= EPS],
        "top": [(r.x0, r.x1) for r in local if r.y1 >= 1.0 - EPS],
        "left": [(r.y0, r.y1) for r in local if r.x0 <= EPS],
        "right": [(r.y0, r.y1) for r in local if r.x1 >= 1.0 - EPS],
    }
    intervals = {}
    for side in _SIDES:
        p0 = _merge(touching[side])
        free = _subtract([(0.0, 1.0)], p0)
        proj = proj_x if side in ("bottom", "top") else proj_y
        intervals[side] = {"P0": p0, "P1": _intersect(free, proj), "P2": _subtract(free, proj)}

    owner = len(base)
    segments = []

    def at(side, t):
        x, y = {"bottom": (t, 0.0), "top": (t, 1.0), "left": (0.0, t), "right": (1.0, t)}[side]
        return Point(ox + x, oy + y)

    for side in _SIDES:
        for cls in ("P0", "P1", "P2"):
            for lo, hi in intervals[side][cls]:
                segments.append(BoundarySegment(at(side, lo), at(side, hi), owner, cls))

    p0, a0 = measure(base)
    p1, a1 = measure(base.with_square(s))
    h = _total(intervals["bottom"]["P2"])
    v = _total(intervals["left"]["P2"])
    return StripClassification(segments, intervals, h, v, p1 - p0, a1 - a0)


def verify_oriented(c: Configuration) -> dict:
    """Run every applicable certificate on an axis-aligned configuration.

    The incremental certificates are applied to the squares in input order.
    """
    _require_axis_aligned(c)
    cert = strip_certificate(c)
    p, a = measure(c)
    report = {
        "n_squares": len(c),
        "perimeter": p,
        "area": a,
        "ratio": p / a,
        "ratio_at_most_4": p / a <= 4.0 + TOL,
        "strip_certificate": {
            "pass": cert.passed,
            "sums": {f"{t:.12g}": v for t, v in cert.sums.items()},
            "averaged": cert.averaged,
            "area": cert.area,
            "checks": cert.checks,
        },
        "bump_steps": [],
        "boundary_strips": [],
    }
    for k in range(1, len(c)):
        base = Configuration(c.squares[:k], True)
        step = bump_step(base, c.squares[k])
        report["bump_steps"].append({
            "index": k,
            "case": step.case_id,
            "delta_p": step.delta_p,
            "delta_a": step.delta_a,
            "chain_bound": step.chain_bound,
            "pass": step.passed,
            "checks": step.checks,
        })
        if any(r.solid for r in _meets(base, c.squares[k])):
            cls = classify_boundary_strips(base, c.squares[k])
            report["boundary_strips"].append({
                "index": k,
                "h": cls.h,
                "v": cls.v,
                "delta_p": cls.delta_p,
                "delta_a": cls.delta_a,
                "pass": cls.passed,
                "checks": cls.checks,
            })
    report["pass"] = (report["ratio_at_most_4"] and cert.passed
                      and all(s["pass"] for s in report["bump_steps"])
                      and all(s["pass"] for s in report["boundary_strips"]))
    return report
