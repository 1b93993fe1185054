"""Planar kernel for finite unions of unit squares.

Every shape handled here is a convex polygon, which keeps the union exact in
structure: the part of an edge lying inside another convex polygon is a single
parameter interval (Cyrus-Beck clipping), so the union boundary is just what
remains of each edge after removing the intervals covered by the others.
Collinear overlaps are decided from the outward normals instead of by probing
points, which is what makes stacks of axis-aligned squares behave.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import cKDTree

EPS = 1e-9
HALF_PI = 0.5 * math.pi

# endpoints of consecutive boundary pieces agree to ~1e-15; this only has to
# beat the smallest feature the kernel keeps (EPS) by a wide margin
_JOIN_TOL = 1e-7


class GeometryError(ValueError):
    """Raised when the union boundary cannot be resolved into closed rings."""


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DomainError(f"non-finite point ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y


def canonical_angle(theta: float) -> float:
    """Reduce an angle modulo pi/2 into [0, pi/2)."""
    t = math.fmod(theta, HALF_PI)
    if t < 0.0:
        t += HALF_PI
    if t >= HALF_PI - 1e-12 or t < 1e-15:
        t = 0.0
    return t


@dataclass(frozen=True)
class UnitSquare:
    """Closed unit square given by its center and rotation (radians)."""

    cx: float
    cy: float
    theta: float = 0.0

    def __post_init__(self):
        for name in ("cx", "cy", "theta"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"UnitSquare.{name} must be finite, got {v!r}")
        object.__setattr__(self, "cx", float(self.cx))
        object.__setattr__(self, "cy", float(self.cy))
        object.__setattr__(self, "theta", canonical_angle(float(self.theta)))

    @property
    def center(self) -> Point:
        return Point(self.cx, self.cy)

    @property
    def axis_aligned(self) -> bool:
        return self.theta == 0.0

    def moved(self, angle: float = 0.0, dx: float = 0.0, dy: float = 0.0) -> "UnitSquare":
        """Rotate about the origin by `angle`, then translate by (dx, dy)."""
        c, s = math.cos(angle), math.sin(angle)
        return UnitSquare(c * self.cx - s * self.cy + dx,
                          s * self.cx + c * self.cy + dy,
                          self.theta + angle)


@dataclass(frozen=True)
class Configuration:
    squares: tuple
    oriented: bool = False
    label: str = ""

    def __post_init__(self):
        sq = tuple(self.squares)
        if not sq:
            raise DomainError("a configuration needs at least one square")
        for s in sq:
            if not isinstance(s, UnitSquare):
                raise DomainError(f"expected UnitSquare, got {type(s).__name__}")
        if self.oriented and not all(s.axis_aligned for s in sq):
            raise DomainError("oriented configuration contains a rotated square")
        object.__setattr__(self, "squares", sq)

    def __len__(self):
        return len(self.squares)

    def __iter__(self):
        return iter(self.squares)

    def __getitem__(self, i):
        return self.squares[i]

    @property
    def axis_aligned(self) -> bool:
        return all(s.axis_aligned for s in self.squares)

    def with_square(self, s: UnitSquare) -> "Configuration":
        return Configuration(self.squares + (s,), self.oriented and s.axis_aligned, self.label)

    def without(self, i: int) -> "Configuration":
        rest = self.squares[:i] + self.squares[i + 1:]
        return Configuration(rest, self.oriented, self.label)

    def moved(self, angle: float = 0.0, dx: float = 0.0, dy: float = 0.0) -> "Configuration":
        sq = tuple(s.moved(angle, dx, dy) for s in self.squares)
        return Configuration(sq, self.oriented and all(s.axis_aligned for s in sq), self.label)


def configuration(squares: Iterable, oriented: bool | None = None, label: str = "") -> Configuration:
    """Build a Configuration from UnitSquares or (cx, cy[, theta]) tuples."""
    sq = tuple(s if isinstance(s, UnitSquare) else UnitSquare(*s) for s in squares)
    if oriented is None:
        oriented = all(s.axis_aligned for s in sq)
    return Configuration(sq, oriented, label)


_CORNERS = np.array([[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]])


def square_polygon(s: UnitSquare) -> np.ndarray:
    """Vertices of `s` as a (4, 2) array in counter-clockwise order."""
    c, sn = math.cos(s.theta), math.sin(s.theta)
    rot = np.array([[c, -sn], [sn, c]])
    return _CORNERS @ rot.T + np.array([s.cx, s.cy])


def regular_polygon(cx: float, cy: float, k: int, radius: float = 1.0, phase: float = 0.0) -> np.ndarray:
    """Regular k-gon inscribed in the circle of given radius, CCW."""
    ang = phase + 2.0 * np.pi * np.arange(k) / k
    return np.column_stack((cx + radius * np.cos(ang), cy + radius * np.sin(ang)))


def ring_area(ring: np.ndarray) -> float:
    """Signed shoelace area (positive for CCW rings)."""
    x, y = ring[:, 0], ring[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def ring_length(ring: np.ndarray) -> float:
    d = np.roll(ring, -1, axis=0) - ring
    return float(np.hypot(d[:, 0], d[:, 1]).sum())


def _halfplanes(poly: np.ndarray):
    d = np.roll(poly, -1, axis=0) - poly
    length = np.hypot(d[:, 0], d[:, 1])
    normals = np.column_stack((d[:, 1], -d[:, 0])) / length[:, None]
    offsets = np.einsum("ij,ij->i", normals, poly)
    return normals, offsets


@dataclass
class BoundarySegment:
    a: Point
    b: Point
    owner: int
    strip_class: str | None = None

    @property
    def length(self) -> float:
        return math.hypot(self.b.x - self.a.x, self.b.y - self.a.y)

    @property
    def midpoint(self) -> Point:
        return Point(0.5 * (self.a.x + self.b.x), 0.5 * (self.a.y + self.b.y))


@dataclass
class Region:
    """Union of closed polygons: CCW shells, CW holes, and attributed boundary."""

    shells: list = field(default_factory=list)
    holes: list = field(default_factory=list)
    hole_shell: list = field(default_factory=list)
    boundary_segments: list = field(default_factory=list)

    @property
    def rings(self) -> list:
        return list(self.shells) + list(self.holes)


class _Pieces:
    """Directed boundary pieces: owner polygon, start and end points."""

    __slots__ = ("owner", "a", "b")

    def __init__(self, owner, a, b):
        self.owner = owner
        self.a = a
        self.b = b

    def __len__(self):
        return len(self.owner)

    @property
    def perimeter(self) -> float:
        d = self.b - self.a
        return float(np.hypot(d[:, 0], d[:, 1]).sum())

    @property
    def area(self) -> float:
        # Green's theorem over the oriented boundary, interior on the left
        if len(self.owner) == 0:
            return 0.0
        a, b = self.a - self.a[0], self.b - self.a[0]
        return 0.5 * float(np.sum(a[:, 0] * b[:, 1] - b[:, 0] * a[:, 1]))


_SMALL_EDGES = 96


def _complement(ivs, length, eps):
    pos = 0.0
    keep = []
    for lo, hi in sorted(ivs):
        if lo > pos:
            keep.append((pos, lo))
        if hi > pos:
            pos = hi
    if pos < 1.0:
        keep.append((pos, 1.0))
    return [(t0, t1) for t0, t1 in keep if (t1 - t0) * length > eps]


def _boundary_pieces(polys: Sequence[np.ndarray], eps: float = EPS) -> _Pieces:
    """Boundary of the union of closed convex CCW polygons.

    Each edge keeps the complement of the intervals covered by other polygons.
    An edge lying on another polygon's edge line is covered when the normals
    are opposite (the two interiors meet there); with equal normals the lower
    polygon index owns the shared piece.
    """
    if sum(len(p) for p in polys) <= _SMALL_EDGES:
        return _boundary_pieces_small(polys, eps)
    return _boundary_pieces_array(polys, eps)


def _boundary_pieces_small(polys, eps: float = EPS) -> _Pieces:
    """Scalar version of `_boundary_pieces_array` for a handful of polygons,
    where per-call numpy overhead would dominate."""
    rings = [np.asarray(p, dtype=float).tolist() for p in polys]
    planes, boxes = [], []
    for ring in rings:
        hp = []
        k = len(ring)
        for e in range(k):
            px, py = ring[e]
            qx, qy = ring[(e + 1) % k]
            dx, dy = qx - px, qy - py
            ln = math.hypot(dx, dy)
            nx, ny = dy / ln, -dx / ln
            hp.append((nx, ny, nx * px + ny * py))
        planes.append(hp)
        xs = [v[0] for v in ring]
        ys = [v[1] for v in ring]
        boxes.append((min(xs) - eps, min(ys) - eps, max(xs) + eps, max(ys) + eps))

    owners, starts, ends = [], [], []
    for i, ring in enumerate(rings):
        bx0, by0, bx1, by1 = boxes[i]
        cand = [j for j, (x0, y0, x1, y1) in enumerate(boxes)
                if j != i and x0 <= bx1 and x1 >= bx0 and y0 <= by1 and y1 >= by0]
        k = len(ring)
        for e in range(k):
            px, py = ring[e]
            qx, qy = ring[(e + 1) % k]
            nix, niy, _ = planes[i][e]
            dx, dy = qx - px, qy - py
            length = math.hypot(dx, dy)
            ivs = []
            for j in cand:
                lo, hi = 0.0, 1.0
                same = opp = False
                for nx, ny, off in planes[j]:
                    sp = nx * px + ny * py - off
                    sq = nx * qx + ny * qy - off
                    if -eps <= sp <= eps and -eps <= sq <= eps:
                        if nx * nix + ny * niy > 0:
                            same = True
                        else:
                            opp = True
                        continue
                    den = sq - sp
                    if -1e-15 <= den <= 1e-15:
                        if sp > 0:
                            hi = -math.inf
                            break
                        continue
                    t = -sp / den
                    if den > 0:
                        if t < hi:
                            hi = t
                    elif t > lo:
                        lo = t
                if (hi - lo) * length > eps and (opp or not same or j < i):
                    ivs.append((lo, hi))
            if not ivs:
                owners.append(i)
                starts.append((px, py))
                ends.append((qx, qy))
                continue
            for t0, t1 in _complement(ivs, length, eps):
                owners.append(i)
                starts.append((px, py) if t0 == 0.0 else (px + t0 * dx, py + t0 * dy))
                ends.append((qx, qy) if t1 == 1.0 else (px + t1 * dx, py + t1 * dy))
    return _Pieces(np.asarray(owners, dtype=int),
                   np.asarray(starts, dtype=float).reshape(-1, 2),
                   np.asarray(ends, dtype=float).reshape(-1, 2))


def _boundary_pieces_array(polys: Sequence[np.ndarray], eps: float = EPS) -> _Pieces:
    polys = [np.asarray(p, dtype=float) for p in polys]
    hp = [_halfplanes(p) for p in polys]
    box_lo = np.array([p.min(axis=0) for p in polys]) - eps
    box_hi = np.array([p.max(axis=0) for p in polys]) + eps

    owners, starts_out, ends_out = [], [], []
    for i, P in enumerate(polys):
        Q = np.roll(P, -1, axis=0)
        D = Q - P
        length = np.hypot(D[:, 0], D[:, 1])
        e_lo = np.minimum(P, Q)
        e_hi = np.maximum(P, Q)
        ivs = [[] for _ in range(len(P))]
        for j in range(len(polys)):
            if j == i or np.any(box_lo[j] > box_hi[i]) or np.any(box_hi[j] < box_lo[i]):
                continue
            near = np.flatnonzero(np.all((e_lo <= box_hi[j]) & (e_hi >= box_lo[j]), axis=1))
            if near.size == 0:
                continue
            N, off = hp[j]
            sP = P[near] @ N.T - off
            sQ = Q[near] @ N.T - off
            col = (np.abs(sP) <= eps) & (np.abs(sQ) <= eps)
            den = sQ - sP
            par = np.abs(den) <= 1e-15
            free = ~col & ~par
            with np.errstate(divide="ignore", invalid="ignore"):
                t = np.where(free, -sP / np.where(free, den, 1.0), 0.0)
            lower = np.where(free & (den < 0), t, -np.inf)
            upper = np.where(free & (den > 0), t, np.inf)
            upper = np.where(par & ~col & (sP > 0), -np.inf, upper)
            t_lo = np.maximum(lower.max(axis=1), 0.0)
            t_hi = np.minimum(upper.min(axis=1), 1.0)
            dots = hp[i][0][near] @ N.T
            same = np.any(col & (dots > 0), axis=1)
            opp = np.any(col & (dots < 0), axis=1)
            yields = opp | ~same | (j < i)
            covered = ((t_hi - t_lo) * length[near] > eps) & yields
            for e, lo, hi in zip(near[covered].tolist(), t_lo[covered].tolist(), t_hi[covered].tolist()):
                ivs[e].append((lo, hi))

        for e in range(len(P)):
            if not ivs[e]:
                owners.append(i)
                starts_out.append(P[e])
                ends_out.append(Q[e])
                continue
            for t0, t1 in _complement(ivs[e], length[e], eps):
                owners.append(i)
                starts_out.append(P[e] if t0 == 0.0 else P[e] + t0 * D[e])
                ends_out.append(Q[e] if t1 == 1.0 else P[e] + t1 * D[e])

    if not owners:
        empty = np.zeros((0, 2))
        return _Pieces(np.zeros(0, dtype=int), empty, empty)
    return _Pieces(np.asarray(owners, dtype=int), np.array(starts_out), np.array(ends_out))


def _turn(d_in: np.ndarray, d_out: np.ndarray) -> float:
    cross = d_in[0] * d_out[1] - d_in[1] * d_out[0]
    return math.atan2(cross, float(np.dot(d_in, d_out)))


def _assemble_rings(pieces: _Pieces) -> list:
    """Chain directed pieces into closed rings, taking the leftmost turn at
    junctions so regions touching at a point stay separate rings."""
    m = len(pieces)
    if m == 0:
        return []
    tree = cKDTree(pieces.a)
    succ = tree.query_ball_point(pieces.b, r=_JOIN_TOL)
    used = np.zeros(m, dtype=bool)
    rings = []
    for first in range(m):
        if used[first]:
            continue
        ring = [first]
        used[first] = True
        cur = first
        while True:
            d_in = pieces.b[cur] - pieces.a[cur]
            options = [j for j in succ[cur] if not used[j] or j == first]
            if not options:
                x, y = pieces.b[cur]
                raise GeometryError(
                    f"open boundary chain at ({x:.17g}, {y:.17g}) after piece of square {pieces.owner[cur]}")
            # the ring closes only when its own start is the leftmost continuation
            best = max(options, key=lambda j: _turn(d_in, pieces.b[j] - pieces.a[j]))
            if best == first:
                break
            used[best] = True
            ring.append(best)
            cur = best
        rings.append(ring)
    return rings


def _points_in_ring(pts: np.ndarray, ring: np.ndarray) -> np.ndarray:
    """Even-odd ray casting; boundary points are unspecified."""
    x, y = pts[:, 0][:, None], pts[:, 1][:, None]
    x0, y0 = ring[:, 0][None, :], ring[:, 1][None, :]
    nxt = np.roll(ring, -1, axis=0)
    x1, y1 = nxt[:, 0][None, :], nxt[:, 1][None, :]
    straddle = (y0 > y) != (y1 > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xc = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
    return np.sum(straddle & (x < xc), axis=1) % 2 == 1


def _region_from_pieces(pieces: _Pieces) -> Region:
    ring_ids = _assemble_rings(pieces)
    shells, holes, hole_rings = [], [], []
    for ids in ring_ids:
        ring = pieces.a[ids]
        if ring_area(ring) > 0:
            shells.append(ring)
        else:
            hole_rings.append(ring)
    hole_shell = []
    for ring in hole_rings:
        probe = 0.5 * (ring[:1] + ring[1:2])
        best, best_area = -1, math.inf
        for k, shell in enumerate(shells):
            if _points_in_ring(probe, shell)[0]:
                a = ring_area(shell)
                if a < best_area:
                    best, best_area = k, a
        if best < 0:
            x, y = probe[0]
            raise GeometryError(f"hole ring near ({x:.17g}, {y:.17g}) lies in no shell")
        holes.append(ring)
        hole_shell.append(best)
    segs = [BoundarySegment(Point(*map(float, a)), Point(*map(float, b)), int(o))
            for o, a, b in zip(pieces.owner, pieces.a, pieces.b)]
    return Region(shells, holes, hole_shell, segs)


def polygons(c: Configuration) -> list:
    return [square_polygon(s) for s in c.squares]


def union_polygons(polys: Sequence[np.ndarray]) -> Region:
    """Union of arbitrary convex CCW polygons (internal extension of `union`)."""
    return _region_from_pieces(_boundary_pieces(polys))


def union(c: Configuration) -> Region:
    """Union of the configuration's squares with boundary attribution."""
    return union_polygons(polygons(c))


def area(r: Region) -> float:
    return sum(ring_area(s) for s in r.shells) + sum(ring_area(h) for h in r.holes)


def perimeter(r: Region) -> float:
    return sum(ring_length(ring) for ring in r.rings)


def measure_polygons(polys: Sequence[np.ndarray]) -> tuple:
    """(perimeter, area) of a union of convex polygons without building rings."""
    pieces = _boundary_pieces(polys)
    return pieces.perimeter, pieces.area


def measure(c: Configuration) -> tuple:
    """(perimeter, area) of the union of `c`."""
    return measure_polygons(polygons(c))


def ratio(c: Configuration) -> float:
    p, a = measure(c)
    return p / a


def union_area(c: Configuration) -> float:
    return measure(c)[1]


def contains(c: Configuration, pts, closed: bool = True, eps: float = EPS) -> np.ndarray:
    """Vectorised point-in-union test (per square, in the square's own frame)."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    inside = np.zeros(len(pts), dtype=bool)
    lim = 0.5 + eps if closed else 0.5 - eps
    for s in c.squares:
        cth, sth = math.cos(s.theta), math.sin(s.theta)
        dx, dy = pts[:, 0] - s.cx, pts[:, 1] - s.cy
        u = cth * dx + sth * dy
        v = -sth * dx + cth * dy
        inside |= (np.abs(u) <= lim) & (np.abs(v) <= lim)
    return inside


def bounding_box(c: Configuration) -> tuple:
    verts = np.concatenate(polygons(c))
    (x0, y0), (x1, y1) = verts.min(axis=0), verts.max(axis=0)
    return float(x0), float(y0), float(x1), float(y1)


def monte_carlo_area(c: Configuration, samples: int, seed: int, chunk: int = 1 << 18) -> tuple:
    """Rejection-sampling estimate of the union area and its standard error.

    Independent of the union kernel: it only uses the closed-form
    point-in-square test.
    """
    if samples < 1:
        raise DomainError("samples must be >= 1")
    x0, y0, x1, y1 = bounding_box(c)
    box = (x1 - x0) * (y1 - y0)
    rng = np.random.default_rng(seed)
    hits = 0
    left = samples
    while left > 0:
        n = min(chunk, left)
        pts = np.column_stack((rng.uniform(x0, x1, n), rng.uniform(y0, y1, n)))
        hits += int(contains(c, pts).sum())
        left -= n
    f = hits / samples
    return box * f, box * math.sqrt(f * (1.0 - f) / samples)


def chord_length(poly: np.ndarray, p, theta: float, eps: float = EPS) -> float:
    """Length of the segment from `p` in direction `theta` through the interior
    of the convex polygon. Zero when the ray leaves at once or runs along an
    edge."""
    normals, offsets = _halfplanes(np.asarray(poly, dtype=float))
    u = np.array([math.cos(theta), math.sin(theta)])
    p = np.asarray(tuple(p), dtype=float)
    rate = normals @ u
    slack = offsets - normals @ p
    if np.any(slack < -eps):
        raise DomainError("chord start lies outside the polygon")
    if np.any((np.abs(rate) <= 1e-12) & (np.abs(slack) <= eps)):
        return 0.0
    out = rate > 1e-12
    if not np.any(out):
        return math.inf
    t_exit = float(np.min(np.maximum(slack[out], 0.0) / rate[out]))
    return max(t_exit, 0.0)
