"""Exact geometric primitives over rational inputs.

Sites are parsed to exact rationals and rescaled once onto a common integer
grid; every predicate and construction after that point is integer-exact.
Degenerate inputs (collinear triples, cocircular quadruples) are rejected
up front by :func:`validate_general_position` rather than perturbed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

from . import exact


class DegenerateGeometry(Exception):
    """A construction hit a configuration excluded by general position."""


@dataclass(frozen=True, slots=True)
class Site:
    """An input point with exact coordinates on the common integer grid.

    ``ix``/``iy`` are the grid coordinates, ``scale`` the common positive
    denominator shared by the whole point set: the true coordinates are
    ``ix/scale`` and ``iy/scale``.
    """

    ix: int
    iy: int
    scale: int
    index: int

    @property
    def x(self) -> Fraction:
        return Fraction(self.ix, self.scale)

    @property
    def y(self) -> Fraction:
        return Fraction(self.iy, self.scale)

    @property
    def ipt(self):
        return (self.ix, self.iy)

    def __repr__(self):  # pragma: no cover - debugging aid
        return f"Site({self.x}, {self.y}, index={self.index})"


def site_set(coords: Iterable, scale: Optional[int] = None) -> tuple[Site, ...]:
    """Build Sites from rationals/ints/strings, rescaled to a common grid."""
    fracs = []
    for xy in coords:
        x, y = xy
        fracs.append((Fraction(x), Fraction(y)))
    if scale is None:
        scale = 1
        for x, y in fracs:
            scale = scale * x.denominator // gcd(scale, x.denominator)
            scale = scale * y.denominator // gcd(scale, y.denominator)
    sites = []
    for i, (x, y) in enumerate(fracs):
        ix = x.numerator * (scale // x.denominator)
        iy = y.numerator * (scale // y.denominator)
        sites.append(Site(ix, iy, scale, i))
    return tuple(sites)


@dataclass(frozen=True, slots=True)
class BisectorLine:
    """Perpendicular bisector of two sites, as integer line a*x + b*y = c."""

    p: int
    q: int
    line: tuple[int, int, int]

    @property
    def direction(self):
        return exact.line_dir(self.line)


@dataclass(frozen=True, slots=True)
class Ray:
    """Ray from an exact origin (int pair on the grid) with primitive direction."""

    origin: tuple[int, int]
    direction: tuple[int, int]

    def __post_init__(self):
        if self.direction == (0, 0):
            raise ValueError("ray direction must be nonzero")


@dataclass(frozen=True, slots=True)
class EdgePiece:
    """A connected portion of a bisector: segment, ray, or full line.

    Endpoints are homogeneous integer points on the carrier; a missing
    endpoint means the piece is unbounded in that carrier direction
    (``lo`` toward decreasing canonical parameter, ``hi`` toward
    increasing).  Stored endpoints are understood as excluded: pieces are
    open sets on their carrier.
    """

    carrier: BisectorLine
    lo: Optional[tuple[int, int, int]]
    hi: Optional[tuple[int, int, int]]

    @property
    def kind(self) -> str:
        if self.lo is not None and self.hi is not None:
            return "segment"
        if self.lo is None and self.hi is None:
            return "line"
        return "ray"

    def endpoint_fractions(self, scale: int):
        """Both endpoints as Fraction pairs in original coordinates (or None)."""
        out = []
        for hp in (self.lo, self.hi):
            if hp is None:
                out.append(None)
            else:
                out.append((Fraction(hp[0], hp[2] * scale), Fraction(hp[1], hp[2] * scale)))
        return tuple(out)


def full_line_piece(carrier: BisectorLine) -> EdgePiece:
    return EdgePiece(carrier, None, None)


def orient(a: Site, b: Site, c: Site) -> int:
    """Sign of the signed area of triangle (a, b, c)."""
    return exact.orient_ipts(a.ipt, b.ipt, c.ipt)


def incircle(a: Site, b: Site, c: Site, d: Site) -> int:
    """+1 iff d is strictly inside the circle through a counterclockwise
    (a, b, c); -1 strictly outside; 0 on the circle.  The sign flips under
    odd permutations of the arguments."""
    if exact.orient_ipts(a.ipt, b.ipt, c.ipt) == 0:
        raise DegenerateGeometry(
            f"incircle query with collinear sites {a.index}, {b.index}, {c.index}"
        )
    return exact.incircle_ipts(a.ipt, b.ipt, c.ipt, d.ipt)


def bisector(p: Site, q: Site) -> BisectorLine:
    """Exact perpendicular bisector of two distinct sites."""
    if p.ipt == q.ipt:
        raise DegenerateGeometry(f"bisector of identical sites {p.index}, {q.index}")
    return BisectorLine(p.index, q.index, exact.bisector_line(p.ipt, q.ipt))


def circumcenter(a: Site, b: Site, c: Site):
    """Homogeneous circumcenter of three non-collinear sites."""
    pt = exact.circumcenter_hpoint(a.ipt, b.ipt, c.ipt)
    if pt is None:
        raise DegenerateGeometry(
            f"circumcenter of collinear sites {a.index}, {b.index}, {c.index}"
        )
    return pt


def ray_hit(r: Ray, line: BisectorLine):
    """Smallest t >= 0 where the ray meets the line, as (num, den); None if missed."""
    try:
        return exact.ray_line_param(r.origin, r.direction, line.line)
    except ValueError as e:
        raise DegenerateGeometry(str(e)) from None


def clip_to_nearer(piece: EdgePiece, anchor: Site, rival: Site, keep_nearer: bool = True) -> Optional[EdgePiece]:
    """Keep the part of the piece strictly closer to anchor than to rival.

    With ``keep_nearer=False`` keeps the strictly-farther part instead (the
    farthest-site variant).  Returns None when nothing survives.  The
    surviving part is connected because the piece is convex.
    """
    cut = exact.bisector_line(anchor.ipt, rival.ipt)
    # f(x) = d^2(x, anchor) - d^2(x, rival) = -(a*x + b*y - c) up to a
    # positive factor with this line orientation; recompute directly to
    # keep the wanted sign explicit.
    ax, ay = anchor.ipt
    rx, ry = rival.ipt
    la = 2 * (rx - ax)
    lb = 2 * (ry - ay)
    lc = rx * rx + ry * ry - ax * ax - ay * ay
    # f(hp) = la*x + lb*y - lc; f < 0 on the anchor side.
    want = -1 if keep_nearer else 1

    carrier = piece.carrier.line
    d = exact.line_dir(carrier)
    slope = exact.sign(la * d[0] + lb * d[1])

    def f_at(hp):
        return exact.sign(la * hp[0] + lb * hp[1] - lc * hp[2])

    if slope == 0:
        # Clip line parallel to the carrier: all or nothing.
        probe = piece.lo or piece.hi or exact.line_point(carrier)
        s = f_at(probe)
        if s == 0:
            # Carrier coincides with the clip bisector — excluded for
            # distinct pairs under general position.
            raise DegenerateGeometry("carrier coincides with clipping bisector")
        return piece if s == want else None

    crossing = exact.line_intersection(carrier, (la, lb, lc))
    t_cross = exact.param_along(carrier, crossing)
    lo, hi = piece.lo, piece.hi
    if slope == want:
        # f has the wanted sign for parameters above the crossing.
        if lo is None or exact.cmp_params(exact.param_along(carrier, lo), t_cross) < 0:
            lo = crossing
    else:
        if hi is None or exact.cmp_params(exact.param_along(carrier, hi), t_cross) > 0:
            hi = crossing
    if lo is not None and hi is not None:
        if exact.cmp_params(exact.param_along(carrier, lo), exact.param_along(carrier, hi)) >= 0:
            return None
    return EdgePiece(piece.carrier, lo, hi)


@dataclass(frozen=True, slots=True)
class Violation:
    kind: str  # DuplicateSite | CollinearTriple | CocircularQuadruple
    indices: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class ValidationReport:
    ok: bool
    mode: str  # "exhaustive" | "sampled"
    violation: Optional[Violation]
    checked_tuples: int


EXHAUSTIVE_LIMIT = 64
SAMPLED_TUPLES = 1_000_000
_SAMPLE_SEED = 0x5EED  # fixed so sampled validation is reproducible


def validate_general_position(sites: Sequence[Site]) -> ValidationReport:
    """Check the no-3-collinear / no-4-cocircular requirements.

    Exhaustive for n <= 64; for larger inputs a fixed-seed random sample of
    10^6 tuples (half triples, half quadruples) is checked and the report
    is marked "sampled".
    """
    n = len(sites)
    if n < 3:
        raise ValueError("need at least 3 sites")
    pts = [s.ipt for s in sites]

    seen = {}
    for i, p in enumerate(pts):
        if p in seen:
            return ValidationReport(False, "exhaustive", Violation("DuplicateSite", (seen[p], i)), i)
        seen[p] = i

    checked = 0
    if n <= EXHAUSTIVE_LIMIT:
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    checked += 1
                    if exact.orient_ipts(pts[i], pts[j], pts[k]) == 0:
                        return ValidationReport(False, "exhaustive", Violation("CollinearTriple", (i, j, k)), checked)
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    for m in range(k + 1, n):
                        checked += 1
                        if exact.incircle_ipts(pts[i], pts[j], pts[k], pts[m]) == 0:
                            return ValidationReport(
                                False, "exhaustive", Violation("CocircularQuadruple", (i, j, k, m)), checked
                            )
        return ValidationReport(True, "exhaustive", None, checked)

    rng = random.Random(_SAMPLE_SEED)
    half = SAMPLED_TUPLES // 2
    for _ in range(half):
        i, j, k = rng.sample(range(n), 3)
        checked += 1
        if exact.orient_ipts(pts[i], pts[j], pts[k]) == 0:
            return ValidationReport(False, "sampled", Violation("CollinearTriple", tuple(sorted((i, j, k)))), checked)
    for _ in range(SAMPLED_TUPLES - half):
        i, j, k, m = rng.sample(range(n), 4)
        checked += 1
        if exact.orient_ipts(pts[i], pts[j], pts[k]) == 0:
            return ValidationReport(False, "sampled", Violation("CollinearTriple", tuple(sorted((i, j, k)))), checked)
        if exact.incircle_ipts(pts[i], pts[j], pts[k], pts[m]) == 0:
            return ValidationReport(
                False, "sampled", Violation("CocircularQuadruple", tuple(sorted((i, j, k, m)))), checked
            )
    return ValidationReport(True, "sampled", None, checked)
