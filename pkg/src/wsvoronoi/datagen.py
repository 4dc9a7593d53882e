"""Seeded random site generation for tests, demos, and benchmarks.

Coordinates are drawn uniformly from a large integer grid, which makes
degenerate triples/quadruples vanishingly unlikely while keeping every
value exactly representable.  Generation is deterministic per (n, seed).
"""

from __future__ import annotations

import random
from typing import Sequence

from .geometry import Site, site_set

#: Grid width: collinearity odds per triple are ~1/GRID, so even 10^6
#: random tuples stay clean with overwhelming probability.
GRID = 1 << 40


def random_sites(n: int, seed: int, grid: int = GRID) -> tuple[Site, ...]:
    rng = random.Random(seed)
    pts = set()
    while len(pts) < n:
        pts.add((rng.randrange(grid), rng.randrange(grid)))
    ordered = sorted(pts)
    rng.shuffle(ordered)
    return site_set(ordered)


def triangle() -> tuple[Site, ...]:
    """The right triangle used throughout the worked examples."""
    return site_set([(0, 0), (8, 0), (0, 6)])


def with_interior_point() -> tuple[Site, ...]:
    return site_set([(0, 0), (8, 0), (0, 6), (1, 1)])


class SiteParseError(ValueError):
    """The input text is not a well-formed site file."""


class DuplicateSiteError(ValueError):
    """The input contains the same point twice (a degeneracy, not a typo)."""


def parse_sites_text(text: str) -> tuple[Site, ...]:
    """Parse the input file format: one `x y` pair per line, # comments."""
    coords = []
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise SiteParseError(f"line {lineno}: expected 'x y', got {raw!r}")
        try:
            from fractions import Fraction

            x = Fraction(parts[0])
            y = Fraction(parts[1])
        except (ValueError, ZeroDivisionError):
            raise SiteParseError(f"line {lineno}: bad coordinate in {raw!r}") from None
        if (x, y) in seen:
            raise DuplicateSiteError(
                f"line {lineno}: duplicate site, first seen on line {seen[(x, y)]}"
            )
        seen[(x, y)] = lineno
        coords.append((x, y))
    if len(coords) < 3:
        raise SiteParseError(f"need at least 3 sites, got {len(coords)}")
    return site_set(coords)


def _decimal_literal(fr) -> str:
    """Exact decimal literal for a rational with a 2^a * 5^b denominator."""
    den = fr.denominator
    if den == 1:
        return str(fr.numerator)
    twos = fives = 0
    d = den
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        raise ValueError(f"{fr} has no finite decimal expansion")
    tens = max(twos, fives)
    num = fr.numerator * (10**tens // den)
    sign = "-" if num < 0 else ""
    digits = str(abs(num)).rjust(tens + 1, "0")
    return f"{sign}{digits[:-tens]}.{digits[-tens:]}"


def sites_to_text(sites: Sequence[Site]) -> str:
    lines = []
    for s in sites:
        lines.append(f"{_decimal_literal(s.x)} {_decimal_literal(s.y)}")
    return "\n".join(lines) + "\n"
