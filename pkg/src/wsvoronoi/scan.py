"""Constant-workspace diagram enumeration by repeated input scans.

Finds every edge of the nearest- or farthest-site diagram using O(1)
workspace words: a hull-membership test picks a start ray for each cell, a
two-scan pass finds the first edge crossing that ray, and the rest of the
cell is walked edge to edge (the site whose bisector cut an endpoint is the
site whose bisector carries the adjacent edge).  An edge between cells i
and j is reported from cell i only when i < j, so each edge is emitted
exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional

from . import exact
from .geometry import BisectorLine, EdgePiece, Ray
from .memory import OutputSink, ReadOnlyArena, WorkLedger
from .records import EdgeRecord, undirected_record


class DiagramMode(Enum):
    NEAREST = "nearest"
    FARTHEST = "farthest"


class FarthestCellEmpty(Exception):
    """The queried site is interior to the hull: no farthest-site cell."""


class NoIntersection(Exception):
    """The ray crossed no bisector; its cell-boundary precondition failed."""


@dataclass(frozen=True, slots=True)
class HullStatus:
    inside: bool
    cw_neighbor: Optional[int] = None
    ccw_neighbor: Optional[int] = None


@dataclass(frozen=True, slots=True)
class CellEdge:
    """One edge of a cell: the piece, the rival across it, endpoint cutters."""

    site: int
    rival: int
    piece: EdgePiece
    lo_cutter: Optional[int]
    hi_cutter: Optional[int]

    def cutter_at(self, hp) -> Optional[int]:
        if self.piece.lo is not None and hp == self.piece.lo:
            return self.lo_cutter
        if self.piece.hi is not None and hp == self.piece.hi:
            return self.hi_cutter
        raise ValueError("point is not an endpoint of this edge")


# Words charged per operation; totals stay below the 64-word budget of a
# constant-workspace run even at full nesting depth.
W_LOCATE = 8
W_START = 6
W_EDGE = 20
W_CELL = 10
W_DIAGRAM = 4


def _scope(ledger: Optional[WorkLedger], words: int):
    if ledger is None:
        from contextlib import nullcontext

        return nullcontext()
    return ledger.scope(words)


def locate_on_hull(
    arena: ReadOnlyArena,
    p_idx: int,
    ledger: Optional[WorkLedger] = None,
    reference: Optional[int] = None,
) -> HullStatus:
    """Hull membership of site p by one gift-wrapping pass.

    Returns the two hull neighbors when p is a hull vertex.  Exactly one
    pass over the arena beyond the reference pick.
    """
    n = len(arena)
    with _scope(ledger, W_LOCATE):
        p = arena.read(p_idx).ipt
        q_idx = reference if reference is not None and reference != p_idx else (0 if p_idx != 0 else 1)
        q = arena.read(q_idx).ipt
        best_cw = best_ccw = None
        cw_idx = ccw_idx = q_idx
        for j in range(n):
            if j == p_idx or j == q_idx:
                continue
            w = arena.read(j).ipt
            side = exact.orient_ipts(p, q, w)
            if side > 0:
                if best_ccw is None or exact.orient_ipts(p, best_ccw, w) > 0:
                    best_ccw, ccw_idx = w, j
            else:
                if best_cw is None or exact.orient_ipts(p, best_cw, w) < 0:
                    best_cw, cw_idx = w, j
        cw = best_cw if best_cw is not None else q
        ccw = best_ccw if best_ccw is not None else q
        if exact.orient_ipts(p, cw, ccw) < 0:
            return HullStatus(inside=True)
        return HullStatus(inside=False, cw_neighbor=cw_idx, ccw_neighbor=ccw_idx)


def start_ray(
    arena: ReadOnlyArena,
    p_idx: int,
    mode: DiagramMode,
    ledger: Optional[WorkLedger] = None,
    reference: Optional[int] = None,
    hull: Optional[HullStatus] = None,
) -> Ray:
    """A ray from p guaranteed to cross the boundary of p's cell.

    Nearest mode aims at another site (the lowest-index one by default);
    farthest mode aims at the meet of the bisectors with p's hull
    neighbors and raises FarthestCellEmpty for interior sites.
    """
    with _scope(ledger, W_START):
        p = arena.read(p_idx).ipt
        if mode is DiagramMode.NEAREST:
            q_idx = reference if reference is not None and reference != p_idx else (0 if p_idx != 0 else 1)
            q = arena.read(q_idx).ipt
            return Ray(p, exact.primitive_dir(q[0] - p[0], q[1] - p[1]))
        status = hull if hull is not None else locate_on_hull(arena, p_idx, ledger, reference)
        if status.inside:
            raise FarthestCellEmpty(f"site {p_idx} is interior to the hull")
        l = arena.read(status.cw_neighbor).ipt
        r = arena.read(status.ccw_neighbor).ipt
        c = exact.circumcenter_hpoint(p, l, r)
        return Ray(p, exact.primitive_dir(c[0] - p[0] * c[2], c[1] - p[1] * c[2]))


def _clip_interval(state, carrier_line, d, p, w, w_idx, want):
    """Clip the tracked parameter interval by the bisector of (p, w).

    state = [t_lo, t_hi, lo_cut, hi_cut] with t as (num, den>0) pairs or
    None for an unbounded end; returns False when the interval died.
    """
    la = 2 * (w[0] - p[0])
    lb = 2 * (w[1] - p[1])
    lc = w[0] * w[0] + w[1] * w[1] - p[0] * p[0] - p[1] * p[1]
    # f = la*x + lb*y - lc = d^2(x, p) - d^2(x, w); f < 0 nearer to p.
    slope = la * d[0] + lb * d[1]
    if slope == 0:
        base = exact.line_point(carrier_line)
        s = exact.sign(la * base[0] + lb * base[1] - lc * base[2])
        if s == want:
            return True
        return False
    a1, b1, c1 = carrier_line
    wdet = a1 * lb - la * b1
    x = c1 * lb - lc * b1
    y = a1 * lc - la * c1
    if wdet < 0:
        x, y, wdet = -x, -y, -wdet
    t_cross = (d[0] * x + d[1] * y, wdet)
    if exact.sign(slope) == want:
        # Wanted side is where the parameter exceeds the crossing.
        if state[0] is None or exact.cmp_params(state[0], t_cross) < 0:
            state[0] = t_cross
            state[2] = w_idx
    else:
        if state[1] is None or exact.cmp_params(state[1], t_cross) > 0:
            state[1] = t_cross
            state[3] = w_idx
    if state[0] is not None and state[1] is not None and exact.cmp_params(state[0], state[1]) >= 0:
        return False
    return True


def _materialize(arena: ReadOnlyArena, p_idx: int, p, rival_idx: int, rival, state) -> CellEdge:
    line = exact.bisector_line(p, rival)
    carrier = BisectorLine(p_idx, rival_idx, line)
    lo = hi = None
    if state[2] is not None:
        cut = arena.read(state[2]).ipt
        lo = exact.line_intersection(line, exact.bisector_line(p, cut))
    if state[3] is not None:
        cut = arena.read(state[3]).ipt
        hi = exact.line_intersection(line, exact.bisector_line(p, cut))
    return CellEdge(p_idx, rival_idx, EdgePiece(carrier, lo, hi), state[2], state[3])


def _edge_on_carrier(
    arena: ReadOnlyArena,
    p_idx: int,
    p,
    rival_idx: int,
    mode: DiagramMode,
    ledger: Optional[WorkLedger] = None,
) -> Optional[CellEdge]:
    """The edge of p's cell on the bisector with rival, by one clipping scan."""
    n = len(arena)
    want = -1 if mode is DiagramMode.NEAREST else 1
    with _scope(ledger, W_EDGE):
        rival = arena.read(rival_idx).ipt
        line = exact.bisector_line(p, rival)
        d = exact.line_dir(line)
        state = [None, None, None, None]
        for j in range(n):
            if j == p_idx or j == rival_idx:
                continue
            w = arena.read(j).ipt
            if not _clip_interval(state, line, d, p, w, j, want):
                return None
        return _materialize(arena, p_idx, p, rival_idx, rival, state)


def find_edge(
    arena: ReadOnlyArena,
    p_idx: int,
    ray: Ray,
    mode: DiagramMode,
    ledger: Optional[WorkLedger] = None,
) -> CellEdge:
    """An edge of p's cell crossing the ray: closest-crossing bisector
    (farthest in farthest mode), then one clipping scan to trim it."""
    n = len(arena)
    nearest = mode is DiagramMode.NEAREST
    with _scope(ledger, W_EDGE):
        p = arena.read(p_idx).ipt
        best = None  # (t, rival_idx, den_raw, dperp_raw)
        for j in range(n):
            if j == p_idx:
                continue
            w = arena.read(j).ipt
            line = exact.bisector_line(p, w)
            t = exact.ray_line_param(ray.origin, ray.direction, line)
            if t is None:
                continue
            if best is None:
                best = (t, j, line)
                continue
            c = exact.cmp_params(t, best[0])
            if (nearest and c < 0) or (not nearest and c > 0):
                best = (t, j, line)
            elif c == 0:
                # The ray passes through a cell vertex: resolve as if the
                # ray were rotated infinitesimally counterclockwise.
                dperp = (-ray.direction[1], ray.direction[0])

                def drift(ln):
                    a, b, _ = ln
                    den = a * ray.direction[0] + b * ray.direction[1]
                    dp = a * dperp[0] + b * dperp[1]
                    return Fraction(dp, den)

                better = drift(line) > drift(best[2]) if nearest else drift(line) < drift(best[2])
                if better:
                    best = (t, j, line)
    if best is None:
        raise NoIntersection(f"no bisector crosses the ray from site {p_idx}")
    edge = _edge_on_carrier(arena, p_idx, p, best[1], mode, ledger)
    if edge is None:
        raise NoIntersection(f"ray edge for site {p_idx} vanished under clipping")
    return edge


def _side_of_ray(ray: Ray, hp) -> int:
    vx = hp[0] - ray.origin[0] * hp[2]
    vy = hp[1] - ray.origin[1] * hp[2]
    return exact.sign(ray.direction[0] * vy - ray.direction[1] * vx)


def enumerate_cell(
    arena: ReadOnlyArena,
    p_idx: int,
    mode: DiagramMode,
    visit: Callable[[CellEdge], None],
    ledger: Optional[WorkLedger] = None,
    reference: Optional[int] = None,
) -> None:
    """Visit every edge of p's cell exactly once.

    Walks counterclockwise from the first edge's left endpoint until the
    walk closes or leaves through an unbounded edge, then clockwise from
    the right endpoint.
    """
    with _scope(ledger, W_CELL):
        ray = start_ray(arena, p_idx, mode, ledger, reference)
        p = arena.read(p_idx).ipt
        first = find_edge(arena, p_idx, ray, mode, ledger)
        visit(first)
        if first.piece.lo is None and first.piece.hi is None:
            return
        ends = [first.piece.lo, first.piece.hi]
        # Walk through the left endpoint first ("left" of the start ray).
        if ends[0] is not None and ends[1] is not None:
            if _side_of_ray(ray, ends[0]) < _side_of_ray(ray, ends[1]):
                ends.reverse()
        elif ends[0] is None:
            ends.reverse()

        closed = False
        for leg, end in enumerate(ends):
            if end is None or closed:
                continue
            v = end
            cutter = first.cutter_at(v)
            guard = 0
            while True:
                if cutter == first.rival:
                    closed = True
                    break
                edge = _edge_on_carrier(arena, p_idx, p, cutter, mode, ledger)
                assert edge is not None, "cell walk lost its edge"
                visit(edge)
                if edge.piece.lo is not None and edge.piece.lo == v:
                    nxt = edge.piece.hi
                elif edge.piece.hi is not None and edge.piece.hi == v:
                    nxt = edge.piece.lo
                else:
                    raise AssertionError("walk endpoint not on the next edge")
                if nxt is None:
                    break  # left the diagram through an unbounded edge
                v = nxt
                cutter = edge.cutter_at(v)
                guard += 1
                if guard > len(arena) + 2:
                    raise AssertionError("cell walk failed to terminate")


def cell_edges(
    arena: ReadOnlyArena,
    p_idx: int,
    mode: DiagramMode,
    ledger: Optional[WorkLedger] = None,
    reference: Optional[int] = None,
) -> list[CellEdge]:
    out: list[CellEdge] = []
    enumerate_cell(arena, p_idx, mode, out.append, ledger, reference)
    return out


def record_for(arena: ReadOnlyArena, edge: CellEdge, mode: DiagramMode) -> EdgeRecord:
    n = len(arena)
    if mode is DiagramMode.NEAREST:
        k = 1
        closest: tuple[int, ...] = ()
    else:
        k = n - 1
        closest = tuple(i for i in range(n) if i != edge.site and i != edge.rival)
    return undirected_record(
        k,
        closest,
        (edge.site, edge.rival),
        edge.piece.carrier.line,
        edge.piece.lo,
        edge.piece.hi,
        edge.lo_cutter,
        edge.hi_cutter,
        arena.scale,
    )


def enumerate_diagram(
    arena: ReadOnlyArena,
    mode: DiagramMode,
    sink: OutputSink,
    ledger: Optional[WorkLedger] = None,
    reference: Optional[int] = None,
) -> None:
    """Emit every diagram edge exactly once using O(1) workspace words."""
    n = len(arena)
    with _scope(ledger, W_DIAGRAM):
        for i in range(n):

            def take(edge: CellEdge) -> None:
                if edge.site < edge.rival:
                    sink.emit(record_for(arena, edge, mode))

            try:
                enumerate_cell(arena, i, mode, take, ledger, reference)
            except FarthestCellEmpty:
                continue
