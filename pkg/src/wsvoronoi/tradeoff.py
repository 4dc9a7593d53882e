"""s-workspace diagram construction: find s edges per sweep of the input.

Instead of one cell edge per two input scans, a round keeps up to s cell
walks alive at once and serves all of them from the same two batched
passes over the input, so the scan cost is shared.  Cells still walking
when no fresh sites remain are "big"; their edges are recovered by
clipping the diagram of the big sites against the whole input, while
everything touching a small cell is reported during the walks.  The output
is identical to the constant-workspace path for every s.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from . import exact
from .geometry import BisectorLine, EdgePiece, Ray
from .memory import OutputSink, ReadOnlyArena, WorkLedger
from .records import EdgeRecord
from .scan import (
    CellEdge,
    DiagramMode,
    NoIntersection,
    _clip_interval,
    _side_of_ray,
    record_for,
)

# Ledger words per unit of tracked state; documented so peaks are
# reproducible.  A run charges: s slots * W_SLOT + batch buffer 3/site +
# table 1/entry + (farthest) hull window 3/point + W_FIXED.
W_SLOT = 24
W_BATCH_SITE = 3
W_TABLE_ENTRY = 1
W_HULL_POINT = 3
W_FIXED = 8
# In-memory diagram of m sites: 3m site words plus <= 3m edges of ~14
# words each, rounded up to one per-site constant.
W_MEM_SITE = 48


@dataclass(frozen=True, slots=True)
class Batch:
    start: int
    length: int


def batches(n: int, s: int) -> list[Batch]:
    """Input-order batches of s consecutive sites; the last may be short."""
    return [Batch(i, min(s, n - i)) for i in range(0, n, max(1, s))]


class BigCellTable:
    """Sorted site indices whose cells were left unfinished by the walks."""

    def __init__(self, indices: Iterable[int]):
        self.indices = sorted(indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, idx: int) -> bool:
        pos = bisect_left(self.indices, idx)
        return pos < len(self.indices) and self.indices[pos] == idx


class TrackedSite:
    """Walk state for one cell whose edges are being found batch-wise."""

    __slots__ = (
        "site",
        "p",
        "current_ray",
        "first_edge",
        "edges_found",
        "done",
        "_first_rival",
        "_leg2",
        "_v",
        "_cutter",
        "_best",
        "_state",
        "_rival",
    )

    def __init__(self, site_idx: int, p, ray: Ray):
        self.site = site_idx
        self.p = p
        self.current_ray = ray
        self.first_edge: Optional[CellEdge] = None
        self.edges_found = 0
        self.done = False
        self._first_rival: Optional[int] = None
        self._leg2 = None  # (endpoint hpoint, cutter) queued for the reverse walk
        self._v = None
        self._cutter: Optional[int] = None
        self._best = None  # scan-1 tracking: (t, rival, line)
        self._state = None  # clip interval [t_lo, t_hi, lo_cut, hi_cut]
        self._rival: Optional[int] = None

    @property
    def needs_ray_scan(self) -> bool:
        return self.first_edge is None and self._best is None

    def consider_ray_hit(self, j: int, w, nearest: bool) -> None:
        if j == self.site:
            return
        line = exact.bisector_line(self.p, w)
        t = exact.ray_line_param(self.current_ray.origin, self.current_ray.direction, line)
        if t is None:
            return
        if self._best is None:
            self._best = (t, j, line)
            return
        c = exact.cmp_params(t, self._best[0])
        if (nearest and c < 0) or (not nearest and c > 0):
            self._best = (t, j, line)
        elif c == 0:
            from fractions import Fraction

            dperp = (-self.current_ray.direction[1], self.current_ray.direction[0])

            def drift(ln):
                a, b, _ = ln
                den = a * self.current_ray.direction[0] + b * self.current_ray.direction[1]
                return Fraction(a * dperp[0] + b * dperp[1], den)

            if (drift(line) > drift(self._best[2])) if nearest else (drift(line) < drift(self._best[2])):
                self._best = (t, j, line)

    def begin_clip(self) -> None:
        if self.first_edge is None:
            if self._best is None:
                raise NoIntersection(f"no bisector crosses the ray from site {self.site}")
            self._rival = self._best[1]
        else:
            self._rival = self._cutter
        self._state = [None, None, None, None]

    def advance(self, edge: CellEdge) -> None:
        """Digest the edge this round produced and set up the next one."""
        self.edges_found += 1
        self._best = None
        self._state = None
        if self.first_edge is None:
            self.first_edge = edge
            self._first_rival = edge.rival
            ends = [edge.piece.lo, edge.piece.hi]
            if ends[0] is not None and ends[1] is not None:
                if _side_of_ray(self.current_ray, ends[0]) < _side_of_ray(self.current_ray, ends[1]):
                    ends.reverse()
            elif ends[0] is None:
                ends.reverse()
            if ends[0] is None:
                self.done = True  # full-line edge: the cell is a halfplane
                return
            self._v = ends[0]
            self._cutter = edge.cutter_at(ends[0])
            if ends[1] is not None:
                self._leg2 = (ends[1], edge.cutter_at(ends[1]))
            if self._cutter == self._first_rival:
                self.done = True
            return
        # Walking: step through the endpoint opposite the entry vertex.
        if edge.piece.lo is not None and edge.piece.lo == self._v:
            nxt = edge.piece.hi
        elif edge.piece.hi is not None and edge.piece.hi == self._v:
            nxt = edge.piece.lo
        else:
            raise AssertionError("batched walk endpoint not on the produced edge")
        if nxt is None:
            if self._leg2 is not None:
                self._v, self._cutter = self._leg2
                self._leg2 = None
            else:
                self.done = True
            return
        self._v = nxt
        self._cutter = edge.cutter_at(nxt)
        if self._cutter == self._first_rival:
            self.done = True


def _iter_batches(arena: ReadOnlyArena, s: int):
    n = len(arena)
    for b in batches(n, s):
        yield [(j, arena.read(j).ipt) for j in range(b.start, b.start + b.length)]


def _round(arena: ReadOnlyArena, slots: list[TrackedSite], mode: DiagramMode, s: int) -> list[CellEdge]:
    """One lock-step round: every live slot produces its next cell edge."""
    nearest = mode is DiagramMode.NEAREST
    want = -1 if nearest else 1
    fresh = [t for t in slots if t.needs_ray_scan]
    if fresh:
        for batch in _iter_batches(arena, s):
            for slot in fresh:
                for j, w in batch:
                    slot.consider_ray_hit(j, w, nearest)
    carriers = []
    for slot in slots:
        slot.begin_clip()
        rival_pt = arena.read(slot._rival).ipt
        line = exact.bisector_line(slot.p, rival_pt)
        carriers.append((line, exact.line_dir(line), rival_pt))
    for batch in _iter_batches(arena, s):
        for slot, (line, d, _) in zip(slots, carriers):
            state = slot._state
            for j, w in batch:
                if j == slot.site or j == slot._rival:
                    continue
                if not _clip_interval(state, line, d, slot.p, w, j, want):
                    raise AssertionError("tracked cell edge vanished under clipping")
    edges = []
    for slot, (line, d, rival_pt) in zip(slots, carriers):
        state = slot._state
        carrier = BisectorLine(slot.site, slot._rival, line)
        lo = hi = None
        if state[2] is not None:
            cut = arena.read(state[2]).ipt
            lo = exact.line_intersection(line, exact.bisector_line(slot.p, cut))
        if state[3] is not None:
            cut = arena.read(state[3]).ipt
            hi = exact.line_intersection(line, exact.bisector_line(slot.p, cut))
        edges.append(CellEdge(slot.site, slot._rival, EdgePiece(carrier, lo, hi), state[2], state[3]))
    return edges


def find_edges_batched(
    arena: ReadOnlyArena,
    tracked: list[TrackedSite],
    mode: DiagramMode,
    s: int,
    ledger: Optional[WorkLedger] = None,
) -> list[CellEdge]:
    """First cell edge for up to s tracked sites in two batched passes."""
    if len(tracked) > s:
        raise ValueError("more tracked sites than workspace slots")
    words = len(tracked) * W_SLOT + s * W_BATCH_SITE + W_FIXED
    ctx = ledger.scope(words) if ledger is not None else _null()
    with ctx:
        edges = _round(arena, tracked, mode, s)
        for slot, edge in zip(tracked, edges):
            slot.advance(edge)
        return edges


def _null():
    from contextlib import nullcontext

    return nullcontext()


def hull_stream(arena: ReadOnlyArena, s: int, ledger: Optional[WorkLedger] = None) -> Iterator[int]:
    """Yield hull site indices in clockwise order using an s-point window.

    Each round makes two passes: one merges batches into a truncated
    clockwise candidate chain anchored at the last confirmed vertex, and
    one certifies the chain gift-wrap style (a successor is final iff no
    site lies strictly left of the chain edge reaching it).  At least one
    vertex is certified per round, typically a full window of s.
    """
    n = len(arena)
    window = max(1, s)
    words = (window + 2) * W_HULL_POINT + W_FIXED
    ctx = ledger.scope(words) if ledger is not None else _null()
    with ctx:
        start_idx = 0
        start_pt = arena.read(0).ipt
        for j in range(1, n):
            w = arena.read(j).ipt
            if w < start_pt:
                start_idx, start_pt = j, w
        yield start_idx
        anchor_idx, anchor_pt = start_idx, start_pt
        while True:
            chain = [(anchor_idx, anchor_pt)]
            for batch in _iter_batches(arena, window):
                merged = {idx: pt for idx, pt in chain}
                for j, w in batch:
                    merged[j] = w
                chain = _cw_chain(merged, anchor_idx, window + 1)
            chain_ids = {idx for idx, _ in chain}
            certified = len(chain) - 1
            for batch in _iter_batches(arena, window):
                for j, w in batch:
                    if j in chain_ids:
                        continue
                    for i in range(certified):
                        if exact.orient_ipts(chain[i][1], chain[i + 1][1], w) > 0:
                            certified = i
                            break
                if certified == 0:
                    break
            assert certified >= 1, "no certified hull successor in a full round"
            for idx, _ in chain[1 : certified + 1]:
                if idx == start_idx:
                    return
                yield idx
            anchor_idx, anchor_pt = chain[certified]


def _cw_chain(points: dict, anchor_idx: int, limit: int):
    """Clockwise hull chain of `points` starting at anchor, truncated."""
    items = sorted(points.items(), key=lambda kv: kv[1])
    if len(items) == 1:
        return items
    # Monotone chain, counterclockwise; no three points are collinear.
    def half(seq):
        out = []
        for item in seq:
            while len(out) >= 2 and exact.orient_ipts(out[-2][1], out[-1][1], item[1]) <= 0:
                out.pop()
            out.append(item)
        return out

    lower = half(items)
    upper = half(list(reversed(items)))
    ccw = lower[:-1] + upper[:-1]
    cw = list(reversed(ccw))
    pos = next(i for i, (idx, _) in enumerate(cw) if idx == anchor_idx)
    cw = cw[pos:] + cw[:pos]
    return cw[:limit]


@dataclass(frozen=True, slots=True)
class MemoryEdge:
    """Edge of an in-memory diagram, still in clip-interval form."""

    a: int
    b: int
    line: tuple[int, int, int]
    direction: tuple[int, int]
    state: list


class MemoryDiagram:
    """Full diagram of an in-memory site set, built by direct clipping."""

    def __init__(self, sites: list[tuple[int, tuple[int, int]]], mode: DiagramMode):
        self.sites = list(sites)
        self.mode = mode
        self.edges: list[MemoryEdge] = []
        want = -1 if mode is DiagramMode.NEAREST else 1
        m = len(self.sites)
        for ai in range(m):
            a_idx, a_pt = self.sites[ai]
            for bi in range(ai + 1, m):
                b_idx, b_pt = self.sites[bi]
                line = exact.bisector_line(a_pt, b_pt)
                d = exact.line_dir(line)
                state = [None, None, None, None]
                alive = True
                for ci in range(m):
                    if ci == ai or ci == bi:
                        continue
                    c_idx, c_pt = self.sites[ci]
                    if not _clip_interval(state, line, d, a_pt, c_pt, c_idx, want):
                        alive = False
                        break
                if alive:
                    self.edges.append(MemoryEdge(a_idx, b_idx, line, d, state))

    def undirected_records(self, scale: int, n_total: int) -> list[EdgeRecord]:
        from .records import undirected_record

        pts = dict(self.sites)
        k = 1 if self.mode is DiagramMode.NEAREST else n_total - 1
        out = []
        for e in self.edges:
            lo = hi = None
            if e.state[2] is not None:
                lo = exact.line_intersection(e.line, exact.bisector_line(pts[e.a], pts[e.state[2]]))
            if e.state[3] is not None:
                hi = exact.line_intersection(e.line, exact.bisector_line(pts[e.a], pts[e.state[3]]))
            closest: tuple[int, ...] = ()
            if self.mode is DiagramMode.FARTHEST:
                closest = tuple(i for i in range(n_total) if i not in (e.a, e.b))
            out.append(
                undirected_record(k, closest, (e.a, e.b), e.line, lo, hi, e.state[2], e.state[3], scale)
            )
        return out


def batch_diagram(
    sites: list[tuple[int, tuple[int, int]]],
    mode: DiagramMode,
    ledger: Optional[WorkLedger] = None,
) -> MemoryDiagram:
    """Diagram of an in-memory site set (the workspace-resident helper)."""
    ctx = ledger.scope(len(sites) * W_MEM_SITE) if ledger is not None else _null()
    with ctx:
        return MemoryDiagram(sites, mode)


def _nearest_source(arena: ReadOnlyArena, skip=None):
    """Sites in input order, each with its start ray toward the lowest other."""
    n = len(arena)
    for i in range(n):
        if skip is not None and i in skip:
            continue
        p = arena.read(i).ipt
        q = arena.read(0 if i != 0 else 1).ipt
        yield TrackedSite(i, p, Ray(p, exact.primitive_dir(q[0] - p[0], q[1] - p[1])))


def _farthest_source(arena: ReadOnlyArena, s: int, ledger: Optional[WorkLedger], skip=None):
    """Hull sites in stream order with rays from their hull-neighbor bisectors."""
    stream = hull_stream(arena, s, ledger)
    order: list[int] = []
    for idx in stream:
        order.append(idx)
        if len(order) >= 3:
            yield _farthest_slot(arena, order[-2], order[-3], order[-1], skip)
    m = len(order)
    if m < 3:
        raise AssertionError("hull of a general-position set has >= 3 vertices")
    yield _farthest_slot(arena, order[-1], order[-2], order[0], skip)
    yield _farthest_slot(arena, order[0], order[-1], order[1], skip)


def _farthest_slot(arena, i, prev, nxt, skip):
    if skip is not None and i in skip:
        return None
    p = arena.read(i).ipt
    l = arena.read(prev).ipt
    r = arena.read(nxt).ipt
    c = exact.circumcenter_hpoint(p, l, r)
    ray = Ray(p, exact.primitive_dir(c[0] - p[0] * c[2], c[1] - p[1] * c[2]))
    return TrackedSite(i, p, ray)


def _site_source(arena, mode, s, ledger, skip=None):
    if mode is DiagramMode.NEAREST:
        yield from _nearest_source(arena, skip)
    else:
        for slot in _farthest_source(arena, s, ledger, skip):
            if slot is not None:
                yield slot


class DriveResult:
    """Filled in when a drive ends: the sites whose walks were cut short."""

    def __init__(self):
        self.leftovers: list[int] = []


def _drive(
    arena: ReadOnlyArena,
    mode: DiagramMode,
    s: int,
    source,
    stop_when_starved: bool,
    ledger: Optional[WorkLedger] = None,
    result: Optional[DriveResult] = None,
) -> Iterator[tuple[TrackedSite, CellEdge]]:
    """Run lock-step rounds over a stream of tracked sites.

    Yields (slot, edge) for every cell edge found.  With
    stop_when_starved, rounds end once the source is exhausted and fewer
    than s unfinished walks remain (recorded in result.leftovers); the
    survivors are walked to completion otherwise.
    """
    words = s * (W_SLOT + W_BATCH_SITE) + W_FIXED
    ctx = ledger.scope(words) if ledger is not None else _null()
    with ctx:
        active: list[TrackedSite] = []
        pending: Optional[TrackedSite] = None
        exhausted = False
        ever_waited = False

        def refill():
            nonlocal pending, exhausted, ever_waited
            while len(active) < s and not exhausted:
                if pending is not None:
                    active.append(pending)
                    pending = None
                    continue
                try:
                    pending = next(source)
                except StopIteration:
                    exhausted = True
            if pending is not None:
                ever_waited = True

        refill()
        while active:
            edges = _round(arena, active, mode, s)
            for slot, edge in zip(active, edges):
                yield slot, edge
                slot.advance(edge)
            active[:] = [t for t in active if not t.done]
            refill()
            if stop_when_starved and ever_waited and exhausted and pending is None and 0 < len(active) < s:
                if result is not None:
                    result.leftovers = [t.site for t in active]
                return


def find_big_cells(
    arena: ReadOnlyArena,
    mode: DiagramMode,
    s: int,
    ledger: Optional[WorkLedger] = None,
) -> BigCellTable:
    """Walk cells batch-wise until fewer than s stay unfinished; no output.

    When the initial load already covers every site (never any site had to
    wait for a slot) all walks are run to completion and the table is
    empty.
    """
    source = _site_source(arena, mode, s, ledger)
    result = DriveResult()
    for _ in _drive(arena, mode, s, source, True, ledger, result):
        pass
    return BigCellTable(result.leftovers)


def iter_small_incident(
    arena: ReadOnlyArena,
    mode: DiagramMode,
    s: int,
    table: BigCellTable,
    ledger: Optional[WorkLedger] = None,
) -> Iterator[CellEdge]:
    """Every edge with at least one small cell, exactly once.

    Walking only small cells: an edge against a big rival is reported
    outright; between two small cells the lower index reports it.
    """
    source = _site_source(arena, mode, s, ledger, skip=table)
    for slot, edge in _drive(arena, mode, s, source, False, ledger):
        if edge.rival in table or edge.site < edge.rival:
            yield edge


def iter_big_big(
    arena: ReadOnlyArena,
    mode: DiagramMode,
    s: int,
    table: BigCellTable,
    ledger: Optional[WorkLedger] = None,
) -> Iterator[CellEdge]:
    """Every edge between two big cells.

    The diagram of the big sites is clipped against the whole input in
    batches; surviving pieces are exactly the big-big edges.
    """
    if len(table) < 2:
        return
    want = -1 if mode is DiagramMode.NEAREST else 1
    big = set(table.indices)
    mem_sites = [(i, arena.read(i).ipt) for i in table.indices]
    words = len(mem_sites) * W_MEM_SITE + s * W_BATCH_SITE + W_FIXED
    ctx = ledger.scope(words) if ledger is not None else _null()
    with ctx:
        diagram = MemoryDiagram(mem_sites, mode)
        pts = dict(mem_sites)
        alive = list(diagram.edges)
        for batch in _iter_batches(arena, s):
            still = []
            for e in alive:
                ok = True
                for j, w in batch:
                    if j in big:
                        continue
                    if not _clip_interval(e.state, e.line, e.direction, pts[e.a], w, j, want):
                        ok = False
                        break
                if ok:
                    still.append(e)
            alive = still
        for e in alive:
            lo = hi = None
            if e.state[2] is not None:
                lo = exact.line_intersection(e.line, exact.bisector_line(pts[e.a], arena.read(e.state[2]).ipt))
            if e.state[3] is not None:
                hi = exact.line_intersection(e.line, exact.bisector_line(pts[e.a], arena.read(e.state[3]).ipt))
            carrier = BisectorLine(e.a, e.b, e.line)
            yield CellEdge(e.a, e.b, EdgePiece(carrier, lo, hi), e.state[2], e.state[3])


def report_small_incident(
    arena: ReadOnlyArena,
    mode: DiagramMode,
    s: int,
    table: BigCellTable,
    sink: OutputSink,
    ledger: Optional[WorkLedger] = None,
) -> None:
    for edge in iter_small_incident(arena, mode, s, table, ledger):
        sink.emit(record_for(arena, edge, mode))


def report_big_big(
    arena: ReadOnlyArena,
    mode: DiagramMode,
    s: int,
    table: BigCellTable,
    sink: OutputSink,
    ledger: Optional[WorkLedger] = None,
) -> None:
    for edge in iter_big_big(arena, mode, s, table, ledger):
        sink.emit(record_for(arena, edge, mode))


def run_tradeoff(
    arena: ReadOnlyArena,
    mode: DiagramMode,
    s: int,
    sink: OutputSink,
    ledger: Optional[WorkLedger] = None,
) -> BigCellTable:
    """Report the whole diagram with an s-word workspace: find the big
    cells, emit everything small-incident, then the big-big leftovers."""
    if not 1 <= s:
        raise ValueError("workspace parameter must be positive")
    table = find_big_cells(arena, mode, s, ledger)
    report_small_incident(arena, mode, s, table, sink, ledger)
    report_big_big(arena, mode, s, table, sink, ledger)
    return table
