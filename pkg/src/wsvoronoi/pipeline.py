"""Order-k diagram family under the workspace model, order by order.

Each diagram order is produced from the previous one: a directed half-edge
of order k whose head vertex lies on its surrounding (k+1)-cell boundary
("relevant") owns the run of boundary half-edges counterclockwise up to
the next such vertex, and walking those runs for every relevant half-edge
yields each (k+1)-half-edge exactly once.  Cells whose walks could not
finish within the slot budget, and every unbounded cell, are "big": their
boundaries come instead from trimming an in-workspace diagram of their
defining sites against the whole input.

Producers for orders 1..K are chained through bounded buffers and run
cooperatively: pulling from a buffer below its low-water mark resumes the
upstream producer until the buffer is comfortable again.  Order k is
written to the output exactly when its buffer first receives it, so the
stream is grouped by nondecreasing order.
"""

from __future__ import annotations

from bisect import bisect_left
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

from . import exact
from .memory import OutputSink, ReadOnlyArena, WorkLedger
from .records import EdgeRecord, directed_record
from .scan import DiagramMode, _clip_interval
from .tradeoff import (
    BigCellTable,
    MemoryDiagram,
    W_BATCH_SITE,
    W_FIXED,
    find_big_cells,
    iter_big_big,
    iter_small_incident,
)


class ConfigError(Exception):
    """The requested order range does not fit the workspace budget."""


@dataclass(frozen=True, slots=True)
class HalfEdge:
    """Directed half-edge of an order-k diagram, encoded by k+3 sites.

    The k-1 sites closest to the edge, the tied pair (ordered so the cell
    of ``closest | {pair[0]}`` lies left of the direction), and one extra
    site per bounded endpoint naming the vertex's third defining site.
    Geometry (carrier line, endpoints) is derived data kept alongside.
    """

    k: int
    closest: frozenset
    pair: tuple[int, int]
    carrier: tuple[int, int, int]
    direction: tuple[int, int]
    tail: Optional[tuple[int, int, int]]
    head: Optional[tuple[int, int, int]]
    tail_extra: Optional[int]
    head_extra: Optional[int]

    def left_cell(self) -> frozenset:
        return self.closest | {self.pair[0]}

    def right_cell(self) -> frozenset:
        return self.closest | {self.pair[1]}

    def opposite(self) -> "HalfEdge":
        return HalfEdge(
            self.k,
            self.closest,
            (self.pair[1], self.pair[0]),
            self.carrier,
            (-self.direction[0], -self.direction[1]),
            self.head,
            self.tail,
            self.head_extra,
            self.tail_extra,
        )

    def to_record(self, scale: int) -> EdgeRecord:
        return directed_record(
            self.k,
            tuple(sorted(self.closest)),
            self.pair,
            self.direction,
            self.tail,
            self.head,
            self.tail_extra,
            self.head_extra,
            scale,
        )

    def key(self):
        return (
            self.k,
            self.closest,
            self.pair,
            self.tail,
            self.head,
            self.tail_extra,
            self.head_extra,
        )


def classify_head(e: HalfEdge) -> str:
    """'old' when the head vertex's third site is among the closest set."""
    if e.head is None:
        raise ValueError("unbounded head has no vertex to classify")
    return "old" if e.head_extra in e.closest else "new"


def is_relevant(e: HalfEdge) -> bool:
    """True when the head vertex lies on the surrounding higher-order cell
    boundary, i.e. the head is a new vertex; unbounded heads never are."""
    if e.head is None:
        return False
    return classify_head(e) == "new"


def cog_key(cell: frozenset, pts: Callable[[int], tuple[int, int]]) -> tuple[int, int]:
    """Center of gravity of the cell's defining sites, denominator cleared.

    Centers are pairwise distinct across cells of one order, so the pair of
    coordinate sums identifies the cell exactly.
    """
    sx = sy = 0
    for i in cell:
        p = pts(i)
        sx += p[0]
        sy += p[1]
    return (sx, sy)


class BigCellTableK:
    """Sorted center-of-gravity keys (and site sets) of the big cells."""

    def __init__(self, entries: dict):
        self.keys = sorted(entries)
        self.cells = [entries[k] for k in self.keys]

    def __len__(self) -> int:
        return len(self.keys)

    def __contains__(self, key) -> bool:
        pos = bisect_left(self.keys, key)
        return pos < len(self.keys) and self.keys[pos] == key

    def union_sites(self) -> list[int]:
        out = set()
        for cell in self.cells:
            out |= cell
        return sorted(out)


class EdgeBuffer:
    """Bounded half-edge queue between consecutive order producers.

    Pulling below the low-water mark resumes the upstream producer until
    the buffer holds its cap again (or the producer is exhausted); the
    size therefore stays between low and cap while upstream has output.
    An on_insert hook sees every half-edge exactly once, on first entry.
    """

    def __init__(self, producer: Iterator[HalfEdge], low: int, cap: int, on_insert=None):
        if not 1 <= low <= cap:
            raise ValueError("buffer bounds must satisfy 1 <= low <= cap")
        self.low = low
        self.cap = cap
        self._producer = producer
        self._q: deque = deque()
        self._exhausted = False
        self._on_insert = on_insert
        self.max_seen = 0

    def _refill(self) -> None:
        while len(self._q) < self.cap and not self._exhausted:
            try:
                he = next(self._producer)
            except StopIteration:
                self._exhausted = True
                return
            if self._on_insert is not None:
                self._on_insert(he)
            self._q.append(he)
            if len(self._q) > self.max_seen:
                self.max_seen = len(self._q)

    def pull(self) -> Optional[HalfEdge]:
        if len(self._q) < self.low:
            self._refill()
        if self._q:
            return self._q.popleft()
        return None

    def drain(self) -> None:
        while self.pull() is not None:
            pass


def _oparam(direction, hp):
    """Parameter of hp along an oriented direction, as (num, den>0)."""
    return (direction[0] * hp[0] + direction[1] * hp[1], hp[2])


def _halfedges_of_cell_edge(k, site, rival, site_pt, rival_pt, line, lo, hi, lo_cut, hi_cut):
    """Both directed half-edges of one undirected order-k edge."""
    d0 = exact.line_dir(line)
    out = []
    for d in (d0, (-d0[0], -d0[1])):
        towards_site = exact.cross_dir(d, (site_pt[0] - rival_pt[0], site_pt[1] - rival_pt[1]))
        pair = (site, rival) if towards_site > 0 else (rival, site)
        if d == d0:
            tail, head, te, he_ = lo, hi, lo_cut, hi_cut
        else:
            tail, head, te, he_ = hi, lo, hi_cut, lo_cut
        out.append(HalfEdge(k, frozenset(), pair, line, d, tail, head, te, he_))
    return out


def order1_halfedges(
    arena: ReadOnlyArena,
    s1: int,
    table: BigCellTable,
    ledger: Optional[WorkLedger] = None,
) -> Iterator[HalfEdge]:
    """All 1-half-edges, each undirected edge reported as two directions."""
    for edge in iter_small_incident(arena, DiagramMode.NEAREST, s1, table, ledger):
        sp = arena.read(edge.site).ipt
        rp = arena.read(edge.rival).ipt
        yield from _halfedges_of_cell_edge(
            1, edge.site, edge.rival, sp, rp, edge.piece.carrier.line,
            edge.piece.lo, edge.piece.hi, edge.lo_cutter, edge.hi_cutter,
        )
    for edge in iter_big_big(arena, DiagramMode.NEAREST, s1, table, ledger):
        sp = arena.read(edge.site).ipt
        rp = arena.read(edge.rival).ipt
        yield from _halfedges_of_cell_edge(
            1, edge.site, edge.rival, sp, rp, edge.piece.carrier.line,
            edge.piece.lo, edge.piece.hi, edge.lo_cutter, edge.hi_cutter,
        )


def _outgoing(pts3: dict, vertex_old: bool, base: frozenset, cell: frozenset):
    """The unique boundary half-edge of `cell` leaving a degree-3 vertex.

    pts3 maps the vertex's three defining site indices to coordinates.
    At an old vertex of the higher order the three local edges run toward
    the side where the omitted site becomes closer; at a new vertex toward
    where it becomes farther.  Returns (pair, closest, carrier, direction,
    tail_extra) for the one candidate whose left cell is `cell`.
    """
    idxs = sorted(pts3)
    found = None
    for zi in range(3):
        z = idxs[zi]
        x, y = (i for i in idxs if i != z)
        closest = (base | {z}) if vertex_old else base
        px, py, pz = pts3[x], pts3[y], pts3[z]
        line = exact.bisector_line(px, py)
        d0 = exact.line_dir(line)
        # Sign of d/dt [d^2(.,z) - d^2(.,x)] along d0 is 2*<d0, x-z>.
        g = d0[0] * (px[0] - pz[0]) + d0[1] * (px[1] - pz[1])
        if g == 0:
            raise AssertionError("degenerate vertex neighborhood")
        want_closer = vertex_old
        if (g < 0) == want_closer:
            d = d0
        else:
            d = (-d0[0], -d0[1])
        towards_x = exact.cross_dir(d, (px[0] - py[0], px[1] - py[1]))
        left, right = (x, y) if towards_x > 0 else (y, x)
        if closest | {left} == cell:
            assert found is None, "two outgoing boundary edges at one vertex"
            found = ((left, right), closest, line, d, z)
    assert found is not None, "no outgoing boundary edge at vertex"
    return found


class _IntervalWalk:
    """State of one boundary walk: the pending edge awaiting its head."""

    __slots__ = (
        "cell",
        "closest",
        "pair",
        "pair_pts",
        "carrier",
        "direction",
        "tail",
        "tail_tau",
        "tail_extra",
        "best",
        "steps",
    )

    def __init__(self, cell, closest, pair, pair_pts, carrier, direction, tail, tail_extra):
        self.cell = cell
        self.closest = closest
        self.pair = pair
        self.pair_pts = pair_pts
        self.carrier = carrier
        self.direction = direction
        self.tail = tail
        self.tail_tau = None if tail is None else _oparam(direction, tail)
        self.tail_extra = tail_extra
        self.best = None  # (tau_num, tau_den, site)
        self.steps = 0

    def consider(self, j: int, w) -> None:
        if j in self.pair or j == self.tail_extra:
            return
        a1, b1, c1 = self.carrier
        px = self.pair_pts[0]
        la = 2 * (w[0] - px[0])
        lb = 2 * (w[1] - px[1])
        lc = w[0] * w[0] + w[1] * w[1] - px[0] * px[0] - px[1] * px[1]
        wdet = a1 * lb - la * b1
        if wdet == 0:
            raise AssertionError("collinear sites at successor crossing")
        x = c1 * lb - lc * b1
        y = a1 * lc - la * c1
        if wdet < 0:
            x, y, wdet = -x, -y, -wdet
        num = self.direction[0] * x + self.direction[1] * y
        if self.tail_tau is not None and num * self.tail_tau[1] <= self.tail_tau[0] * wdet:
            return
        if self.best is None or num * self.best[1] < self.best[0] * wdet:
            self.best = (num, wdet, j)

    def materialize(self, k_out: int, pts: Callable[[int], tuple[int, int]]) -> HalfEdge:
        head = head_extra = None
        if self.best is not None:
            head_extra = self.best[2]
            head = exact.line_intersection(
                self.carrier, exact.bisector_line(self.pair_pts[0], pts(head_extra))
            )
        return HalfEdge(
            k_out,
            self.closest,
            self.pair,
            self.carrier,
            self.direction,
            self.tail,
            head,
            self.tail_extra,
            head_extra,
        )


def _walk_from_relevant(arena: ReadOnlyArena, e: HalfEdge) -> _IntervalWalk:
    """First pending boundary edge of the interval a relevant edge owns."""
    cell = e.closest | set(e.pair)
    pts3 = {i: arena.read(i).ipt for i in (*e.pair, e.head_extra)}
    pair, closest, line, d, z = _outgoing(pts3, True, e.closest, cell)
    pair_pts = (pts3[pair[0]], pts3[pair[1]])
    return _IntervalWalk(frozenset(cell), frozenset(closest), pair, pair_pts, line, d, e.head, z)


def _walk_step(arena: ReadOnlyArena, f: HalfEdge) -> _IntervalWalk:
    """Pending successor of f along its left cell's boundary.

    Works through either vertex class; interval walks stop at old heads
    themselves, but the successor remains well-defined there.
    """
    cell = f.left_cell()
    pts3 = {i: arena.read(i).ipt for i in (*f.pair, f.head_extra)}
    old = f.head_extra in f.closest
    base = f.closest - {f.head_extra} if old else f.closest
    pair, closest, line, d, z = _outgoing(pts3, old, base, cell)
    pair_pts = (pts3[pair[0]], pts3[pair[1]])
    return _IntervalWalk(cell, frozenset(closest), pair, pair_pts, line, d, f.head, z)


def successor_step(
    arena: ReadOnlyArena,
    inputs: list[HalfEdge],
    k_out: int,
    s1: int,
    ledger: Optional[WorkLedger] = None,
) -> list[Optional[HalfEdge]]:
    """Resolve up to s1 half-edges with one batched pass over the input.

    Producing order k_out: an input of order k_out-1 yields the first
    k_out-half-edge of the interval it owns (None when not relevant); an
    input of order k_out yields its counterclockwise successor along its
    left cell's boundary.
    """
    if not inputs:
        return []
    if len(inputs) > s1:
        raise ValueError("more inputs than workspace slots")
    walks: list[Optional[_IntervalWalk]] = []
    for e in inputs:
        if e.k == k_out - 1:
            walks.append(_walk_from_relevant(arena, e) if is_relevant(e) else None)
        elif e.k == k_out:
            walks.append(_walk_step(arena, e) if e.head is not None else None)
        else:
            raise ValueError(f"input of order {e.k} cannot drive order {k_out}")
    _trim_round(arena, [w for w in walks if w is not None], s1 * max(1, k_out - 1), ledger)
    return [
        None if w is None else w.materialize(k_out, lambda i: arena.read(i).ipt)
        for w in walks
    ]


def _trim_round(
    arena: ReadOnlyArena,
    walks: list[_IntervalWalk],
    batch_size: int,
    ledger: Optional[WorkLedger] = None,
) -> None:
    """One pass over the input serving every pending walk's head search."""
    if not walks:
        return
    n = len(arena)
    step = max(1, batch_size)
    ctx = ledger.scope(step * W_BATCH_SITE) if ledger is not None else _nullctx()
    with ctx:
        for start in range(0, n, step):
            batch = [(j, arena.read(j).ipt) for j in range(start, min(n, start + step))]
            for walk in walks:
                for j, w in batch:
                    walk.consider(j, w)


def _nullctx():
    from contextlib import nullcontext

    return nullcontext()


class _OrderDriver:
    """Shared slot management for one order's walk phases."""

    def __init__(self, arena: ReadOnlyArena, k_out: int, s1: int, ledger):
        self.arena = arena
        self.k_out = k_out
        self.s1 = max(1, s1)
        self.ledger = ledger
        self.batch = self.s1 * max(1, k_out - 1)
        self.guard = 4 * (k_out + 1) * (len(arena) + 4)

    def run(
        self,
        source: EdgeBuffer,
        skip_cell=None,
        on_unbounded_input=None,
        on_unbounded_walk=None,
        stop_at_starvation: bool = False,
    ) -> Iterator[HalfEdge]:
        """Drive interval walks; yields every half-edge a walk produces.

        skip_cell(cell_key) filters which cells are walked; the unbounded
        hooks are called with a cell key when an unbounded lower-order
        edge or an unbounded boundary edge reveals an unbounded cell.
        With stop_at_starvation, walks still alive when the source dries
        up are abandoned after reporting their cells via on_unbounded_walk
        (the starvation rule reuses that hook through `report_cell`).
        """
        arena = self.arena
        walks: list[_IntervalWalk] = []
        exhausted = False
        while True:
            while len(walks) < self.s1 and not exhausted:
                e = source.pull()
                if e is None:
                    exhausted = True
                    break
                if e.head is None:
                    if on_unbounded_input is not None:
                        on_unbounded_input(e.closest | set(e.pair))
                    continue
                if classify_head(e) == "old":
                    continue
                cell = e.closest | set(e.pair)
                if skip_cell is not None and skip_cell(frozenset(cell)):
                    continue
                walks.append(_walk_from_relevant(arena, e))
            if not walks:
                return
            if exhausted and stop_at_starvation:
                # No fresh input remains: the surviving walks are in big
                # cells; record and abandon them.
                for w in walks:
                    if on_unbounded_walk is not None:
                        on_unbounded_walk(w.cell)
                return
            _trim_round(arena, walks, self.batch, self.ledger)
            still: list[_IntervalWalk] = []
            for w in walks:
                f = w.materialize(self.k_out, lambda i: arena.read(i).ipt)
                yield f
                w.steps += 1
                if f.head is None:
                    if on_unbounded_walk is not None:
                        on_unbounded_walk(w.cell)
                    continue
                if classify_head(f) == "old":
                    continue
                if w.steps > self.guard:
                    raise AssertionError("boundary walk failed to terminate")
                nxt = _walk_step(arena, f)
                nxt.steps = w.steps
                still.append(nxt)
            walks = still


def find_big_cells_k(
    arena: ReadOnlyArena,
    k_out: int,
    s1: int,
    source: EdgeBuffer,
    ledger: Optional[WorkLedger] = None,
) -> BigCellTableK:
    """First phase for order k_out: identify big cells, report nothing.

    Big cells are those whose walks outlive the supply of fresh
    lower-order half-edges, plus every unbounded cell (revealed either by
    an unbounded lower-order edge inside it or by a walk reaching an
    unbounded boundary edge); unbounded cells cannot be finished by
    counterclockwise walks, so their boundaries are left to the third
    phase.
    """
    registered: dict = {}
    pts = _point_reader(arena)

    def register(cell) -> None:
        cell = frozenset(cell)
        registered.setdefault(cog_key(cell, pts), cell)

    driver = _OrderDriver(arena, k_out, s1, ledger)
    for _ in driver.run(
        source,
        on_unbounded_input=register,
        on_unbounded_walk=register,
        stop_at_starvation=True,
    ):
        pass
    return BigCellTableK(registered)


def _point_reader(arena: ReadOnlyArena):
    def pts(i: int) -> tuple[int, int]:
        return arena.read(i).ipt

    return pts


def iter_order_edges(
    arena: ReadOnlyArena,
    k_out: int,
    s1: int,
    source: EdgeBuffer,
    table: BigCellTableK,
    ledger: Optional[WorkLedger] = None,
) -> Iterator[HalfEdge]:
    """Phases two and three for order k_out: every half-edge exactly once.

    Walks cover every small cell's boundary: each walked half-edge is
    reported, plus its opposite when the cell to its right is big.  Edges
    between two big cells come from the in-workspace diagram of the big
    cells' sites trimmed against the whole input.
    """
    pts = _point_reader(arena)
    driver = _OrderDriver(arena, k_out, s1, ledger)

    def skip_cell(cell) -> bool:
        return cog_key(cell, pts) in table

    for f in driver.run(source, skip_cell=skip_cell):
        yield f
        if f.head is None:
            raise AssertionError("small cells are bounded; unbounded walk edge")
        if cog_key(f.right_cell(), pts) in table:
            yield f.opposite()

    yield from _iter_big_big_edges(arena, k_out, table, driver.batch, ledger)


def _iter_big_big_edges(
    arena: ReadOnlyArena,
    k_out: int,
    table: BigCellTableK,
    batch_size: int,
    ledger: Optional[WorkLedger] = None,
) -> Iterator[HalfEdge]:
    """Both directions of every edge shared by two big cells.

    Two cells can only share an edge when their site sets differ in one
    site; for each such candidate pair the edge is the interval of the
    differing sites' bisector where the common sites are strictly closer
    and every other site strictly farther, found by one clipping pass
    over the input.  O(1) words per candidate, no in-workspace diagram.
    """
    cells = table.cells
    candidates = []
    for i in range(len(cells)):
        for j in range(i + 1, len(cells)):
            common = cells[i] & cells[j]
            if len(common) != k_out - 1:
                continue
            (a,) = cells[i] - common
            (b,) = cells[j] - common
            candidates.append((frozenset(common), a, b))
    if not candidates:
        return
    n = len(arena)
    step = max(1, batch_size)
    # Independent candidates: process a workspace-sized chunk per input pass.
    chunk = max(1, step // 2)
    for lo_i in range(0, len(candidates), chunk):
        group = candidates[lo_i : lo_i + chunk]
        words = len(group) * (k_out + 14) + W_FIXED
        ctx = ledger.scope(words) if ledger is not None else _nullctx()
        with ctx:
            states = []
            for common, a, b in group:
                a_pt = arena.read(a).ipt
                b_pt = arena.read(b).ipt
                line = exact.bisector_line(a_pt, b_pt)
                d0 = exact.line_dir(line)
                states.append([common, a, b, a_pt, b_pt, line, d0, [None, None, None, None], True])
            for start in range(0, n, step):
                batch = [(m, arena.read(m).ipt) for m in range(start, min(n, start + step))]
                for st in states:
                    if not st[8]:
                        continue
                    common, a, b, a_pt, _, line, d0, box, _ = st
                    for m, w in batch:
                        if m == a or m == b:
                            continue
                        want = 1 if m in common else -1
                        if not _clip_interval(box, line, d0, a_pt, w, m, want):
                            st[8] = False
                            break
            for st in states:
                if not st[8]:
                    continue
                common, a, b, a_pt, b_pt, line, d0, box, _ = st
                lo = hi = None
                if box[2] is not None:
                    lo = exact.line_intersection(line, exact.bisector_line(a_pt, arena.read(box[2]).ipt))
                if box[3] is not None:
                    hi = exact.line_intersection(line, exact.bisector_line(a_pt, arena.read(box[3]).ipt))
                for d in (d0, (-d0[0], -d0[1])):
                    towards_a = exact.cross_dir(d, (a_pt[0] - b_pt[0], a_pt[1] - b_pt[1]))
                    pair = (a, b) if towards_a > 0 else (b, a)
                    if d == d0:
                        tail, head, te, hx = lo, hi, box[2], box[3]
                    else:
                        tail, head, te, hx = hi, lo, box[3], box[2]
                    yield HalfEdge(k_out, common, pair, line, d, tail, head, te, hx)


def _halfedge_words(k: int) -> int:
    """Word count of one stored order-k half-edge: the k+3 defining sites
    plus carrier, direction, and two homogeneous endpoints."""
    return k + 14


def batch_order_diagram(
    mem_sites: list[tuple[int, tuple[int, int]]],
    m: int,
    ledger: Optional[WorkLedger] = None,
) -> list[HalfEdge]:
    """All directed half-edges of the order-m diagram of an in-memory set.

    Built by lifting order by order with the same interval walks the
    streaming path uses, plus a directional sweep that contributes every
    unbounded half-edge (walks started from the inward unbounded edges
    cover the full boundary of each unbounded cell).  Charges the actual
    content words per order while lifting; the caller accounts for the
    returned list.
    """
    if m == len(mem_sites):
        return []  # every point has all sites among its m nearest: one cell, no edges
    if m < 1 or m > len(mem_sites) - 1:
        raise ValueError(f"order {m} out of range for {len(mem_sites)} in-memory sites")
    ctx = ledger.scope(len(mem_sites) * 3) if ledger is not None else _nullctx()
    with ctx:
        current = _memory_order1(mem_sites)
        charged = len(current) * _halfedge_words(1)
        if ledger is not None:
            ledger.alloc(charged)
        try:
            for j in range(1, m):
                nxt = _memory_lift(mem_sites, current, j)
                nxt_words = len(nxt) * _halfedge_words(j + 1)
                if ledger is not None:
                    ledger.alloc(nxt_words)
                    ledger.release(charged)
                charged = nxt_words
                current = nxt
        finally:
            if ledger is not None:
                ledger.release(charged)
        return current


def _memory_order1(mem_sites) -> list[HalfEdge]:
    diagram = MemoryDiagram(mem_sites, DiagramMode.NEAREST)
    pts = dict(mem_sites)
    out = []
    for e in diagram.edges:
        lo = hi = None
        if e.state[2] is not None:
            lo = exact.line_intersection(e.line, exact.bisector_line(pts[e.a], pts[e.state[2]]))
        if e.state[3] is not None:
            hi = exact.line_intersection(e.line, exact.bisector_line(pts[e.a], pts[e.state[3]]))
        out.extend(
            _halfedges_of_cell_edge(1, e.a, e.b, pts[e.a], pts[e.b], e.line, lo, hi, e.state[2], e.state[3])
        )
    return out


class _MemoryWalk:
    """In-memory variant of the interval walk: trims against a site list."""

    def __init__(self, mem_sites):
        self.mem_sites = mem_sites
        self.pts = dict(mem_sites)

    def first_from(self, e: HalfEdge) -> HalfEdge:
        pts3 = {i: self.pts[i] for i in (*e.pair, e.head_extra)}
        cell = e.closest | set(e.pair)
        pair, closest, line, d, z = _outgoing(pts3, True, e.closest, frozenset(cell))
        walk = _IntervalWalk(
            frozenset(cell), frozenset(closest), pair, (self.pts[pair[0]], self.pts[pair[1]]), line, d, e.head, z
        )
        return self._finish(walk, e.k + 1)

    def step(self, f: HalfEdge) -> HalfEdge:
        pts3 = {i: self.pts[i] for i in (*f.pair, f.head_extra)}
        pair, closest, line, d, z = _outgoing(pts3, False, f.closest, f.left_cell())
        walk = _IntervalWalk(
            f.left_cell(), frozenset(closest), pair, (self.pts[pair[0]], self.pts[pair[1]]), line, d, f.head, z
        )
        return self._finish(walk, f.k)

    def step_through(self, f: HalfEdge) -> HalfEdge:
        """Successor continuing through either vertex class (full-boundary walks)."""
        pts3 = {i: self.pts[i] for i in (*f.pair, f.head_extra)}
        old = f.head_extra in f.closest
        base = f.closest - {f.head_extra} if old else f.closest
        pair, closest, line, d, z = _outgoing(pts3, old, base, f.left_cell())
        walk = _IntervalWalk(
            f.left_cell(), frozenset(closest), pair, (self.pts[pair[0]], self.pts[pair[1]]), line, d, f.head, z
        )
        return self._finish(walk, f.k)

    def _finish(self, walk: _IntervalWalk, k_out: int) -> HalfEdge:
        for j, w in self.mem_sites:
            walk.consider(j, w)
        return walk.materialize(k_out, lambda i: self.pts[i])


def _memory_lift(mem_sites, prev: list[HalfEdge], j: int) -> list[HalfEdge]:
    """All (j+1)-half-edges of the in-memory set from its j-half-edges."""
    walker = _MemoryWalk(mem_sites)
    pts = walker.pts
    collected: dict = {}

    def add(he: HalfEdge) -> bool:
        key = he.key()
        if key in collected:
            return False
        collected[key] = he
        return True

    # Interval walks cover every bounded cell's boundary completely.
    for e in prev:
        if not is_relevant(e):
            continue
        f = walker.first_from(e)
        while True:
            add(f)
            if f.head is None or classify_head(f) == "old":
                break
            f = walker.step(f)

    # Unbounded (j+1)-half-edges, found by direction: the pair tied at
    # ranks j+1, j+2 of the projection order spans an unbounded edge.
    idxs = [i for i, _ in mem_sites]
    for ai in range(len(idxs)):
        for bi in range(ai + 1, len(idxs)):
            a, b = idxs[ai], idxs[bi]
            pa, pb = pts[a], pts[b]
            for wdir in ((-(pb[1] - pa[1]), pb[0] - pa[0]), (pb[1] - pa[1], -(pb[0] - pa[0]))):
                above = set()
                pa_dot = wdir[0] * pa[0] + wdir[1] * pa[1]
                for c in idxs:
                    if c in (a, b):
                        continue
                    if wdir[0] * pts[c][0] + wdir[1] * pts[c][1] > pa_dot:
                        above.add(c)
                if len(above) != j:
                    continue
                line = exact.bisector_line(pa, pb)
                d0 = exact.line_dir(line)
                outward = d0 if (d0[0] * wdir[0] + d0[1] * wdir[1]) > 0 else (-d0[0], -d0[1])
                # Trim from infinity: the edge runs beyond the outermost crossing.
                best = None
                for c in idxs:
                    if c in (a, b):
                        continue
                    hp = exact.line_intersection(line, exact.bisector_line(pa, pts[c]))
                    tau = _oparam(outward, hp)
                    if best is None or exact.cmp_params(tau, best[0]) > 0:
                        best = (tau, c, hp)
                towards_a = exact.cross_dir(outward, (pa[0] - pb[0], pa[1] - pb[1]))
                pair_out = (a, b) if towards_a > 0 else (b, a)
                if best is None:
                    outward_he = HalfEdge(j + 1, frozenset(above), pair_out, line, outward, None, None, None, None)
                    add(outward_he)
                    add(outward_he.opposite())
                    continue
                tail_hp = best[2]
                outward_he = HalfEdge(
                    j + 1, frozenset(above), pair_out, line, outward, tail_hp, None, best[1], None
                )
                add(outward_he)
                inward = outward_he.opposite()
                add(inward)
                # Walk the whole boundary of the cell left of the inward edge.
                f = inward
                while f.head is not None:
                    f = walker.step_through(f)
                    if not add(f):
                        break
    return list(collected.values())


def encode_halfedge(e: HalfEdge, scale: int) -> EdgeRecord:
    """Wire record for a half-edge; sorted closest set, direction kept."""
    return e.to_record(scale)


def decode_halfedge(record: EdgeRecord, sites) -> HalfEdge:
    """Rebuild a half-edge from its record and the site array."""
    from .records import Unbounded

    scale = sites[0].scale
    pa = sites[record.pair[0]].ipt
    pb = sites[record.pair[1]].ipt
    carrier = exact.bisector_line(pa, pb)

    def point_of(ep):
        if isinstance(ep, Unbounded):
            return None
        xs = ep[0] * scale
        ys = ep[1] * scale
        w = xs.denominator * ys.denominator
        return exact.normalize_hpoint(
            xs.numerator * ys.denominator, ys.numerator * xs.denominator, w
        )

    tail = point_of(record.tail)
    head = point_of(record.head)
    if isinstance(record.head, Unbounded):
        direction = exact.primitive_dir(record.head.dx, record.head.dy)
    elif isinstance(record.tail, Unbounded):
        direction = exact.primitive_dir(-record.tail.dx, -record.tail.dy)
    else:
        dx = record.head[0] - record.tail[0]
        dy = record.head[1] - record.tail[1]
        direction = exact.primitive_dir(dx.numerator * dy.denominator, dy.numerator * dx.denominator)
    he = HalfEdge(
        record.k,
        frozenset(record.closest),
        record.pair,
        carrier,
        direction,
        tail,
        head,
        record.extra_t,
        record.extra_h,
    )
    towards_left = exact.cross_dir(direction, (pa[0] - pb[0], pa[1] - pb[1]))
    if towards_left <= 0:
        raise ValueError("record direction does not put pair[0] on the left")
    return he


@dataclass(frozen=True)
class PipelineConfig:
    """Orders 1..K with an s-word workspace; K^2 must fit inside s."""

    K: int
    s: int
    seed: int = 0

    def __post_init__(self):
        if self.K < 1:
            raise ConfigError("max order must be at least 1")
        if self.K * self.K > self.s:
            raise ConfigError(f"order range K={self.K} needs workspace >= K^2 = {self.K * self.K}, got {self.s}")

    @property
    def s_prime(self) -> int:
        return max(1, self.s // (self.K * self.K))


def pipeline_run(
    arena: ReadOnlyArena,
    config: PipelineConfig,
    sink: OutputSink,
    ledger: Optional[WorkLedger] = None,
) -> None:
    """Emit all half-edges of orders 1..K, grouped by nondecreasing order.

    Stage 0 finds the big cells of the order-1 diagram only.  Stage k
    re-runs the producers for orders 1..k chained through bounded buffers,
    writes the order-k half-edges to the sink as they first enter their
    buffer, and lets the next order's first phase consume them to learn
    its big cells.  Each half-edge is written exactly once, in its stage.
    """
    s1 = config.s_prime
    K = config.K
    scale = arena.scale
    buffer_words = sum(3 * s1 * (k + 4) for k in range(1, K + 1)) + W_FIXED
    ctx = ledger.scope(buffer_words) if ledger is not None else _nullctx()
    with ctx:
        table1 = find_big_cells(arena, DiagramMode.NEAREST, s1, ledger)
        tables: dict = {1: table1}

        def chain(up_to: int, emit_order: Optional[int]) -> Iterator[HalfEdge]:
            stream: Iterator[HalfEdge] = order1_halfedges(arena, s1, tables[1], ledger)
            for k_out in range(2, up_to + 1):
                buf = EdgeBuffer(stream, s1, 3 * s1)
                stream = iter_order_edges(arena, k_out, s1, buf, tables[k_out], ledger)
            return stream

        for stage in range(1, K + 1):
            stream = chain(stage, stage)
            if stage < K:
                emitted = EdgeBuffer(
                    stream, s1, 3 * s1, on_insert=lambda he: sink.emit(he.to_record(scale))
                )
                tables[stage + 1] = find_big_cells_k(arena, stage + 1, s1, emitted, ledger)
                emitted.drain()
            else:
                for he in stream:
                    sink.emit(he.to_record(scale))

