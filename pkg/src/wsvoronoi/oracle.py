"""Unconstrained brute-force reference diagrams and run verifiers.

Ground truth for every construction path.  For each site pair (p, q) the
perpendicular bisector is swept: its crossings with the other bisectors
are exactly the circumcenters c(p, q, r), and between consecutive
crossings the number of sites strictly closer than p stays constant, so a
single ordered sweep classifies every interval of every bisector into the
diagram order it belongs to.  O(n^3 log n) time, unbounded workspace; the
oracle is deliberately outside the memory model and shares no code with
the streaming algorithms beyond the exact kernel.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from . import exact
from .geometry import Site
from .records import EdgeRecord, Unbounded


@dataclass(frozen=True, slots=True)
class OracleEdge:
    """One edge of an order-k diagram, aligned with its carrier direction."""

    k: int
    closest: frozenset
    pair: tuple[int, int]  # sorted ascending
    carrier: tuple[int, int, int]
    lo: Optional[tuple[int, int, int]]
    hi: Optional[tuple[int, int, int]]
    lo_extra: Optional[int]
    hi_extra: Optional[int]
    lo_inside: Optional[int]  # sites strictly inside the endpoint disk
    hi_inside: Optional[int]

    def endpoint_class(self, which: str) -> Optional[str]:
        inside = self.lo_inside if which == "lo" else self.hi_inside
        if inside is None:
            return None
        if inside == self.k - 2:
            return "old"
        if inside == self.k - 1:
            return "new"
        raise AssertionError(f"impossible inside count {inside} for order {self.k}")


def _hpoint_fracs(hp, scale: int):
    return (Fraction(hp[0], hp[2] * scale), Fraction(hp[1], hp[2] * scale))


def _orig_line(line, scale: int):
    a, b, c = line
    return exact.normalize_line(a * scale, b * scale, c)


@lru_cache(maxsize=64)
def _sweep(sites: tuple):
    """Per-pair crossing structure: {(p, q): (c_start, [(t, hp, r, slope), ...])}."""
    n = len(sites)
    pts = [s.ipt for s in sites]
    data = {}
    for p in range(n):
        for q in range(p + 1, n):
            line = exact.bisector_line(pts[p], pts[q])
            d = exact.line_dir(line)
            crossings = []
            c_start = 0
            for r in range(n):
                if r == p or r == q:
                    continue
                hp = exact.circumcenter_hpoint(pts[p], pts[q], pts[r])
                if hp is None:
                    raise AssertionError(f"collinear sites {p}, {q}, {r}")
                t = exact.param_along(line, hp)
                # Slope of d^2(x, r) - d^2(x, p) along the carrier direction.
                slope = exact.sign(d[0] * (pts[p][0] - pts[r][0]) + d[1] * (pts[p][1] - pts[r][1]))
                if slope == 0:
                    raise AssertionError(f"bisector parallel to carrier: {p}, {q}, {r}")
                if slope > 0:
                    c_start += 1
                crossings.append((t, hp, r, slope))
            crossings.sort(key=lambda c: Fraction(c[0][0], c[0][1]))
            data[(p, q)] = (c_start, crossings)
    return data


@dataclass(frozen=True)
class OracleDiagram:
    k: int
    sites: tuple
    edges: tuple

    @property
    def scale(self) -> int:
        return self.sites[0].scale

    def cell_keys(self):
        cells = set()
        for e in self.edges:
            cells.add(e.closest | {e.pair[0]})
            cells.add(e.closest | {e.pair[1]})
        return cells

    def vertex_classes(self):
        """{hpoint-fractions: (defining triple, 'old'|'new')} for this order."""
        out = {}
        for e in self.edges:
            for which, hp, extra in (("lo", e.lo, e.lo_extra), ("hi", e.hi, e.hi_extra)):
                if hp is None:
                    continue
                key = _hpoint_fracs(hp, self.scale)
                triple = frozenset((e.pair[0], e.pair[1], extra))
                cls = e.endpoint_class(which)
                if key in out:
                    assert out[key] == (triple, cls), "inconsistent vertex data"
                else:
                    out[key] = (triple, cls)
        return out

    def undirected_records(self):
        return [_undirected_record(e, self.scale) for e in self.edges]

    def undirected_keys(self):
        return {r.undirected_key() for r in self.undirected_records()}

    def halfedge_records(self):
        out = []
        for e in self.edges:
            out.extend(_directed_records(e, self.sites))
        return out

    def halfedge_keys(self):
        return {r.canonical_key() for r in self.halfedge_records()}


def _undirected_record(e: OracleEdge, scale: int) -> EdgeRecord:
    line = _orig_line(e.carrier, scale)
    d = exact.line_dir(e.carrier)
    lo_f = None if e.lo is None else _hpoint_fracs(e.lo, scale)
    hi_f = None if e.hi is None else _hpoint_fracs(e.hi, scale)
    pair = (min(e.pair), max(e.pair))
    closest = tuple(sorted(e.closest))
    if lo_f is not None and hi_f is not None:
        if lo_f <= hi_f:
            return EdgeRecord(e.k, closest, pair, lo_f, hi_f, e.lo_extra, e.hi_extra)
        return EdgeRecord(e.k, closest, pair, hi_f, lo_f, e.hi_extra, e.lo_extra)
    if lo_f is not None:
        return EdgeRecord(e.k, closest, pair, lo_f, Unbounded(*d), e.lo_extra, None)
    if hi_f is not None:
        return EdgeRecord(e.k, closest, pair, hi_f, Unbounded(-d[0], -d[1]), e.hi_extra, None)
    return EdgeRecord(e.k, closest, pair, Unbounded(-d[0], -d[1]), Unbounded(*d), None, None)


def _directed_records(e: OracleEdge, sites: tuple):
    """Both directed half-edges of an edge; pair order encodes the left cell."""
    scale = sites[0].scale
    closest = tuple(sorted(e.closest))
    p, q = e.pair
    d = exact.line_dir(e.carrier)
    out = []
    for direction in (d, (-d[0], -d[1])):
        towards_p = exact.cross_dir(
            direction, (sites[p].ix - sites[q].ix, sites[p].iy - sites[q].iy)
        )
        assert towards_p != 0
        pair = (p, q) if towards_p > 0 else (q, p)
        if direction == d:
            tail_hp, head_hp = e.lo, e.hi
            tail_extra, head_extra = e.lo_extra, e.hi_extra
        else:
            tail_hp, head_hp = e.hi, e.lo
            tail_extra, head_extra = e.hi_extra, e.lo_extra
        tail = (
            Unbounded(-direction[0], -direction[1])
            if tail_hp is None
            else _hpoint_fracs(tail_hp, scale)
        )
        head = Unbounded(*direction) if head_hp is None else _hpoint_fracs(head_hp, scale)
        out.append(EdgeRecord(e.k, closest, pair, tail, head, tail_extra, head_extra))
    return out


def oracle_vdk(sites: Sequence[Site], k: int) -> OracleDiagram:
    """Order-k Voronoi diagram by exhaustive bisector sweeping."""
    sites = tuple(sites)
    n = len(sites)
    if not 1 <= k <= n - 1:
        raise ValueError(f"order {k} out of range for {n} sites")
    data = _sweep(sites)
    edges = []
    for (p, q), (c_start, crossings) in data.items():
        closer = {r for (_, _, r, slope) in crossings if slope > 0}
        count = c_start
        m = len(crossings)
        for idx in range(m + 1):
            left = crossings[idx - 1] if idx > 0 else None
            right = crossings[idx] if idx < m else None
            if count == k - 1:
                lo = left[1] if left else None
                hi = right[1] if right else None
                lo_extra = left[2] if left else None
                hi_extra = right[2] if right else None
                lo_inside = None if left is None else count - (1 if left[3] < 0 else 0)
                hi_inside = None if right is None else count - (1 if right[3] > 0 else 0)
                edges.append(
                    OracleEdge(
                        k,
                        frozenset(closer),
                        (p, q),
                        exact.bisector_line(sites[p].ipt, sites[q].ipt),
                        lo,
                        hi,
                        lo_extra,
                        hi_extra,
                        lo_inside,
                        hi_inside,
                    )
                )
            if right is not None:
                _, _, r, slope = right
                if slope > 0:
                    closer.discard(r)
                    count -= 1
                else:
                    closer.add(r)
                    count += 1
    return OracleDiagram(k, sites, tuple(edges))


@dataclass
class VerifyReport:
    missing: list
    spurious: list
    duplicated: list
    invalid: list

    @property
    def ok(self) -> bool:
        return not (self.missing or self.spurious or self.duplicated or self.invalid)

    def summary(self) -> str:
        if self.ok:
            return "ok"
        return (
            f"missing={len(self.missing)} spurious={len(self.spurious)} "
            f"duplicated={len(self.duplicated)} invalid={len(self.invalid)}"
        )


def _probe_hpoint(rec: EdgeRecord, scale: int):
    """A point in the interior of the recorded piece, in scaled coordinates."""

    def scaled_h(frac_pt):
        x = frac_pt[0] * scale
        y = frac_pt[1] * scale
        w = x.denominator * y.denominator
        return exact.normalize_hpoint(x.numerator * y.denominator, y.numerator * x.denominator, w)

    bounded = [ep for ep in (rec.tail, rec.head) if not isinstance(ep, Unbounded)]
    if len(bounded) == 2:
        return exact.midpoint_h(scaled_h(bounded[0]), scaled_h(bounded[1]))
    if len(bounded) == 1:
        anchor = scaled_h(bounded[0])
        inf = rec.tail if isinstance(rec.tail, Unbounded) else rec.head
        return exact.hpoint_shift(anchor, (inf.dx, inf.dy), steps=1)
    # Full line: step from an arbitrary carrier point.
    inf = rec.head
    assert isinstance(inf, Unbounded)
    raise AssertionError("line records need a bounded probe; not produced for n >= 3")


def check_distance_profile(rec: EdgeRecord, sites: Sequence[Site]) -> Optional[str]:
    """None when the record's midpoint has the advertised distance ranking."""
    scale = sites[0].scale
    probe = _probe_hpoint(rec, scale)
    a, b = rec.pair
    if exact.dist2_cmp(probe, sites[a].ipt, sites[b].ipt) != 0:
        return "pair not equidistant at probe"
    closer = []
    for s in sites:
        if s.index in (a, b):
            continue
        c = exact.dist2_cmp(probe, s.ipt, sites[a].ipt)
        if c == 0:
            return f"site {s.index} tied with pair at probe"
        if c < 0:
            closer.append(s.index)
    if len(closer) != rec.k - 1:
        return f"expected {rec.k - 1} closer sites at probe, found {len(closer)}"
    if set(closer) != set(rec.closest):
        return "closest set mismatch at probe"
    return None


def verify_run(
    emitted: Sequence[EdgeRecord],
    oracle: OracleDiagram,
    k: int,
    directed: bool = False,
) -> VerifyReport:
    """Compare one order's emitted records against the oracle diagram."""
    mine = [r for r in emitted if r.k == k]
    keyfn = (lambda r: r.canonical_key()) if directed else (lambda r: r.undirected_key())
    want = oracle.halfedge_keys() if directed else oracle.undirected_keys()

    seen = {}
    duplicated = []
    for r in mine:
        key = keyfn(r)
        if key in seen:
            duplicated.append(r)
        seen[key] = r
    got = set(seen)
    missing = sorted(want - got)
    spurious = [seen[key] for key in sorted(got - want)]
    invalid = []
    for r in mine:
        err = check_distance_profile(r, oracle.sites)
        if err:
            invalid.append((r, err))
    return VerifyReport(missing, spurious, duplicated, invalid)


@dataclass(frozen=True)
class CellIntervals:
    """CCW boundary of one (k+1)-cell, split at relevant-head vertices.

    ``boundary`` is the cell's directed boundary (cell on the left) in ccw
    order; ``intervals`` maps each owning relevant k-half-edge record to the
    run of boundary edges it owns.  For unbounded cells the run before the
    first relevant head has no owner and is stored under None.
    """

    cell: frozenset
    boundary: tuple
    intervals: tuple  # ((owner record | None, (edge records...)), ...)


def _directed_boundary(cell_key, edges_k1, sites):
    """Directed boundary records of a cell, chained in ccw order."""
    directed = []
    for e in edges_k1:
        for rec in _directed_records(e, sites):
            left = set(rec.closest) | {rec.pair[0]}
            if left == set(cell_key):
                directed.append(rec)
    if not directed:
        return ()
    by_tail = {}
    open_starts = []
    for rec in directed:
        if isinstance(rec.tail, Unbounded):
            open_starts.append(rec)
        else:
            by_tail[rec.endpoint_key("tail")] = rec
    if open_starts:
        assert len(open_starts) == 1, "unbounded cell boundary has one ccw start"
        chain = [open_starts[0]]
    else:
        chain = [min(directed, key=lambda r: r.canonical_key())]
    while True:
        cur = chain[-1]
        if isinstance(cur.head, Unbounded):
            break
        nxt = by_tail.get(cur.endpoint_key("head"))
        if nxt is None or nxt is chain[0]:
            break
        chain.append(nxt)
    assert len(chain) == len(directed), "boundary of a convex cell is a single chain"
    return tuple(chain)


def oracle_intervals(sites: Sequence[Site], k: int):
    """Interval assignment of (k+1)-half-edges to relevant k-half-edges."""
    sites = tuple(sites)
    dk = oracle_vdk(sites, k)
    dk1 = oracle_vdk(sites, k + 1)
    edges_by_cell = {}
    for e in dk1.edges:
        for cell in (e.closest | {e.pair[0]}, e.closest | {e.pair[1]}):
            edges_by_cell.setdefault(cell, []).append(e)

    relevant_by_cell = {}
    for e in dk.edges:
        cell = e.closest | {e.pair[0], e.pair[1]}
        for rec in _directed_records(e, sites):
            if isinstance(rec.head, Unbounded):
                continue
            which = "hi" if rec.endpoint_key("head") == _endpoint_key_of(e.hi, sites) else "lo"
            if e.endpoint_class(which) == "new":
                relevant_by_cell.setdefault(cell, []).append(rec)

    out = {}
    for cell, edges in edges_by_cell.items():
        boundary = _directed_boundary(cell, edges, sites)
        relevant = relevant_by_cell.get(cell, [])
        heads = {r.endpoint_key("head"): r for r in relevant}
        assert len(heads) == len(relevant), "one relevant head per boundary vertex"
        intervals = []
        current_owner = None
        current_run = []
        for rec in boundary:
            owner = heads.get(rec.endpoint_key("tail"))
            if owner is not None:
                if current_run:
                    intervals.append((current_owner, tuple(current_run)))
                current_owner = owner
                current_run = [rec]
            else:
                current_run.append(rec)
        if current_run:
            intervals.append((current_owner, tuple(current_run)))
        if intervals and len(intervals) > 1 and intervals[0][0] is None and not isinstance(
            boundary[0].tail, Unbounded
        ):
            # Closed boundary: the unowned leading run wraps onto the last owner.
            first = intervals.pop(0)
            owner, run = intervals.pop()
            intervals.append((owner, run + first[1]))
        owners = [o for o, _ in intervals if o is not None]
        if len(owners) == 1 and len(intervals) == 2 and intervals[0][0] is None:
            # A single relevant half-edge owns the entire boundary.
            intervals = [(owners[0], tuple(boundary))]
        out[cell] = CellIntervals(cell, boundary, tuple(intervals))
    return out


def _endpoint_key_of(hp, sites):
    if hp is None:
        return None
    f = _hpoint_fracs(hp, sites[0].scale)
    return ("P", f[0].numerator, f[0].denominator, f[1].numerator, f[1].denominator)
