"""Batched s-workspace construction: equivalence and model compliance."""

import pytest

from wsvoronoi import exact
from wsvoronoi.datagen import random_sites, triangle
from wsvoronoi.memory import OutputSink, ReadOnlyArena, WorkLedger
from wsvoronoi.oracle import oracle_vdk, verify_run
from wsvoronoi.scan import DiagramMode, find_edge, record_for, start_ray
from wsvoronoi.tradeoff import (
    Batch,
    BigCellTable,
    TrackedSite,
    batch_diagram,
    batches,
    find_big_cells,
    find_edges_batched,
    hull_stream,
    iter_big_big,
    iter_small_incident,
    run_tradeoff,
)

N, F = DiagramMode.NEAREST, DiagramMode.FARTHEST


def run(sites, mode, s, enforce=True):
    arena = ReadOnlyArena(sites)
    sink = OutputSink()
    ledger = WorkLedger(64 * s, enforcing=enforce)
    run_tradeoff(arena, mode, s, sink, ledger)
    return arena, sink, ledger


def naive_hull(P):
    pts = [p.ipt for p in P]
    start = min(range(len(pts)), key=lambda i: pts[i])
    hull = [start]
    while True:
        a = hull[-1]
        cand = None
        for j in range(len(pts)):
            if j == a:
                continue
            if cand is None or exact.orient_ipts(pts[a], pts[cand], pts[j]) > 0:
                cand = j
        if cand == start:
            return hull
        hull.append(cand)


class TestBatches:
    def test_partition(self):
        bs = batches(10, 4)
        assert bs == [Batch(0, 4), Batch(4, 4), Batch(8, 2)]


class TestBatchDiagram:
    def test_triangle(self):
        mem = [(p.index, p.ipt) for p in triangle()]
        d = batch_diagram(mem, N)
        assert len(d.edges) == 3

    def test_matches_oracle_on_subset(self):
        P = random_sites(12, 811)
        mem = [(p.index, p.ipt) for p in P]
        for mode, k in ((N, 1), (F, 11)):
            d = batch_diagram(mem, mode)
            got = {r.undirected_key() for r in d.undirected_records(P[0].scale, 12)}
            assert got == oracle_vdk(P, k).undirected_keys()

    def test_single_site(self):
        d = batch_diagram([(0, (3, 4))], N)
        assert d.edges == []


class TestFindEdgesBatched:
    def test_single_slot_equals_find_edge(self):
        P = triangle()
        arena = ReadOnlyArena(P)
        ray = start_ray(arena, 0, N)
        slot = TrackedSite(0, (0, 0), ray)
        [edge] = find_edges_batched(arena, [slot], N, 1)
        direct = find_edge(ReadOnlyArena(P), 0, ray, N)
        assert record_for(arena, edge, N) == record_for(arena, direct, N)

    def test_batched_equals_sequential(self):
        P = random_sites(16, 812)
        arena = ReadOnlyArena(P)
        slots = []
        for i in range(4):
            ray = start_ray(arena, i, N)
            slots.append(TrackedSite(i, arena.read(i).ipt, ray))
        edges = find_edges_batched(arena, slots, N, 4)
        for i, edge in enumerate(edges):
            direct = find_edge(ReadOnlyArena(P), i, start_ray(ReadOnlyArena(P), i, N), N)
            assert record_for(arena, edge, N) == record_for(arena, direct, N)

    def test_whole_input_in_one_batch(self):
        P = random_sites(6, 813)
        arena = ReadOnlyArena(P)
        slots = [TrackedSite(i, arena.read(i).ipt, start_ray(arena, i, N)) for i in range(6)]
        edges = find_edges_batched(arena, slots, N, 8)
        assert len(edges) == 6


class TestBigCellTable:
    def test_small_input_completes(self):
        arena = ReadOnlyArena(triangle())
        assert len(find_big_cells(arena, N, 8)) == 0

    def test_bounded_by_s(self):
        P = random_sites(16, 814)
        arena = ReadOnlyArena(P)
        assert len(find_big_cells(arena, N, 4)) <= 4

    def test_farthest_big_cells_are_hull_sites(self):
        P = random_sites(16, 815)
        arena = ReadOnlyArena(P)
        table = find_big_cells(arena, F, 4)
        hull = set(naive_hull(P))
        assert set(table.indices) <= hull


class TestPhases:
    def test_empty_table_reduces_to_index_dedup(self):
        arena = ReadOnlyArena(triangle())
        edges = list(iter_small_incident(arena, N, 8, BigCellTable([])))
        assert len(edges) == 3

    def test_phases_disjoint_union(self):
        P = random_sites(16, 816)
        for mode, k in ((N, 1), (F, 15)):
            arena = ReadOnlyArena(P)
            table = find_big_cells(arena, mode, 4)
            small = {
                record_for(arena, e, mode).undirected_key()
                for e in iter_small_incident(arena, mode, 4, table)
            }
            big = {
                record_for(arena, e, mode).undirected_key()
                for e in iter_big_big(arena, mode, 4, table)
            }
            assert small.isdisjoint(big)
            assert small | big == oracle_vdk(P, k).undirected_keys()

    def test_big_big_empty_for_tiny_table(self):
        arena = ReadOnlyArena(triangle())
        assert list(iter_big_big(arena, N, 8, BigCellTable([0]))) == []


class TestHullStream:
    def test_triangle_clockwise(self):
        arena = ReadOnlyArena(triangle())
        assert list(hull_stream(arena, 2)) == naive_hull(triangle())

    @pytest.mark.parametrize("s", [1, 2, 3, 5, 12])
    def test_matches_naive(self, s):
        for seed in range(6):
            P = random_sites(12, 820 + seed)
            arena = ReadOnlyArena(P)
            assert list(hull_stream(arena, s)) == naive_hull(P)

    def test_convex_position_visits_all(self):
        import math
        import random

        from wsvoronoi.geometry import site_set

        rng = random.Random(9)
        pts = []
        for i in range(14):
            ang = 2 * math.pi * i / 14 + rng.random() * 0.1
            pts.append((int(10**7 * math.cos(ang)), int(10**7 * math.sin(ang))))
        P = site_set(pts)
        arena = ReadOnlyArena(P)
        got = list(hull_stream(arena, 4))
        assert sorted(got) == list(range(14))


class TestRunTradeoff:
    @pytest.mark.parametrize("s", [1, 2, 8])
    def test_triangle_any_s(self, s):
        for mode, k in ((N, 1), (F, 2)):
            _, sink, _ = run(triangle(), mode, s)
            assert {r.undirected_key() for r in sink.records} == oracle_vdk(triangle(), k).undirected_keys()

    def test_canonical_set_invariant_in_s(self):
        P = random_sites(32, 830)
        want = oracle_vdk(P, 1).undirected_keys()
        for s in (1, 4, 8, 32):
            _, sink, _ = run(P, N, s)
            got = {r.undirected_key() for r in sink.records}
            assert len(got) == len(sink.records), f"duplicates at s={s}"
            assert got == want, f"edge set changed at s={s}"

    def test_farthest_matches_oracle(self):
        P = random_sites(32, 831)
        _, sink, _ = run(P, F, 8)
        report = verify_run(sink.records, oracle_vdk(P, 31), 31)
        assert report.ok, report.summary()

    def test_reads_decrease_with_s(self):
        P = random_sites(96, 832)
        reads = []
        for s in (4, 8, 16, 32, 64):
            arena, _, _ = run(P, N, s, enforce=False)
            reads.append(arena.read_count)
        for a, b in zip(reads, reads[1:]):
            assert b <= 2 * a, "reads should trend downward in s"
        assert reads[-1] < reads[0]

    def test_ledger_within_linear_budget(self):
        P = random_sites(48, 833)
        for s in (1, 2, 4, 16, 48):
            _, _, ledger = run(P, N, s)
            assert ledger.peak_words <= 64 * s

    def test_read_counts_reproducible(self):
        P = random_sites(24, 834)
        r1, _, _ = run(P, N, 6)
        r2, _, _ = run(P, N, 6)
        assert r1.read_count == r2.read_count
