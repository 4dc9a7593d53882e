"""Benchmark harness: read counts and workspace peaks across parameters.

Rows measure the observable model costs (arena reads, peak ledger words)
plus wall time; the first two are deterministic for a fixed input and
seed, wall time is informational.  The ledger runs in observing mode so
large parameter sweeps never abort.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Sequence

from .memory import BUDGET_CONST, OutputSink, ReadOnlyArena, observing_ledger
from .pipeline import PipelineConfig, pipeline_run
from .scan import DiagramMode, enumerate_diagram
from .tradeoff import run_tradeoff

CSV_HEADER = "n,s,K,reads,peak_words,wall_ns"


@dataclass(frozen=True)
class BenchRow:
    n: int
    s: int
    K: int
    reads: int
    peak_words: int
    wall_ns: int

    def csv(self) -> str:
        return f"{self.n},{self.s},{self.K},{self.reads},{self.peak_words},{self.wall_ns}"


def measure_tradeoff(sites, s: int, mode: DiagramMode = DiagramMode.NEAREST) -> BenchRow:
    arena = ReadOnlyArena(sites)
    ledger = observing_ledger()
    sink = OutputSink(keep=False)
    t0 = time.perf_counter_ns()
    run_tradeoff(arena, mode, s, sink, ledger)
    wall = time.perf_counter_ns() - t0
    return BenchRow(len(sites), s, 1, arena.read_count, ledger.peak_words, wall)


def measure_scan(sites, mode: DiagramMode = DiagramMode.NEAREST) -> BenchRow:
    """Constant-workspace run; reported with s = 0 to mark the mode."""
    arena = ReadOnlyArena(sites)
    ledger = observing_ledger()
    sink = OutputSink(keep=False)
    t0 = time.perf_counter_ns()
    enumerate_diagram(arena, mode, sink, ledger)
    wall = time.perf_counter_ns() - t0
    return BenchRow(len(sites), 0, 1, arena.read_count, ledger.peak_words, wall)


def measure_pipeline(sites, s: int, K: int) -> BenchRow:
    arena = ReadOnlyArena(sites)
    ledger = observing_ledger()
    sink = OutputSink(keep=False)
    t0 = time.perf_counter_ns()
    pipeline_run(arena, PipelineConfig(K=K, s=s), sink, ledger)
    wall = time.perf_counter_ns() - t0
    return BenchRow(len(sites), s, K, arena.read_count, ledger.peak_words, wall)


def bench_table(
    sites,
    s_list: Sequence[int],
    k_list: Optional[Sequence[int]] = None,
    repeats: int = 1,
    mode: DiagramMode = DiagramMode.NEAREST,
) -> list[BenchRow]:
    rows: list[BenchRow] = []
    for _ in range(repeats):
        for s in s_list:
            if k_list:
                for K in k_list:
                    rows.append(measure_pipeline(sites, s, K))
            elif s == 0:
                rows.append(measure_scan(sites, mode))
            else:
                rows.append(measure_tradeoff(sites, s, mode))
    return rows


def format_csv(rows: Sequence[BenchRow]) -> str:
    out = [f"# budget_const={BUDGET_CONST}", CSV_HEADER]
    out.extend(row.csv() for row in rows)
    return "\n".join(out) + "\n"
