"""Runtime enforcement of the bounded-workspace execution model.

Three pieces: a read-only instrumented input arena, a word-count ledger
for intermediate storage, and a write-once output sink.  A "word" holds one
semantic unit (a site index, one coordinate, one table entry field);
temporaries inside a single predicate evaluation are covered by the fixed
per-operation constants the algorithms charge.
"""

from __future__ import annotations

from contextlib import contextmanager
from typing import Optional, Sequence

from .geometry import Site

#: Default multiplier: a run with parameter s may hold BUDGET_CONST * s words.
#: Overridable via the VW_BUDGET_CONST environment variable in the CLI.
BUDGET_CONST = 64


class ModelViolation(Exception):
    """An algorithm exceeded its workspace budget in enforcing mode."""


class SequencingError(Exception):
    """Output records arrived out of diagram order, or after close."""


class ReadOnlyArena:
    """Immutable site array with a count of every element access."""

    __slots__ = ("_sites", "read_count", "scale")

    def __init__(self, sites: Sequence[Site]):
        self._sites = tuple(sites)
        if not self._sites:
            raise ValueError("empty arena")
        self.scale = self._sites[0].scale
        self.read_count = 0

    def __len__(self) -> int:
        return len(self._sites)

    def read(self, i: int) -> Site:
        if not 0 <= i < len(self._sites):
            raise IndexError(f"arena index {i} out of range 0..{len(self._sites) - 1}")
        self.read_count += 1
        return self._sites[i]


class WorkLedger:
    """Accounts every word of intermediate storage an algorithm uses.

    In enforcing mode a charge that would push the live count above the
    budget aborts the run; in observing mode only the peak is recorded.
    """

    __slots__ = ("budget_words", "live_words", "peak_words", "enforcing")

    def __init__(self, budget_words: int, enforcing: bool = True):
        if budget_words <= 0:
            raise ValueError("budget must be positive")
        self.budget_words = budget_words
        self.live_words = 0
        self.peak_words = 0
        self.enforcing = enforcing

    def alloc(self, words: int) -> None:
        if words < 0:
            raise ValueError("cannot charge negative words")
        self.live_words += words
        if self.live_words > self.peak_words:
            self.peak_words = self.live_words
        if self.enforcing and self.live_words > self.budget_words:
            raise ModelViolation(
                f"workspace exceeded: {self.live_words} words live, budget {self.budget_words}"
            )

    def release(self, words: int) -> None:
        if words < 0 or words > self.live_words:
            raise ValueError("release does not match an allocation")
        self.live_words -= words

    @contextmanager
    def scope(self, words: int):
        """Charge `words` for the duration of the with-block."""
        self.alloc(words)
        try:
            yield self
        finally:
            self.release(words)


def observing_ledger() -> WorkLedger:
    """Ledger that never aborts; used for calibration benchmarks."""
    return WorkLedger(budget_words=1, enforcing=False)


class OutputSink:
    """Append-only record stream; algorithms can never read it back.

    Records must arrive grouped by nondecreasing diagram order k.  A
    `writer` callable, when given, receives each record as it is emitted
    (the CLI uses this to stream lines to a file); `keep=True` additionally
    retains records in memory for post-hoc verification by the oracle
    tooling, which is outside the workspace model.
    """

    __slots__ = ("emitted_count", "_last_k", "_writer", "_records", "_closed")

    def __init__(self, writer=None, keep: bool = True):
        self.emitted_count = 0
        self._last_k: Optional[int] = None
        self._writer = writer
        self._records = [] if keep else None
        self._closed = False

    def emit(self, record) -> None:
        if self._closed:
            raise SequencingError("emit on a closed sink")
        k = record.k
        if self._last_k is not None and k < self._last_k:
            raise SequencingError(f"diagram order regressed from {self._last_k} to {k}")
        self._last_k = k
        self.emitted_count += 1
        if self._writer is not None:
            self._writer(record)
        if self._records is not None:
            self._records.append(record)

    def close(self) -> None:
        self._closed = True

    @property
    def records(self):
        """Post-run access for verification; not available to algorithms."""
        if self._records is None:
            raise RuntimeError("sink did not keep records")
        return tuple(self._records)
