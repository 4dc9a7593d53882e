"""The ledger in action: every intermediate word is charged and bounded.

In enforcing mode a run that would outgrow its budget aborts with a model
violation instead of silently using more memory; in observing mode the
same run completes and reports its true peak, which is how the budget for
a configuration is calibrated in the first place.
"""

from wsvoronoi.datagen import random_sites
from wsvoronoi.memory import ModelViolation, OutputSink, ReadOnlyArena, WorkLedger, observing_ledger
from wsvoronoi.scan import DiagramMode
from wsvoronoi.tradeoff import run_tradeoff

P = random_sites(64, seed=3)
s = 16

ledger = observing_ledger()
run_tradeoff(ReadOnlyArena(P), DiagramMode.NEAREST, s, OutputSink(keep=False), ledger)
peak = ledger.peak_words
print(f"observing run at s={s}: peak {peak} words")

generous = WorkLedger(peak, enforcing=True)
run_tradeoff(ReadOnlyArena(P), DiagramMode.NEAREST, s, OutputSink(keep=False), generous)
print(f"enforcing run with budget {peak}: completed, peak {generous.peak_words}")

tight = WorkLedger(peak // 2, enforcing=True)
try:
    run_tradeoff(ReadOnlyArena(P), DiagramMode.NEAREST, s, OutputSink(keep=False), tight)
    print("unexpectedly completed")
except ModelViolation as e:
    print(f"enforcing run with budget {peak // 2}: aborted as it should ({e})")
