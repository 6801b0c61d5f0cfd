"""Instrumentation overhead measurement.

Each non-crashing case runs N times as written and N times instrumented
with repair idle; the report compares mean wall-clock times. The
self-comparison case times the identical program on both sides, bounding
timer noise.
"""

from __future__ import annotations

import gc
import time
from dataclasses import dataclass, field

from ..errors import CorpusError
from ..minij import combine
from ..runtime import prepare, run_prepared
from .corpus import Corpus, CorpusCase, check_case_integrity

DEFAULT_REPETITIONS = 10


@dataclass
class OverheadCase:
    name: str
    original_ms: float
    transformed_ms: float
    reps: int

    @property
    def overhead_pct(self) -> float:
        if self.original_ms == 0:
            return 0.0
        return (self.transformed_ms - self.original_ms) / self.original_ms * 100.0


@dataclass
class OverheadReport:
    cases: list[OverheadCase] = field(default_factory=list)


def _mean_runtime_ms(prepared, reps: int) -> float:
    # One untimed warmup run levels caches between the two sides; garbage
    # collection is paused so earlier allocations cannot bill one side.
    if run_prepared(prepared).crashed:
        raise CorpusError("overhead cases must not crash")
    gc.collect()
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        total = 0.0
        for _ in range(reps):
            start = time.perf_counter()
            result = run_prepared(prepared)
            total += time.perf_counter() - start
            if result.crashed:
                raise CorpusError("overhead cases must not crash")
        return total / reps * 1000.0
    finally:
        if was_enabled:
            gc.enable()


def measure_overhead(corpus: Corpus, repetitions: int = DEFAULT_REPETITIONS,
                     cases: list[CorpusCase] | None = None) -> OverheadReport:
    report = OverheadReport()
    selected = cases if cases is not None else [
        c for c in corpus.cases if c.expect_kind == "output"]
    for case in selected:
        check_case_integrity(case)
        app, drivers = case.load_units()
        merged = combine(*app, *drivers)
        original = prepare([merged], entry=case.entry)
        if "self-compare" in case.tags:
            transformed = prepare([merged], entry=case.entry)
        else:
            transformed = prepare([merged], entry=case.entry, instrument=True)
        original_ms = _mean_runtime_ms(original, repetitions)
        transformed_ms = _mean_runtime_ms(transformed, repetitions)
        report.cases.append(OverheadCase(case.name, original_ms,
                                         transformed_ms, repetitions))
    return report
