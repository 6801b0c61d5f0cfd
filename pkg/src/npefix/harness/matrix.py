"""Per-strategy outcome matrices.

Each crashing corpus case is run once per strategy in fixed mode and the
result is classified into exactly one outcome code:

==== ==========================================================
OK   the run exits normally with all assertions passing
NoV  no compatible non-null value was available for reuse
NoI  no instance of a compatible type could be manufactured
RI   the strategy is incompatible with the method's return type
US   the dereference happens on an unskippable statement
NPE  the strategy applied but a later null dereference crashed
Ex   the strategy applied but another exception (or assertion
     failure) followed
==== ==========================================================
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from ..errors import CorpusError
from ..minij.ast import ProgramAst
from ..runtime import (
    DEFAULT_DEPTH_BUDGET, Strategy, make_controller, prepare, prepare_split,
    run_prepared,
)
from ..runtime.interpreter import ExecutionResult
from ..runtime.strategies import STRATEGY_IDS
from .corpus import Corpus, CorpusCase, check_case_integrity

OUTCOME_CODES = ("OK", "NoV", "NoI", "RI", "US", "NPE", "Ex")
UNAPPLICABLE_REASONS = ("NoV", "NoI", "RI", "US")


def classify(result: ExecutionResult) -> str:
    """Map one fixed-strategy run onto the outcome taxonomy."""
    relevant = [ev for ev in result.events if ev.event in ("try", "exhausted")]
    applications = [ev for ev in relevant if ev.event == "try"]
    if result.status == "normal" and not result.assertion_failed:
        if not applications:
            raise CorpusError("run exited normally without applying a strategy")
        return "OK"
    last = relevant[-1] if relevant else None
    if result.status == "NullPointerException":
        if last is not None and last.event == "exhausted" \
                and last.reason in UNAPPLICABLE_REASONS:
            return last.reason
        return "NPE"
    return "Ex"


def strategy_cells(app_units: list[ProgramAst], driver_units: list[ProgramAst],
                   entry: str | None, strategies: tuple[str, ...] = STRATEGY_IDS,
                   depth: int = DEFAULT_DEPTH_BUDGET) -> dict[str, str]:
    """Run one case under every strategy; application units instrumented,
    drivers left as-is."""
    prepared = prepare_split(app_units, driver_units, entry=entry)
    cells: dict[str, str] = {}
    for sid in strategies:
        controller = make_controller("fixed", strategy=Strategy(sid),
                                     depth=depth, site_types=prepared.site_types)
        result = run_prepared(prepared, controller)
        cells[sid] = classify(result)
    return cells


@dataclass
class OutcomeMatrix:
    corpus: str
    strategies: tuple[str, ...]
    case_names: list[str] = field(default_factory=list)
    cells: dict[str, dict[str, str]] = field(default_factory=dict)

    def success_count(self, case_name: str) -> int:
        return sum(1 for code in self.cells[case_name].values() if code == "OK")

    @property
    def totals(self) -> dict[str, int]:
        return {sid: sum(1 for name in self.case_names
                         if self.cells[name][sid] == "OK")
                for sid in self.strategies}

    @property
    def union(self) -> int:
        return sum(1 for name in self.case_names if self.success_count(name) > 0)

    def codes_present(self) -> set[str]:
        return {code for row in self.cells.values() for code in row.values()}


def run_matrix(corpus: Corpus, strategies: tuple[str, ...] = STRATEGY_IDS,
               depth: int = DEFAULT_DEPTH_BUDGET, jobs: int = 1,
               cases: list[CorpusCase] | None = None) -> OutcomeMatrix:
    """|corpus| x |strategies| fixed-strategy executions.

    Every case must crash uninstrumented with an uncaught
    NullPointerException; anything else is a corpus integrity error.
    """
    selected = cases if cases is not None else corpus.cases
    for case in selected:
        if case.expect_kind != "crash" or case.expect_exception != "NullPointerException":
            raise CorpusError(
                f"case '{case.name}' is not a NullPointerException crash case")
        check_case_integrity(case)

    def cells_for(case: CorpusCase) -> dict[str, str]:
        app, drivers = case.load_units()
        return strategy_cells(app, drivers, case.entry, strategies, depth)

    matrix = OutcomeMatrix(corpus=corpus.name, strategies=strategies)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(cells_for, selected))
    else:
        results = [cells_for(case) for case in selected]
    for case, cells in zip(selected, results):
        matrix.case_names.append(case.name)
        matrix.cells[case.name] = cells
    return matrix
