"""Seeded-failure campaign.

Protocol: remove every syntactic null check from the application files
(never from the test files), instrument the application, then run each test
entry. The removed checks make latent null values flow into dereferences,
so tests fail with NullPointerExceptions (or assertion errors); the
per-strategy repair matrix is then computed over the NPE failures.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import CorpusError
from ..minij import combine
from ..minij.ast import ProgramAst
from ..runtime import DEFAULT_DEPTH_BUDGET, prepare, run_prepared
from ..runtime.strategies import STRATEGY_IDS
from ..transform import SeedReport, seed_remove_null_checks
from .corpus import parse_file
from .matrix import OutcomeMatrix, strategy_cells


@dataclass
class TestOutcome:
    name: str
    status: str  # "pass" | "npe" | "assertion" | "other"
    exception: str | None = None


@dataclass
class CampaignResult:
    project: str
    seed_report: SeedReport
    tests: list[TestOutcome] = field(default_factory=list)
    matrix: OutcomeMatrix | None = None

    @property
    def failing_npe(self) -> int:
        return sum(1 for t in self.tests if t.status == "npe")

    @property
    def failing_assertion(self) -> int:
        return sum(1 for t in self.tests if t.status == "assertion")

    @property
    def union_repair_rate(self) -> float:
        """Percentage of NPE failures repaired by at least one strategy."""
        if self.matrix is None or not self.matrix.case_names:
            return 0.0
        return 100.0 * self.matrix.union / len(self.matrix.case_names)

    def to_record(self) -> dict:
        return {
            "project": self.project,
            "removed_checks": self.seed_report.count,
            "tests": [{"name": t.name, "status": t.status,
                       "exception": t.exception} for t in self.tests],
            "failing_npe": self.failing_npe,
            "failing_assertion": self.failing_assertion,
            "union_repaired": self.matrix.union if self.matrix else 0,
            "union_repair_rate_pct": round(self.union_repair_rate, 1),
        }


def run_seeding_campaign(project_dir: str | Path,
                         strategies: tuple[str, ...] = STRATEGY_IDS,
                         depth: int = DEFAULT_DEPTH_BUDGET) -> CampaignResult:
    project_dir = Path(project_dir)
    app_files = sorted((project_dir / "app").glob("*.mj"))
    test_files = sorted((project_dir / "tests").glob("*.mj"))
    if not app_files or not test_files:
        raise CorpusError(f"{project_dir} needs app/*.mj and tests/*.mj")

    report = SeedReport()
    seeded_app: list[ProgramAst] = []
    for path in app_files:
        seeded, file_report = seed_remove_null_checks(parse_file(path))
        report.merge(file_report)
        seeded_app.append(seeded)

    result = CampaignResult(project=project_dir.name, seed_report=report)
    failing: list[Path] = []
    for path in test_files:
        test_unit = parse_file(path)
        prepared = prepare([combine(*seeded_app, test_unit)])
        outcome = run_prepared(prepared)
        if outcome.status == "normal" and not outcome.assertion_failed:
            status: tuple[str, str | None] = ("pass", None)
        elif outcome.status == "NullPointerException":
            status = ("npe", outcome.status)
            failing.append(path)
        elif outcome.status == "AssertionError" or outcome.assertion_failed:
            status = ("assertion", outcome.status)
        else:
            status = ("other", outcome.status)
        result.tests.append(TestOutcome(path.stem, status[0], status[1]))

    matrix = OutcomeMatrix(corpus=project_dir.name, strategies=strategies)
    for path in failing:
        cells = strategy_cells(seeded_app, [parse_file(path)], None,
                               strategies, depth)
        matrix.case_names.append(path.stem)
        matrix.cells[path.stem] = cells
    result.matrix = matrix
    return result


def load_inventory(project_dir: str | Path) -> dict:
    """The hand-counted null-check inventory committed with the project."""
    path = Path(project_dir) / "inventory.json"
    return json.loads(path.read_text(encoding="utf-8"))
