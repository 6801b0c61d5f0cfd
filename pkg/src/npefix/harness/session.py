"""Exploration sessions: repeated failing runs until deployment.

A session re-invokes the failing entry, letting the controller draw untried
strategy candidates, until a run succeeds (the winning strategies are
deployed and rendered as patch suggestions) or a run makes no new attempt
(exhaustion: the program crashes exactly as it would uninstrumented).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..minij import combine
from ..minij.ast import ProgramAst
from ..minij.typecheck import typecheck
from ..runtime import (
    DEFAULT_DEPTH_BUDGET, PatchSuggestion, make_controller, prepare_split,
    run_prepared, suggest_patch,
)
from ..runtime.controller import RepairController

MAX_SESSION_RUNS = 500


@dataclass
class SessionRun:
    index: int
    status: str
    new_tries: int
    draws_total: int


@dataclass
class ExplorationSession:
    name: str
    seed: int
    runs: list[SessionRun] = field(default_factory=list)
    outcome: str = "exhausted"  # "deployed" | "exhausted"
    deployments: dict[str, str] = field(default_factory=dict)
    suggestions: list[PatchSuggestion] = field(default_factory=list)
    controller: RepairController | None = None
    prepared: object = None  # the instrumented program, for replay checks

    def log_lines(self) -> list[str]:
        lines = self.controller.log_lines() if self.controller else []
        for suggestion in self.suggestions:
            lines.append(json.dumps({"event": "patch", **suggestion.to_record()},
                                    sort_keys=True))
        return lines

    def to_record(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "outcome": self.outcome,
            "runs": [{"index": r.index, "status": r.status,
                      "new_tries": r.new_tries} for r in self.runs],
            "deployments": self.deployments,
            "patches": [s.to_record() for s in self.suggestions],
            "log": [json.loads(line) for line in self.log_lines()],
        }


def run_exploration_session(app_units: list[ProgramAst],
                            driver_units: list[ProgramAst],
                            entry: str | None, seed: int,
                            depth: int = DEFAULT_DEPTH_BUDGET,
                            name: str = "session",
                            max_runs: int = MAX_SESSION_RUNS) -> ExplorationSession:
    prepared = prepare_split(app_units, driver_units, entry=entry)
    controller = make_controller("explore", seed=seed, depth=depth,
                                 site_types=prepared.site_types)
    session = ExplorationSession(name=name, seed=seed, controller=controller,
                                 prepared=prepared)

    # Patch rendering needs the original (uninstrumented) program.
    original = combine(*app_units, *driver_units)
    original_table = typecheck(original)

    for index in range(max_runs):
        seen = len(controller.events)
        result = run_prepared(prepared, controller)
        new_events = controller.events[seen:]
        new_tries = sum(1 for ev in new_events if ev.event == "try")
        session.runs.append(SessionRun(index, result.status, new_tries,
                                       controller.draw_count))
        if result.succeeded:
            session.outcome = "deployed"
            for key, strategy in sorted(controller.deployments().items()):
                session.deployments[key] = str(strategy)
                session.suggestions.append(
                    suggest_patch(original, key, strategy, original_table))
            break
        if new_tries == 0:
            # Fixpoint: nothing new was attempted, so every future run
            # would crash identically.
            session.outcome = "exhausted"
            break
    return session
